"""Rooted-tree statistics: canonical forms, automorphisms, matchings, and
the closed-form ball probabilities of the skeleton-tree limit.

Trees live as parent arrays (vertex 0 is the root, parents[i] < i).  The
limit law of a depth-r ball around the root is

    covering_matchings * (k!)^{odd vertices} * exp(-k * inner even vertices)
    -----------------------------------------------------------------------
                         automorphism count

where "covering matchings" cover every vertex at depth < r and "inner even
vertices" counts even-level vertices at depth < r.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations_with_replacement
from math import exp, factorial

from .faces import Face, subfaces, superfaces, validate_face


@dataclass(frozen=True)
class RootedTree:
    """Rooted tree as a parent array; parents[0] == -1, parents[i] < i."""

    parents: tuple[int, ...]

    def __post_init__(self):
        p = self.parents
        if not p or p[0] != -1:
            raise ValueError("parents[0] must be -1 (the root)")
        for i in range(1, len(p)):
            if not 0 <= p[i] < i:
                raise ValueError(f"parents[{i}]={p[i]} must point to an earlier vertex")

    def __len__(self) -> int:
        return len(self.parents)

    @cached_property
    def children(self) -> tuple[tuple[int, ...], ...]:
        out = [[] for _ in self.parents]
        for v in range(1, len(self.parents)):
            out[self.parents[v]].append(v)
        return tuple(tuple(c) for c in out)

    @cached_property
    def levels(self) -> tuple[int, ...]:
        lvl = [0] * len(self.parents)
        for v in range(1, len(self.parents)):
            lvl[v] = lvl[self.parents[v]] + 1
        return tuple(lvl)

    @property
    def depth(self) -> int:
        return max(self.levels)

    def odd_vertices(self) -> list[int]:
        return [v for v, l in enumerate(self.levels) if l % 2 == 1]

    def even_vertices_below(self, level: int) -> list[int]:
        return [v for v, l in enumerate(self.levels) if l % 2 == 0 and l <= level]


def tree_from_parents(parents) -> RootedTree:
    return RootedTree(tuple(int(p) for p in parents))


def star_tree(k: int, d: int) -> RootedTree:
    """Depth-2 shape: root with d children, each with k leaf children."""
    parents = [-1] + [0] * d
    for mid in range(1, d + 1):
        parents.extend([mid] * k)
    return RootedTree(tuple(parents))


def check_semi_kary(tree: RootedTree, k: int) -> None:
    """Every odd-level vertex must have exactly k children; depth must be even."""
    if tree.depth % 2:
        raise ValueError(f"depth {tree.depth} is odd")
    for v in tree.odd_vertices():
        if len(tree.children[v]) != k:
            raise ValueError(
                f"odd-level vertex {v} has {len(tree.children[v])} children, wants {k}"
            )


# -- canonical codes ---------------------------------------------------------


def canonical_code_tree(tree: RootedTree) -> str:
    """Bottom-up canonical code (sorted child codes); rooted-iso complete."""
    code = [""] * len(tree)
    for v in range(len(tree) - 1, -1, -1):
        code[v] = "(" + "".join(sorted(code[c] for c in tree.children[v])) + ")"
    return "T:" + code[0]


def _normalize(keys) -> list[int]:
    order = {key: i for i, key in enumerate(sorted(set(keys)))}
    return [order[key] for key in keys]


def _refine(colors: list[int], adj) -> list[int]:
    while True:
        keys = [
            (colors[v], tuple(sorted(colors[u] for u in adj[v])))
            for v in range(len(colors))
        ]
        new = _normalize(keys)
        if new == colors:
            return new
        colors = new


def canonical_code_graph(adj, root: int = 0) -> str:
    """Canonical code of a connected rooted graph.

    Color refinement seeded by distance from the root, with full
    individualization backtracking on ties; the code is the minimal
    relabelled edge list, so equal codes mean rooted-isomorphic.
    """
    n = len(adj)
    dist = [-1] * n
    dist[root] = 0
    queue = deque([root])
    while queue:
        v = queue.popleft()
        for u in adj[v]:
            if dist[u] < 0:
                dist[u] = dist[v] + 1
                queue.append(u)
    if min(dist) < 0:
        raise ValueError("graph is disconnected")
    edges = sorted(
        (min(u, v), max(u, v)) for v in range(n) for u in adj[v] if u > v
    )
    if len(edges) == n - 1:
        # trees take the fast path; BFS re-rooting preserves the structure
        order = [root] + [v for v in sorted(range(n), key=lambda v: dist[v]) if v != root]
        pos = {v: i for i, v in enumerate(order)}
        parents = [-1] * n
        for a, b in edges:
            lo, hi = (a, b) if dist[a] < dist[b] else (b, a)
            parents[pos[hi]] = pos[lo]
        return canonical_code_tree(RootedTree(tuple(parents)))

    best: tuple | None = None

    def search(colors: list[int]) -> None:
        nonlocal best
        colors = _refine(colors, adj)
        groups = defaultdict(list)
        for v, c in enumerate(colors):
            groups[c].append(v)
        target = min((c for c, vs in groups.items() if len(vs) > 1), default=None)
        if target is None:
            relabel = sorted(
                (min(colors[a], colors[b]), max(colors[a], colors[b])) for a, b in edges
            )
            cand = tuple(relabel)
            if best is None or cand < best:
                best = cand
            return
        for v in groups[target]:
            keys = [(colors[u], 0 if u == v else 1) for u in range(n)]
            search(_normalize(keys))

    search(_normalize(dist))
    return "G:%d;%s" % (n, ",".join(f"{a}-{b}" for a, b in best))


# -- automorphisms and matchings ---------------------------------------------


def automorphism_count(tree: RootedTree) -> int:
    """Order of the rooted automorphism group."""
    code = [""] * len(tree)
    aut = [1] * len(tree)
    for v in range(len(tree) - 1, -1, -1):
        child_codes = sorted(code[c] for c in tree.children[v])
        code[v] = "(" + "".join(child_codes) + ")"
        total = 1
        for c in tree.children[v]:
            total *= aut[c]
        run = 1
        for i in range(1, len(child_codes) + 1):
            if i < len(child_codes) and child_codes[i] == child_codes[i - 1]:
                run += 1
            else:
                total *= factorial(run)
                run = 1
        aut[v] = total
    return aut[0]


def covering_matching_count(tree: RootedTree, required) -> int:
    """Number of matchings of the tree covering every `required` vertex.

    Post-order DP with two states per vertex: matched to a child, or left
    unmatched (its own cover requirement, if any, then falls to the parent).
    """
    need = set(required)
    unmatched = [0] * len(tree)  # v unmatched; all required strictly below covered
    matched = [0] * len(tree)  # v matched to one of its children
    for v in range(len(tree) - 1, -1, -1):
        kids = tree.children[v]
        closed = []
        for c in kids:
            ok_free = 0 if c in need else unmatched[c]
            closed.append(matched[c] + ok_free)
        prod = 1
        for x in closed:
            prod *= x
        unmatched[v] = prod
        total = 0
        for i, c in enumerate(kids):
            rest = 1
            for j, x in enumerate(closed):
                if j != i:
                    rest *= x
            total += unmatched[c] * rest
        matched[v] = total
    root_free = 0 if 0 in need else unmatched[0]
    return matched[0] + root_free


def limit_ball_terms(tree: RootedTree, k: int):
    """(covering matchings, odd count, inner even count, automorphisms)."""
    check_semi_kary(tree, k)
    r = tree.depth
    required = [v for v, l in enumerate(tree.levels) if l <= r - 1]
    m_star = covering_matching_count(tree, required)
    odd_count = len(tree.odd_vertices())
    covered_even = len(tree.even_vertices_below(r - 1))
    inner_even = len(tree.even_vertices_below(r - 2))
    # even depth means no even-level vertex sits at depth r-1
    assert covered_even == inner_even
    return m_star, odd_count, inner_even, automorphism_count(tree)


def limit_ball_probability(tree: RootedTree, k: int, ball_depth: int | None = None) -> float:
    """Limit probability that the depth-r ball around the root is this shape.

    With ball_depth given, shapes shallower than the ball window get
    probability 0 (the window is filled almost surely); deeper is an error.
    """
    if ball_depth is not None:
        if ball_depth % 2:
            raise ValueError("ball depth must be even")
        if tree.depth > ball_depth:
            raise ValueError(f"tree depth {tree.depth} exceeds ball depth {ball_depth}")
        if tree.depth < ball_depth:
            check_semi_kary(tree, k)
            return 0.0
    m_star, odd_count, inner_even, aut = limit_ball_terms(tree, k)
    return m_star * factorial(k) ** odd_count * exp(-k * inner_even) / aut


# -- shape enumeration for limit tables --------------------------------------


def enumerate_ball_shapes(k: int, depth: int, max_children: int = 8) -> list[RootedTree]:
    """All semi-k-ary shapes of exactly the given (even) depth, with even-level
    child counts capped at max_children.  Shapes are duplicate-free."""
    if depth % 2:
        raise ValueError("depth must be even")

    def even_shapes(budget: int):
        if budget == 0:
            return [()]
        subs = odd_shapes(budget)
        out = []
        for c in range(0, max_children + 1):
            out.extend(
                tuple(sorted(combo))
                for combo in combinations_with_replacement(subs, c)
            )
        return sorted(set(out))

    def odd_shapes(budget: int):
        evens = even_shapes(budget - 2)
        return sorted(
            tuple(sorted(combo)) for combo in combinations_with_replacement(evens, k)
        )

    def build(shape, parents, parent):
        me = len(parents)
        parents.append(parent)
        for sub in shape:
            build(sub, parents, me)

    out = []
    for shape in even_shapes(depth):
        parents: list[int] = []
        build(shape, parents, -1)
        tree = RootedTree(tuple(parents))
        if tree.depth == depth:
            out.append(tree)
    return out


def limit_ball_table(k: int, depth: int, max_children: int = 8) -> dict[str, float]:
    """Canonical code -> limit probability for depth-exactly-r shapes."""
    table = {}
    for tree in enumerate_ball_shapes(k, depth, max_children):
        table[canonical_code_tree(tree)] = limit_ball_probability(tree, k)
    return table


# -- finite-n proper subtrees -------------------------------------------------


@dataclass(frozen=True)
class ProperSubtree:
    """An induced subtree of the containment graph that keeps, for every big
    face it contains, all of that face's small neighbors."""

    n: int
    k: int
    big_faces: tuple[Face, ...]
    small_faces: tuple[Face, ...]

    @classmethod
    def from_big_faces(cls, n: int, k: int, big_faces) -> "ProperSubtree":
        bigs = tuple(sorted({tuple(f) for f in big_faces}, key=lambda f: f[::-1]))
        smalls: set[Face] = set()
        for x in bigs:
            validate_face(x, n, k + 1)
            smalls.update(subfaces(x))
        return cls(n, k, bigs, tuple(sorted(smalls, key=lambda f: f[::-1])))

    @classmethod
    def single_small(cls, n: int, k: int, small) -> "ProperSubtree":
        return cls(n, k, (), (validate_face(small, n, k),))

    def __post_init__(self):
        smalls = set(self.small_faces)
        for x in self.big_faces:
            for y in subfaces(x):
                if y not in smalls:
                    raise ValueError(f"big face {x} is missing its neighbor {y}")
        verts, edges = self._graph()
        if len(edges) != len(verts) - 1 or not self._connected(verts, edges):
            raise ValueError("faces do not induce a tree")

    def _graph(self):
        verts = list(self.small_faces) + list(self.big_faces)
        smalls = set(self.small_faces)
        edges = [
            (y, x) for x in self.big_faces for y in subfaces(x) if y in smalls
        ]
        return verts, edges

    @staticmethod
    def _connected(verts, edges) -> bool:
        if len(verts) <= 1:
            return True
        adj = defaultdict(list)
        for a, b in edges:
            adj[a].append(b)
            adj[b].append(a)
        seen = {verts[0]}
        queue = deque([verts[0]])
        while queue:
            v = queue.popleft()
            for u in adj[v]:
                if u not in seen:
                    seen.add(u)
                    queue.append(u)
        return len(seen) == len(verts)

    def as_rooted_tree(self, root: Face | None = None):
        """(RootedTree, face list in BFS order); odd levels are one color class."""
        if root is None:
            root = self.small_faces[0] if self.small_faces else self.big_faces[0]
        verts, edges = self._graph()
        adj = defaultdict(list)
        for a, b in edges:
            adj[a].append(b)
            adj[b].append(a)
        order = [root]
        parents = [-1]
        seen = {root}
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for u in sorted(adj[v], key=lambda f: (len(f), f[::-1])):
                if u not in seen:
                    seen.add(u)
                    parents.append(order.index(v))
                    order.append(u)
                    queue.append(u)
        return RootedTree(tuple(parents)), order

    def degree(self, small: Face) -> int:
        return sum(1 for x in self.big_faces if set(small) <= set(x))


def subtree_inclusion_probability(subtree: ProperSubtree) -> Fraction:
    """Exact probability that the subtree's big faces all appear in a sample:
    (covering matchings of the big side) / n^{#big faces}."""
    tree, order = subtree.as_rooted_tree()
    big = set(subtree.big_faces)
    required = [i for i, f in enumerate(order) if f in big]
    m = covering_matching_count(tree, required)
    return Fraction(m, subtree.n ** len(subtree.big_faces))


def matching_extension_count(sub: ProperSubtree, sup: ProperSubtree, matching) -> int:
    """Number of complete matchings of `sup` extending a complete matching of `sub`.

    Closed form: uncovered small vertices contribute d*k^(d-1) + k^d where d
    is their degree gain, covered ones contribute k^d.
    """
    if sub.n != sup.n or sub.k != sup.k:
        raise ValueError("subtree pair must share (n, k)")
    if not set(sub.big_faces) <= set(sup.big_faces):
        raise ValueError("first subtree is not contained in the second")
    small_set = set(sub.small_faces)
    for x in set(sup.big_faces) - set(sub.big_faces):
        if not any(y in small_set for y in subfaces(x)):
            raise ValueError(f"new big face {x} has no neighbor in the base subtree")
    pairs = {(tuple(a), tuple(b)) for a, b in matching}
    used: set[Face] = set()
    for y, x in pairs:
        if y not in small_set or x not in set(sub.big_faces) or set(y) - set(x):
            raise ValueError(f"({y}, {x}) is not an edge of the base subtree")
        if y in used or x in used:
            raise ValueError("matching reuses a vertex")
        used.add(y)
        used.add(x)
    if not set(sub.big_faces) <= used:
        raise ValueError("matching does not cover every big face of the base")
    k = sub.k
    total = 1
    for y in sub.small_faces:
        gain = sup.degree(y) - sub.degree(y)
        if y in used:
            total *= k**gain
        else:
            total *= (gain * k ** (gain - 1) if gain else 0) + k**gain
    return total


# -- induced embedding counts -------------------------------------------------


def count_rooted_embeddings(tree: RootedTree, k: int, n: int) -> int:
    """Induced embeddings of a semi-k-ary tree into the containment graph of
    {1..n}, root pinned to the face (1..k).  Counts maps, so the value is
    (automorphisms) x (induced copies)."""
    check_semi_kary(tree, k)
    images: list[Face | None] = [None] * len(tree)
    images[0] = tuple(range(1, k + 1))
    levels = tree.levels

    def compatible(v: int, face: Face) -> bool:
        for u in range(len(tree)):
            other = images[u]
            if u == v or other is None:
                continue
            if other == face:
                return False
            adjacent_l = (
                len(face) != len(other)
                and set(min(face, other, key=len)) <= set(max(face, other, key=len))
            )
            adjacent_t = tree.parents[v] == u or tree.parents[u] == v
            if adjacent_l != adjacent_t:
                return False
        return True

    def rec(v: int) -> int:
        if v == len(tree):
            return 1
        parent_face = images[tree.parents[v]]
        options = (
            superfaces(parent_face, n) if levels[v] % 2 else subfaces(parent_face)
        )
        total = 0
        for face in options:
            if compatible(v, face):
                images[v] = face
                total += rec(v + 1)
                images[v] = None
        return total

    return rec(1) if len(tree) > 1 else 1
