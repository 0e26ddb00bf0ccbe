from math import exp, factorial

import numpy as np
import pytest

from hypertree.enumeration import inclusion_probability
from hypertree.treestats import (
    ProperSubtree,
    automorphism_count,
    canonical_code_graph,
    canonical_code_tree,
    check_semi_kary,
    count_rooted_embeddings,
    covering_matching_count,
    enumerate_ball_shapes,
    limit_ball_probability,
    limit_ball_table,
    matching_extension_count,
    star_tree,
    subtree_inclusion_probability,
    tree_from_parents,
)

from oracles import (
    all_matchings,
    covering_matching_count_brute,
    grow_random_proper_subtree,
    parents_to_adj,
    random_connected_adj,
    random_rooted_tree_parents,
    relabel_adj,
    rooted_isomorphic_brute,
    rooted_isomorphic_nx,
)


def tree_edges(parents):
    return [(parents[v], v) for v in range(1, len(parents))]


# -- canonical codes ----------------------------------------------------------


def test_single_vertex_code():
    assert canonical_code_tree(tree_from_parents([-1])) == "T:()"


def test_tree_code_invariant_under_relabelling():
    rng = np.random.default_rng(17)
    for _ in range(100):
        n = int(rng.integers(2, 10))
        parents = random_rooted_tree_parents(rng, n)
        adj = parents_to_adj(parents)
        shuffled = relabel_adj(adj, rng)
        assert canonical_code_graph(adj) == canonical_code_graph(shuffled)


def test_code_distinguishes_star_and_path():
    star = star_tree(1, 3)
    path = tree_from_parents([-1, 0, 1, 2])
    assert canonical_code_tree(star) != canonical_code_tree(path)


def test_tree_code_completeness_small():
    # all rooted trees on <= 7 vertices: equal codes <=> brute-force isomorphic
    rng = np.random.default_rng(4)
    trees = [random_rooted_tree_parents(rng, int(rng.integers(2, 8))) for _ in range(60)]
    for i in range(0, len(trees), 3):
        for j in range(i, min(i + 3, len(trees))):
            a, b = parents_to_adj(trees[i]), parents_to_adj(trees[j])
            same_code = canonical_code_graph(a) == canonical_code_graph(b)
            assert same_code == rooted_isomorphic_brute(a, b)


def test_graph_code_completeness_vs_vf2_up_to_9_vertices():
    rng = np.random.default_rng(23)
    for n in range(3, 10):
        for trial in range(12):
            a = random_connected_adj(rng, n, extra_edges=int(rng.integers(0, 3)))
            if trial % 2:
                b = relabel_adj(a, rng)  # guaranteed isomorphic pairs
            else:
                b = random_connected_adj(rng, n, extra_edges=int(rng.integers(0, 3)))
            same_code = canonical_code_graph(a) == canonical_code_graph(b)
            assert same_code == rooted_isomorphic_nx(a, b)
            if n <= 7:
                assert same_code == rooted_isomorphic_brute(a, b)


def test_graph_code_depends_on_root():
    path_end = [{1}, {0, 2}, {1}]
    path_mid = [{1, 2}, {0}, {0}]
    assert canonical_code_graph(path_end) != canonical_code_graph(path_mid)


def test_graph_code_rejects_disconnected():
    with pytest.raises(ValueError):
        canonical_code_graph([{1}, {0}, set()])


# -- automorphisms ------------------------------------------------------------


def count_automorphisms_brute(parents):
    adj = parents_to_adj(parents)
    n = len(parents)
    from itertools import permutations

    edges = {(min(a, b), max(a, b)) for a, b in tree_edges(parents)}
    count = 0
    for perm in permutations(range(1, n)):
        mapping = (0,) + perm
        mapped = {
            (min(mapping[a], mapping[b]), max(mapping[a], mapping[b])) for a, b in edges
        }
        if mapped == edges:
            count += 1
    return count


def test_automorphism_count_vs_brute():
    rng = np.random.default_rng(6)
    for _ in range(40):
        parents = random_rooted_tree_parents(rng, int(rng.integers(1, 8)))
        assert automorphism_count(tree_from_parents(parents)) == count_automorphisms_brute(
            parents
        )


def test_automorphism_star():
    for d in (1, 2, 3):
        for k in (1, 2):
            assert automorphism_count(star_tree(k, d)) == factorial(d) * factorial(k) ** d


# -- matchings ----------------------------------------------------------------


def test_matching_dp_vs_brute_on_random_trees():
    rng = np.random.default_rng(11)
    for _ in range(20):
        n = int(rng.integers(2, 13))
        parents = random_rooted_tree_parents(rng, n)
        tree = tree_from_parents(parents)
        edges = tree_edges(parents)
        required = [v for v in range(n) if rng.random() < 0.4]
        assert covering_matching_count(tree, required) == covering_matching_count_brute(
            edges, required
        )


def test_matching_counts_on_stars():
    for d in (1, 2, 3):
        for k in (1, 2, 3):
            tree = star_tree(k, d)
            odd = tree.odd_vertices()
            inner = [v for v, l in enumerate(tree.levels) if l <= 1]
            assert covering_matching_count(tree, odd) == k**d + d * k ** (d - 1)
            assert covering_matching_count(tree, inner) == d * k ** (d - 1)
    assert covering_matching_count(tree_from_parents([-1]), []) == 1


def test_at_most_one_complete_matching_per_cover_set():
    # complete matchings of a proper subtree are determined by their cover set
    rng = np.random.default_rng(14)
    for _ in range(10):
        sub = grow_random_proper_subtree(rng, 6, 2, int(rng.integers(1, 4)))
        tree, order = sub.as_rooted_tree()
        bigs = {i for i, f in enumerate(order) if len(f) == 3}
        edges = tree_edges(tree.parents)
        seen = set()
        for matching in all_matchings(edges):
            covered = set()
            for a, b in matching:
                covered.update((a, b))
            if bigs <= covered:
                key = frozenset(covered - bigs)
                assert key not in seen, "two complete matchings share a cover set"
                seen.add(key)


# -- limit formula -------------------------------------------------------------


def test_limit_probability_examples():
    assert limit_ball_probability(tree_from_parents([-1]), 2) == 1.0
    for d in (1, 2, 3):
        for k in (1, 2):
            got = limit_ball_probability(star_tree(k, d), k)
            want = k ** (d - 1) * exp(-k) / factorial(d - 1)
            assert got == pytest.approx(want, rel=1e-12)
    assert limit_ball_probability(star_tree(1, 1), 1) == pytest.approx(exp(-1))


def test_limit_probability_shallow_shapes_get_zero():
    assert limit_ball_probability(tree_from_parents([-1]), 1, ball_depth=2) == 0.0
    with pytest.raises(ValueError):
        limit_ball_probability(star_tree(1, 2), 1, ball_depth=0)


def test_semi_kary_validation():
    bad = tree_from_parents([-1, 0, 1, 1])  # odd-level vertex with 2 children at k=1
    with pytest.raises(ValueError):
        check_semi_kary(bad, 1)
    with pytest.raises(ValueError):
        check_semi_kary(tree_from_parents([-1, 0]), 1)  # odd depth


def test_shape_enumeration_mass():
    for k in (1, 2):
        table = limit_ball_table(k, 2, max_children=12)
        assert sum(table.values()) >= 0.9999
    shapes = enumerate_ball_shapes(1, 2, max_children=5)
    assert len(shapes) == 5  # stars with d = 1..5


def test_shape_enumeration_codes_unique():
    shapes = enumerate_ball_shapes(1, 4, max_children=4)
    codes = [canonical_code_tree(t) for t in shapes]
    assert len(codes) == len(set(codes))


# -- proper subtrees -----------------------------------------------------------


def test_single_small_probability_one():
    sub = ProperSubtree.single_small(5, 2, (1, 2))
    assert subtree_inclusion_probability(sub) == 1


def test_proper_subtree_requires_closure():
    with pytest.raises(ValueError):
        ProperSubtree(5, 2, ((1, 2, 3),), ((1, 2), (1, 3)))  # (2,3) missing


def test_proper_subtree_rejects_disconnected():
    with pytest.raises(ValueError):
        ProperSubtree.from_big_faces(6, 2, [(1, 2, 3), (4, 5, 6)])


def test_subtree_probability_matches_oracle():
    rng = np.random.default_rng(3)
    for n, k in [(5, 2), (6, 2)]:
        for size in (1, 2):
            sub = grow_random_proper_subtree(rng, n, k, size)
            assert subtree_inclusion_probability(sub) == inclusion_probability(
                n, k, sub.big_faces
            )


def test_extension_count_identity_cases():
    single = ProperSubtree.from_big_faces(5, 2, [(1, 2, 3)])
    assert matching_extension_count(single, single, [((1, 2), (1, 2, 3))]) == 1
    base = ProperSubtree.single_small(5, 2, (1, 2))
    ext = ProperSubtree.from_big_faces(5, 2, [(1, 2, 3)])
    assert matching_extension_count(base, ext, []) == 1 + 2


def test_extension_count_vs_brute_force():
    # summed over complete matchings of the base, extensions count the
    # complete matchings of the larger subtree
    rng = np.random.default_rng(21)
    done = 0
    while done < 20:
        n, k = (6, 2) if done % 2 else (7, 2)
        base = grow_random_proper_subtree(rng, n, k, int(rng.integers(1, 3)))
        # grow the superset from the base
        from hypertree.faces import all_faces, subfaces

        bigs = set(base.big_faces)
        smalls = set(base.small_faces)
        cands = [
            x
            for x in all_faces(n, k + 1)
            if x not in bigs and sum(1 for y in subfaces(x) if y in smalls) == 1
        ]
        if not cands:
            continue
        extra = [cands[int(i)] for i in rng.choice(len(cands), size=min(2, len(cands)), replace=False)]
        try:
            sup = ProperSubtree.from_big_faces(n, k, list(bigs) + extra)
        except ValueError:
            continue
        # brute-force complete matchings on both trees
        def complete_matchings(sub):
            tree, order = sub.as_rooted_tree()
            bigset = {i for i, f in enumerate(order) if len(f) == k + 1}
            out = []
            for matching in all_matchings(tree_edges(tree.parents)):
                covered = set()
                for a, b in matching:
                    covered.update((a, b))
                if bigset <= covered:
                    out.append(
                        frozenset(
                            (order[min(a, b, key=lambda v: len(order[v]))], order[max(a, b, key=lambda v: len(order[v]))])
                            for a, b in matching
                        )
                    )
            return out

        base_matchings = complete_matchings(base)
        total = sum(
            matching_extension_count(base, sup, list(m)) for m in base_matchings
        )
        tree, order = sup.as_rooted_tree()
        bigset = [i for i, f in enumerate(order) if len(f) == k + 1]
        assert total == covering_matching_count(tree, bigset)
        done += 1


def test_embedding_counts_for_stars():
    for k, d, n in [(1, 1, 5), (1, 2, 6), (2, 1, 6), (2, 2, 7)]:
        cnt = count_rooted_embeddings(star_tree(k, d), k, n)
        want = factorial(k) ** d
        for j in range(d):
            want *= n - k - j
        assert cnt == want


def test_embedding_density_bounds_and_trend():
    # |Aut| * copies / n^{odd} must climb toward (k!)^{odd} within the
    # lower/upper factorial bounds
    for k, d in [(1, 2), (2, 2)]:
        tree = star_tree(k, d)
        aut = automorphism_count(tree)
        ratios = []
        for n in range(k + d + 1, 9):
            cnt = count_rooted_embeddings(tree, k, n)
            lower = factorial(k) ** d
            for j in range(d):
                lower *= n - k - j
            assert lower <= cnt <= factorial(k) ** d * n**d
            ratios.append(cnt / n**d)
        assert ratios == sorted(ratios), "density should increase with n"
        assert ratios[-1] <= factorial(k) ** d
