"""Ball statistics of sampled complexes and their comparison reports.

A sampled complex is viewed as the bipartite containment graph whose small
side is every size-k subset of {1..n} and whose big side is the sample's
size-(k+1) faces.  Balls around small roots are extracted by BFS, reduced
to canonical codes, and tabulated into histograms that are compared against
the closed-form limit law, the exhaustive finite-n oracle, or exact kernel
marginals.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb, sqrt

from .boundary import projection_kernel, reduced_boundary_matrix
from .complexes import HypertreeSample, faces_from_ranks
from .enumeration import exact_distribution
from .errors import BudgetExceededError
from .exactla import SnfResult, det_bareiss, smith_normal_form
from .faces import Face, all_faces, colex_rank, colex_unrank, subfaces, superfaces
from .histograms import BallHistogram
from .rngstreams import trial_rng
from .sampler import HypertreeSampler, sample_spanning_tree
from .treestats import (
    RootedTree,
    canonical_code_graph,
    canonical_code_tree,
    limit_ball_table,
    star_tree,
)

QUENCHED_ROOT_CAP = 10**5


@dataclass(frozen=True)
class RootedBall:
    """Induced ball of the containment graph around a small root."""

    n: int
    k: int
    r: int
    root: Face
    vertices: tuple[Face, ...]  # BFS order, root first
    edges: tuple[tuple[int, int], ...]  # local indices
    code: str
    is_tree: bool

    @property
    def small_count(self) -> int:
        return sum(1 for f in self.vertices if len(f) == self.k)


class SampleGraph:
    """Containment adjacency of one sampled complex, reused across roots."""

    def __init__(self, sample: HypertreeSample):
        self.n = sample.n
        self.k = sample.k
        self.faces = sample.faces
        self.by_small: dict[Face, list[Face]] = defaultdict(list)
        for big in sample.faces:
            for small in subfaces(big):
                self.by_small[small].append(big)

    def root_degree(self, root: Face) -> int:
        return len(self.by_small.get(root, ()))

    def ball(self, root: Face, r: int) -> RootedBall:
        if r % 2:
            raise ValueError("ball depth must be even")
        dist = {root: 0}
        order = [root]
        frontier = [root]
        for d in range(r):
            nxt = []
            for v in frontier:
                nbrs = self.by_small.get(v, ()) if len(v) == self.k else subfaces(v)
                for u in nbrs:
                    if u not in dist:
                        dist[u] = d + 1
                        order.append(u)
                        nxt.append(u)
            frontier = nxt
        index = {f: i for i, f in enumerate(order)}
        edges = []
        for f in order:
            if len(f) == self.k + 1:
                i = index[f]
                for small in subfaces(f):
                    j = index.get(small)
                    if j is not None:
                        edges.append((min(i, j), max(i, j)))
        edges = sorted(set(edges))
        is_tree = len(edges) == len(order) - 1
        if is_tree:
            code = _tree_code_from_edges(len(order), edges)
        else:
            adj = [set() for _ in order]
            for a, b in edges:
                adj[a].add(b)
                adj[b].add(a)
            code = canonical_code_graph(adj, root=0)
        return RootedBall(
            self.n, self.k, r, root, tuple(order), tuple(edges), code, is_tree
        )


def _tree_code_from_edges(n: int, edges) -> str:
    # vertices arrive in BFS order from the root, so parents precede children
    parents = [-1] * n
    for a, b in edges:
        parents[b] = a
    return canonical_code_tree(RootedTree(tuple(parents)))


def extract_ball(sample: HypertreeSample, root, r: int) -> RootedBall:
    return SampleGraph(sample).ball(tuple(root), r)


def star_code(k: int, d: int) -> str:
    """Canonical code of the depth-2 ball with root degree d (d=0: lone root)."""
    return canonical_code_tree(star_tree(k, d))


# -- samplers as interchangeable draw functions ------------------------------


def resolve_method(k: int, method: str) -> str:
    if method == "auto":
        return "wilson" if k == 1 else "dpp"
    if method not in ("dpp", "wilson"):
        raise ValueError(f"unknown sampling method {method!r}")
    if method == "wilson" and k != 1:
        raise ValueError("the spanning-tree sampler only applies to k = 1")
    return method


def _make_drawer(n: int, k: int, method: str, mode: str):
    method = resolve_method(k, method)
    if method == "wilson":
        return lambda seed, stream: sample_spanning_tree(n, seed, stream)
    sampler = HypertreeSampler(n, k, mode=mode)
    return lambda seed, stream: sampler.draw(trial_rng(seed, stream))


# -- annealed statistics ------------------------------------------------------


def _annealed_worker(args) -> dict:
    n, k, r, seed, start, count, roots_per_trial, method, mode = args
    drawer = _make_drawer(n, k, method, mode)
    roots_all = all_faces(n, k)
    hist = BallHistogram(k, r, n)
    for t in range(start, start + count):
        sample = drawer(seed, t)
        graph = SampleGraph(sample)
        if roots_per_trial == "all":
            roots = roots_all
        else:
            rng = trial_rng(seed + 0x9E3779B9, t)  # root stream, independent of draws
            idx = rng.integers(0, len(roots_all), size=roots_per_trial)
            roots = [roots_all[i] for i in idx]
        for root in roots:
            if r == 2:
                hist.add(star_code(k, graph.root_degree(root)), is_tree=True)
            else:
                ball = graph.ball(root, r)
                hist.add(ball.code, ball.is_tree)
    return hist.to_jsonable()


def annealed_histogram(
    n: int,
    k: int,
    r: int,
    trials: int,
    seed: int,
    roots_per_trial: int | str = 1,
    method: str = "auto",
    mode: str = "auto",
    threads: int = 1,
) -> BallHistogram:
    """Ball-code histogram over independent samples and independent roots."""
    if roots_per_trial != "all" and int(roots_per_trial) < 1:
        raise ValueError("roots_per_trial must be >= 1 or 'all'")
    jobs = []
    chunk = (trials + threads - 1) // threads if threads > 1 else trials
    for start in range(0, trials, chunk):
        jobs.append(
            (n, k, r, seed, start, min(chunk, trials - start), roots_per_trial, method, mode)
        )
    if threads <= 1:
        parts = [_annealed_worker(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(_annealed_worker, jobs))
    out = BallHistogram(k, r, n)
    for part in parts:
        out = out.merge(BallHistogram.from_jsonable(part))
    return out


def exact_annealed_distribution(n: int, k: int, r: int) -> dict[str, Fraction]:
    """Exact annealed ball-code law at tiny (n, k): the full enumeration
    pushed forward over every root."""
    dist = exact_distribution(n, k)
    roots = all_faces(n, k)
    denom = dist.denominator * len(roots)
    acc: dict[str, int] = defaultdict(int)
    for key, h in dist.weights.items():
        weight = h * h
        sample = HypertreeSample(n, k, faces_from_ranks(n, k, key), h)
        graph = SampleGraph(sample)
        if r == 2:
            degs = Counter(graph.root_degree(root) for root in roots)
            for d, cnt in degs.items():
                acc[star_code(k, d)] += weight * cnt
        else:
            for root in roots:
                acc[graph.ball(root, r).code] += weight
    return {code: Fraction(v, denom) for code, v in acc.items()}


def kernel_degree_distribution(n: int, k: int) -> dict[str, Fraction]:
    """Exact depth-2 ball law from kernel marginals via inclusion-exclusion
    over the root's n-k candidate big faces; independent of enumeration."""
    kern = projection_kernel(n, k, mode="exact")
    root = tuple(range(1, k + 1))
    nbrs = [colex_rank(f) for f in superfaces(root, n)]
    m = len(nbrs)
    e = [Fraction(0)] * (m + 1)
    e[0] = Fraction(1)
    for j in range(1, m + 1):
        e[j] = sum(kern.submatrix_det(s) for s in combinations(nbrs, j))
    out = {}
    for d in range(0, m + 1):
        p = sum((-1) ** (j - d) * comb(j, d) * e[j] for j in range(d, m + 1))
        out[star_code(k, d)] = p
    total = sum(out.values())
    if total != 1:
        raise AssertionError(f"degree law sums to {total}")
    return out


# -- quenched statistics ------------------------------------------------------


def quenched_fractions(
    n: int,
    k: int,
    r: int,
    target_code: str,
    trials: int,
    seed: int,
    method: str = "auto",
    mode: str = "auto",
    root_cap: int = QUENCHED_ROOT_CAP,
) -> list[float]:
    """Per-trial fraction of ALL roots whose ball matches the target code."""
    n_roots = comb(n, k)
    if n_roots > root_cap:
        raise BudgetExceededError(
            f"quenched scan needs {n_roots} roots (> cap {root_cap})", count=n_roots
        )
    drawer = _make_drawer(n, k, method, mode)
    roots = all_faces(n, k)
    out = []
    for t in range(trials):
        graph = SampleGraph(drawer(seed, t))
        if r == 2:
            hits = sum(
                1 for root in roots if star_code(k, graph.root_degree(root)) == target_code
            )
        else:
            hits = sum(1 for root in roots if graph.ball(root, r).code == target_code)
        out.append(hits / n_roots)
    return out


# -- homology structure -------------------------------------------------------


def sample_homology(sample: HypertreeSample) -> tuple[int, SnfResult]:
    """(|det| of the reduced submatrix, Smith normal form) for one sample."""
    reduced = reduced_boundary_matrix(sample.n, sample.k)
    sub = reduced.column_submatrix(sample.faces).tolist()
    det = abs(det_bareiss(sub))
    snf = smith_normal_form(sub)
    return det, snf


def abelian_p_group_aut_order(p: int, partition) -> int:
    """|Aut| of the abelian p-group with the given exponent partition."""
    e = sorted(partition)
    m = len(e)
    if m == 0:
        return 1
    d = [max(l + 1 for l in range(m) if e[l] == e[idx]) for idx in range(m)]
    c = [min(l + 1 for l in range(m) if e[l] == e[idx]) for idx in range(m)]
    out = 1
    for idx in range(m):
        out *= p ** d[idx] - p ** idx
    for idx in range(m):
        out *= p ** (e[idx] * (m - d[idx]))
    for idx in range(m):
        out *= p ** ((e[idx] - 1) * (m - c[idx] + 1))
    return out


def cohen_lenstra_mass(p: int, partition, terms: int = 64) -> float:
    u = 1.0
    for i in range(1, terms + 1):
        u *= 1.0 - p ** (-i)
    return u / abelian_p_group_aut_order(p, partition)


def cohen_lenstra_report(
    n: int, k: int, p: int, trials: int, seed: int, mode: str = "auto"
) -> dict:
    """Frequencies of p-Sylow types of sampled homology groups, next to the
    heuristic prediction mass for each observed type."""
    sampler = HypertreeSampler(n, k, mode=mode)
    counts: Counter[tuple[int, ...]] = Counter()
    orders: Counter[int] = Counter()
    for t in range(trials):
        sample = sampler.draw(trial_rng(seed, t))
        det, snf = sample_homology(sample)
        if snf.group_order() != det:
            raise AssertionError(
                f"SNF order {snf.group_order()} != |det| {det} on trial {t}"
            )
        counts[snf.prime_exponents(p)] += 1
        orders[det] += 1
    rows = []
    for partition, cnt in sorted(counts.items(), key=lambda kv: (-kv[1], kv[0])):
        label = "+".join(map(str, partition)) if partition else "trivial"
        rows.append(
            {
                "partition": label,
                "group_order": p ** sum(partition),
                "count": cnt,
                "frequency": cnt / trials,
                "heuristic": cohen_lenstra_mass(p, partition),
            }
        )
    return {
        "n": n,
        "k": k,
        "p": p,
        "trials": trials,
        "sampler_mode": sampler.mode,
        "rows": rows,
        "heuristic_trivial": cohen_lenstra_mass(p, ()),
        "homology_orders": {str(o): c for o, c in sorted(orders.items())},
    }


# -- comparison reports -------------------------------------------------------

Z_EXPECTED_COUNT_MIN = 25
Z_FAIL_THRESHOLD = 4.0


def compare_report(hist: BallHistogram, baseline: dict[str, float | Fraction]) -> dict:
    """Per-shape table of empirical vs predicted ball frequencies.

    z-scores use the binomial normal approximation at the predicted
    probability; shapes whose expected count falls below 25 are excluded
    from pass/fail but still reported and still count toward the distance.
    """
    total = hist.total
    freqs = hist.frequencies()
    codes = sorted(set(freqs) | set(baseline), key=lambda c: (-float(baseline.get(c, 0)), c))
    rows = []
    tv = 0.0
    max_abs_z = 0.0
    for code in codes:
        p = float(baseline.get(code, 0.0))
        emp = freqs.get(code, 0.0)
        count = round(emp * total)
        expected = p * total
        tv += abs(emp - p)
        z = None
        evaluated = bool(expected >= Z_EXPECTED_COUNT_MIN and 0.0 < p < 1.0)
        if evaluated:
            z = (count - expected) / sqrt(total * p * (1.0 - p))
            max_abs_z = max(max_abs_z, abs(z))
        rows.append(
            {
                "code": code,
                "count": count,
                "empirical": emp,
                "predicted": p,
                "z": z,
                "expected_count": expected,
                "evaluated": evaluated,
            }
        )
    non_tree_mass = hist.non_tree_count / total if total else 0.0
    return {
        "k": hist.k,
        "r": hist.r,
        "n": hist.n,
        "observations": total,
        "rows": rows,
        "tv_distance": tv / 2.0,
        "max_abs_z": max_abs_z,
        "non_tree_mass": non_tree_mass,
        "baseline_mass": float(sum(float(v) for v in baseline.values())),
        "passed": max_abs_z <= Z_FAIL_THRESHOLD,
    }


def report_text_table(report: dict, max_rows: int = 25) -> str:
    lines = [
        f"n={report['n']} k={report['k']} r={report['r']} "
        f"observations={report['observations']}",
        f"TV distance: {report['tv_distance']:.5f}   "
        f"max |z|: {report['max_abs_z']:.2f}   "
        f"non-tree mass: {report['non_tree_mass']:.5f}",
        f"{'code':<40} {'count':>8} {'empirical':>10} {'predicted':>10} {'z':>7}",
    ]
    for row in report["rows"][:max_rows]:
        z = f"{row['z']:+.2f}" if row["z"] is not None else "-"
        code = row["code"] if len(row["code"]) <= 40 else row["code"][:37] + "..."
        lines.append(
            f"{code:<40} {row['count']:>8} {row['empirical']:>10.5f} "
            f"{row['predicted']:>10.5f} {z:>7}"
        )
    if len(report["rows"]) > max_rows:
        lines.append(f"... {len(report['rows']) - max_rows} more shapes")
    return "\n".join(lines)


def limit_baseline(k: int, r: int, max_children: int = 10) -> dict[str, float]:
    return limit_ball_table(k, r, max_children=max_children)


def oracle_baseline(n: int, k: int, r: int) -> dict[str, Fraction]:
    return exact_annealed_distribution(n, k, r)


def kernel_baseline(n: int, k: int, r: int) -> dict[str, Fraction]:
    if r != 2:
        raise ValueError("kernel marginal predictions cover depth 2 only")
    return kernel_degree_distribution(n, k)


def random_root(n: int, k: int, rng) -> Face:
    return colex_unrank(int(rng.integers(0, comb(n, k))), k)
