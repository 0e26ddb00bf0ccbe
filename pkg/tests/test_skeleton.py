from math import exp

import pytest
from scipy import stats

from hypertree.histograms import BallHistogram
from hypertree.rngstreams import trial_rng
from hypertree.skeleton import (
    _poisson_cdf,
    ball_distribution_mc,
    draw_poisson,
    generate_skeleton_ball,
)
from hypertree.treestats import limit_ball_table


def test_poisson_cdf_thresholds_monotone():
    for k in (1, 2, 3):
        cdf = _poisson_cdf(k)
        assert all(a < b for a, b in zip(cdf, cdf[1:]))
        assert cdf[-1] <= 1 << 256


def test_poisson_moments():
    rng = trial_rng(1, 0)
    draws = [draw_poisson(2, rng) for _ in range(20000)]
    mean = sum(draws) / len(draws)
    assert abs(mean - 2) < 0.05
    p0 = draws.count(0) / len(draws)
    assert abs(p0 - exp(-2)) < 0.01


def test_depth_zero_ball():
    ball = generate_skeleton_ball(2, 0, trial_rng(0, 0))
    assert ball.parents == (-1,)
    assert ball.matched_edges == frozenset()


def test_odd_depth_rejected():
    with pytest.raises(ValueError):
        generate_skeleton_ball(2, 3, trial_rng(0, 0))


def test_depth_cap():
    with pytest.raises(ValueError):
        generate_skeleton_ball(2, 10, trial_rng(0, 0))


def test_structure_invariants():
    for t in range(50):
        ball = generate_skeleton_ball(2, 4, trial_rng(9, t))
        tree = ball.tree()
        # odd-level vertices below the cut have exactly k children
        for v in tree.odd_vertices():
            if tree.levels[v] < 4:
                assert len(tree.children[v]) == 2
        # the matching covers everything strictly inside the ball
        covered = set()
        for a, b in ball.matched_edges:
            assert tree.parents[b] == a
            assert a not in covered and b not in covered
            covered.update((a, b))
        inner = {v for v, l in enumerate(tree.levels) if l <= 3}
        assert inner <= covered


def test_root_child_count_law():
    # the root is unmatched, so P(exactly one child) = P(Poisson(k) = 0)
    for k in (1, 2):
        ones = 0
        N = 20000
        for t in range(N):
            ball = generate_skeleton_ball(k, 2, trial_rng(33, t))
            ones += ball.child_counts[0] == 1
        z = (ones / N - exp(-k)) / (exp(-k) * (1 - exp(-k)) / N) ** 0.5
        assert abs(z) < 4, (k, ones / N)


def test_grimmett_root_degree_chi_square():
    # k = 1: root child count is 1 + Poisson(1); chi-square at 0.001
    N = 20000
    counts = {}
    for t in range(N):
        c = generate_skeleton_ball(1, 2, trial_rng(8, t)).child_counts[0]
        counts[c] = counts.get(c, 0) + 1
    cap = 8
    observed = [counts.get(d, 0) for d in range(1, cap)]
    observed.append(N - sum(observed))
    probs = [exp(-1) / _fact(d - 1) for d in range(1, cap)]
    probs.append(1 - sum(probs))
    chi = stats.chisquare(observed, [p * N for p in probs])
    assert chi.pvalue > 0.001


def _fact(j):
    out = 1
    for i in range(2, j + 1):
        out *= i
    return out


def test_ball_histogram_merge_matches_single_run():
    a = ball_distribution_mc(1, 2, 500, seed=5)
    b = BallHistogram.from_jsonable(a.to_jsonable())
    assert a.counts == b.counts
    h1 = ball_distribution_mc(1, 2, 300, seed=5)
    # streams 300.. of the same seed: regenerate manually and merge
    h2 = BallHistogram(1, 2, None)
    for t in range(300, 500):
        ball = generate_skeleton_ball(1, 2, trial_rng(5, t))
        h2.add(ball.code(), True)
    merged = h1.merge(h2)
    assert merged.counts == a.counts
    assert merged.total == a.total


def test_threaded_histogram_identical():
    a = ball_distribution_mc(2, 2, 800, seed=3, threads=1)
    b = ball_distribution_mc(2, 2, 800, seed=3, threads=3)
    assert a.counts == b.counts and a.total == b.total


def test_first_child_rule_gives_same_law():
    # matching the first child instead of a uniform one must not change
    # the unordered ball law
    N = 100_000
    uniform = ball_distribution_mc(2, 2, N, seed=12, matching_rule="uniform")
    first = ball_distribution_mc(2, 2, N, seed=13, matching_rule="first")
    codes = set(uniform.counts) | set(first.counts)
    tv = 0.5 * sum(
        abs(uniform.counts.get(c, 0) - first.counts.get(c, 0)) / N for c in codes
    )
    assert tv < 0.01


def test_mc_against_limit_quick():
    hist = ball_distribution_mc(2, 2, 10000, seed=2)
    table = limit_ball_table(2, 2, max_children=12)
    freqs = hist.frequencies()
    for code, p in table.items():
        if p * hist.total < 25:
            continue
        z = (freqs.get(code, 0.0) - p) / (p * (1 - p) / hist.total) ** 0.5
        assert abs(z) < 4.5, (code, freqs.get(code), p)
