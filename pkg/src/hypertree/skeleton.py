"""Level-by-level generation of the skeleton-tree ball with its matching.

Rules per vertex: even-level vertices get Poisson(k) children if already
matched and 1+Poisson(k) otherwise, odd-level vertices get exactly k; any
vertex still unmatched picks a uniformly random child and matches it.
Vertices at the truncation depth get no children and their matching
decisions stay pending, which is enough because ball statistics only
constrain the matching strictly inside the ball.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .histograms import BallHistogram
from .rngstreams import trial_rng, uniform_u128
from .treestats import RootedTree, canonical_code_tree

POISSON_TERMS = 50
DEFAULT_MAX_DEPTH = 8


_CDF_SCALE = 1 << 256


@lru_cache(maxsize=None)
def _poisson_cdf(k: int) -> tuple[int, ...]:
    """CDF thresholds of Poisson(k) scaled to 256-bit integers, tail folded
    at 50 terms.

    The thresholds come from arbitrary-precision partial sums (e^k via a
    300-term Taylor sum); rounding to 2^-256 sits far below the 2^-128
    resolution of the uniform variates, so draws are deterministic and
    platform-independent.
    """
    e_k = sum(Fraction(k**j, _factorial(j)) for j in range(300))
    acc = Fraction(0)
    out = []
    for i in range(POISSON_TERMS):
        acc += Fraction(k**i, _factorial(i))
        out.append(int(acc / e_k * _CDF_SCALE))
    return tuple(out)


@lru_cache(maxsize=None)
def _factorial(j: int) -> int:
    return 1 if j < 2 else j * _factorial(j - 1)


def draw_poisson(k: int, rng: np.random.Generator) -> int:
    u = uniform_u128(rng) << 128
    for i, threshold in enumerate(_poisson_cdf(k)):
        if u < threshold:
            return i
    return POISSON_TERMS  # folded tail, probability < 1e-30 for small k


@dataclass(frozen=True)
class SkeletonBall:
    """Truncated skeleton tree: parent array, levels implied, plus matching."""

    k: int
    depth: int
    parents: tuple[int, ...]
    matched_edges: frozenset[tuple[int, int]]
    child_counts: tuple[int, ...]  # -1 for pending vertices at the cut depth

    def tree(self) -> RootedTree:
        return RootedTree(self.parents)

    def code(self) -> str:
        return canonical_code_tree(self.tree())


def generate_skeleton_ball(
    k: int, depth: int, rng: np.random.Generator, matching_rule: str = "uniform"
) -> SkeletonBall:
    """One truncated draw of the skeleton tree and its matching."""
    if depth % 2:
        raise ValueError(f"depth {depth} must be even")
    if depth > DEFAULT_MAX_DEPTH:
        raise ValueError(
            f"depth {depth} > {DEFAULT_MAX_DEPTH}; expected ball size grows like "
            f"(k(k+1))^(depth/2)"
        )
    if matching_rule not in ("uniform", "first"):
        raise ValueError(f"unknown matching rule {matching_rule!r}")
    parents = [-1]
    matched = [False]
    matched_edges: set[tuple[int, int]] = set()
    counts: list[int] = [0]
    frontier = [0]
    for level in range(depth):
        nxt: list[int] = []
        for v in frontier:
            if level % 2 == 1:
                c = k
            elif matched[v]:
                c = draw_poisson(k, rng)
            else:
                c = 1 + draw_poisson(k, rng)
            counts[v] = c
            first = len(parents)
            for _ in range(c):
                parents.append(v)
                matched.append(False)
                counts.append(0)
            nxt.extend(range(first, first + c))
            if not matched[v]:
                pick = 0 if matching_rule == "first" else int(rng.integers(0, c))
                child = first + pick
                matched[v] = True
                matched[child] = True
                matched_edges.add((v, child))
        frontier = nxt
    for v in frontier:
        counts[v] = -1  # pending: no children generated at the cut
    return SkeletonBall(k, depth, tuple(parents), frozenset(matched_edges), tuple(counts))


def _mc_worker(args) -> dict:
    k, depth, seed, rule, start, count = args
    hist = BallHistogram(k, depth, None)
    for t in range(start, start + count):
        ball = generate_skeleton_ball(k, depth, trial_rng(seed, t), rule)
        hist.add(ball.code(), is_tree=True)
    return hist.to_jsonable()


def ball_distribution_mc(
    k: int,
    depth: int,
    trials: int,
    seed: int,
    matching_rule: str = "uniform",
    threads: int = 1,
) -> BallHistogram:
    """Histogram of canonical ball codes over independent truncated draws."""
    if threads <= 1:
        return BallHistogram.from_jsonable(
            _mc_worker((k, depth, seed, matching_rule, 0, trials))
        )
    chunk = (trials + threads - 1) // threads
    jobs = [
        (k, depth, seed, matching_rule, start, min(chunk, trials - start))
        for start in range(0, trials, chunk)
    ]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(_mc_worker, jobs))
    out = BallHistogram(k, depth, None)
    for part in parts:
        out = out.merge(BallHistogram.from_jsonable(part))
    return out
