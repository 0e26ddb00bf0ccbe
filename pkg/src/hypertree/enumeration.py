"""Exhaustive enumeration of hypertrees at tiny (n, k); the exact oracle.

Enumerates the size-C(n-1,k) sets of big faces whose reduced boundary
submatrix is nonsingular, together with the exact |det| of each, by a DFS
over columns in colex order.  A fraction-free incremental elimination state
is shared along the DFS path, so any dependent prefix prunes its entire
subtree and the determinant falls out of the final pivot for free.
"""

from __future__ import annotations

import os
from fractions import Fraction
from functools import lru_cache
from math import comb

import numpy as np

from .boundary import projection_kernel, reduced_boundary_matrix
from .complexes import HypertreeSample, faces_from_ranks
from .errors import BudgetExceededError
from .faces import colex_rank

DEFAULT_BUDGET = 10**7


def subset_search_space(n: int, k: int) -> int:
    return comb(comb(n, k + 1), comb(n - 1, k))


def _check_budget(n: int, k: int, budget: int | None) -> None:
    if budget is None:
        budget = DEFAULT_BUDGET
    count = subset_search_space(n, k)
    if count > budget:
        raise BudgetExceededError(
            f"enumeration at (n={n}, k={k}) would scan "
            f"C({comb(n, k + 1)},{comb(n - 1, k)}) = {count} subsets "
            f"(> budget {budget})",
            count=count,
        )


def _enumerate_keys(n: int, k: int) -> dict[tuple[int, ...], int]:
    """Map from sorted big-face rank tuples to homology orders."""
    reduced = reduced_boundary_matrix(n, k)
    m, ncols = reduced.shape
    cols = [reduced.entries[:, j].astype(np.int64) for j in range(ncols)]
    # Minors of a 0/+-1 matrix of this size stay far below int64 overflow.
    if m > 12:
        raise BudgetExceededError(f"face count {m} too large for exact DFS")

    out: dict[tuple[int, ...], int] = {}
    chosen: list[int] = []
    # elimination state along the DFS path: pivot rows, reduced columns,
    # and the fraction-free pivot cascade (d[0] = 1)
    pivots: list[int] = []
    basis: list[np.ndarray] = []
    d: list[int] = [1]

    def reduce_column(j: int) -> np.ndarray | None:
        w = cols[j]
        for t, (p, u) in enumerate(zip(pivots, basis)):
            w = (w * d[t + 1] - int(w[p]) * u) // d[t]
        return w

    def dfs(start: int) -> None:
        depth = len(chosen)
        if depth == m:
            out[tuple(chosen)] = abs(d[-1])
            return
        for j in range(start, ncols - (m - depth) + 1):
            w = reduce_column(j)
            nz = np.flatnonzero(w)
            if nz.size == 0:
                continue  # dependent on the chosen prefix: prune
            p = int(nz[0])
            pivots.append(p)
            basis.append(w)
            d.append(int(w[p]))
            chosen.append(j)
            dfs(j + 1)
            chosen.pop()
            d.pop()
            basis.pop()
            pivots.pop()

    dfs(0)
    return out


@lru_cache(maxsize=8)
def _enumerate_cached(n: int, k: int) -> dict[tuple[int, ...], int]:
    return _enumerate_keys(n, k)


def enumerate_hypertrees(
    n: int, k: int, budget: int | None = None
) -> list[HypertreeSample]:
    """All hypertrees at (n, k) with exact homology orders.

    Refuses outright (naming the subset count) when the search space
    exceeds the budget; an oracle must never silently truncate.
    """
    _check_budget(n, k, budget)
    keys = _enumerate_cached(n, k)
    return [
        HypertreeSample(n, k, faces_from_ranks(n, k, ranks), order)
        for ranks, order in keys.items()
    ]


class ExactDistribution:
    """Exact law of the determinantal hypertree measure at tiny (n, k)."""

    def __init__(self, n: int, k: int, weights: dict[tuple[int, ...], int]):
        self.n = n
        self.k = k
        self.weights = weights  # key -> homology order
        self.total_weight = sum(h * h for h in weights.values())

    @property
    def denominator(self) -> int:
        return self.n ** comb(self.n - 2, self.k)

    def probability(self, key: tuple[int, ...]) -> Fraction:
        h = self.weights.get(tuple(sorted(key)), 0)
        return Fraction(h * h, self.denominator)

    def items(self):
        for key, h in self.weights.items():
            yield key, Fraction(h * h, self.denominator)

    def __len__(self) -> int:
        return len(self.weights)


def exact_distribution(n: int, k: int, budget: int | None = None) -> ExactDistribution:
    _check_budget(n, k, budget)
    dist = ExactDistribution(n, k, _enumerate_cached(n, k))
    if dist.total_weight != dist.denominator:
        raise AssertionError(
            f"total weight {dist.total_weight} != {dist.denominator} at ({n},{k})"
        )
    return dist


def inclusion_probability(n: int, k: int, faces, budget: int | None = None) -> Fraction:
    """Exact probability that all given big faces belong to the sample.

    Computed by summing the enumerated distribution, independently of the
    kernel-subdeterminant route it is tested against.
    """
    dist = exact_distribution(n, k, budget)
    wanted = frozenset(colex_rank(tuple(f)) for f in faces)
    num = sum(h * h for key, h in dist.weights.items() if wanted <= frozenset(key))
    return Fraction(num, dist.denominator)


def kernel_inclusion_probability(n: int, k: int, faces) -> Fraction:
    """The same event probability via the kernel subdeterminant."""
    kern = projection_kernel(n, k, mode="exact")
    ranks = [colex_rank(tuple(f)) for f in faces]
    return kern.submatrix_det(ranks)


def uniform_hypertree(n: int, k: int, rng, budget: int | None = None) -> HypertreeSample:
    """A uniform (not determinantal) hypertree at tiny n; exploratory only."""
    samples = enumerate_hypertrees(n, k, budget)
    return samples[int(rng.integers(0, len(samples)))]


def enumeration_budget_from_env() -> int:
    raw = os.environ.get("HYPERTREE_BUDGET")
    if raw is None:
        return DEFAULT_BUDGET
    try:
        return int(raw)
    except ValueError as exc:
        raise ValueError(f"HYPERTREE_BUDGET={raw!r} is not an integer") from exc
