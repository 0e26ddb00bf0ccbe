"""Samplers for the determinantal hypertree measure.

The main sampler is the chain-rule sampler for a projection kernel: pick an
item with probability diag/remaining_rank, condition the kernel on the pick
(a rank-one deflation), repeat until the rank is exhausted.  In exact mode
the deflation runs fraction-free over integers, so the conditional
probabilities are exact rationals and selection compares 128-bit dyadic
uniforms against exact cumulative sums.

A loop-erased random-walk spanning-tree sampler over the complete graph is
included as an independent oracle for k = 1, where the measure is the
uniform spanning tree.
"""

from __future__ import annotations

from math import comb

import numpy as np

from .boundary import Kernel, projection_kernel
from .complexes import HypertreeSample, faces_from_ranks, reduced_submatrix_det
from .errors import NumericalDegeneracyError
from .rngstreams import BufferedIntegers, U128_DEN, trial_rng, uniform_u128

EXACT_MODE_MAX_N = 8
FLOAT_PIVOT_TOL = 1e-9
# above this magnitude an int64 product in the deflation could overflow
_INT64_SAFE_MAX = 2_000_000_000


def resolve_mode(n: int, mode: str, exact_max_n: int = EXACT_MODE_MAX_N) -> str:
    if mode == "auto":
        return "exact" if n <= exact_max_n else "float"
    if mode not in ("exact", "float"):
        raise ValueError(f"unknown sampler mode {mode!r}")
    return mode


class HypertreeSampler:
    """Reusable sampler bound to one (n, k) and one kernel mode."""

    def __init__(
        self,
        n: int,
        k: int,
        mode: str = "auto",
        max_big_faces: int | None = None,
        exact_max_n: int = EXACT_MODE_MAX_N,
    ):
        if not 1 <= k < n:
            raise ValueError(f"need 1 <= k < n, got k={k}, n={n}")
        self.n = n
        self.k = k
        self.mode = resolve_mode(n, mode, exact_max_n)
        kwargs = {} if max_big_faces is None else {"max_big_faces": max_big_faces}
        self.kernel: Kernel = projection_kernel(n, k, mode=self.mode, **kwargs)
        self.rank = comb(n - 1, k)

    def draw_ranks(self, rng: np.random.Generator) -> tuple[int, ...]:
        if self.mode == "exact":
            return self._draw_exact(rng)
        return self._draw_float(rng)

    def draw(self, rng: np.random.Generator, verify: bool = False) -> HypertreeSample:
        ranks = self.draw_ranks(rng)
        faces = faces_from_ranks(self.n, self.k, ranks)
        order = None
        if self.mode == "exact" or verify:
            order = reduced_submatrix_det(self.n, self.k, faces)
            if order == 0:
                raise AssertionError("sampler produced a singular face set")
        return HypertreeSample(self.n, self.k, faces, order)

    # -- exact mode ---------------------------------------------------------

    def _draw_exact(self, rng: np.random.Generator) -> tuple[int, ...]:
        # After t picks, entry (a, b) holds the (t+1)-minor of n*P over the
        # picked diagonal plus (a, b); the conditional kernel is then
        # minors / (n * prev_pivot), so diagonal sums are exactly
        # n * prev_pivot * remaining_rank and selection stays rational.
        minors = self.kernel.scaled.copy()
        prev_pivot = 1
        chosen: list[int] = []
        for step in range(self.rank):
            remaining = self.rank - step
            diag = minors.diagonal()
            total = self.n * prev_pivot * remaining
            # exact inverse-CDF: smallest i with cumsum(diag) > u * total / 2^128
            threshold = uniform_u128(rng) * total
            acc = 0
            pick = -1
            for i in range(len(diag)):
                dv = int(diag[i])
                if dv <= 0:
                    continue
                acc += dv
                if acc * U128_DEN > threshold:
                    pick = i
                    break
            if pick < 0:
                raise AssertionError("exact selection fell off the distribution")
            new_pivot = int(diag[pick])
            if minors.dtype == np.int64 and int(np.abs(minors).max()) > _INT64_SAFE_MAX:
                minors = minors.astype(object)
            col = minors[:, pick].copy()
            row = minors[pick, :].copy()
            minors = (minors * new_pivot - np.outer(col, row)) // prev_pivot
            prev_pivot = new_pivot
            chosen.append(pick)
        return tuple(sorted(chosen))

    # -- float mode ---------------------------------------------------------

    def _draw_float(self, rng: np.random.Generator) -> tuple[int, ...]:
        kern = self.kernel.dense_float()
        chosen: list[int] = []
        taken = np.zeros(kern.shape[0], dtype=bool)
        for _step in range(self.rank):
            diag = np.clip(kern.diagonal().copy(), 0.0, None)
            diag[taken] = 0.0
            total = diag.sum()
            if total <= 0:
                raise NumericalDegeneracyError("kernel diagonal vanished")
            pick = int(np.searchsorted(np.cumsum(diag), rng.random() * total, side="right"))
            pick = min(pick, len(diag) - 1)
            piv = kern[pick, pick]
            if piv < FLOAT_PIVOT_TOL:
                raise NumericalDegeneracyError(
                    f"pivot {piv:.3e} below tolerance {FLOAT_PIVOT_TOL}"
                )
            kern = kern - np.outer(kern[:, pick], kern[pick, :]) / piv
            kern = (kern + kern.T) / 2.0  # drift control
            taken[pick] = True
            chosen.append(pick)
        return tuple(sorted(chosen))


def sample_hypertree(
    n: int, k: int, seed: int, stream: int = 0, mode: str = "auto"
) -> HypertreeSample:
    """One determinantal hypertree draw for (seed, stream)."""
    sampler = HypertreeSampler(n, k, mode=mode)
    return sampler.draw(trial_rng(seed, stream))


def sample_batch(
    sampler: HypertreeSampler,
    seed: int,
    trials: int,
    first_stream: int = 0,
    verify_every: int = 0,
):
    """Draws for streams first_stream..first_stream+trials-1, in order.

    verify_every > 0 additionally verifies nonsingularity on every
    verify_every-th float-mode draw (exact draws are always verified).
    """
    out = []
    for t in range(trials):
        stream = first_stream + t
        verify = bool(verify_every) and stream % verify_every == 0
        out.append(sampler.draw(trial_rng(seed, stream), verify=verify))
    return out


# -- uniform spanning trees on the complete graph (k = 1 oracle) ------------


def _wilson_parents(n: int, rng: np.random.Generator) -> list[int]:
    """Loop-erased random-walk spanning tree of K_n; parent array, root 0."""
    nxt = [-1] * n
    in_tree = [False] * n
    in_tree[0] = True
    steps = BufferedIntegers(rng, n - 1)

    for start in range(1, n):
        u = start
        while not in_tree[u]:
            v = steps.draw()
            if v >= u:
                v += 1  # uniform over the other n-1 vertices
            nxt[u] = v
            u = v
        u = start
        while not in_tree[u]:
            in_tree[u] = True
            u = nxt[u]
    return nxt


def sample_spanning_tree(n: int, seed: int, stream: int = 0) -> HypertreeSample:
    """Uniform spanning tree of the complete graph, as a k = 1 sample."""
    if n < 2:
        raise ValueError("need n >= 2")
    parents = _wilson_parents(n, trial_rng(seed, stream))
    edges = []
    for v in range(1, n):
        a, b = v + 1, parents[v] + 1
        edges.append((a, b) if a < b else (b, a))
    edges.sort(key=lambda e: e[::-1])
    return HypertreeSample(n, 1, tuple(edges), 1)


def spanning_tree_is_valid(sample: HypertreeSample) -> bool:
    """Connectivity + acyclicity check used in tests."""
    n = sample.n
    parent = list(range(n + 1))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in sample.faces:
        ra, rb = find(a), find(b)
        if ra == rb:
            return False
        parent[ra] = rb
    return len({find(v) for v in range(1, n + 1)}) == 1
