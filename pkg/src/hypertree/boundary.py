"""Boundary matrices of the complete complex and the projection kernel.

The full boundary matrix has one row per size-k face and one column per
size-(k+1) face of {1..n}; the reduced matrix keeps only the rows whose
faces avoid the vertex n, which form a basis of the row space.  The kernel
is the orthogonal projection onto that row space, scaled so exact-mode
entries are integers over the common denominator n.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np

from .errors import KernelSizeError
from .faces import Face, all_faces, colex_rank, subfaces

DEFAULT_MAX_BIG_FACES = 6000


def boundary_entry(small: Face, big: Face) -> int:
    """Signed incidence of a size-k face in a size-(k+1) face.

    With the big face sorted ascending as (x_0, ..., x_k), the entry is
    (-1)^i when the small face equals the big face with x_i removed, else 0.
    """
    if len(small) + 1 != len(big):
        raise ValueError(f"face sizes {len(small)}, {len(big)} differ by != 1")
    missing = None
    j = 0
    for i, x in enumerate(big):
        if j < len(small) and small[j] == x:
            j += 1
        elif missing is None:
            missing = i
        else:
            return 0
    if j != len(small):
        return 0
    return -1 if missing % 2 else 1


@dataclass(frozen=True)
class BoundaryMatrix:
    n: int
    k: int
    row_faces: tuple[Face, ...]
    col_faces: tuple[Face, ...]
    entries: np.ndarray  # int64, rows x cols

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    def column_submatrix(self, big_faces) -> np.ndarray:
        cols = [colex_rank(f) for f in big_faces]
        return self.entries[:, cols]

    def iter_cells(self):
        for i, y in enumerate(self.row_faces):
            for j, x in enumerate(self.col_faces):
                yield y, x, int(self.entries[i, j])


def _build(n: int, k: int, row_faces: tuple[Face, ...]) -> BoundaryMatrix:
    col_faces = all_faces(n, k + 1)
    row_index = {f: i for i, f in enumerate(row_faces)}
    mat = np.zeros((len(row_faces), len(col_faces)), dtype=np.int64)
    for j, big in enumerate(col_faces):
        for i, small in enumerate(subfaces(big)):
            r = row_index.get(small)
            if r is not None:
                mat[r, j] = boundary_entry(small, big)
    return BoundaryMatrix(n, k, row_faces, col_faces, mat)


def full_boundary_matrix(n: int, k: int) -> BoundaryMatrix:
    """Boundary matrix with all C(n,k) rows."""
    if not 1 <= k < n:
        raise ValueError(f"need 1 <= k < n, got k={k}, n={n}")
    return _build(n, k, all_faces(n, k))


def reduced_boundary_matrix(n: int, k: int) -> BoundaryMatrix:
    """Boundary matrix restricted to the C(n-1,k) rows avoiding vertex n."""
    if not 1 <= k < n:
        raise ValueError(f"need 1 <= k < n, got k={k}, n={n}")
    return _build(n, k, all_faces(n - 1, k))


def sign_product(big_a: Face, big_b: Face) -> int:
    """Product of the two incidences of X and Y at their common facet.

    Defined for big faces sharing exactly k elements; always +1 or -1.
    """
    common = tuple(sorted(set(big_a) & set(big_b)))
    if len(common) + 1 != len(big_a) or len(big_a) != len(big_b):
        raise ValueError(f"faces {big_a}, {big_b} do not overlap in a facet")
    return boundary_entry(common, big_a) * boundary_entry(common, big_b)


@dataclass(frozen=True)
class Kernel:
    """Projection kernel over big faces, exact (integers over n) or float64.

    In exact mode `scaled` holds n * P as int64: diagonal k+1, and the
    facet-sharing off-diagonal entries are the +-1 sign products.
    """

    n: int
    k: int
    mode: str  # "exact" | "float"
    scaled: np.ndarray | None
    values: np.ndarray | None

    @property
    def size(self) -> int:
        return comb(self.n, self.k + 1)

    @property
    def rank(self) -> int:
        return comb(self.n - 1, self.k)

    def entry(self, i: int, j: int) -> Fraction | float:
        if self.mode == "exact":
            return Fraction(int(self.scaled[i, j]), self.n)
        return float(self.values[i, j])

    def dense_float(self) -> np.ndarray:
        if self.mode == "exact":
            return self.scaled.astype(np.float64) / self.n
        return self.values.copy()

    def submatrix_det(self, ranks) -> Fraction:
        """Exact determinant of the kernel restricted to the given ranks."""
        if self.mode != "exact":
            raise ValueError("exact subdeterminant needs an exact-mode kernel")
        idx = list(ranks)
        sub = [[int(self.scaled[i, j]) for j in idx] for i in idx]
        from .exactla import det_bareiss

        return Fraction(det_bareiss(sub), self.n ** len(idx))


def projection_kernel(
    n: int, k: int, mode: str = "exact", max_big_faces: int = DEFAULT_MAX_BIG_FACES
) -> Kernel:
    """Build the projection kernel from its closed form.

    Entries: (k+1)/n on the diagonal, sign_product/n for pairs of big faces
    sharing a facet, 0 otherwise.
    """
    if not 1 <= k < n:
        raise ValueError(f"need 1 <= k < n, got k={k}, n={n}")
    if mode not in ("exact", "float"):
        raise ValueError(f"unknown kernel mode {mode!r}")
    m = comb(n, k + 1)
    if m > max_big_faces:
        raise KernelSizeError(
            f"kernel needs {m} big faces (> cap {max_big_faces}); "
            "raise max_big_faces explicitly if this is intended"
        )
    bigs = all_faces(n, k + 1)
    scaled = np.zeros((m, m), dtype=np.int64)
    for i, x in enumerate(bigs):
        scaled[i, i] = k + 1
        # neighbors sharing a facet: remove one element, add one outside
        members = set(x)
        for small in subfaces(x):
            core = set(small)
            for a in range(1, n + 1):
                if a in members or a in core:
                    continue
                y = tuple(sorted(small + (a,)))
                j = colex_rank(y)
                if j > i:
                    s = sign_product(x, y)
                    scaled[i, j] = s
                    scaled[j, i] = s
    if mode == "exact":
        return Kernel(n, k, "exact", scaled, None)
    return Kernel(n, k, "float", None, scaled.astype(np.float64) / n)


def kernel_from_boundary(n: int, k: int) -> np.ndarray:
    """n * P computed directly as Iᵀ I from the full boundary matrix.

    Independent of the closed form; used to cross-check projection_kernel.
    """
    full = full_boundary_matrix(n, k)
    return full.entries.T @ full.entries
