"""The sampled-complex value type shared by the enumerator and the samplers."""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

from .boundary import reduced_boundary_matrix
from .exactla import det_bareiss
from .faces import Face, all_faces, colex_rank


@dataclass(frozen=True)
class HypertreeSample:
    """One spanning hypertree: its big faces plus the homology order.

    `faces` are the C(n-1,k) size-(k+1) faces in colex order.  The homology
    order is |det| of the reduced boundary submatrix on those columns; None
    means it has not been computed (allowed for unverified float-mode draws).
    """

    n: int
    k: int
    faces: tuple[Face, ...]
    homology_order: int | None

    @property
    def weight(self) -> int:
        if self.homology_order is None:
            raise ValueError("homology order not computed for this sample")
        return self.homology_order**2

    def face_ranks(self) -> tuple[int, ...]:
        return tuple(colex_rank(f) for f in self.faces)

    def key(self) -> tuple[int, ...]:
        """Canonical dictionary key: sorted colex ranks of the big faces."""
        return tuple(sorted(self.face_ranks()))


def faces_from_ranks(n: int, k: int, ranks) -> tuple[Face, ...]:
    bigs = all_faces(n, k + 1)
    return tuple(bigs[r] for r in sorted(ranks))


def expected_face_count(n: int, k: int) -> int:
    return comb(n - 1, k)


def reduced_submatrix_det(n: int, k: int, faces) -> int:
    """|det| of the reduced boundary matrix restricted to the given big faces."""
    reduced = reduced_boundary_matrix(n, k)
    sub = reduced.column_submatrix(faces)
    if sub.shape[0] != sub.shape[1]:
        raise ValueError(f"{sub.shape[1]} faces given, expected {sub.shape[0]}")
    return abs(det_bareiss(sub.tolist()))


def make_sample(n: int, k: int, faces, verify: bool = True) -> HypertreeSample:
    faces = tuple(sorted((tuple(f) for f in faces), key=lambda f: f[::-1]))
    if len(faces) != expected_face_count(n, k):
        raise ValueError(
            f"{len(faces)} faces, expected {expected_face_count(n, k)}"
        )
    order = None
    if verify:
        order = reduced_submatrix_det(n, k, faces)
        if order == 0:
            raise ValueError("faces are not a hypertree (singular submatrix)")
    return HypertreeSample(n, k, faces, order)
