"""Canonical indexing and containment adjacency for the two face layers.

A face is a sorted tuple of distinct integers from {1..n}.  Faces of size k
("small" layer) and size k+1 ("big" layer) are the only two layers used.
Vertices are 1-based; ranks are 0-based and follow colexicographic order,
which is the single ordering convention used everywhere in the package.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations
from math import comb

Face = tuple[int, ...]


def validate_face(face, n: int, size: int | None = None) -> Face:
    """Check that `face` is strictly increasing with elements in 1..n."""
    f = tuple(int(a) for a in face)
    if size is not None and len(f) != size:
        raise ValueError(f"face {f} has {len(f)} elements, expected {size}")
    for i, a in enumerate(f):
        if a < 1 or a > n:
            raise ValueError(f"face element {a} outside 1..{n}")
        if i > 0 and f[i - 1] >= a:
            raise ValueError(f"face {f} is not strictly increasing")
    return f


def colex_rank(face) -> int:
    """Colex rank of a sorted subset; independent of the ground-set size."""
    return sum(comb(a - 1, i + 1) for i, a in enumerate(face))


def colex_unrank(rank: int, size: int) -> Face:
    """Inverse of colex_rank for subsets of the given size."""
    if rank < 0:
        raise ValueError("rank must be non-negative")
    out = []
    r = rank
    for i in range(size, 0, -1):
        a = i
        while comb(a, i) <= r:
            a += 1
        out.append(a)
        r -= comb(a - 1, i)
    return tuple(reversed(out))


def rank_face(face, n: int) -> int:
    """Colex rank of a validated face of {1..n}."""
    return colex_rank(validate_face(face, n))


@lru_cache(maxsize=None)
def all_faces(n: int, size: int) -> tuple[Face, ...]:
    """All size-subsets of {1..n} in colex order."""
    return tuple(sorted(combinations(range(1, n + 1), size), key=lambda f: f[::-1]))


def subfaces(big: Face) -> list[Face]:
    """The |big| facets of a big face: all subsets one element smaller."""
    if len(big) < 1:
        raise ValueError("face must be non-empty")
    out = [big[:i] + big[i + 1 :] for i in range(len(big))]
    out.sort(key=lambda f: f[::-1])
    return out


def superfaces(small: Face, n: int) -> list[Face]:
    """All faces of {1..n} one element larger that contain `small`."""
    members = set(small)
    out = [tuple(sorted(small + (a,))) for a in range(1, n + 1) if a not in members]
    out.sort(key=lambda f: f[::-1])
    return out
