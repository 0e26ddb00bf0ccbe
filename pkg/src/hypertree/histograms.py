"""Mergeable histograms over canonical ball codes."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class BallHistogram:
    """Counts of ball shapes; tree and non-tree codes are kept separately so
    non-tree observations stay first-class while the tree table stays clean."""

    k: int
    r: int
    n: int | None = None
    counts: dict[str, int] = field(default_factory=dict)
    non_tree_counts: dict[str, int] = field(default_factory=dict)
    total: int = 0

    def add(self, code: str, is_tree: bool, weight: int = 1) -> None:
        table = self.counts if is_tree else self.non_tree_counts
        table[code] = table.get(code, 0) + weight
        self.total += weight

    @property
    def non_tree_count(self) -> int:
        return sum(self.non_tree_counts.values())

    def merge(self, other: "BallHistogram") -> "BallHistogram":
        if (self.k, self.r, self.n) != (other.k, other.r, other.n):
            raise ValueError("histograms disagree on (k, r, n)")
        out = BallHistogram(self.k, self.r, self.n)
        for src in (self, other):
            for code, c in src.counts.items():
                out.counts[code] = out.counts.get(code, 0) + c
            for code, c in src.non_tree_counts.items():
                out.non_tree_counts[code] = out.non_tree_counts.get(code, 0) + c
            out.total += src.total
        return out

    def frequencies(self) -> dict[str, float]:
        if self.total == 0:
            return {}
        out = {code: c / self.total for code, c in self.counts.items()}
        out.update({code: c / self.total for code, c in self.non_tree_counts.items()})
        return out

    def to_jsonable(self) -> dict:
        return {
            "k": self.k,
            "r": self.r,
            "n": self.n,
            "total": self.total,
            "counts": dict(sorted(self.counts.items())),
            "non_tree_counts": dict(sorted(self.non_tree_counts.items())),
        }

    @classmethod
    def from_jsonable(cls, data: dict) -> "BallHistogram":
        return cls(
            k=data["k"],
            r=data["r"],
            n=data.get("n"),
            counts=dict(data.get("counts", {})),
            non_tree_counts=dict(data.get("non_tree_counts", {})),
            total=data["total"],
        )
