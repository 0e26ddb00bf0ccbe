"""Figure rendering for report outputs.

Every report path of the CLI can drop a PNG next to its JSON/CSV output;
figures are derived purely from the report dictionaries, never the other
way around.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def _short(code: str, width: int = 18) -> str:
    return code if len(code) <= width else code[: width - 3] + "..."


def render_compare_figure(report: dict, path: str, max_rows: int = 16) -> str:
    rows = report["rows"][:max_rows]
    labels = [_short(r["code"]) for r in rows]
    emp = [r["empirical"] for r in rows]
    pred = [r["predicted"] for r in rows]
    x = np.arange(len(rows))
    fig, (ax1, ax2) = plt.subplots(
        2, 1, figsize=(max(6.0, 0.6 * len(rows)), 6.4), sharex=True,
        gridspec_kw={"height_ratios": [3, 1]},
    )
    ax1.bar(x - 0.2, emp, width=0.4, label="empirical", color="#1f77b4")
    ax1.bar(x + 0.2, pred, width=0.4, label="predicted", color="#ff7f0e")
    ax1.set_ylabel("ball frequency")
    ax1.legend()
    title = f"n={report['n']} k={report['k']} r={report['r']}  TV={report['tv_distance']:.4f}"
    ax1.set_title(title)
    z = [r["z"] if r["z"] is not None else 0.0 for r in rows]
    colors = ["#2ca02c" if r["z"] is not None else "#cccccc" for r in rows]
    ax2.bar(x, z, color=colors)
    ax2.axhline(4, color="red", lw=0.8, ls="--")
    ax2.axhline(-4, color="red", lw=0.8, ls="--")
    ax2.set_ylabel("z")
    ax2.set_xticks(x)
    ax2.set_xticklabels(labels, rotation=60, ha="right", fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_histogram_figure(hist_data: dict, path: str, max_rows: int = 20) -> str:
    counts = dict(hist_data.get("counts", {}))
    counts.update(hist_data.get("non_tree_counts", {}))
    top = sorted(counts.items(), key=lambda kv: -kv[1])[:max_rows]
    labels = [_short(code) for code, _ in top]
    values = [c for _, c in top]
    fig, ax = plt.subplots(figsize=(max(6.0, 0.5 * len(top)), 4.2))
    ax.bar(np.arange(len(top)), values, color="#1f77b4")
    ax.set_xticks(np.arange(len(top)))
    ax.set_xticklabels(labels, rotation=60, ha="right", fontsize=7)
    ax.set_ylabel("count")
    ax.set_title(f"k={hist_data['k']} r={hist_data['r']} total={hist_data['total']}")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_cohen_lenstra_figure(report: dict, path: str) -> str:
    rows = report["rows"]
    labels = [r["partition"] for r in rows]
    x = np.arange(len(rows))
    fig, ax = plt.subplots(figsize=(max(5.0, 0.8 * len(rows)), 4.2))
    ax.bar(x - 0.2, [r["frequency"] for r in rows], width=0.4, label="observed")
    ax.bar(x + 0.2, [r["heuristic"] for r in rows], width=0.4, label="heuristic")
    ax.set_xticks(x)
    ax.set_xticklabels(labels, rotation=30, ha="right")
    ax.set_ylabel("frequency")
    ax.set_title(
        f"p-Sylow types at n={report['n']} k={report['k']} p={report['p']} "
        f"({report['trials']} trials)"
    )
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_quenched_figure(report: dict, path: str) -> str:
    values = report["values"]
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.hist(values, bins=30, color="#1f77b4")
    ax.axvline(report["mean"], color="red", lw=1.2, label=f"mean={report['mean']:.4f}")
    ax.set_xlabel("per-trial matching root fraction")
    ax.set_ylabel("trials")
    ax.set_title(
        f"n={report['n']} k={report['k']} r={report['r']}  "
        f"variance={report['variance']:.3e}"
    )
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
