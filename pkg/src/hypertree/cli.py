"""Command-line front end.

Every subcommand validates its configuration up front, derives all
randomness from --seed, and embeds the full configuration plus a schema
version in each output file so runs can be reproduced byte-for-byte
(modulo the timestamp field), regardless of thread count.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import statistics
import sys
import time
from math import comb
from pathlib import Path

from . import __version__
from .boundary import full_boundary_matrix, projection_kernel, reduced_boundary_matrix
from .enumeration import (
    enumerate_hypertrees,
    enumeration_budget_from_env,
    exact_distribution,
)
from .errors import BudgetExceededError, KernelSizeError, NumericalDegeneracyError
from .exactla import gram_det
from .harness import (
    annealed_histogram,
    cohen_lenstra_report,
    compare_report,
    kernel_baseline,
    limit_baseline,
    oracle_baseline,
    quenched_fractions,
    report_text_table,
    star_code,
)
from .sampler import HypertreeSampler, resolve_mode, sample_spanning_tree
from .rngstreams import trial_rng
from .skeleton import ball_distribution_mc
from .treestats import limit_ball_probability, limit_ball_terms, tree_from_parents

SCHEMA_VERSION = "hypertree/1"

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_BUDGET = 3
EXIT_DEGENERATE = 4


def _default_threads() -> int:
    return min(os.cpu_count() or 1, 8)


def _config_dict(args: argparse.Namespace) -> dict:
    skip = {"func"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _payload(args: argparse.Namespace, body: dict) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "config": _config_dict(args),
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        **body,
    }


def _write_json(path: str, payload: dict) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")


def _write_csv(path: str, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _csv_path(out: str) -> str:
    return str(Path(out).with_suffix(".csv"))


def _figure_path(out: str) -> str:
    return str(Path(out).with_suffix(".png"))


def _validate_common(args) -> None:
    if hasattr(args, "n") and hasattr(args, "k") and not 1 <= args.k < args.n:
        raise ValueError(f"need 1 <= k < n, got k={args.k}, n={args.n}")
    if getattr(args, "depth", 0) % 2:
        raise ValueError(f"depth {args.depth} must be even")
    if getattr(args, "trials", 1) < 1:
        raise ValueError("trials must be positive")


def _resolved_mode(args) -> str:
    return resolve_mode(args.n, args.mode, getattr(args, "exact_max_n", 8))


# -- subcommand handlers -------------------------------------------------------


def cmd_kalai_check(args) -> int:
    _validate_common(args)
    formula = args.n ** comb(args.n - 2, args.k)
    gram = gram_det(reduced_boundary_matrix(args.n, args.k).entries.tolist())
    dist = exact_distribution(args.n, args.k, budget=args.budget)
    enumerated = dist.total_weight
    ok = gram == enumerated == formula
    print(
        f"gram={gram} enumeration={enumerated} formula={args.n}^C({args.n - 2},{args.k})"
        f"={formula} -> {'equal' if ok else 'MISMATCH'}"
    )
    if args.out:
        _write_json(
            args.out,
            _payload(
                args,
                {
                    "gram_determinant": gram,
                    "enumeration_total_weight": enumerated,
                    "formula_value": formula,
                    "hypertree_count": len(dist),
                    "equal": ok,
                },
            ),
        )
    return EXIT_OK if ok else 1


def cmd_enumerate(args) -> int:
    _validate_common(args)
    samples = enumerate_hypertrees(args.n, args.k, budget=args.budget)
    entries = [
        {"faces": [list(f) for f in s.faces], "homology_order": s.homology_order}
        for s in samples
    ]
    body = {
        "n": args.n,
        "k": args.k,
        "total_weight": sum(s.weight for s in samples),
        "entries": entries,
    }
    _write_json(args.out, _payload(args, body))
    if args.format == "csv":
        _write_csv(
            _csv_path(args.out),
            ["faces", "homology_order"],
            [[json.dumps(e["faces"]), e["homology_order"]] for e in entries],
        )
    print(f"{len(entries)} hypertrees, total weight {body['total_weight']} -> {args.out}")
    return EXIT_OK


def cmd_sample(args) -> int:
    _validate_common(args)
    method = "wilson" if (args.method == "auto" and args.k == 1) else args.method
    if method == "wilson" and args.k != 1:
        raise ValueError("the spanning-tree sampler only applies to k = 1")
    sampler = None
    if method != "wilson":
        sampler = HypertreeSampler(args.n, args.k, mode=_resolved_mode(args))
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    with open(args.out, "w") as fh:
        for t in range(args.trials):
            if method == "wilson":
                sample = sample_spanning_tree(args.n, args.seed, t)
            else:
                sample = sampler.draw(trial_rng(args.seed, t), verify=True)
            fh.write(
                json.dumps(
                    {
                        "trial": t,
                        "faces": [list(f) for f in sample.faces],
                        "homology_order": sample.homology_order,
                    }
                )
                + "\n"
            )
    print(f"{args.trials} samples -> {args.out}")
    return EXIT_OK


def cmd_skeleton(args) -> int:
    if args.depth % 2:
        raise ValueError(f"depth {args.depth} must be even")
    if args.trials < 1:
        raise ValueError("trials must be positive")
    hist = ball_distribution_mc(
        args.k, args.depth, args.trials, args.seed,
        matching_rule=args.rule, threads=args.threads,
    )
    data = hist.to_jsonable()
    _write_json(args.out, _payload(args, {"histogram": data}))
    if args.format == "csv":
        rows = [[code, count, 1] for code, count in sorted(data["counts"].items())]
        rows += [[code, count, 0] for code, count in sorted(data["non_tree_counts"].items())]
        _write_csv(_csv_path(args.out), ["code", "count", "is_tree"], rows)
    if args.figures:
        from .plots import render_histogram_figure

        render_histogram_figure(data, _figure_path(args.out))
    print(f"{hist.total} balls over {len(data['counts'])} shapes -> {args.out}")
    return EXIT_OK


def cmd_limit_prob(args) -> int:
    with open(args.tree) as fh:
        tree_doc = json.load(fh)
    tree = tree_from_parents(tree_doc["parents"])
    m_star, odd_count, inner_even, aut = limit_ball_terms(tree, args.k)
    prob = limit_ball_probability(tree, args.k)
    out = {
        "covering_matchings": m_star,
        "automorphisms": aut,
        "odd_vertices": odd_count,
        "inner_even_vertices": inner_even,
        "probability": prob,
    }
    print(json.dumps(out, indent=2))
    return EXIT_OK


def _baseline_for(args) -> dict:
    if args.baseline == "limit":
        return limit_baseline(args.k, args.depth, max_children=12)
    if args.baseline == "oracle":
        return oracle_baseline(args.n, args.k, args.depth)
    if args.baseline == "kernel":
        return kernel_baseline(args.n, args.k, args.depth)
    raise ValueError(f"unknown baseline {args.baseline!r}")


def cmd_compare(args) -> int:
    _validate_common(args)
    roots = "all" if args.roots == "all" else int(args.roots)
    hist = annealed_histogram(
        args.n, args.k, args.depth, args.trials, args.seed,
        roots_per_trial=roots, method=args.method, mode=_resolved_mode(args),
        threads=args.threads,
    )
    report = compare_report(hist, _baseline_for(args))
    report["baseline"] = args.baseline
    _write_json(args.out, _payload(args, {"report": report}))
    if args.format == "csv":
        _write_csv(
            _csv_path(args.out),
            ["code", "count", "empirical", "predicted", "z", "expected_count", "evaluated"],
            [
                [r["code"], r["count"], r["empirical"], r["predicted"],
                 "" if r["z"] is None else r["z"], r["expected_count"], int(r["evaluated"])]
                for r in report["rows"]
            ],
        )
    if args.figures:
        from .plots import render_compare_figure

        render_compare_figure(report, _figure_path(args.out))
    print(report_text_table(report))
    return EXIT_OK


def cmd_quenched(args) -> int:
    _validate_common(args)
    if args.target_tree:
        with open(args.target_tree) as fh:
            tree = tree_from_parents(json.load(fh)["parents"])
        from .treestats import canonical_code_tree

        target = canonical_code_tree(tree)
    else:
        target = star_code(args.k, args.target_star)
    values = quenched_fractions(
        args.n, args.k, args.depth, target, args.trials, args.seed,
        method=args.method, mode=_resolved_mode(args),
    )
    report = {
        "n": args.n,
        "k": args.k,
        "r": args.depth,
        "target": target,
        "values": values,
        "mean": statistics.fmean(values),
        "variance": statistics.pvariance(values),
    }
    _write_json(args.out, _payload(args, {"report": report}))
    if args.format == "csv":
        _write_csv(_csv_path(args.out), ["trial", "value"], list(enumerate(values)))
    if args.figures:
        from .plots import render_quenched_figure

        render_quenched_figure(report, _figure_path(args.out))
    print(
        f"target {target}: mean={report['mean']:.5f} variance={report['variance']:.3e} "
        f"over {args.trials} trials"
    )
    return EXIT_OK


def cmd_cohen_lenstra(args) -> int:
    _validate_common(args)
    report = cohen_lenstra_report(
        args.n, args.k, args.p, args.trials, args.seed, mode=_resolved_mode(args)
    )
    _write_json(args.out, _payload(args, {"report": report}))
    if args.format == "csv":
        _write_csv(
            _csv_path(args.out),
            ["partition", "group_order", "count", "frequency", "heuristic"],
            [
                [r["partition"], r["group_order"], r["count"], r["frequency"], r["heuristic"]]
                for r in report["rows"]
            ],
        )
    if args.figures:
        from .plots import render_cohen_lenstra_figure

        render_cohen_lenstra_figure(report, _figure_path(args.out))
    for row in report["rows"]:
        print(
            f"{row['partition']:>10}: observed {row['frequency']:.4f} "
            f"heuristic {row['heuristic']:.4f} ({row['count']} trials)"
        )
    return EXIT_OK


def cmd_dump(args) -> int:
    _validate_common(args)
    rows = []
    if args.what == "kernel":
        kern = projection_kernel(args.n, args.k, mode=args.mode)
        from .faces import all_faces

        bigs = all_faces(args.n, args.k + 1)
        for i, x in enumerate(bigs):
            for j, y in enumerate(bigs):
                value = kern.entry(i, j)
                if value:
                    rows.append([json.dumps(list(x)), json.dumps(list(y)), str(value)])
    else:
        matrix = (
            full_boundary_matrix(args.n, args.k)
            if args.what == "full"
            else reduced_boundary_matrix(args.n, args.k)
        )
        for y, x, value in matrix.iter_cells():
            if value:
                rows.append([json.dumps(list(y)), json.dumps(list(x)), value])
    _write_csv(args.out, ["row", "col", "value"], rows)
    print(f"{len(rows)} nonzero entries -> {args.out}")
    return EXIT_OK


# -- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hypertree",
        description="Sample determinantal random hypertrees and verify their local limit",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, handler, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.set_defaults(func=handler)
        return p

    def common_mc(p, with_mode=True):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--threads", type=int, default=_default_threads())
        p.add_argument("--format", choices=["json", "csv"], default="json")
        if with_mode:
            p.add_argument("--mode", choices=["auto", "exact", "float"], default="auto")
            p.add_argument("--exact-max-n", type=int, default=8,
                           help="largest n sampled exactly when --mode auto")

    p = add("kalai-check", cmd_kalai_check, help="verify the squared-homology count two ways")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--budget", type=int, default=enumeration_budget_from_env())
    p.add_argument("--out")

    p = add("enumerate", cmd_enumerate, help="exhaustively enumerate hypertrees at tiny (n,k)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--budget", type=int, default=enumeration_budget_from_env())
    p.add_argument("--format", choices=["json", "csv"], default="json")

    p = add("sample", cmd_sample, help="draw determinantal hypertree samples (JSONL)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=["auto", "exact", "float"], default="auto")
    p.add_argument("--exact-max-n", type=int, default=8,
                   help="largest n sampled exactly when --mode auto")
    p.add_argument("--method", choices=["auto", "dpp", "wilson"], default="dpp")

    p = add("skeleton", cmd_skeleton, help="Monte-Carlo ball histogram of the limit tree")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--rule", choices=["uniform", "first"], default="uniform")
    p.add_argument("--figures", action=argparse.BooleanOptionalAction, default=True)
    common_mc(p, with_mode=False)

    p = add("limit-prob", cmd_limit_prob, help="closed-form limit probability of a ball shape")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--tree", required=True, help="JSON file with a parent array")

    p = add("compare", cmd_compare, help="empirical ball law vs a prediction")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--roots", default="1", help="roots per trial, or 'all'")
    p.add_argument("--baseline", choices=["limit", "oracle", "kernel"], default="limit")
    p.add_argument("--method", choices=["auto", "dpp", "wilson"], default="auto")
    p.add_argument("--figures", action=argparse.BooleanOptionalAction, default=True)
    common_mc(p)

    p = add("quenched", cmd_quenched, help="per-sample root fractions for one ball shape")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--target-star", type=int, default=1,
                   help="depth-2 shape: root degree (ignored with --target-tree)")
    p.add_argument("--target-tree", help="JSON file with a parent array")
    p.add_argument("--method", choices=["auto", "dpp", "wilson"], default="auto")
    p.add_argument("--figures", action=argparse.BooleanOptionalAction, default=True)
    common_mc(p)

    p = add("cohen-lenstra", cmd_cohen_lenstra, help="p-Sylow statistics of sampled homology")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--figures", action=argparse.BooleanOptionalAction, default=True)
    common_mc(p)

    p = add("dump", cmd_dump, help="CSV dump of a boundary matrix or the kernel")
    p.add_argument("--what", choices=["full", "reduced", "kernel"], required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--mode", choices=["exact", "float"], default="exact")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (BudgetExceededError, KernelSizeError) as exc:
        print(json.dumps({"error": {"type": type(exc).__name__, "message": str(exc)}}))
        return EXIT_BUDGET
    except NumericalDegeneracyError as exc:
        print(json.dumps({"error": {"type": type(exc).__name__, "message": str(exc)}}))
        return EXIT_DEGENERATE
    except (ValueError, FileNotFoundError, KeyError) as exc:
        print(json.dumps({"error": {"type": type(exc).__name__, "message": str(exc)}}))
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
