"""Command line front end.

Subcommands: sample, render, outliers, metrics, ladder, bench, stats.
Every run is fully determined by its argument vector; all randomness flows
from explicit --seed flags. Outputs are text (CSV / JSON / SVG / index
lists) so runs can be diffed.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import io_render
from .core import StrategyId
from .harness import BenchmarkConfig, LadderSpec, run_benchmark, report_to_json, sample_size_ladder
from .metrics import DensityQuestion, answer_question, kde_error, question_accuracy
from .outliers import class_purity_scores, ground_truth_outliers, lof_scores
from .sampling import SamplingParams, sample
from .stats import RankMatrix, conover_posthoc, friedman_test, wilcoxon_signed_rank

_STRATEGY_CHOICES = [s.value for s in StrategyId]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scattersample",
        description="Scatterplot sampling strategies, outlier oracles and benchmarks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="run one sampling strategy on a CSV dataset")
    p.add_argument("--strategy", required=True, choices=_STRATEGY_CHOICES)
    p.add_argument("--n", required=True, type=int, help="requested sample size")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--input", required=True, help="x,y,label CSV")
    p.add_argument("--out", required=True,
                   help="output path; *.csv gets sampled rows, anything else one index per line")

    p = sub.add_parser("render", help="render a dataset (optionally subsampled) to SVG")
    p.add_argument("--input", required=True)
    p.add_argument("--indices", help="index file restricting the drawn points")
    p.add_argument("--mono", action="store_true", help="ignore labels, draw dark grey")
    p.add_argument("--canvas", type=int, default=1000, choices=[1000, 300])
    p.add_argument("--seed", type=int, default=0, help="draw-order seed")
    p.add_argument("--out", required=True)

    p = sub.add_parser("outliers", help="score outliers and emit the ground-truth set")
    p.add_argument("--input", required=True)
    p.add_argument("--k-lof", type=int, default=20)
    p.add_argument("--k-pur", type=int, default=10)
    p.add_argument("--lof-thresh", type=float, default=0.5)
    p.add_argument("--purity-thresh", type=float, default=0.8)
    p.add_argument("--out", required=True)

    p = sub.add_parser("metrics", help="evaluate a sample against density questions")
    p.add_argument("--input", required=True)
    p.add_argument("--indices", required=True)
    p.add_argument("--questions", required=True, help="JSON list of density questions")
    p.add_argument("--kde-bandwidth", type=float, default=0.02)
    p.add_argument("--kde-grid", type=int, default=64)
    p.add_argument("--out", required=True)

    p = sub.add_parser("ladder", help="print the sampling-size ladder for a dataset size")
    p.add_argument("--base", type=int, default=500)
    p.add_argument("--factor", type=float, default=1.5)
    p.add_argument("--levels", type=int, default=7)
    p.add_argument("--cutoff-rate", type=float, default=0.5)
    p.add_argument("--size", required=True, type=int)

    p = sub.add_parser("bench", help="run a benchmark config and write the JSON report")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("stats", help="significance tests on a blocks x treatments CSV")
    p.add_argument("test", choices=["friedman", "conover", "wilcoxon"])
    p.add_argument("--matrix", required=True)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--force", action="store_true", help="conover: bypass the Friedman gate")
    p.add_argument("--holm", action="store_true", help="conover: Holm-adjusted p-values")
    return parser


def _load_matrix(path) -> np.ndarray:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            cells = line.split(",")
            try:
                rows.append([float(c) for c in cells])
            except ValueError:
                if rows:
                    raise ValueError(f"{path}: non-numeric row after data started")
                continue  # header row
    if not rows:
        raise ValueError(f"{path}: no numeric rows")
    return np.asarray(rows, dtype=np.float64)


def _cmd_sample(args) -> int:
    ds = io_render.load_csv(args.input)
    picked = sample(StrategyId.from_string(args.strategy), ds,
                    SamplingParams(target_n=args.n, seed=args.seed))
    if args.out.endswith(".csv"):
        io_render.save_csv(args.out, ds, picked)
    else:
        io_render.save_indices(args.out, picked)
    print(f"{len(picked)} points -> {args.out}")
    return 0


def _cmd_render(args) -> int:
    ds = io_render.load_csv(args.input)
    indices = io_render.load_indices(args.indices, n=ds.n) if args.indices else None
    opts = io_render.RenderOptions(
        canvas_px=args.canvas, monochrome=args.mono, draw_order_seed=args.seed
    )
    svg = io_render.render_svg(ds, indices, opts)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(svg)
    print(f"wrote {args.out}")
    return 0


def _cmd_outliers(args) -> int:
    ds = io_render.load_csv(args.input)
    lof = lof_scores(ds.points, k=args.k_lof)
    pur = class_purity_scores(ds, k=args.k_pur)
    truth = ground_truth_outliers(
        ds, k_lof=args.k_lof, k_pur=args.k_pur,
        lof_thresh=args.lof_thresh, purity_thresh=args.purity_thresh,
    )
    payload = {
        "k_lof": args.k_lof,
        "k_pur": args.k_pur,
        "lof_thresh": args.lof_thresh,
        "purity_thresh": args.purity_thresh,
        "lof_scores": [float(v) for v in lof.scores],
        "purity_scores": [float(v) for v in pur.scores],
        "outliers": [
            {"index": int(i), "lof": bool(l), "purity": bool(p)}
            for i, l, p in zip(truth.indices.indices, truth.from_lof, truth.from_purity)
        ],
    }
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")
    print(f"{len(truth)} outliers -> {args.out}")
    return 0


def _cmd_metrics(args) -> int:
    ds = io_render.load_csv(args.input)
    picked = io_render.load_indices(args.indices, n=ds.n)
    with open(args.questions, encoding="utf-8") as fh:
        questions = [DensityQuestion.from_dict(d) for d in json.load(fh)]
    payload = {
        "sample_size": len(picked),
        "kde_error": kde_error(ds.points, ds.subset(picked).points,
                               args.kde_bandwidth, args.kde_grid),
        "answers": [answer_question(ds, picked, q).value for q in questions],
        "truths": [q.truth.value for q in questions],
    }
    if questions:
        payload["accuracy"] = question_accuracy(ds, picked, questions)
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")
    print(f"metrics -> {args.out}")
    return 0


def _cmd_ladder(args) -> int:
    spec = LadderSpec(base=args.base, factor=args.factor,
                      levels=args.levels, cutoff_rate=args.cutoff_rate)
    print(" ".join(str(v) for v in sample_size_ladder(spec, args.size)))
    return 0


def _cmd_bench(args) -> int:
    cfg = BenchmarkConfig.from_file(args.config)
    report = run_benchmark(cfg)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(report_to_json(report))
    print(f"report -> {args.out}")
    return 0


def _cmd_stats(args) -> int:
    mat = _load_matrix(args.matrix)
    if args.test == "wilcoxon":
        if mat.shape[1] != 2:
            raise ValueError("wilcoxon needs a 2-column (paired) matrix")
        res = wilcoxon_signed_rank(mat[:, 0], mat[:, 1], alpha=args.alpha)
        out = {"test": "wilcoxon", "statistic": res.statistic, "p_value": res.p_value,
               "direction": res.direction, "alpha": res.alpha}
    elif args.test == "friedman":
        res = friedman_test(RankMatrix(mat), alpha=args.alpha)
        out = {"test": "friedman", "statistic": res.statistic, "df": res.df,
               "p_value": res.p_value, "degenerate": res.degenerate,
               "significant": res.significant, "alpha": res.alpha}
    else:
        p = conover_posthoc(RankMatrix(mat), alpha=args.alpha,
                            force=args.force, holm=args.holm)
        out = {"test": "conover", "p_values": [[float(v) for v in row] for row in p],
               "alpha": args.alpha, "holm": args.holm}
    print(json.dumps(out, sort_keys=True, indent=2))
    return 0


_COMMANDS = {
    "sample": _cmd_sample,
    "render": _cmd_render,
    "outliers": _cmd_outliers,
    "metrics": _cmd_metrics,
    "ladder": _cmd_ladder,
    "bench": _cmd_bench,
    "stats": _cmd_stats,
}


def run_cli(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main():  # console entry point
    sys.exit(run_cli())
