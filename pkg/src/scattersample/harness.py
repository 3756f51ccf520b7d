"""Benchmark harness: sampling-size ladders, synthetic stimuli, density
questions, and the strategy x dataset metric sweep.

Everything is driven by explicit seeds so a benchmark re-run with the same
configuration reproduces its report byte for byte.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

import numpy as np

from ._util import largest_remainder
from .core import (
    LabeledDataset,
    Rect,
    SampleIndexSet,
    Seed,
    StrategyId,
    normalize_points,
)
from .metrics import (
    DensityQuestion,
    kde_error,
    normalized_recall,
    outlier_preservation_ratio,
    precision_recall,
    question_accuracy,
    question_truth,
)
from .outliers import ground_truth_outliers, lof_scores
from .sampling import OutlierBiasParams, SamplingParams, sample
from .stats import RankMatrix, conover_posthoc, friedman_test

__all__ = [
    "LadderSpec",
    "MixtureSpec",
    "BenchmarkConfig",
    "sample_size_ladder",
    "gen_gaussian_mixture",
    "gen_region_questions",
    "run_benchmark",
    "report_to_json",
]

_MAX_QUESTION_ATTEMPTS = 10_000


@dataclass(frozen=True)
class LadderSpec:
    """Geometric ladder of candidate sample sizes with a rate cutoff."""

    base: int = 500
    factor: float = 1.5
    levels: int = 7
    cutoff_rate: float = 0.5

    def __post_init__(self):
        if self.base < 1:
            raise ValueError("base must be at least 1")
        if self.factor <= 1.0:
            raise ValueError("factor must exceed 1")
        if self.levels < 1:
            raise ValueError("levels must be at least 1")


def sample_size_ladder(spec: LadderSpec, dataset_size: int) -> list[int]:
    """floor(base * factor^i) for i < levels, dropping sizes whose sampling
    rate strictly exceeds the cutoff. May be empty for small datasets."""
    if dataset_size < 1:
        raise ValueError("dataset_size must be at least 1")
    out = []
    for i in range(spec.levels):
        count = int(np.floor(spec.base * spec.factor ** i))
        if count / dataset_size > spec.cutoff_rate:
            continue
        out.append(count)
    return out


@dataclass(frozen=True)
class MixtureSpec:
    """Seeded Gaussian-mixture stimulus: 3-10 isotropic clusters."""

    classes: int
    n: int
    seed: Seed = 0

    def __post_init__(self):
        if not 3 <= self.classes <= 10:
            raise ValueError("classes must lie in [3, 10]")
        if self.n < self.classes:
            raise ValueError("n must be at least the class count")


def gen_gaussian_mixture(spec: MixtureSpec) -> LabeledDataset:
    """Draw a mixture dataset: Dirichlet(1) class weights, means uniform in
    [0.15, 0.85]^2, isotropic std uniform in [0.02, 0.1]; points are clipped
    to the unit square and then min-max normalized."""
    rng = np.random.default_rng(spec.seed)
    weights = rng.dirichlet(np.ones(spec.classes))
    counts = largest_remainder(weights, spec.n)
    # Largest remainder may zero out a tiny class; every class must appear.
    while counts.min() == 0:
        counts[int(np.argmax(counts))] -= 1
        counts[int(np.argmin(counts))] += 1
    xs, ys, labels = [], [], []
    for c, m in enumerate(counts):
        mean = rng.uniform(0.15, 0.85, size=2)
        std = rng.uniform(0.02, 0.1)
        pts = np.clip(rng.normal(mean, std, size=(int(m), 2)), 0.0, 1.0)
        xs.append(pts[:, 0])
        ys.append(pts[:, 1])
        labels.append(np.full(int(m), c, dtype=np.int64))
    points = normalize_points(np.concatenate(xs), np.concatenate(ys))
    return LabeledDataset(points, np.concatenate(labels))


def gen_region_questions(
    ds: LabeledDataset,
    count: int,
    seed: Seed,
    kind: str = "region",
    margin: float = 0.2,
) -> list[DensityQuestion]:
    """Rejection-sample density questions over w/5 x w/5 rectangles.

    Placements are retried until the full-dataset quantities differ by a
    relative margin of at least `margin` (margin 0 accepts the first
    placement). The recorded truth always comes from the full dataset.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    if kind not in ("region", "class"):
        raise ValueError("kind must be 'region' or 'class'")
    if kind == "class" and ds.n_classes < 2:
        raise ValueError("class questions need at least 2 classes")
    rng = np.random.default_rng(seed)
    side = 0.2
    xs, ys = ds.points.xs, ds.points.ys
    questions = []
    for _ in range(count):
        for _attempt in range(_MAX_QUESTION_ATTEMPTS):
            ax, ay = rng.uniform(0.0, 1.0 - side, size=2)
            rect_a = Rect(float(ax), float(ay), side, side)
            if kind == "region":
                bx, by = rng.uniform(0.0, 1.0 - side, size=2)
                rect_b = Rect(float(bx), float(by), side, side)
                ca = int(rect_a.contains(xs, ys).sum())
                cb = int(rect_b.contains(xs, ys).sum())
                if margin == 0.0 or (max(ca, cb) > 0 and abs(ca - cb) >= margin * max(ca, cb)):
                    q = DensityQuestion(kind="region", rect_a=rect_a, rect_b=rect_b)
                    break
            else:
                c1, c2 = rng.choice(ds.n_classes, size=2, replace=False)
                inside = rect_a.contains(xs, ys)
                n1 = int((inside & (ds.labels == c1)).sum())
                n2 = int((inside & (ds.labels == c2)).sum())
                if margin == 0.0 or (max(n1, n2) > 0 and abs(n1 - n2) >= margin * max(n1, n2)):
                    q = DensityQuestion(kind="class", rect_a=rect_a,
                                        class_a=int(c1), class_b=int(c2))
                    break
        else:
            raise RuntimeError(
                f"could not satisfy margin {margin} in {_MAX_QUESTION_ATTEMPTS} placements"
            )
        questions.append(replace(q, truth=question_truth(ds, q)))
    return questions


@dataclass(frozen=True)
class BenchmarkConfig:
    """Declarative benchmark description (see BenchmarkConfig.from_dict)."""

    datasets: tuple
    strategies: tuple = tuple(StrategyId)
    seeds: tuple = (0,)
    target_n: int | None = None
    ladder: LadderSpec | None = None
    ladder_level: int = -1
    region_questions: int = 20
    class_questions: int = 20
    question_seed: Seed = 1234
    question_margin: float = 0.2
    k_lof: int = 20
    k_pur: int = 10
    lof_thresh: float = 0.5
    purity_thresh: float = 0.8
    kde_bandwidth: float = 0.02
    kde_grid: int = 64
    bootstrap_resamples: int = 10_000
    bootstrap_seed: Seed = 9999
    alpha: float = 0.05

    def __post_init__(self):
        if not self.datasets:
            raise ValueError("at least one dataset is required")
        if not self.strategies:
            raise ValueError("at least one strategy is required")
        if not self.seeds:
            raise ValueError("at least one seed is required")
        if (self.target_n is None) == (self.ladder is None):
            raise ValueError("exactly one of target_n / ladder must be given")

    @classmethod
    def from_dict(cls, d: dict) -> "BenchmarkConfig":
        datasets = []
        for spec in d["datasets"]:
            if spec.get("type", "mixture") == "mixture":
                datasets.append(
                    (spec.get("name", f"mixture{len(datasets)}"),
                     MixtureSpec(classes=int(spec["classes"]), n=int(spec["n"]),
                                 seed=int(spec.get("seed", 0))))
                )
            elif spec["type"] == "csv":
                datasets.append((spec.get("name", spec["path"]), str(spec["path"])))
            else:
                raise ValueError(f"unknown dataset type {spec.get('type')!r}")
        strategies = tuple(
            StrategyId.from_string(s) for s in d.get("strategies", [s.value for s in StrategyId])
        )
        ladder = LadderSpec(**d["ladder"]) if "ladder" in d else None
        kwargs = {
            key: d[key]
            for key in (
                "ladder_level", "region_questions", "class_questions", "question_seed",
                "question_margin", "k_lof", "k_pur", "lof_thresh", "purity_thresh",
                "kde_bandwidth", "kde_grid", "bootstrap_resamples", "bootstrap_seed",
                "alpha",
            )
            if key in d
        }
        return cls(
            datasets=tuple(datasets),
            strategies=strategies,
            seeds=tuple(int(s) for s in d.get("seeds", [0])),
            target_n=int(d["target_n"]) if "target_n" in d else None,
            ladder=ladder,
            **kwargs,
        )

    @classmethod
    def from_file(cls, path) -> "BenchmarkConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def _load_dataset(entry) -> LabeledDataset:
    name, spec = entry
    if isinstance(spec, MixtureSpec):
        return gen_gaussian_mixture(spec)
    from .io_render import load_csv

    return load_csv(spec)


def _bootstrap_ci(values: np.ndarray, resamples: int, rng: np.random.Generator) -> tuple[float, float]:
    """95% percentile bootstrap interval of the mean."""
    if values.size == 1:
        v = float(values[0])
        return v, v
    draws = rng.integers(0, values.size, size=(resamples, values.size))
    means = values[draws].mean(axis=1)
    lo, hi = np.quantile(means, [0.025, 0.975])
    return float(lo), float(hi)


def _sample_detected_outliers(
    ds: LabeledDataset, picked: SampleIndexSet, cfg: BenchmarkConfig
) -> SampleIndexSet:
    """Run the outlier detectors on the sampled scatterplot alone: the
    objective stand-in for 'perceived as an outlier after sampling'."""
    sub = ds.subset(picked)
    if sub.n < 2:
        return SampleIndexSet(np.zeros(0, dtype=np.int64))
    k_lof = min(cfg.k_lof, sub.n - 1)
    k_pur = min(cfg.k_pur, sub.n - 1)
    truth = ground_truth_outliers(
        sub, k_lof=k_lof, k_pur=k_pur,
        lof_thresh=cfg.lof_thresh, purity_thresh=cfg.purity_thresh,
    )
    return SampleIndexSet(picked.indices[truth.indices.indices])


_METRICS_FOR_SIGNIFICANCE = (
    "region_accuracy",
    "class_accuracy",
    "precision",
    "recall",
    "preservation_ratio",
    "kde_error",
)


def run_benchmark(cfg: BenchmarkConfig) -> dict:
    """Sweep every (dataset, strategy, seed) cell and aggregate.

    Returns a JSON-serializable report: per-cell metric values, per-cell
    means with 95% bootstrap confidence intervals, per-dataset normalized
    recall, and Friedman (+ gated Conover) significance per metric with
    (dataset, seed) pairs as blocks and strategies as treatments.
    """
    strat_names = [s.value for s in cfg.strategies]
    report: dict = {
        "config": _config_echo(cfg),
        "datasets": {},
        "cells": {},
        "significance": {},
    }
    boot_rng = np.random.default_rng(cfg.bootstrap_seed)
    # blocks[metric] rows: one per (dataset, seed), columns per strategy
    blocks: dict[str, list[list[float | None]]] = {m: [] for m in _METRICS_FOR_SIGNIFICANCE}

    for d_idx, entry in enumerate(cfg.datasets):
        name = entry[0]
        ds = _load_dataset(entry)
        if cfg.target_n is not None:
            target = cfg.target_n
        else:
            ladder = sample_size_ladder(cfg.ladder, ds.n)
            if not ladder:
                raise ValueError(f"dataset {name!r}: ladder is empty at size {ds.n}")
            target = ladder[cfg.ladder_level]
        if target > ds.n:
            raise ValueError(f"dataset {name!r}: target {target} exceeds size {ds.n}")

        truth = ground_truth_outliers(
            ds, k_lof=cfg.k_lof, k_pur=cfg.k_pur,
            lof_thresh=cfg.lof_thresh, purity_thresh=cfg.purity_thresh,
        )
        lof = lof_scores(ds.points, k=cfg.k_lof)
        qseed = cfg.question_seed + 1000003 * d_idx
        region_qs = gen_region_questions(
            ds, cfg.region_questions, qseed, "region", cfg.question_margin
        ) if cfg.region_questions else []
        class_qs = gen_region_questions(
            ds, cfg.class_questions, qseed + 1, "class", cfg.question_margin
        ) if cfg.class_questions and ds.n_classes >= 2 else []

        report["datasets"][name] = {
            "n": ds.n,
            "classes": ds.n_classes,
            "target_n": target,
            "true_outliers": len(truth),
            "region_questions": [q.to_dict() for q in region_qs],
            "class_questions": [q.to_dict() for q in class_qs],
        }
        report["cells"][name] = {}

        per_seed: dict[str, dict[str, list]] = {}
        for s in cfg.strategies:
            vals: dict[str, list] = {m: [] for m in _METRICS_FOR_SIGNIFICANCE}
            vals["sample_size"] = []
            for seed in cfg.seeds:
                params = SamplingParams(target_n=target, seed=seed)
                picked = sample(
                    s, ds, params,
                    outlier_bias=OutlierBiasParams(outlier_scores=lof.scores)
                    if s is StrategyId.OBDBS else None,
                )
                marked = _sample_detected_outliers(ds, picked, cfg)
                pr = precision_recall(marked, truth)
                vals["sample_size"].append(len(picked))
                vals["region_accuracy"].append(
                    question_accuracy(ds, picked, region_qs) if region_qs else None
                )
                vals["class_accuracy"].append(
                    question_accuracy(ds, picked, class_qs) if class_qs else None
                )
                vals["precision"].append(pr.precision)
                vals["recall"].append(pr.recall)
                vals["preservation_ratio"].append(
                    outlier_preservation_ratio(picked, truth) if len(truth) else None
                )
                vals["kde_error"].append(
                    kde_error(ds.points, ds.subset(picked).points,
                              cfg.kde_bandwidth, cfg.kde_grid)
                )
            per_seed[s.value] = vals

        # normalized recall across strategies on this dataset (means over seeds)
        mean_recalls = [float(np.mean(per_seed[s]["recall"])) for s in strat_names]
        nrec = normalized_recall(mean_recalls)
        for s_idx, s in enumerate(strat_names):
            cell: dict = {"seeds": list(cfg.seeds)}
            for metric, values in per_seed[s].items():
                defined = [v for v in values if v is not None]
                entry_out: dict = {"values": values}
                if defined:
                    arr = np.asarray(defined, dtype=np.float64)
                    entry_out["mean"] = float(arr.mean())
                    entry_out["ci95"] = list(_bootstrap_ci(arr, cfg.bootstrap_resamples, boot_rng))
                else:
                    entry_out["mean"] = None
                    entry_out["ci95"] = None
                cell[metric] = entry_out
            cell["normalized_recall"] = float(nrec.values[s_idx])
            cell["normalized_recall_degenerate"] = bool(nrec.degenerate)
            report["cells"][name][s] = cell

        for seed_idx in range(len(cfg.seeds)):
            for metric in _METRICS_FOR_SIGNIFICANCE:
                blocks[metric].append(
                    [per_seed[s][metric][seed_idx] for s in strat_names]
                )

    for metric in _METRICS_FOR_SIGNIFICANCE:
        rows = blocks[metric]
        if any(v is None for row in rows for v in row):
            report["significance"][metric] = {"skipped": "undefined cells"}
            continue
        mat = np.asarray(rows, dtype=np.float64)
        if mat.shape[0] < 2 or mat.shape[1] < 2:
            report["significance"][metric] = {"skipped": "not enough blocks or treatments"}
            continue
        rm = RankMatrix(mat)
        fr = friedman_test(rm, alpha=cfg.alpha)
        sig: dict = {
            "friedman": {
                "statistic": float(fr.statistic),
                "df": fr.df,
                "p_value": float(fr.p_value),
                "degenerate": fr.degenerate,
                "significant": fr.significant,
            },
            "treatments": strat_names,
        }
        if fr.significant:
            sig["conover_p"] = [[float(v) for v in row] for row in conover_posthoc(rm, alpha=cfg.alpha)]
        else:
            sig["conover_p"] = None
        report["significance"][metric] = sig
    return report


def _config_echo(cfg: BenchmarkConfig) -> dict:
    echo: dict = {
        "strategies": [s.value for s in cfg.strategies],
        "seeds": list(cfg.seeds),
        "region_questions": cfg.region_questions,
        "class_questions": cfg.class_questions,
        "question_seed": cfg.question_seed,
        "question_margin": cfg.question_margin,
        "k_lof": cfg.k_lof,
        "k_pur": cfg.k_pur,
        "lof_thresh": cfg.lof_thresh,
        "purity_thresh": cfg.purity_thresh,
        "kde_bandwidth": cfg.kde_bandwidth,
        "kde_grid": cfg.kde_grid,
        "bootstrap_resamples": cfg.bootstrap_resamples,
        "bootstrap_seed": cfg.bootstrap_seed,
        "alpha": cfg.alpha,
        "datasets": [],
    }
    if cfg.target_n is not None:
        echo["target_n"] = cfg.target_n
    else:
        echo["ladder"] = vars(cfg.ladder)
        echo["ladder_level"] = cfg.ladder_level
    for name, spec in cfg.datasets:
        if isinstance(spec, MixtureSpec):
            echo["datasets"].append(
                {"name": name, "type": "mixture", "classes": spec.classes,
                 "n": spec.n, "seed": spec.seed}
            )
        else:
            echo["datasets"].append({"name": name, "type": "csv", "path": str(spec)})
    return echo


def report_to_json(report: dict) -> str:
    """Canonical JSON encoding (sorted keys), byte-stable across runs."""
    return json.dumps(report, sort_keys=True, indent=2) + "\n"
