"""Report emission: per-seed CSVs, JSON summaries, sweep CSVs and console tables."""

from __future__ import annotations

import logging
import os
from typing import Any, Sequence

from ..serializers import write_csv, write_json
from .profiling import summarize_durations
from .runner import RunRecord

logger = logging.getLogger(__name__)

SEED_HEADER = ("scene", "seed", "auroc", "auc_recall_k")
SWEEP_HEADER = ("x", "method", "scene", "metric", "y", "y_err")
METRICS = ("auroc", "auc_recall_k")


def seed_rows(record: RunRecord, method: str) -> list[tuple[str, int, float, float]]:
    """Per-seed metric rows of one detector, ordered by scene then seed."""
    rows = [(r.scene, r.seed, r.auroc, r.auc_recall_k) for r in record.reports.get(method, [])]
    return sorted(rows, key=lambda row: (row[0], row[1]))


def _prefix(record: RunRecord) -> str:
    return f"{record.label}_" if record.label else ""


def write_seed_csvs(record: RunRecord, out_dir: str) -> list[str]:
    """Write ``[<label>_]<method>_seeds.csv`` per detector. No timing fields."""
    paths = []
    for method in record.methods:
        path = os.path.join(out_dir, f"{_prefix(record)}{method}_seeds.csv")
        paths.append(write_csv(path, SEED_HEADER, seed_rows(record, method)))
    return paths


def summary_dict(record: RunRecord) -> dict[str, Any]:
    methods: dict[str, dict[str, Any]] = {}
    for method in record.methods:
        methods[method] = {scene: record.evaluation(method, scene).to_dict() for scene in record.scenes(method)}
    return {
        "config_hash": record.config_hash,
        "label": record.label,
        "x": record.x,
        "methods": methods,
        "failures": {str(seed): msg for seed, msg in record.failures.items()},
        "durations_ms": summarize_durations(record.durations),
        "fit": {str(seed): per_scene for seed, per_scene in record.fit.items()},
    }


def write_summary(record: RunRecord, out_dir: str) -> str:
    return write_json(os.path.join(out_dir, f"{_prefix(record)}summary.json"), summary_dict(record))


def write_run_outputs(record: RunRecord, out_dir: str) -> list[str]:
    paths = write_seed_csvs(record, out_dir)
    paths.append(write_summary(record, out_dir))
    logger.info("wrote %d report files to %s", len(paths), out_dir)
    return paths


def sweep_rows(records: Sequence[RunRecord]) -> list[tuple[float, str, str, str, float, float]]:
    """Plot-ready rows: mean (``y``) and sample std (``y_err``) over seeds per sweep point."""
    rows = []
    for record in records:
        x = record.x if record.x is not None else float("nan")
        for method in record.methods:
            for scene in record.scenes(method):
                evaluation = record.evaluation(method, scene)
                rows.append((x, method, scene, "auroc", evaluation.auroc_mean, evaluation.auroc_std))
                rows.append((x, method, scene, "auc_recall_k", evaluation.auc_recall_k_mean, evaluation.auc_recall_k_std))
    return rows


def write_sweep_csv(records: Sequence[RunRecord], path: str) -> str:
    return write_csv(path, SWEEP_HEADER, sweep_rows(records))


def write_sweep_outputs(records: Sequence[RunRecord], out_dir: str, name: str) -> list[str]:
    paths = []
    for record in records:
        paths.extend(write_run_outputs(record, out_dir))
    paths.append(write_sweep_csv(records, os.path.join(out_dir, f"{name}_sweep.csv")))
    return paths


def print_report(record: RunRecord, title: str = "ANOMALY DETECTION REPORT") -> None:
    """Print formatted mean ± std per detector and scene."""
    print(f"\n{'=' * 70}")
    print(title if not record.label else f"{title} ({record.label})")
    print("=" * 70)
    print(f"Config hash: {record.config_hash[:16]}")
    print(f"\n{'Detector':<16} {'Scene':<14} {'Seeds':<6} {'AUROC':<18} {'AUC-Recall@k':<18}")
    print("-" * 70)
    for method in record.methods:
        for scene in record.scenes(method):
            e = record.evaluation(method, scene)
            auroc_cell = f"{100 * e.auroc_mean:.2f} ± {100 * e.auroc_std:.2f}"
            recall_cell = f"{100 * e.auc_recall_k_mean:.2f} ± {100 * e.auc_recall_k_std:.2f}"
            print(f"{method:<16} {scene:<14} {len(e.reports):<6} {auroc_cell:<18} {recall_cell:<18}")

    if record.failures:
        print("\nFailed seeds:")
        for seed, message in sorted(record.failures.items()):
            print(f"   seed {seed}: {message}")

    stages = summarize_durations(record.durations)
    if stages:
        slowest = max(stages.items(), key=lambda item: item[1]["mean_ms"])
        print(f"\nSlowest stage: {slowest[0]} ({slowest[1]['mean_ms']:.0f} ms mean per seed)")
    print("=" * 70)


def print_sweep(records: Sequence[RunRecord], title: str) -> None:
    print(f"\n{'=' * 70}")
    print(title)
    print("=" * 70)
    print(f"{'x':<10} {'Detector':<16} {'Scene':<14} {'AUROC':<18} {'AUC-Recall@k':<18}")
    print("-" * 70)
    for record in records:
        x = "-" if record.x is None else f"{record.x:g}"
        for method in record.methods:
            for scene in record.scenes(method):
                e = record.evaluation(method, scene)
                auroc_cell = f"{100 * e.auroc_mean:.2f} ± {100 * e.auroc_std:.2f}"
                recall_cell = f"{100 * e.auc_recall_k_mean:.2f} ± {100 * e.auc_recall_k_std:.2f}"
                print(f"{x:<10} {method:<16} {scene:<14} {auroc_cell:<18} {recall_cell:<18}")
    failed = sum(len(r.failures) for r in records)
    if failed:
        print(f"\n{failed} seed runs failed; see the JSON summaries")
    print("=" * 70)
