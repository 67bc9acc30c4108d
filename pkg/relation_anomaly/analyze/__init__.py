"""Experiment orchestration: configs, seeded runs, sweeps, reports and exports.

Usage:
    from relation_anomaly.analyze import load_config, run_experiment, print_report
    record = run_experiment(load_config("experiment.cfg"))
    print_report(record)
"""

from .config import ExperimentConfig, config_hash, load_config, validate_config, with_overrides
from .export import export_scored_graph, normalize_scores, scored_graph_dot
from .profiling import StageProfiler, StageTiming, summarize_durations
from .reports import (
    print_report,
    print_sweep,
    seed_rows,
    summary_dict,
    sweep_rows,
    write_run_outputs,
    write_seed_csvs,
    write_summary,
    write_sweep_csv,
    write_sweep_outputs,
)
from .runner import (
    ABLATION_VARIANTS,
    ExperimentInputs,
    RunRecord,
    flow_settings,
    load_inputs,
    run_ablation,
    run_experiment,
    run_seed,
    scaled_latent,
)
from .seeds import STAGES, stage_rng, stage_seed_sequence
from .sweeps import run_noise_sweep, run_synonym_sweep

__all__ = [
    "ExperimentConfig",
    "load_config",
    "validate_config",
    "with_overrides",
    "config_hash",
    "STAGES",
    "stage_rng",
    "stage_seed_sequence",
    "StageProfiler",
    "StageTiming",
    "summarize_durations",
    "ExperimentInputs",
    "RunRecord",
    "ABLATION_VARIANTS",
    "load_inputs",
    "flow_settings",
    "run_seed",
    "run_experiment",
    "run_ablation",
    "scaled_latent",
    "run_synonym_sweep",
    "run_noise_sweep",
    "seed_rows",
    "summary_dict",
    "sweep_rows",
    "write_seed_csvs",
    "write_summary",
    "write_run_outputs",
    "write_sweep_csv",
    "write_sweep_outputs",
    "print_report",
    "print_sweep",
    "normalize_scores",
    "scored_graph_dot",
    "export_scored_graph",
]
