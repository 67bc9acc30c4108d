"""End-to-end experiment orchestration across seeds."""

from __future__ import annotations

import dataclasses
import logging
import os
from dataclasses import dataclass, field
from typing import Any

from ..embed import EmbeddingTable, load_embeddings, vector_width
from ..errors import StageError, ValidationError
from ..flow import FlowConfig
from ..graphdata import (
    Dataset,
    Subgroup,
    SynonymMap,
    apply_synonyms,
    as_training_set,
    build_subgroups,
    gen_synthetic,
    load_dataset,
    load_stoplist,
    load_synonyms,
    load_synthetic_config,
    preprocess_dataset,
    split_dataset,
)
from ..metrics.report import EvalReport, SeedReport, aggregate, evaluate_pools
from ..strategies import BaseStrategy, FlowSettings, FlowStrategy, SeedContext, create_default_strategies
from .config import ExperimentConfig, config_hash
from .profiling import StageProfiler
from .seeds import stage_rng

logger = logging.getLogger(__name__)

# Latent sizes of the design-study variants assume 300-d word vectors.
REFERENCE_DIM = 300


@dataclass
class ExperimentInputs:
    """Files of a config, loaded once and shared by every seed and sweep point."""

    datasets: list[Dataset]
    train_only: list[Dataset]
    table: EmbeddingTable
    stoplist: frozenset[str] = frozenset()
    synonyms: SynonymMap | None = None


def load_inputs(config: ExperimentConfig) -> ExperimentInputs:
    datasets = [load_dataset(p) for p in config.datasets]
    if config.synthetic_spec:
        datasets.append(gen_synthetic(load_synthetic_config(config.synthetic_spec), config.synthetic_seed))
    if config.scene is not None:
        datasets = [d for d in datasets if d.scene == config.scene]
        if not datasets:
            raise ValidationError(f"no dataset has scene '{config.scene}'")
    return ExperimentInputs(
        datasets=datasets,
        train_only=[load_dataset(p) for p in config.train_only_datasets],
        table=load_embeddings(config.embeddings),
        stoplist=load_stoplist(config.stoplist) if config.stoplist else frozenset(),
        synonyms=load_synonyms(config.synonyms) if config.synonyms else None,
    )


def flow_settings(config: ExperimentConfig, **changes: Any) -> FlowSettings:
    flow = FlowConfig(
        epochs=config.flow_epochs,
        lr=config.flow_lr,
        hidden=config.flow_hidden,
        clamp=config.flow_clamp,
        weight_decay=config.flow_weight_decay,
        batch_size=config.flow_batch_size,
        plateau_factor=config.plateau_factor,
        plateau_patience=config.plateau_patience,
        min_lr=config.min_lr,
    )
    values: dict[str, Any] = dict(
        mode=config.mode,
        d_z=config.d_z,
        ae_epochs=config.ae_epochs,
        ae_lr=config.ae_lr,
        ae_batch_size=config.ae_batch_size,
        flow=flow,
    )
    values.update(changes)
    return FlowSettings(**values)


@dataclass
class RunRecord:
    """Per-seed reports of every detector, plus timing and training diagnostics."""

    config_hash: str
    label: str = ""
    x: float | None = None
    reports: dict[str, list[SeedReport]] = field(default_factory=dict)
    durations: dict[int, dict[str, float]] = field(default_factory=dict)
    failures: dict[int, str] = field(default_factory=dict)
    fit: dict[int, dict[str, Any]] = field(default_factory=dict)
    scores: dict[tuple[str, str, int], dict[str, float]] = field(default_factory=dict)
    prepared: dict[tuple[str, int], Dataset] = field(default_factory=dict)

    @property
    def methods(self) -> list[str]:
        return list(self.reports)

    @property
    def ok(self) -> bool:
        return not self.failures

    def scenes(self, method: str) -> list[str]:
        return list(dict.fromkeys(r.scene for r in self.reports.get(method, [])))

    def evaluation(self, method: str, scene: str | None = None) -> EvalReport:
        reports = self.reports.get(method, [])
        scene = scene if scene is not None else (reports[0].scene if reports else "")
        return aggregate([r for r in reports if r.scene == scene])


def _pooled_scores(pools: dict[str, dict[str, float]]) -> dict[str, float]:
    collected: dict[str, list[float]] = {}
    for scores in pools.values():
        for instance_id, score in scores.items():
            collected.setdefault(instance_id, []).append(score)
    return {k: sum(v) / len(v) for k, v in collected.items()}


def run_seed(
    config: ExperimentConfig,
    inputs: ExperimentInputs,
    strategies: dict[str, BaseStrategy],
    seed: int,
    record: RunRecord,
    synonym_rate: float = 0.0,
    keep_scores: bool = False,
) -> None:
    """One seed of the pipeline; results and failures land in ``record``."""
    profiler = StageProfiler(seed=seed)
    checkpoint_dir = None
    if config.save_checkpoints:
        checkpoint_dir = os.path.join(config.output_dir, "checkpoints", *([record.label] if record.label else []), f"seed_{seed}")
    ctx = SeedContext(seed=seed, rng=lambda stage: stage_rng(seed, stage), stage=profiler.stage, checkpoint_dir=checkpoint_dir)

    try:
        extras = inputs.train_only
        targets = inputs.datasets
        if synonym_rate > 0:
            if inputs.synonyms is None:
                raise StageError("synonyms", seed, ValidationError("a synonym rate needs a synonym map"))
            with profiler.stage("synonyms"):
                rng = ctx.rng("synonyms")
                targets = [apply_synonyms(d, inputs.synonyms, synonym_rate, rng) for d in targets]
                extras = [apply_synonyms(d, inputs.synonyms, synonym_rate, rng) for d in extras]
        evaluated_ids = {g.image_id for d in targets for g in d.graphs}
        with profiler.stage("preprocess"):
            extras = [as_training_set(d, evaluated_ids) for d in extras]
            extras = [preprocess_dataset(d, config.top_k, inputs.stoplist, config.corrected) for d in extras if d.graphs]

        evaluated: list[tuple[Dataset, list[Subgroup]]] = []
        for dataset in targets:
            with profiler.stage("split"):
                split = split_dataset(dataset, config.train_fraction, ctx.rng("split"))
            with profiler.stage("preprocess"):
                prepared = preprocess_dataset(split, config.top_k, inputs.stoplist, config.corrected)
            with profiler.stage("subgroups"):
                subgroups = build_subgroups(prepared, config.subgroup_size, ctx.rng("subgroups"))
            evaluated.append((prepared, subgroups))

        for prepared, subgroups in evaluated:
            if keep_scores:
                record.prepared[(prepared.scene, seed)] = prepared
            # train splits of the other evaluated scenes, then train-only files
            training = [other for other, _ in evaluated if other is not prepared] + extras

            scene_ctx = dataclasses.replace(
                ctx, checkpoint_dir=os.path.join(checkpoint_dir, prepared.scene) if checkpoint_dir else None
            )
            for name, strategy in strategies.items():
                pools = strategy.score_pools(prepared, subgroups, scene_ctx, training if strategy.needs_training else None)
                with profiler.stage("evaluate"):
                    report = evaluate_pools(pools, prepared, subgroups, seed, config.k_min, config.k_max)
                record.reports.setdefault(name, []).append(report)
                if keep_scores:
                    record.scores[(name, prepared.scene, seed)] = _pooled_scores(pools)
                if isinstance(strategy, FlowStrategy):
                    fit = strategy.last_fit
                    record.fit.setdefault(seed, {})[prepared.scene] = {
                        "input_dim": fit.input_dim,
                        "flow_dim": fit.flow_dim,
                        "ae_final_loss": fit.ae_losses[-1] if fit.ae_losses else None,
                        "ae_first_loss": fit.ae_losses[0] if fit.ae_losses else None,
                        "flow_final_loss": fit.flow_losses[-1],
                        "flow_final_lr": fit.final_lr,
                        "invalid_scores": fit.n_invalid_scores,
                        "train_images": len(fit.train_image_ids),
                    }
                logger.info(
                    "seed %d %s/%s: AUROC %.4f, AUC-Recall@k %.4f",
                    seed,
                    prepared.scene,
                    name,
                    report.auroc,
                    report.auc_recall_k,
                )
    except StageError as e:
        logger.error("%s", e)
        record.failures[seed] = str(e)
        for reports in record.reports.values():
            reports[:] = [r for r in reports if r.seed != seed]
    finally:
        record.durations[seed] = profiler.durations


def run_experiment(
    config: ExperimentConfig,
    strategies: dict[str, BaseStrategy] | None = None,
    inputs: ExperimentInputs | None = None,
    synonym_rate: float = 0.0,
    label: str = "",
    x: float | None = None,
    keep_scores: bool = False,
) -> RunRecord:
    """Run every configured seed; a failing seed is recorded and the rest continue.

    Args:
        config: Validated experiment config
        strategies: Detectors to evaluate (default: flow, counting, soft counting)
        inputs: Preloaded files, shared across sweep points
        synonym_rate: Synonym substitution rate applied before splitting
        label: Name of this run inside a sweep
        x: Sweep coordinate of this run
        keep_scores: Keep pooled instance scores and preprocessed datasets
    """
    inputs = inputs or load_inputs(config)
    if strategies is None:
        strategies = create_default_strategies(inputs.table, flow_settings(config))
    record = RunRecord(config_hash=config_hash(config), label=label, x=x)
    logger.info("run %s: %d seeds, detectors %s", label or record.config_hash[:12], len(config.seeds), list(strategies))
    for seed in config.seeds:
        run_seed(config, inputs, strategies, seed, record, synonym_rate=synonym_rate, keep_scores=keep_scores)
    if record.failures:
        logger.warning("%d of %d seeds failed", len(record.failures), len(config.seeds))
    return record


ABLATION_VARIANTS = ("feature_sum", "feature_mult", "node_only", "no_ae", "template", "latent_sweep")

# (mode, latent size for 300-d vectors, autoencoder on)
_VARIANT_TABLE: dict[str, tuple[str, int | None, bool]] = {
    "feature_sum": ("sum", 128, True),
    "feature_mult": ("mult", 128, True),
    "node_only": ("node_only", 512, True),
    "no_ae": ("concat", None, False),
    "template": ("template", 128, True),
}


def scaled_latent(d_z: int, input_dim: int, table_dim: int) -> int:
    """Map a latent size chosen for 300-d vectors onto the current table."""
    if table_dim == REFERENCE_DIM:
        return d_z
    scaled = int(round(d_z * table_dim / REFERENCE_DIM))
    return max(2, min(scaled, input_dim - 1))


def run_ablation(
    config: ExperimentConfig, variant: str, inputs: ExperimentInputs | None = None
) -> list[RunRecord]:
    """Run one design-study variant with the flow detector.

    ``latent_sweep`` yields one record per ``config.latent_grid`` entry; every
    other variant yields a single record.

    Raises:
        ValidationError: unknown variant
    """
    if variant not in ABLATION_VARIANTS:
        raise ValidationError(f"unknown ablation variant '{variant}', expected one of {ABLATION_VARIANTS}")
    inputs = inputs or load_inputs(config)
    dim = inputs.table.dim

    if variant == "latent_sweep":
        records = []
        concat_width = vector_width(dim, "concat")
        for grid_dz in config.latent_grid:
            d_z = scaled_latent(grid_dz, concat_width, dim)
            if d_z != grid_dz:
                logger.warning("latent size %d rescaled to %d for %d-d vectors", grid_dz, d_z, dim)
            settings = flow_settings(config, mode="concat", d_z=d_z)
            strategies = {"flow": FlowStrategy(inputs.table, settings)}
            records.append(run_experiment(config, strategies, inputs, label=f"latent_{grid_dz}", x=float(d_z)))
        return records

    mode, reference_dz, use_ae = _VARIANT_TABLE[variant]
    width = vector_width(dim, mode)
    if use_ae:
        d_z = scaled_latent(reference_dz, width, dim)
        if d_z != reference_dz:
            logger.warning("%s: latent size %d rescaled to %d for %d-d vectors", variant, reference_dz, d_z, dim)
    else:
        d_z = width
    settings = flow_settings(config, mode=mode, d_z=d_z, use_ae=use_ae)
    strategies = {"flow": FlowStrategy(inputs.table, settings)}
    return [run_experiment(config, strategies, inputs, label=variant, x=float(d_z))]
