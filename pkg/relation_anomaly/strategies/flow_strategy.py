"""Embedding + autoencoder + flow detector."""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field

import numpy as np

from ..autoencoder import ae_train, encode, save_ae
from ..embed import EmbeddingTable, add_noise_batch, embed_triplets, vector_width
from ..flow import FlowConfig, flow_train, save_flow, score_batch
from ..graphdata.models import Dataset, SceneGraph, Subgroup
from ..metrics.report import PoolScores, broadcast_scores
from .base import BaseStrategy, SeedContext

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FlowSettings:
    mode: str = "concat"
    d_z: int = 512
    use_ae: bool = True
    ae_epochs: int = 100
    ae_lr: float = 1e-3
    ae_batch_size: int | str = "auto"
    flow: FlowConfig = field(default_factory=FlowConfig)
    noise_sigma: float = 0.0


@dataclass
class FitSummary:
    """Training diagnostics of the most recent seed."""

    input_dim: int = 0
    flow_dim: int = 0
    ae_losses: list[float] = field(default_factory=list)
    flow_losses: list[float] = field(default_factory=list)
    final_lr: float = float("nan")
    n_invalid_scores: int = 0
    train_image_ids: list[str] = field(default_factory=list)


def _embed_graphs(table: EmbeddingTable, graphs: list[SceneGraph], mode: str, scene: str) -> np.ndarray:
    return embed_triplets(table, [t for g in graphs for t in g.triplets], mode, scene=scene)


class FlowStrategy(BaseStrategy):
    """Density of a triplet's latent under a flow fitted to normal triplets.

    Training sees the train split of the scored dataset plus the train side of
    every extra dataset; the test split and every anomalous image are only
    scored.
    """

    def __init__(self, table: EmbeddingTable, settings: FlowSettings | None = None, name: str = "flow"):
        super().__init__(name, needs_training=True)
        self.table = table
        self.settings = settings or FlowSettings()
        self.last_fit = FitSummary()

    @property
    def input_dim(self) -> int:
        return vector_width(self.table.dim, self.settings.mode)

    def score_pools(
        self, dataset: Dataset, subgroups: list[Subgroup], ctx: SeedContext, extra_train: list[Dataset] | None = None
    ) -> PoolScores:
        cfg = self.settings
        summary = FitSummary(input_dim=self.input_dim)

        with ctx.stage("embed"):
            train_sets = [dataset] + list(extra_train or [])
            summary.train_image_ids = [g.image_id for d in train_sets for g in d.train_graphs]
            x_train = np.vstack([_embed_graphs(self.table, d.train_graphs, cfg.mode, d.scene) for d in train_sets])
            test_graphs = dataset.test_graphs
            test_ids = [iid for g in test_graphs for iid in g.instance_ids()]
            x_test = _embed_graphs(self.table, test_graphs, cfg.mode, dataset.scene)
            if cfg.noise_sigma > 0:
                noise_rng = ctx.rng("noise")
                x_train = add_noise_batch(x_train, cfg.noise_sigma, noise_rng)
                x_test = add_noise_batch(x_test, cfg.noise_sigma, noise_rng)
        logger.info("seed %d: %d training / %d test triplets of width %d", ctx.seed, len(x_train), len(x_test), x_train.shape[1])

        if cfg.use_ae:
            with ctx.stage("ae_train"):
                ae = ae_train(x_train, cfg.d_z, cfg.ae_epochs, cfg.ae_lr, ctx.rng("ae_train"), cfg.ae_batch_size)
            summary.ae_losses = ae.losses
            with ctx.stage("encode"):
                z_train = encode(ae.model, x_train)
                z_test = encode(ae.model, x_test)
        else:
            z_train, z_test = x_train, x_test
        summary.flow_dim = z_train.shape[1]

        with ctx.stage("flow_train"):
            flow = flow_train(z_train, cfg.flow, ctx.rng("flow_train"))
        summary.flow_losses = flow.losses
        summary.final_lr = flow.final_lr

        with ctx.stage("score"):
            results = score_batch(flow.model, z_test, test_ids)
            summary.n_invalid_scores = sum(1 for r in results if not r.valid)
            scores = {r.triplet_id: r.score for r in results}
            pools = broadcast_scores(scores, dataset, subgroups)

        if ctx.checkpoint_dir:
            os.makedirs(ctx.checkpoint_dir, exist_ok=True)
            if cfg.use_ae:
                save_ae(os.path.join(ctx.checkpoint_dir, "autoencoder.json"), ae.model, seed=ctx.seed, final_loss=ae.final_loss)
            save_flow(
                os.path.join(ctx.checkpoint_dir, "flow.json"),
                flow.model,
                seed=ctx.seed,
                final_loss=flow.final_loss,
                final_lr=flow.final_lr,
                epochs=cfg.flow.epochs,
            )
        self.last_fit = summary
        return pools
