"""Robustness sweeps: synonym substitution rate and Gaussian feature noise.

Every sweep point reruns the full pipeline on the same seeds; stage streams
are independent, so the split and the subgroups are identical across points
and detectors are compared on paired data.
"""

from __future__ import annotations

import logging
from typing import Sequence

from ..errors import ValidationError
from ..strategies import FlowStrategy, create_default_strategies
from .config import ExperimentConfig
from .runner import ExperimentInputs, RunRecord, flow_settings, load_inputs, run_experiment

logger = logging.getLogger(__name__)


def run_synonym_sweep(
    config: ExperimentConfig,
    rates: Sequence[float] | None = None,
    inputs: ExperimentInputs | None = None,
) -> list[RunRecord]:
    """One record per synonym rate, with the flow and both counting baselines.

    Raises:
        ValidationError: a rate outside [0, 1], an empty grid, or no synonym map
    """
    rates = list(config.synonym_rates if rates is None else rates)
    if not rates:
        raise ValidationError("synonym sweep needs at least one rate")
    for rate in rates:
        if not 0.0 <= rate <= 1.0:
            raise ValidationError(f"synonym rate {rate} outside [0, 1]")
    inputs = inputs or load_inputs(config)
    if inputs.synonyms is None and any(rate > 0 for rate in rates):
        raise ValidationError("synonym sweep needs a synonym map (config key 'synonyms')")

    records = []
    for rate in rates:
        logger.info("synonym rate %.2f", rate)
        strategies = create_default_strategies(inputs.table, flow_settings(config))
        records.append(run_experiment(config, strategies, inputs, synonym_rate=rate, label=f"rate_{rate:g}", x=rate))
    return records


def run_noise_sweep(
    config: ExperimentConfig,
    sigmas: Sequence[float] | None = None,
    inputs: ExperimentInputs | None = None,
) -> list[RunRecord]:
    """One record per noise level; noise perturbs training and test vectors alike.

    Raises:
        ValidationError: a negative sigma or an empty grid
    """
    sigmas = list(config.noise_sigmas if sigmas is None else sigmas)
    if not sigmas:
        raise ValidationError("noise sweep needs at least one sigma")
    for sigma in sigmas:
        if sigma < 0:
            raise ValidationError(f"noise sigma {sigma} is negative")
    inputs = inputs or load_inputs(config)

    records = []
    for sigma in sigmas:
        logger.info("noise sigma %g", sigma)
        strategies = {"flow": FlowStrategy(inputs.table, flow_settings(config, noise_sigma=sigma))}
        records.append(run_experiment(config, strategies, inputs, label=f"sigma_{sigma:g}", x=sigma))
    return records
