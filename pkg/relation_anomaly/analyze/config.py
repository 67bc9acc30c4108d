"""Experiment configuration.

Configs are ``key = value`` text files (``#`` starts a comment) read with
python-dotenv. List values are comma separated; relative paths resolve
against the config file's directory.
"""

from __future__ import annotations

import hashlib
import os
from typing import Any, Literal

import pydantic
from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..errors import ConfigError
from ..serializers import serialize_json

PATH_KEYS = ("datasets", "train_only_datasets", "synthetic_spec", "embeddings", "stoplist", "synonyms")
LIST_KEYS = ("datasets", "train_only_datasets", "seeds", "synonym_rates", "noise_sigmas", "latent_grid")

# Fields that do not change what a run computes.
_UNHASHED = ("output_dir", "seeds")


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    scene: str | None = Field(default=None, description="Evaluate only datasets of this scene")
    datasets: list[str] = Field(default_factory=list)
    train_only_datasets: list[str] = Field(default_factory=list)
    synthetic_spec: str | None = None
    synthetic_seed: int = 0
    embeddings: str
    stoplist: str | None = None
    synonyms: str | None = None

    mode: Literal["concat", "sum", "mult", "node_only", "template"] = "concat"
    d_z: int = Field(default=512, ge=2)
    top_k: int = Field(default=30, ge=1)
    train_fraction: float = Field(default=0.8, gt=0, lt=1)
    subgroup_size: int = Field(default=11, ge=2)
    corrected: bool = True

    ae_epochs: int = Field(default=100, ge=1)
    ae_lr: float = Field(default=1e-3, gt=0)
    ae_batch_size: int | Literal["auto"] = "auto"

    flow_epochs: int = Field(default=1000, ge=1)
    flow_lr: float = Field(default=1e-4, gt=0)
    flow_hidden: int = Field(default=128, ge=1)
    flow_weight_decay: float = Field(default=0.01, ge=0)
    flow_clamp: float | None = Field(default=4.0, gt=0)
    flow_batch_size: int | Literal["auto"] = "auto"
    plateau_factor: float = Field(default=0.8, gt=0, lt=1)
    plateau_patience: int = Field(default=30, ge=1)
    min_lr: float = Field(default=1e-7, gt=0)

    k_min: int = Field(default=1, ge=1)
    k_max: int = Field(default=100, ge=1)
    seeds: list[int] = Field(default_factory=lambda: list(range(10)), min_length=1)
    synonym_rates: list[float] = Field(default_factory=lambda: [0.0, 0.25, 0.5, 0.75, 1.0])
    noise_sigmas: list[float] = Field(default_factory=lambda: [0.01, 0.05, 0.10])
    latent_grid: list[int] = Field(default_factory=lambda: [64, 128, 256, 512, 768])

    save_checkpoints: bool = False
    output_dir: str = "results"

    @field_validator("synonym_rates")
    @classmethod
    def _rates_in_unit_interval(cls, rates: list[float]) -> list[float]:
        for rate in rates:
            if not 0.0 <= rate <= 1.0:
                raise ValueError(f"synonym rate {rate} outside [0, 1]")
        return rates

    @field_validator("noise_sigmas")
    @classmethod
    def _sigmas_non_negative(cls, sigmas: list[float]) -> list[float]:
        for sigma in sigmas:
            if sigma < 0:
                raise ValueError(f"noise sigma {sigma} is negative")
        return sigmas

    @field_validator("latent_grid")
    @classmethod
    def _grid_positive(cls, grid: list[int]) -> list[int]:
        if any(d < 2 for d in grid):
            raise ValueError("latent grid values must be >= 2")
        return grid

    @model_validator(mode="after")
    def _check(self) -> "ExperimentConfig":
        if not self.datasets and not self.synthetic_spec:
            raise ValueError("either datasets or synthetic_spec must be set")
        if self.k_min > self.k_max:
            raise ValueError(f"k_min {self.k_min} exceeds k_max {self.k_max}")
        if self.min_lr > self.flow_lr:
            raise ValueError(f"min_lr {self.min_lr} exceeds flow_lr {self.flow_lr}")
        if len(set(self.seeds)) != len(self.seeds):
            raise ValueError("seed list contains duplicates")
        for key in PATH_KEYS:
            value = getattr(self, key)
            for path in value if isinstance(value, list) else [value]:
                if path is not None and not os.path.isfile(path):
                    raise ValueError(f"{key}: file not found: {path}")
        return self


def _parse_raw(raw: dict[str, str | None], base_dir: str) -> dict[str, Any]:
    values: dict[str, Any] = {}
    for key, value in raw.items():
        value = (value or "").strip()
        if key in LIST_KEYS:
            values[key] = [item.strip() for item in value.split(",") if item.strip()]
        elif value == "" or (key == "flow_clamp" and value.lower() == "none"):
            values[key] = None
        else:
            values[key] = value
    for key in PATH_KEYS:
        value = values.get(key)
        if isinstance(value, list):
            values[key] = [os.path.normpath(os.path.join(base_dir, p)) for p in value]
        elif isinstance(value, str):
            values[key] = os.path.normpath(os.path.join(base_dir, value))
    if "output_dir" in values and values["output_dir"]:
        values["output_dir"] = os.path.normpath(os.path.join(base_dir, values["output_dir"]))
    return {k: v for k, v in values.items() if v is not None or k == "flow_clamp"}


def validate_config(values: dict[str, Any], source: str = "<config>") -> ExperimentConfig:
    try:
        return ExperimentConfig.model_validate(values)
    except pydantic.ValidationError as e:
        first = e.errors()[0]
        location = ".".join(str(part) for part in first["loc"]) or "<config>"
        raise ConfigError(f"{source}: {location}: {first['msg']}") from e


def load_config(path: str, **overrides: Any) -> ExperimentConfig:
    """Read a key-value config file; keyword overrides win over file values.

    Raises:
        ConfigError: unknown key, out-of-range value or missing file.
    """
    if not os.path.isfile(path):
        raise ConfigError(f"config file not found: {path}")
    raw = dotenv_values(path)
    values = _parse_raw(raw, os.path.dirname(os.path.abspath(path)))
    values.update({k: v for k, v in overrides.items() if v is not None})
    return validate_config(values, source=path)


def with_overrides(config: ExperimentConfig, **overrides: Any) -> ExperimentConfig:
    values = config.model_dump()
    values.update(overrides)
    return validate_config(values)


def config_hash(config: ExperimentConfig) -> str:
    """SHA-256 of the canonical config, independent of paths' directories."""
    values = config.model_dump(exclude=set(_UNHASHED))
    for key in PATH_KEYS:
        value = values.get(key)
        if isinstance(value, list):
            values[key] = [os.path.basename(p) for p in value]
        elif isinstance(value, str):
            values[key] = os.path.basename(value)
    return hashlib.sha256(serialize_json(values, compact=True).encode("utf-8")).hexdigest()
