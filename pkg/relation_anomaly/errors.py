"""Exception hierarchy shared by all sub-packages."""

from __future__ import annotations


class RelationAnomalyError(Exception):
    """Root of every error raised by this package."""


class ValidationError(RelationAnomalyError, ValueError):
    """Malformed input: dataset records, embedding files, ranges."""


class ConfigError(ValidationError):
    """Invalid experiment or generator configuration."""


class DimensionMismatchError(ValidationError):
    """Operand shapes do not chain."""

    def __init__(self, message: str, left: tuple[int, ...] | None = None, right: tuple[int, ...] | None = None):
        if left is not None and right is not None:
            message = f"{message}: {left} vs {right}"
        super().__init__(message)
        self.left = left
        self.right = right


class ContractError(RelationAnomalyError):
    """API used outside its contract (e.g. encoding with an unfrozen model)."""


class NonFiniteError(RelationAnomalyError, ArithmeticError):
    """A NaN or infinity appeared where finite values are required."""

    def __init__(self, message: str, layer_index: int | None = None):
        if layer_index is not None:
            message = f"{message} (layer {layer_index})"
        super().__init__(message)
        self.layer_index = layer_index


class DivergenceError(RelationAnomalyError):
    """Training loss became non-finite."""

    def __init__(self, message: str, epoch: int):
        super().__init__(f"{message} at epoch {epoch}")
        self.epoch = epoch


class StageError(RelationAnomalyError):
    """An error raised inside one pipeline stage for one seed."""

    def __init__(self, stage: str, seed: int, cause: BaseException):
        super().__init__(f"[seed {seed}] stage '{stage}' failed: {type(cause).__name__}: {cause}")
        self.stage = stage
        self.seed = seed
        self.cause = cause
