"""Small feed-forward networks with hand-written reverse-mode gradients.

Layers are affine maps ``y = x @ W + b`` on row batches followed by an
activation tag (``relu`` or ``identity``). The forward pass keeps every layer
input and pre-activation so the backward pass is an exact chain rule.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..errors import DimensionMismatchError, NonFiniteError, ValidationError
from .matrix import DTYPE, Matrix

ACTIVATIONS = ("relu", "identity")


@dataclass(frozen=True)
class DenseLayer:
    weight: np.ndarray  # (in, out)
    bias: np.ndarray  # (out,)
    activation: str = "relu"

    def __post_init__(self):
        if self.activation not in ACTIVATIONS:
            raise ValidationError(f"unknown activation '{self.activation}'")
        if self.weight.ndim != 2 or self.bias.shape != (self.weight.shape[1],):
            raise DimensionMismatchError("bias does not match weight", self.weight.shape, self.bias.shape)

    @property
    def in_dim(self) -> int:
        return self.weight.shape[0]

    @property
    def out_dim(self) -> int:
        return self.weight.shape[1]


@dataclass(frozen=True)
class MlpParams:
    """Ordered dense layers; layer ``i`` output width equals layer ``i+1`` input width."""

    layers: tuple[DenseLayer, ...]

    def __post_init__(self):
        if not self.layers:
            raise ValidationError("an MLP needs at least one layer")
        for i in range(len(self.layers) - 1):
            if self.layers[i].out_dim != self.layers[i + 1].in_dim:
                raise DimensionMismatchError(
                    f"layer {i} output does not feed layer {i + 1}",
                    self.layers[i].weight.shape,
                    self.layers[i + 1].weight.shape,
                )

    @property
    def in_dim(self) -> int:
        return self.layers[0].in_dim

    @property
    def out_dim(self) -> int:
        return self.layers[-1].out_dim

    @property
    def dims(self) -> list[int]:
        return [self.in_dim] + [layer.out_dim for layer in self.layers]

    @property
    def activations(self) -> list[str]:
        return [layer.activation for layer in self.layers]

    def arrays(self) -> list[np.ndarray]:
        """Parameters as a flat list ``[W0, b0, W1, b1, ...]``."""
        out: list[np.ndarray] = []
        for layer in self.layers:
            out.extend((layer.weight, layer.bias))
        return out

    def with_arrays(self, arrays: Sequence[np.ndarray]) -> "MlpParams":
        if len(arrays) != 2 * len(self.layers):
            raise DimensionMismatchError("parameter list length", (2 * len(self.layers),), (len(arrays),))
        layers = []
        for i, layer in enumerate(self.layers):
            w, b = arrays[2 * i], arrays[2 * i + 1]
            if w.shape != layer.weight.shape or b.shape != layer.bias.shape:
                raise DimensionMismatchError(f"layer {i} parameter shape", layer.weight.shape, w.shape)
            layers.append(DenseLayer(np.asarray(w, dtype=DTYPE), np.asarray(b, dtype=DTYPE), layer.activation))
        return MlpParams(tuple(layers))

    def frozen(self) -> "MlpParams":
        """Copy whose arrays are read-only."""
        arrays = [a.copy() for a in self.arrays()]
        for a in arrays:
            a.setflags(write=False)
        return self.with_arrays(arrays)


@dataclass(frozen=True)
class Gradients:
    """Per-layer ``(dW, db)`` pairs, shaped like the parameters they differentiate."""

    weights: tuple[np.ndarray, ...]
    biases: tuple[np.ndarray, ...]

    def arrays(self) -> list[np.ndarray]:
        out: list[np.ndarray] = []
        for w, b in zip(self.weights, self.biases):
            out.extend((w, b))
        return out


@dataclass
class MlpCache:
    """Inputs and pre-activations recorded by :func:`mlp_forward`."""

    inputs: list[Matrix] = field(default_factory=list)
    pre_activations: list[Matrix] = field(default_factory=list)


def _activate(z: Matrix, activation: str) -> Matrix:
    if activation == "relu":
        return np.maximum(z, 0.0)
    return z


def mlp_forward(params: MlpParams, x: Matrix, check_finite: bool = True) -> tuple[Matrix, MlpCache]:
    """Evaluate the network on a row batch.

    Raises:
        DimensionMismatchError: ``x`` width differs from the first layer input.
        NonFiniteError: an intermediate value is NaN/inf (when ``check_finite``).
    """
    x = np.asarray(x, dtype=DTYPE)
    if x.ndim != 2 or x.shape[1] != params.in_dim:
        raise DimensionMismatchError("mlp input width", (params.in_dim,), x.shape)

    cache = MlpCache()
    h = x
    for i, layer in enumerate(params.layers):
        cache.inputs.append(h)
        z = h @ layer.weight + layer.bias
        if check_finite and not np.all(np.isfinite(z)):
            raise NonFiniteError("non-finite pre-activation", layer_index=i)
        cache.pre_activations.append(z)
        h = _activate(z, layer.activation)
    return h, cache


def mlp_backward(params: MlpParams, cache: MlpCache, dy: Matrix) -> tuple[Matrix, Gradients]:
    """Reverse-mode pass for :func:`mlp_forward`.

    Args:
        params: The parameters used in the forward pass
        cache: Cache returned by the matching forward call
        dy: Cotangent of the output, same shape as the output

    Returns:
        ``(dx, grads)``
    """
    if len(cache.inputs) != len(params.layers):
        raise DimensionMismatchError("cache depth", (len(params.layers),), (len(cache.inputs),))
    dy = np.asarray(dy, dtype=DTYPE)
    if dy.shape != cache.pre_activations[-1].shape:
        raise DimensionMismatchError("output cotangent", cache.pre_activations[-1].shape, dy.shape)

    d_weights: list[np.ndarray] = [None] * len(params.layers)  # type: ignore[list-item]
    d_biases: list[np.ndarray] = [None] * len(params.layers)  # type: ignore[list-item]
    grad = dy
    for i in range(len(params.layers) - 1, -1, -1):
        layer = params.layers[i]
        if layer.activation == "relu":
            grad = grad * (cache.pre_activations[i] > 0.0)
        d_weights[i] = cache.inputs[i].T @ grad
        d_biases[i] = grad.sum(axis=0)
        grad = grad @ layer.weight.T
    return grad, Gradients(tuple(d_weights), tuple(d_biases))


def xavier_bound(fan_in: int, fan_out: int) -> float:
    return float(np.sqrt(6.0 / (fan_in + fan_out)))


def init_params(
    seed: int | np.random.Generator,
    layer_dims: Sequence[int],
    scheme: str = "xavier_uniform",
    activations: Sequence[str] | None = None,
    zero_last: bool = False,
) -> MlpParams:
    """Initialise an MLP.

    Weights are drawn from ``U(-a, a)`` with ``a = sqrt(6 / (fan_in + fan_out))``
    and biases are zero. Hidden layers default to ReLU and the output layer to
    identity. ``zero_last`` zeroes the final weight matrix as well.
    """
    dims = list(layer_dims)
    if len(dims) < 2:
        raise ValidationError(f"layer_dims needs at least an input and an output width, got {dims}")
    if any(d < 1 for d in dims):
        raise ValidationError(f"layer widths must be positive, got {dims}")
    if scheme != "xavier_uniform":
        raise ValidationError(f"unknown init scheme '{scheme}'")
    n_layers = len(dims) - 1
    if activations is None:
        activations = ["relu"] * (n_layers - 1) + ["identity"]
    if len(activations) != n_layers:
        raise ValidationError(f"expected {n_layers} activation tags, got {len(activations)}")

    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    layers = []
    for i in range(n_layers):
        fan_in, fan_out = dims[i], dims[i + 1]
        bound = xavier_bound(fan_in, fan_out)
        weight = rng.uniform(-bound, bound, size=(fan_in, fan_out))
        if zero_last and i == n_layers - 1:
            weight = np.zeros((fan_in, fan_out), dtype=DTYPE)
        layers.append(DenseLayer(weight.astype(DTYPE), np.zeros(fan_out, dtype=DTYPE), activations[i]))
    return MlpParams(tuple(layers))
