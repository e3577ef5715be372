"""Small fully connected Q-network with hand-written backprop and Adam.

Weights are stored as (fan_out, fan_in) matrices so a layer computes
``z = x @ W.T + b``. Hidden layers use ReLU, the output layer is linear.
Inputs may be a single vector or a (batch, features) matrix.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


class ConfigurationError(ValueError):
    pass


@dataclass
class NetworkParams:
    layer_sizes: list[int]
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    m_weights: list[np.ndarray]
    v_weights: list[np.ndarray]
    m_biases: list[np.ndarray]
    v_biases: list[np.ndarray]
    step: int = 0
    seed: int | None = None

    @property
    def n_inputs(self) -> int:
        return self.layer_sizes[0]

    @property
    def n_outputs(self) -> int:
        return self.layer_sizes[-1]

    def copy(self) -> "NetworkParams":
        cp = lambda arrs: [a.copy() for a in arrs]  # noqa: E731
        return NetworkParams(
            list(self.layer_sizes),
            cp(self.weights), cp(self.biases),
            cp(self.m_weights), cp(self.v_weights),
            cp(self.m_biases), cp(self.v_biases),
            self.step, self.seed,
        )

    def snapshot(self) -> "NetworkParams":
        """Copy of weights and biases only; the optimiser state is shared, not copied."""
        return NetworkParams(
            list(self.layer_sizes),
            [w.copy() for w in self.weights], [b.copy() for b in self.biases],
            self.m_weights, self.v_weights, self.m_biases, self.v_biases,
            self.step, self.seed,
        )

    def to_dict(self) -> dict:
        # json emits floats with repr(), which round-trips float64 exactly
        return {
            "layer_sizes": list(self.layer_sizes),
            "seed": self.seed,
            "weights": [w.tolist() for w in self.weights],
            "biases": [b.tolist() for b in self.biases],
            "adam": {
                "step": self.step,
                "m_weights": [a.tolist() for a in self.m_weights],
                "v_weights": [a.tolist() for a in self.v_weights],
                "m_biases": [a.tolist() for a in self.m_biases],
                "v_biases": [a.tolist() for a in self.v_biases],
            },
        }

    @classmethod
    def from_dict(cls, d: dict) -> "NetworkParams":
        sizes = [int(s) for s in d["layer_sizes"]]
        arr = lambda xs: [np.asarray(x, dtype=np.float64) for x in xs]  # noqa: E731
        adam = d["adam"]
        params = cls(
            sizes, arr(d["weights"]), arr(d["biases"]),
            arr(adam["m_weights"]), arr(adam["v_weights"]),
            arr(adam["m_biases"]), arr(adam["v_biases"]),
            int(adam["step"]), d.get("seed"),
        )
        _check_shapes(params)
        return params


@dataclass
class Gradients:
    weights: list[np.ndarray]
    biases: list[np.ndarray]

    def all_finite(self) -> bool:
        return all(np.isfinite(g).all() for g in self.weights + self.biases)


@dataclass
class ForwardTrace:
    # activations[0] is the input, activations[-1] the output
    activations: list[np.ndarray] = field(default_factory=list)
    pre_activations: list[np.ndarray] = field(default_factory=list)
    single: bool = False

    @property
    def output(self) -> np.ndarray:
        out = self.activations[-1]
        return out[0] if self.single else out


def _check_shapes(params: NetworkParams) -> None:
    sizes = params.layer_sizes
    n = len(sizes) - 1
    groups = (params.weights, params.biases, params.m_weights,
              params.v_weights, params.m_biases, params.v_biases)
    if any(len(g) != n for g in groups):
        raise ConfigurationError("parameter list lengths do not match layer_sizes")
    for l in range(n):
        wshape = (sizes[l + 1], sizes[l])
        for w in (params.weights[l], params.m_weights[l], params.v_weights[l]):
            if w.shape != wshape:
                raise ConfigurationError(f"layer {l}: weight shape {w.shape} != {wshape}")
        for b in (params.biases[l], params.m_biases[l], params.v_biases[l]):
            if b.shape != (sizes[l + 1],):
                raise ConfigurationError(f"layer {l}: bias shape {b.shape} != ({sizes[l + 1]},)")


def init_network(layer_sizes, seed: int) -> NetworkParams:
    """Glorot-uniform weights, zero biases, zeroed Adam moments."""
    sizes = [int(s) for s in layer_sizes]
    if len(sizes) < 2 or any(s < 1 for s in sizes):
        raise ConfigurationError(f"invalid layer_sizes {list(layer_sizes)}")
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    zeros = lambda arrs: [np.zeros_like(a) for a in arrs]  # noqa: E731
    return NetworkParams(sizes, weights, biases, zeros(weights), zeros(weights),
                         zeros(biases), zeros(biases), 0, seed)


def forward(params: NetworkParams, x) -> ForwardTrace:
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    if single:
        x = x[None, :]
    if x.ndim != 2 or x.shape[1] != params.n_inputs:
        raise ValueError(f"input has shape {x.shape}, network expects {params.n_inputs} features")
    trace = ForwardTrace(activations=[x], single=single)
    h = x
    last = len(params.weights) - 1
    for l, (w, b) in enumerate(zip(params.weights, params.biases)):
        z = h @ w.T + b
        trace.pre_activations.append(z)
        h = z if l == last else np.maximum(z, 0.0)
        trace.activations.append(h)
    return trace


def predict(params: NetworkParams, x) -> np.ndarray:
    return forward(params, x).output


def backward(params: NetworkParams, trace: ForwardTrace, target, action_mask) -> Gradients:
    """Gradients of the masked squared error ``0.5 * (Q(s, a) - y)**2``.

    Only the output selected by ``action_mask`` contributes. For a batch the
    per-sample losses are averaged.
    """
    out = trace.activations[-1]
    target = np.asarray(target, dtype=np.float64).reshape(out.shape)
    mask = np.asarray(action_mask, dtype=bool).reshape(out.shape)
    if not (mask.sum(axis=1) == 1).all():
        raise ValueError("action_mask must select exactly one output per sample")

    n = out.shape[0]
    delta = np.where(mask, out - target, 0.0) / n
    n_layers = len(params.weights)
    gw: list[np.ndarray] = [None] * n_layers  # type: ignore[list-item]
    gb: list[np.ndarray] = [None] * n_layers  # type: ignore[list-item]
    for l in range(n_layers - 1, -1, -1):
        gw[l] = delta.T @ trace.activations[l]
        gb[l] = delta.sum(axis=0)
        if l > 0:
            delta = (delta @ params.weights[l]) * (trace.pre_activations[l - 1] > 0)
    return Gradients(gw, gb)


def masked_loss(params: NetworkParams, x, target, action_mask) -> float:
    """Mean over the batch of ``0.5 * (Q(s, a) - y)**2`` (what backward differentiates)."""
    out = forward(params, x).activations[-1]
    target = np.asarray(target, dtype=np.float64).reshape(out.shape)
    mask = np.asarray(action_mask, dtype=bool).reshape(out.shape)
    err = np.where(mask, out - target, 0.0).sum(axis=1)
    return float(0.5 * np.mean(err ** 2))


def adam_step(params: NetworkParams, grads: Gradients, learning_rate: float,
              beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8) -> NetworkParams:
    """In-place bias-corrected Adam update. Returns ``params``."""
    if learning_rate <= 0:
        raise ValueError("learning_rate must be positive")
    if not grads.all_finite():
        raise FloatingPointError("non-finite gradient")
    params.step += 1
    t = params.step
    c1 = 1.0 - beta1 ** t
    c2 = 1.0 - beta2 ** t
    groups = (
        (params.weights, params.m_weights, params.v_weights, grads.weights),
        (params.biases, params.m_biases, params.v_biases, grads.biases),
    )
    for values, ms, vs, gs in groups:
        for p, m, v, g in zip(values, ms, vs, gs):
            if p.shape != g.shape:
                raise ValueError(f"gradient shape {g.shape} != parameter shape {p.shape}")
            m *= beta1
            m += (1.0 - beta1) * g
            v *= beta2
            v += (1.0 - beta2) * g * g
            p -= learning_rate * (m / c1) / (np.sqrt(v / c2) + eps)
    return params


def save_network(params: NetworkParams, path) -> None:
    Path(path).write_text(json.dumps(params.to_dict(), indent=1) + "\n", encoding="utf-8")


def load_network(path) -> NetworkParams:
    return NetworkParams.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
