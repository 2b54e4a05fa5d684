"""Gradient verification against central finite differences.

Used by the test suite to certify every differentiable op: build a scalar
loss from float64 inputs, compare analytic grads with the two-sided
numerical estimate at step h, and report the worst relative error.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from ..rng import KeyedRng
from .autograd import Tensor, concat
from .functional import (attention, causal_mask, cross_entropy, gelu,
                         layer_norm, linear, log_softmax, softmax)
from .rope import apply_rope, base_frequencies, rope_angles


def numerical_grad(f: Callable[[np.ndarray], float], x: np.ndarray,
                   h: float = 1e-4) -> np.ndarray:
    """Central finite differences of a scalar function, coordinate by coordinate."""
    x = x.astype(np.float64)
    out = np.zeros_like(x)
    flat = x.reshape(-1)
    gflat = out.reshape(-1)
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + h
        fp = f(x)
        flat[i] = orig - h
        fm = f(x)
        flat[i] = orig
        gflat[i] = (fp - fm) / (2.0 * h)
    return out


def max_rel_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    denom = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), 1e-3)
    return float(np.max(np.abs(analytic - numeric) / denom))


def check_gradients(build: Callable[[dict[str, Tensor]], Tensor],
                    inputs: dict[str, np.ndarray],
                    h: float = 1e-4) -> dict[str, float]:
    """Compare analytic and numerical gradients for each named input.

    build maps {name: Tensor} to a scalar loss Tensor. Returns the max
    relative error per input name. All math runs in float64.
    """
    tensors = {k: Tensor(v.astype(np.float64), requires_grad=True)
               for k, v in inputs.items()}
    loss = build(tensors)
    loss.backward()
    errors: dict[str, float] = {}
    for name, base in inputs.items():
        analytic = tensors[name].grad
        assert analytic is not None, f"no gradient reached input {name!r}"

        def scalar_f(x: np.ndarray, _name: str = name) -> float:
            local = {k: Tensor(v.astype(np.float64)) for k, v in inputs.items()}
            local[_name] = Tensor(x)
            return float(build(local).data)

        numeric = numerical_grad(scalar_f, base.astype(np.float64), h=h)
        errors[name] = max_rel_error(analytic, numeric)
    return errors


def standard_op_suite(seed: int, h: float = 1e-4) -> dict[str, float]:
    """Gradcheck every differentiable op on small random inputs.

    Returns {op_name: worst relative error across that op's inputs}.
    Inputs are keyed off the seed so distinct seeds exercise distinct
    numerics while staying reproducible.
    """

    def draw(op: str, *shape: int, positive: bool = False) -> np.ndarray:
        x = KeyedRng(seed, "gradcheck", op).normal(shape, dtype=np.float64)
        if positive:
            x = np.abs(x) + 0.5
        return x

    cases: dict[str, tuple[Callable[[dict[str, Tensor]], Tensor], dict[str, np.ndarray]]] = {}

    cases["add_broadcast"] = (
        lambda t: ((t["a"] + t["b"]) * (t["a"] + t["b"])).sum(),
        {"a": draw("add.a", 2, 3, 4), "b": draw("add.b", 3, 1)})
    cases["mul"] = (
        lambda t: (t["a"] * t["b"]).sum(),
        {"a": draw("mul.a", 2, 5), "b": draw("mul.b", 2, 5)})
    cases["div"] = (
        lambda t: (t["a"] / t["b"]).sum(),
        {"a": draw("div.a", 3, 4), "b": draw("div.b", 3, 4, positive=True)})
    cases["pow"] = (
        lambda t: (t["a"] ** 3).mean(),
        {"a": draw("pow.a", 4, 4)})
    cases["matmul_batched"] = (
        lambda t: (t["a"] @ t["b"]).sum(),
        {"a": draw("mm.a", 2, 3, 4), "b": draw("mm.b", 4, 5)})
    cases["reshape_transpose"] = (
        lambda t: (t["a"].reshape(2, 2, 3).transpose(1, 0, 2) * 2.0).sum(),
        {"a": draw("rt.a", 4, 3)})
    cases["gather_rows"] = (
        lambda t: (t["a"][np.array([0, 2, 2, 1])] ** 2).sum(),
        {"a": draw("gr.a", 3, 4)})
    cases["concat"] = (
        lambda t: (concat([t["a"], t["b"]], axis=-1) ** 2).mean(),
        {"a": draw("cc.a", 2, 3), "b": draw("cc.b", 2, 2)})
    cases["exp_log_chain"] = (
        lambda t: (t["a"].exp().log() * t["a"].sqrt()).sum(),
        {"a": draw("el.a", 3, 3, positive=True)})
    cases["tanh"] = (
        lambda t: t["a"].tanh().sum(),
        {"a": draw("th.a", 2, 6)})
    cases["softmax"] = (
        lambda t: (softmax(t["a"], axis=-1) * t["b"]).sum(),
        {"a": draw("sm.a", 2, 5), "b": draw("sm.b", 2, 5)})
    cases["log_softmax"] = (
        lambda t: (log_softmax(t["a"], axis=-1) * t["b"]).sum(),
        {"a": draw("lsm.a", 3, 4), "b": draw("lsm.b", 3, 4)})
    cases["gelu"] = (
        lambda t: gelu(t["a"]).sum(),
        {"a": draw("ge.a", 3, 5)})
    cases["layer_norm"] = (
        lambda t: (layer_norm(t["x"], t["g"], t["b"]) * t["w"]).sum(),
        {"x": draw("ln.x", 2, 3, 6), "g": draw("ln.g", 6),
         "b": draw("ln.b", 6), "w": draw("ln.w", 2, 3, 6)})
    cases["linear_bias"] = (
        lambda t: (linear(t["x"], t["w"], t["b"]) ** 2).sum(),
        {"x": draw("li.x", 3, 4), "w": draw("li.w", 4, 2), "b": draw("li.b", 2)})

    mask = causal_mask(3, dtype=np.float64)
    cases["attention_causal"] = (
        lambda t: (attention(t["q"], t["k"], t["v"], mask=mask, temperature=1.3)
                   * t["w"]).sum(),
        {"q": draw("at.q", 2, 3, 4), "k": draw("at.k", 2, 3, 4),
         "v": draw("at.v", 2, 3, 4), "w": draw("at.w", 2, 3, 4)})

    targets = np.array([1, 0, -100, 3, 2])
    cases["cross_entropy"] = (
        lambda t: cross_entropy(t["x"], targets),
        {"x": draw("ce.x", 5, 4)})

    angles = rope_angles(np.arange(3), base_frequencies(4, 100.0))
    cases["apply_rope"] = (
        lambda t: (apply_rope(t["x"], angles) * t["w"]).sum(),
        {"x": draw("ro.x", 2, 3, 4), "w": draw("ro.w", 2, 3, 4)})

    results: dict[str, float] = {}
    for op, (build, inputs) in cases.items():
        errs = check_gradients(build, inputs, h=h)
        results[op] = max(errs.values())
    return results
