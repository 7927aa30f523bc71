from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from vivada import constants as C
from vivada.errors import DimensionError
from vivada.tensor.graph import Params


@dataclass
class AdamState:
    lr: float = C.LEARNING_RATE
    beta1: float = C.ADAM_BETA1
    beta2: float = C.ADAM_BETA2
    eps: float = C.ADAM_EPSILON
    step: int = 0
    m: Params = field(default_factory=dict)
    v: Params = field(default_factory=dict)

    @classmethod
    def create(cls, params: Params, **hyper) -> "AdamState":
        state = cls(**hyper)
        for name, p in params.items():
            state.m[name] = np.zeros_like(p)
            state.v[name] = np.zeros_like(p)
        return state


def adam_step(params: Params, grads: Params, state: AdamState) -> tuple[Params, AdamState]:
    """Bias-corrected Adam, applied in place."""
    for name, p in params.items():
        g = grads.get(name)
        if g is None or g.shape != p.shape:
            got = None if g is None else g.shape
            raise DimensionError(f"adam_step: gradient for {name} has shape {got}, parameter {p.shape}")
        if name not in state.m:
            state.m[name] = np.zeros_like(p)
            state.v[name] = np.zeros_like(p)

    state.step += 1
    correction1 = 1.0 - state.beta1**state.step
    correction2 = 1.0 - state.beta2**state.step
    for name, p in params.items():
        g = grads[name]
        m, v = state.m[name], state.v[name]
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * g * g
        m_hat = m / correction1
        v_hat = v / correction2
        p -= (state.lr * m_hat / (np.sqrt(v_hat) + state.eps)).astype(p.dtype, copy=False)
    return params, state


def global_norm(grads: Params) -> float:
    return float(np.sqrt(sum(float(np.sum(g.astype(np.float64) ** 2)) for g in grads.values())))


def clip_by_global_norm(grads: Params, max_norm: Optional[float]) -> float:
    """Scale `grads` in place so their joint l2 norm is at most `max_norm`; returns the norm before clipping."""
    norm = global_norm(grads)
    if max_norm is not None and norm > max_norm > 0:
        factor = max_norm / norm
        for g in grads.values():
            g *= factor
    return norm
