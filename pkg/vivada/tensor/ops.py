"""Differentiable operations over `Graph` nodes.

Every function accepts nodes or bare arrays. Bare arrays are lifted into
the graph of the first node argument, or into a scratch graph when no
argument is a node, so `softmax(np.array([1.0, 2.0])).value` works.
Broadcasting is limited to a trailing-axis bias and 0-d scalars.
"""

from typing import Optional, Sequence

import numpy as np
from scipy.special import expit

from vivada.errors import DimensionError, DomainError
from vivada.tensor.graph import Graph, Node


def _graph_of(*xs) -> Graph:
    for x in xs:
        if isinstance(x, Node):
            return x.graph
    return Graph.scratch(*xs)


def _lift(*xs) -> list[Node]:
    graph = _graph_of(*xs)
    return [graph.lift(x) for x in xs]


def _check_broadcast(op: str, a: Node, b: Node):
    if a.shape == b.shape or a.value.ndim == 0 or b.value.ndim == 0:
        return
    if b.value.ndim == 1 and a.value.ndim >= 1 and a.shape[-1] == b.shape[0]:
        return
    if a.value.ndim == 1 and b.value.ndim >= 1 and b.shape[-1] == a.shape[0]:
        return
    raise DimensionError(f"{op}: shapes {a.shape} and {b.shape} are not compatible")


def _unbroadcast(g: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    if g.shape == shape:
        return g
    if len(shape) == 0:
        return np.asarray(g.sum())
    while g.ndim > len(shape):
        g = g.sum(axis=0)
    return g


# -- elementwise ------------------------------------------------------------


def add(a, b) -> Node:
    a, b = _lift(a, b)
    _check_broadcast("add", a, b)
    return a.graph.record(
        "add",
        [a, b],
        a.value + b.value,
        lambda g: (_unbroadcast(g, a.shape), _unbroadcast(g, b.shape)),
    )


def sub(a, b) -> Node:
    a, b = _lift(a, b)
    _check_broadcast("sub", a, b)
    return a.graph.record(
        "sub",
        [a, b],
        a.value - b.value,
        lambda g: (_unbroadcast(g, a.shape), _unbroadcast(-g, b.shape)),
    )


def mul(a, b) -> Node:
    a, b = _lift(a, b)
    _check_broadcast("mul", a, b)
    return a.graph.record(
        "mul",
        [a, b],
        a.value * b.value,
        lambda g: (_unbroadcast(g * b.value, a.shape), _unbroadcast(g * a.value, b.shape)),
    )


def neg(a) -> Node:
    (a,) = _lift(a)
    return a.graph.record("neg", [a], -a.value, lambda g: (-g,))


def scale(a, factor: float) -> Node:
    (a,) = _lift(a)
    return a.graph.record("scale", [a], a.value * factor, lambda g: (g * factor,))


def tanh(a) -> Node:
    (a,) = _lift(a)
    y = np.tanh(a.value)
    return a.graph.record("tanh", [a], y, lambda g: (g * (1.0 - y * y),))


def sigmoid(a) -> Node:
    (a,) = _lift(a)
    y = expit(a.value)
    return a.graph.record("sigmoid", [a], y, lambda g: (g * y * (1.0 - y),))


def relu(a) -> Node:
    (a,) = _lift(a)
    active = a.value > 0
    return a.graph.record("relu", [a], np.where(active, a.value, 0.0), lambda g: (g * active,))


def square_sum(a) -> Node:
    (a,) = _lift(a)
    return a.graph.record("square_sum", [a], np.sum(a.value * a.value), lambda g: (2.0 * g * a.value,))


# -- linear algebra ---------------------------------------------------------


def matmul(a, b) -> Node:
    a, b = _lift(a, b)
    av, bv = a.value, b.value
    if av.ndim not in (1, 2) or bv.ndim not in (1, 2) or av.shape[-1] != bv.shape[0]:
        raise DimensionError(f"matmul: shapes {a.shape} and {b.shape} do not agree")

    def backward(g):
        if av.ndim == 2 and bv.ndim == 2:
            return g @ bv.T, av.T @ g
        if av.ndim == 1 and bv.ndim == 2:
            return bv @ g, np.outer(av, g)
        if av.ndim == 2 and bv.ndim == 1:
            return np.outer(g, bv), av.T @ g
        return g * bv, g * av

    return a.graph.record("matmul", [a, b], av @ bv, backward)


def transpose(a) -> Node:
    (a,) = _lift(a)
    if a.value.ndim != 2:
        raise DimensionError(f"transpose: expected a matrix, got shape {a.shape}")
    return a.graph.record("transpose", [a], a.value.T, lambda g: (g.T,))


def reshape(a, shape: Sequence[int]) -> Node:
    (a,) = _lift(a)
    original = a.shape
    try:
        value = a.value.reshape(shape)
    except ValueError as e:
        raise DimensionError(f"reshape: cannot view {original} as {tuple(shape)}") from e
    return a.graph.record("reshape", [a], value, lambda g: (g.reshape(original),))


# -- structure --------------------------------------------------------------


def concat(nodes: Sequence, axis: int = -1) -> Node:
    nodes = _lift(*nodes)
    try:
        value = np.concatenate([n.value for n in nodes], axis=axis)
    except ValueError as e:
        shapes = ", ".join(str(n.shape) for n in nodes)
        raise DimensionError(f"concat: incompatible shapes {shapes}") from e
    sizes = np.cumsum([n.shape[axis] for n in nodes])[:-1]
    return nodes[0].graph.record(
        "concat", nodes, value, lambda g: tuple(np.split(g, sizes, axis=axis))
    )


def stack(nodes: Sequence, axis: int = 0) -> Node:
    nodes = _lift(*nodes)
    try:
        value = np.stack([n.value for n in nodes], axis=axis)
    except ValueError as e:
        shapes = ", ".join(str(n.shape) for n in nodes)
        raise DimensionError(f"stack: incompatible shapes {shapes}") from e
    return nodes[0].graph.record(
        "stack",
        nodes,
        value,
        lambda g: tuple(np.take(g, i, axis=axis) for i in range(len(nodes))),
    )


def take(a, index: int, axis: int = 0) -> Node:
    (a,) = _lift(a)
    shape = a.shape

    where = [slice(None)] * len(shape)
    where[axis] = index

    def backward(g):
        full = np.zeros(shape, dtype=g.dtype)
        full[tuple(where)] = g
        return (full,)

    return a.graph.record("take", [a], np.take(a.value, index, axis=axis), backward)


def reduce_sum(a, axis: Optional[int] = None) -> Node:
    (a,) = _lift(a)
    shape = a.shape

    def backward(g):
        if axis is None:
            return (np.broadcast_to(g, shape),)
        return (np.broadcast_to(np.expand_dims(g, axis), shape),)

    return a.graph.record("sum", [a], np.sum(a.value, axis=axis), backward)


def max_over(a, axis: int = 0) -> Node:
    """Max along `axis`; the gradient goes to the first maximal position."""
    (a,) = _lift(a)
    if a.shape[axis] == 0:
        raise DomainError("max over an empty axis")
    arg = np.argmax(a.value, axis=axis)
    shape = a.shape

    def backward(g):
        full = np.zeros(shape, dtype=g.dtype)
        np.put_along_axis(full, np.expand_dims(arg, axis), np.expand_dims(g, axis), axis=axis)
        return (full,)

    return a.graph.record("max", [a], np.max(a.value, axis=axis), backward)


# -- normalisation and losses -----------------------------------------------


def softmax(v, mask: Optional[np.ndarray] = None) -> Node:
    """Softmax over the last axis with max-subtraction; masked-out entries get weight 0."""
    (v,) = _lift(v)
    if v.value.ndim == 0 or v.shape[-1] == 0:
        raise DomainError("softmax of an empty vector")
    x = v.value
    if mask is not None:
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != x.shape:
            raise DimensionError(f"softmax: mask shape {mask.shape} != input shape {x.shape}")
        if not np.all(mask.any(axis=-1)):
            raise DomainError("softmax: a row is entirely masked")
        x = np.where(mask, x, -np.inf)
    shifted = x - np.max(x, axis=-1, keepdims=True)
    e = np.exp(shifted)
    s = e / np.sum(e, axis=-1, keepdims=True)

    def backward(g):
        return (s * (g - np.sum(g * s, axis=-1, keepdims=True)),)

    return v.graph.record("softmax", [v], s, backward)


def cross_entropy(logits, target: int) -> Node:
    """-log softmax(logits)[target] for a single logit vector."""
    (logits,) = _lift(logits)
    if logits.value.ndim != 1:
        raise DimensionError(f"cross_entropy: expected a vector, got shape {logits.shape}")
    z = logits.value
    m = np.max(z)
    lse = m + np.log(np.sum(np.exp(z - m)))
    probs = np.exp(z - lse)

    def backward(g):
        grad = probs.copy()
        grad[target] -= 1.0
        return (g * grad,)

    return logits.graph.record("cross_entropy", [logits], lse - z[target], backward)


def dropout(v, rate: float, train: bool, rng: Optional[np.random.Generator] = None) -> Node:
    """Inverted dropout. Identity (the same node) in eval mode or at rate 0."""
    if not 0.0 <= rate < 1.0:
        raise DomainError(f"dropout rate must lie in [0, 1), got {rate}")
    (v,) = _lift(v)
    if not train or rate == 0.0:
        return v
    if rng is None:
        rng = v.graph.rng if v.graph.rng is not None else np.random.default_rng()
    keep = (rng.random(v.shape) >= rate).astype(v.value.dtype) / (1.0 - rate)
    return v.graph.record("dropout", [v], v.value * keep, lambda g: (g * keep,))


# -- attention --------------------------------------------------------------


def attend(weights, values) -> Node:
    """Row-wise weighted sum: out[s] = sum_t weights[s, t] * values[s, t, :]."""
    weights, values = _lift(weights, values)
    w, h = weights.value, values.value
    if w.ndim != 2 or h.ndim != 3 or w.shape != h.shape[:2]:
        raise DimensionError(f"attend: shapes {weights.shape} and {values.shape} do not agree")

    def backward(g):
        return np.einsum("sd,std->st", g, h), w[:, :, None] * g[:, None, :]

    return weights.graph.record("attend", [weights, values], np.einsum("st,std->sd", w, h), backward)
