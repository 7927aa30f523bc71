from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from vivada.errors import NumericError, UsageError

type Tensor = np.ndarray
type Params = dict[str, np.ndarray]
type Backward = Callable[[np.ndarray], Sequence[Optional[np.ndarray]]]


@dataclass(eq=False)
class Node:
    """One recorded operation: its inputs, its output and how to pull a gradient back through it."""

    graph: "Graph"
    id: int
    op: str
    inputs: tuple[int, ...]
    value: np.ndarray
    backward_fn: Optional[Backward] = field(default=None, repr=False)
    param: Optional[str] = None
    # (parameter name, row indices) for embedding lookups
    scatter: Optional[tuple[str, np.ndarray]] = field(default=None, repr=False)

    # make `ndarray * node` dispatch to Node.__rmul__
    __array_ufunc__ = None

    @property
    def shape(self) -> tuple[int, ...]:
        return self.value.shape

    def __add__(self, other):
        from vivada.tensor.ops import add

        return add(self, other)

    def __radd__(self, other):
        from vivada.tensor.ops import add

        return add(other, self)

    def __sub__(self, other):
        from vivada.tensor.ops import sub

        return sub(self, other)

    def __rsub__(self, other):
        from vivada.tensor.ops import sub

        return sub(other, self)

    def __mul__(self, other):
        from vivada.tensor.ops import mul

        return mul(self, other)

    def __rmul__(self, other):
        from vivada.tensor.ops import mul

        return mul(other, self)

    def __neg__(self):
        from vivada.tensor.ops import neg

        return neg(self)

    def __matmul__(self, other):
        from vivada.tensor.ops import matmul

        return matmul(self, other)


class Graph:
    """A tape of numeric operations over a named parameter set.

    Nodes are appended in evaluation order, so the list is already a
    topological order and `backward` only has to walk it in reverse.
    """

    params: Params
    dtype: np.dtype
    train: bool
    rng: Optional[np.random.Generator]
    nodes: list[Node]

    def __init__(
        self,
        params: Optional[Params] = None,
        dtype: Union[type, np.dtype] = np.float32,
        train: bool = False,
        rng: Optional[np.random.Generator] = None,
    ):
        self.params = params if params is not None else {}
        self.dtype = np.dtype(dtype)
        self.train = train
        self.rng = rng
        self.nodes = []
        self._param_nodes: dict[str, Node] = {}

    # -- recording ------------------------------------------------------------

    def record(
        self,
        op: str,
        inputs: Sequence[Node],
        value: np.ndarray,
        backward: Optional[Backward] = None,
    ) -> Node:
        for node in inputs:
            if node.graph is not self:
                raise UsageError(f"{op}: input node {node.id} belongs to another graph")
        node = Node(
            graph=self,
            id=len(self.nodes),
            op=op,
            inputs=tuple(n.id for n in inputs),
            value=np.asarray(value, dtype=self.dtype),
            backward_fn=backward,
        )
        self.nodes.append(node)
        return node

    def constant(self, value) -> Node:
        return self.record("constant", [], np.array(value, dtype=self.dtype))

    def param(self, name: str) -> Node:
        if name in self._param_nodes:
            return self._param_nodes[name]
        if name not in self.params:
            raise UsageError(f"unknown parameter {name!r}")
        node = self.record("param", [], self.params[name].astype(self.dtype, copy=False))
        node.param = name
        self._param_nodes[name] = node
        return node

    def embed(self, name: str, indices) -> Node:
        """Rows of parameter `name` picked by `indices`; gradients scatter back sparsely."""
        if name not in self.params:
            raise UsageError(f"unknown parameter {name!r}")
        indices = np.asarray(indices, dtype=np.int64)
        table = self.params[name]
        if indices.size and (indices.min() < 0 or indices.max() >= table.shape[0]):
            raise UsageError(f"embedding index out of range for {name!r}")
        node = self.record("embed", [], table[indices].astype(self.dtype, copy=False))
        node.scatter = (name, indices)
        return node

    def lift(self, x) -> Node:
        if isinstance(x, Node):
            if x.graph is not self:
                raise UsageError("node belongs to another graph")
            return x
        return self.constant(x)

    # -- differentiation ------------------------------------------------------

    def backward(self, loss: Node, into: Optional[Params] = None, check_finite: bool = True) -> Params:
        """Accumulate d(loss)/d(param) for every parameter into `into` (zeros when absent).

        With `check_finite` off, non-finite gradients propagate instead of raising.
        """
        if loss.graph is not self:
            raise UsageError("loss node belongs to another graph")
        if loss.value.size != 1:
            raise UsageError(f"backward needs a scalar loss, got shape {loss.shape}")

        grads: list[Optional[np.ndarray]] = [None] * (loss.id + 1)
        grads[loss.id] = np.ones_like(loss.value)

        if into is None:
            into = {name: np.zeros_like(p) for name, p in self.params.items()}

        for node in reversed(self.nodes[: loss.id + 1]):
            g = grads[node.id]
            if g is None:
                continue
            if check_finite and not np.all(np.isfinite(g)):
                raise NumericError(f"non-finite gradient at node {node.id} ({node.op})")

            if node.param is not None:
                into[node.param] += g
                continue
            if node.scatter is not None:
                name, indices = node.scatter
                np.add.at(into[name], indices, g)
                continue
            if node.backward_fn is None:
                continue

            for input_id, input_grad in zip(node.inputs, node.backward_fn(g)):
                if input_grad is None:
                    continue
                if grads[input_id] is None:
                    grads[input_id] = np.array(input_grad, dtype=self.dtype, copy=True)
                else:
                    grads[input_id] += input_grad

        return into

    @classmethod
    def scratch(cls, *arrays) -> "Graph":
        """Throwaway graph for evaluating ops on bare arrays."""
        wide = any(np.asarray(a).dtype == np.float64 for a in arrays)
        return cls(dtype=np.float64 if wide else np.float32)
