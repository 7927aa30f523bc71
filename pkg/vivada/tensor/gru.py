from dataclasses import dataclass, fields
from typing import Optional, Sequence, Union

import numpy as np

from vivada.errors import DimensionError, NumericError
from vivada.tensor import ops
from vivada.tensor.graph import Graph, Node, Params
from vivada.tensor.init import uniform, zeros

GATES = ("W_z", "W_r", "W_h", "U_z", "U_r", "U_h", "b_z", "b_r", "b_h")


@dataclass
class GruParams:
    """The nine blocks of one GRU direction.

    Gate convention: h = (1 - z) * h_prev + z * h_candidate.
    """

    W_z: np.ndarray
    W_r: np.ndarray
    W_h: np.ndarray
    U_z: np.ndarray
    U_r: np.ndarray
    U_h: np.ndarray
    b_z: np.ndarray
    b_r: np.ndarray
    b_h: np.ndarray

    def __post_init__(self):
        hidden, inputs = self.W_z.shape
        for f in fields(self):
            block = getattr(self, f.name)
            expected = {"W": (hidden, inputs), "U": (hidden, hidden), "b": (hidden,)}[f.name[0]]
            if block.shape != expected:
                raise DimensionError(f"GRU block {f.name} has shape {block.shape}, expected {expected}")
            if not np.all(np.isfinite(block)):
                raise NumericError(f"GRU block {f.name} is not finite")

    @property
    def hidden_dim(self) -> int:
        return self.W_z.shape[0]

    @property
    def input_dim(self) -> int:
        return self.W_z.shape[1]

    @classmethod
    def init(cls, rng: np.random.Generator, input_dim: int, hidden_dim: int) -> "GruParams":
        return cls(
            W_z=uniform(rng, (hidden_dim, input_dim)),
            W_r=uniform(rng, (hidden_dim, input_dim)),
            W_h=uniform(rng, (hidden_dim, input_dim)),
            U_z=uniform(rng, (hidden_dim, hidden_dim)),
            U_r=uniform(rng, (hidden_dim, hidden_dim)),
            U_h=uniform(rng, (hidden_dim, hidden_dim)),
            b_z=zeros(hidden_dim),
            b_r=zeros(hidden_dim),
            b_h=zeros(hidden_dim),
        )

    def named(self, prefix: str) -> Params:
        return {f"{prefix}.{gate}": getattr(self, gate) for gate in GATES}

    @classmethod
    def from_params(cls, params: Params, prefix: str) -> "GruParams":
        return cls(**{gate: params[f"{prefix}.{gate}"] for gate in GATES})


@dataclass
class GruCell:
    """GRU blocks bound into one graph, input/recurrent matrices pre-transposed."""

    Wz: Node
    Wr: Node
    Wh: Node
    Uz: Node
    Ur: Node
    Uh: Node
    bz: Node
    br: Node
    bh: Node

    @property
    def hidden_dim(self) -> int:
        return self.Uz.shape[0]

    @property
    def input_dim(self) -> int:
        return self.Wz.shape[0]

    @classmethod
    def bind(cls, graph: Graph, prefix: str) -> "GruCell":
        p = {gate: graph.param(f"{prefix}.{gate}") for gate in GATES}
        return cls._from_nodes(p)

    @classmethod
    def constant(cls, graph: Graph, params: GruParams) -> "GruCell":
        p = {gate: graph.constant(getattr(params, gate)) for gate in GATES}
        return cls._from_nodes(p)

    @classmethod
    def _from_nodes(cls, p: dict[str, Node]) -> "GruCell":
        return cls(
            Wz=ops.transpose(p["W_z"]),
            Wr=ops.transpose(p["W_r"]),
            Wh=ops.transpose(p["W_h"]),
            Uz=ops.transpose(p["U_z"]),
            Ur=ops.transpose(p["U_r"]),
            Uh=ops.transpose(p["U_h"]),
            bz=p["b_z"],
            br=p["b_r"],
            bh=p["b_h"],
        )


def gru_step(x, h_prev, p: Union[GruParams, GruCell]) -> Node:
    """One GRU update for a vector or a row-batch of vectors."""
    if isinstance(p, GruParams):
        graph = next((n.graph for n in (x, h_prev) if isinstance(n, Node)), None)
        if graph is None:
            graph = Graph.scratch(x, h_prev, p.W_z)
        p = GruCell.constant(graph, p)
    graph = p.Wz.graph
    x, h_prev = graph.lift(x), graph.lift(h_prev)
    if x.shape[-1] != p.input_dim or h_prev.shape[-1] != p.hidden_dim:
        raise DimensionError(
            f"gru_step: input {x.shape} / state {h_prev.shape} do not fit "
            f"a cell with input {p.input_dim} and hidden {p.hidden_dim}"
        )

    z = ops.sigmoid(x @ p.Wz + h_prev @ p.Uz + p.bz)
    r = ops.sigmoid(x @ p.Wr + h_prev @ p.Ur + p.br)
    candidate = ops.tanh(x @ p.Wh + (r * h_prev) @ p.Uh + p.bh)
    return (1.0 - z) * h_prev + z * candidate


def run_gru(
    steps: Sequence[Node],
    cell: GruCell,
    mask: Optional[np.ndarray] = None,
    reverse: bool = False,
) -> list[Node]:
    """Run `cell` across `steps` ([rows, input] each) and return the state after every step.

    `mask[t, row]` false keeps that row's state unchanged at step t, so
    right-padded rows behave as if their sequence simply ended early.
    """
    if not steps:
        return []
    graph = cell.Wz.graph
    rows = steps[0].shape[0] if steps[0].value.ndim == 2 else None
    shape = (rows, cell.hidden_dim) if rows is not None else (cell.hidden_dim,)
    h = graph.constant(np.zeros(shape))

    order = range(len(steps) - 1, -1, -1) if reverse else range(len(steps))
    states: list[Optional[Node]] = [None] * len(steps)
    for t in order:
        h_new = gru_step(steps[t], h, cell)
        if mask is not None and not np.all(mask[t]):
            keep = np.broadcast_to(np.asarray(mask[t], dtype=float)[:, None], shape)
            h_new = keep * h_new + (1.0 - keep) * h
        h = h_new
        states[t] = h
    return states  # type: ignore[return-value]


def bidirectional(
    steps: Sequence[Node],
    forward: GruCell,
    backward: GruCell,
    mask: Optional[np.ndarray] = None,
    axis: int = 0,
) -> Node:
    """Concatenated [forward; backward] annotations, stacked along `axis` ([time, rows, 2*hidden] by default)."""
    fwd = run_gru(steps, forward, mask)
    bwd = run_gru(steps, backward, mask, reverse=True)
    return ops.stack([ops.concat([f, b], axis=-1) for f, b in zip(fwd, bwd)], axis=axis)
