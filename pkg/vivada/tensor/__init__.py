from vivada.tensor.graph import Graph, Node, Params, Tensor
from vivada.tensor.ops import (
    add,
    attend,
    concat,
    cross_entropy,
    dropout,
    matmul,
    max_over,
    mul,
    reduce_sum,
    relu,
    reshape,
    sigmoid,
    softmax,
    square_sum,
    stack,
    sub,
    take,
    tanh,
    transpose,
)
from vivada.tensor.gru import GruCell, GruParams, bidirectional, gru_step, run_gru
from vivada.tensor.optim import AdamState, adam_step, clip_by_global_norm
from vivada.tensor.gradcheck import GradCheckReport, grad_check
from vivada.tensor.checkpoint import Checkpoint, read_checkpoint, write_checkpoint


def backward(graph: Graph, loss: Node) -> Params:
    return graph.backward(loss)
