"""Mini-batch training for the neural classifiers.

Each document gets its own graph; gradients accumulate into one buffer per
batch and a single Adam step applies them. Everything random draws from
one generator seeded by `TrainConfig.seed`, so a run is reproducible.
"""

import logging
from dataclasses import asdict, dataclass, field
from typing import TYPE_CHECKING, List, Optional, Sequence

import numpy as np
from tqdm import tqdm

from vivada import constants as C
from vivada.config import TrainConfig
from vivada.errors import NumericError, TrainingDivergedError, UsageError
from vivada.evaluation.metrics import prf
from vivada.models import Document, EncodedDocument
from vivada.tensor import AdamState, Graph, Params, adam_step, clip_by_global_norm, cross_entropy

if TYPE_CHECKING:
    from vivada.classifiers.neural import NeuralClassifier

logger = logging.getLogger(__name__)


@dataclass
class EpochRecord:
    epoch: int
    loss: float
    grad_norm: float
    val_precision: Optional[float] = None
    val_recall: Optional[float] = None
    val_f1: Optional[float] = None
    improved: bool = False


@dataclass
class TrainingLog:
    model: str
    seed: int
    epochs: List[EpochRecord] = field(default_factory=list)
    best_epoch: int = 0
    stopped_early: bool = False

    def to_record(self) -> dict:
        return {
            "model": self.model,
            "seed": self.seed,
            "best_epoch": self.best_epoch,
            "stopped_early": self.stopped_early,
            "epochs": [asdict(e) for e in self.epochs],
        }


def copy_params(params: Params) -> Params:
    return {name: p.copy() for name, p in params.items()}


def batch_gradients(
    model: "NeuralClassifier",
    params: Params,
    batch: Sequence[tuple[EncodedDocument, int]],
    l2: float,
    rng: np.random.Generator,
) -> tuple[float, Params]:
    """Mean cross-entropy over `batch` plus l2 * ||dense.W||^2, and its gradient."""
    grads = {name: np.zeros_like(p) for name, p in params.items()}
    total = 0.0
    for encoded, target in batch:
        graph = Graph(params, train=True, rng=rng)
        loss = cross_entropy(model.logits(graph, encoded), target)
        graph.backward(loss, into=grads)
        total += float(loss.value)

    n = len(batch)
    for g in grads.values():
        g /= n
    dense = params["dense.W"]
    grads["dense.W"] += (2.0 * l2 * dense).astype(dense.dtype)
    return total / n + l2 * float(np.sum(dense.astype(np.float64) ** 2)), grads


def train_neural(
    model: "NeuralClassifier",
    train: Sequence[Document],
    validation: Sequence[Document],
    config: TrainConfig,
) -> TrainingLog:
    """Adam on mini-batches with early stopping on validation F1; leaves the best parameters in `model`."""
    log = TrainingLog(model=model.name, seed=config.seed)
    examples = []
    for doc in train:
        encoded = model.encode(doc)
        if not encoded.empty:
            examples.append((encoded, doc.y))
    if not examples:
        raise UsageError(f"{model.name}: no non-empty training documents")
    skipped = len(train) - len(examples)
    if skipped:
        logger.info("%s: %d empty training documents left out", model.name, skipped)
    if config.epochs == 0:
        return log

    rng = np.random.default_rng(config.seed)
    params = model.params
    state = AdamState.create(
        params, lr=config.learning_rate, beta1=config.beta1, beta2=config.beta2, eps=config.epsilon
    )
    best = copy_params(params)
    best_f1 = -1.0
    waited = 0

    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(len(examples))
        losses, norms = [], []
        starts = range(0, len(order), config.batch_size)
        for start in tqdm(starts, desc=f"{model.name} epoch {epoch}", disable=not config.progress):
            batch = [examples[i] for i in order[start : start + config.batch_size]]
            try:
                loss, grads = batch_gradients(model, params, batch, config.l2, rng)
            except NumericError as e:
                logger.error("%s diverged in epoch %d: %s", model.name, epoch, e)
                raise TrainingDivergedError(f"{model.name}: {e}", params=best, epoch=epoch) from e
            if not np.isfinite(loss):
                logger.error("%s diverged in epoch %d: loss %s", model.name, epoch, loss)
                raise TrainingDivergedError(f"{model.name}: loss became {loss}", params=best, epoch=epoch)

            grads["embedding"][C.PAD_INDEX] = 0.0
            norms.append(clip_by_global_norm(grads, config.clip_norm))
            adam_step(params, grads, state)
            params["embedding"][C.PAD_INDEX] = 0.0
            losses.append(loss)

        record = EpochRecord(epoch=epoch, loss=float(np.mean(losses)), grad_norm=float(np.mean(norms)))
        if validation:
            scores = prf(model.predict(validation))
            record.val_precision, record.val_recall, record.val_f1 = scores.precision, scores.recall, scores.f1
            record.improved = scores.f1 > best_f1
        else:
            record.improved = True

        if record.improved:
            best = copy_params(params)
            best_f1 = record.val_f1 if record.val_f1 is not None else best_f1
            log.best_epoch = epoch
            waited = 0
        else:
            waited += 1
        log.epochs.append(record)
        logger.info(
            "%s epoch %d: loss %.4f, validation F1 %s",
            model.name,
            epoch,
            record.loss,
            "n/a" if record.val_f1 is None else f"{record.val_f1:.4f}",
        )
        if not record.improved and waited >= config.patience:
            log.stopped_early = True
            logger.info("%s: no improvement for %d epoch(s), stopping", model.name, waited)
            break

    for name, p in best.items():
        params[name][...] = p
    return log
