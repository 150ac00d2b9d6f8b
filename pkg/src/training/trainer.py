"""
Minibatch SGD over padded feature batches.

The model handed to ``train`` is updated in place and finishes holding the
parameters of its best dev-loss epoch.
"""

import math
import time
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.corpus.models import Utterance
from src.embeddings import EmbeddingStore, FeatureBatch, FeatureSequence, FeatureSet, assemble_all, build_batch
from src.exceptions import ContractError, IntegrityError, TrainingError
from src.models import Classifier
from src.numerics import backward, binary_cross_entropy, make_rng
from src.training.config import EpochRecord, TrainConfig, TrainReport
from src.training.schedule import learning_rate
from src.utils.history import get_history_logger
import logging

logger = logging.getLogger(__name__)


def check_disjoint(*pools: Sequence) -> None:
    """Raise IntegrityError if any id appears in more than one pool"""
    seen = {}
    for index, pool in enumerate(pools):
        for u in pool:
            if u.id in seen and seen[u.id] != index:
                raise IntegrityError(f"Utterance {u.id} appears in more than one partition")
            seen[u.id] = index


def prepare(
    utterances: Sequence[Utterance], store: EmbeddingStore, features: FeatureSet
) -> Tuple[List[FeatureSequence], np.ndarray]:
    return assemble_all(utterances, store, features), np.array([u.target for u in utterances], dtype=np.float64)


def sgd_update(model: Classifier, batch: FeatureBatch, lr: float, clip_norm: Optional[float], step: int) -> float:
    """One forward/backward/update; returns the batch loss"""
    model.zero_grad()
    result = model.forward(batch)
    loss = binary_cross_entropy(result.scores, batch.targets)
    value = loss.item()
    if not math.isfinite(value):
        raise TrainingError(f"loss is {value}", step=step)
    backward(loss)
    model.sgd_step(lr, clip_norm)
    return value


def train(
    model: Classifier,
    train_set: Sequence[Utterance],
    dev_set: Sequence[Utterance],
    store: EmbeddingStore,
    cfg: TrainConfig,
    features: Optional[FeatureSet] = None,
) -> TrainReport:
    """
    Train ``model`` with seeded per-epoch shuffling and a decaying LR.

    Returns:
        TrainReport with one record per epoch; the model is restored to the
        snapshot of the best dev-loss epoch.
    """
    # evaluation imports the training package for its experiment drivers
    from src.evaluation.metrics import ScoredSet, compute_eer, mean_loss

    features = features or model.spec.feature_set
    if not train_set:
        raise ContractError("Training set is empty")
    if not dev_set:
        raise ContractError("Dev set is empty")
    check_disjoint(train_set, dev_set)

    logger.info(
        f"Training {model.spec.arch.value} ({model.parameter_count(include_lexicon=True)} trainable values) "
        f"on {len(train_set)} utterances, features {features.code}"
    )
    train_seqs, targets = prepare(train_set, store, features)
    dev_seqs, dev_targets = prepare(dev_set, store, features)
    n, bs = len(train_seqs), cfg.batch_size
    total_steps = math.ceil(n / bs) * cfg.epochs

    history = get_history_logger(phase=cfg.phase.value, arch=model.spec.arch.value, features=features.code)
    report = TrainReport(phase=cfg.phase)
    rng = make_rng(cfg.seed)
    best_loss = math.inf
    best_state = None
    step = 0
    started = time.perf_counter()

    for epoch in range(cfg.epochs):
        order = rng.permutation(n)
        epoch_loss = 0.0
        for start in range(0, n, bs):
            idx = order[start:start + bs]
            batch = build_batch([train_seqs[i] for i in idx], targets[idx])
            lr = learning_rate(step, total_steps, cfg.lr_max, cfg.lr_min, cfg.decay)
            try:
                epoch_loss += sgd_update(model, batch, lr, cfg.clip_norm, step) * len(idx)
            except TrainingError as e:
                raise TrainingError(f"epoch {epoch}: loss is not finite", step=e.step, phase=cfg.phase.value)
            step += 1

        dev = ScoredSet(model.score(dev_seqs), dev_targets.astype(np.int64))
        dev_loss = mean_loss(dev)
        dev_eer = compute_eer(dev).eer if dev.has_both_classes else float("nan")
        record = EpochRecord(epoch=epoch, train_loss=epoch_loss / n, dev_loss=dev_loss, dev_eer=dev_eer)
        report.history.append(record)
        if dev_loss < best_loss:
            best_loss = dev_loss
            report.best_epoch = epoch
            best_state = model.state_dict()
        logger.info(
            f"Epoch {epoch + 1}/{cfg.epochs}: train_loss={record.train_loss:.4f} "
            f"dev_loss={dev_loss:.4f} dev_eer={dev_eer:.1f}"
        )
        history.info("epoch_end", **record.to_record())

    if best_state is not None:
        model.load_state_dict(best_state)
    report.steps = step
    report.wall_seconds = time.perf_counter() - started
    return report
