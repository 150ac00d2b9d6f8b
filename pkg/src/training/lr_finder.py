"""
LR range test: train a fresh model for a fixed number of steps while the
learning rate grows exponentially, and read the usable range off the
smoothed loss curve.
"""

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from src.corpus.models import Utterance
from src.embeddings import EmbeddingStore, FeatureSet, build_batch
from src.exceptions import ConfigError, RangeTestError, TrainingError
from src.models import ModelFactory
from src.numerics import make_rng
from src.training.schedule import range_schedule
from src.training.trainer import prepare, sgd_update
from src.utils.history import get_history_logger
import logging

logger = logging.getLogger(__name__)

MIN_STEPS = 50
SMOOTHING = 0.98
DIVERGENCE_FACTOR = 4.0


@dataclass
class RangeTestResult:
    lr_max: float
    lr_min: float
    curve: List[Tuple[float, float]] = field(default_factory=list)   # (lr, smoothed loss)
    stopped_early: bool = False

    def records(self):
        return [{"step": i, "lr": lr, "smoothed_loss": loss} for i, (lr, loss) in enumerate(self.curve)]


def lr_range_test(
    factory: ModelFactory,
    data: Sequence[Utterance],
    store: EmbeddingStore,
    lr_lo: float = 1e-4,
    lr_hi: float = 10.0,
    steps: int = 100,
    batch_size: int = 32,
    seed: int = 0,
    clip_norm: Optional[float] = None,
    features: Optional[FeatureSet] = None,
) -> RangeTestResult:
    """
    Returns:
        Suggested lr_max (LR at the smoothed-loss minimum / 10), lr_min
        (lr_max / 100) and the recorded curve.
    """
    if not 0 < lr_lo < lr_hi:
        raise ConfigError(f"Need 0 < lr_lo < lr_hi, got {lr_lo}, {lr_hi}")
    if steps < MIN_STEPS:
        raise ConfigError(f"Range test needs at least {MIN_STEPS} steps, got {steps}")
    if not data:
        raise ConfigError("Range test data is empty")

    model = factory()
    features = features or model.spec.feature_set
    seqs, targets = prepare(data, store, features)
    rng = make_rng(seed)
    history = get_history_logger(phase="range_test", arch=model.spec.arch.value)

    order, cursor = rng.permutation(len(seqs)), 0
    avg, best_loss, best_lr = 0.0, math.inf, lr_lo
    result = RangeTestResult(lr_max=0.0, lr_min=0.0)

    for k, lr in enumerate(range_schedule(lr_lo, lr_hi, steps)):
        if cursor >= len(order):
            order, cursor = rng.permutation(len(seqs)), 0
        idx = order[cursor:cursor + batch_size]
        cursor += batch_size
        batch = build_batch([seqs[i] for i in idx], targets[idx])
        try:
            value = sgd_update(model, batch, float(lr), clip_norm, k)
        except TrainingError:
            if k <= 1:
                raise RangeTestError(f"Loss diverged at step {k}; lr_lo={lr_lo} is too high")
            result.stopped_early = True
            break

        avg = SMOOTHING * avg + (1.0 - SMOOTHING) * value
        smoothed = avg / (1.0 - SMOOTHING ** (k + 1))
        result.curve.append((float(lr), smoothed))
        history.debug("range_step", step=k, lr=float(lr), smoothed_loss=smoothed)

        if k > 0 and smoothed > DIVERGENCE_FACTOR * best_loss:
            if k == 1:
                raise RangeTestError(f"Loss diverged at the first step; lr_lo={lr_lo} is too high")
            result.stopped_early = True
            logger.info(f"Range test stopped at step {k} (lr={lr:.3g}): loss diverged")
            break
        if smoothed < best_loss:
            best_loss, best_lr = smoothed, float(lr)

    result.lr_max = best_lr / 10.0
    result.lr_min = result.lr_max / 100.0
    logger.info(f"Range test suggests lr_max={result.lr_max:.3g}, lr_min={result.lr_min:.3g}")
    return result
