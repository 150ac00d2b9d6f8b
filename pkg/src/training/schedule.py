import numpy as np

from src.training.config import Decay


def learning_rate(step: int, total_steps: int, lr_max: float, lr_min: float, decay: Decay = Decay.LINEAR) -> float:
    """LR at 0-based ``step``: lr_max on the first step, lr_min on the last"""
    if total_steps <= 1:
        return lr_max
    frac = min(max(step / (total_steps - 1), 0.0), 1.0)
    if decay is Decay.EXPONENTIAL:
        lr = lr_max * (lr_min / lr_max) ** frac
    else:
        lr = lr_max + (lr_min - lr_max) * frac
    return float(np.clip(lr, lr_min, lr_max))


def range_schedule(lr_lo: float, lr_hi: float, steps: int) -> np.ndarray:
    """Exponentially increasing LRs from lr_lo to lr_hi"""
    return np.geomspace(lr_lo, lr_hi, steps)
