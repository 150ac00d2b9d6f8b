from typing import Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from src.exceptions import ContractError

ScoreLike = Union[float, np.ndarray]


class SslConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    dd_quantile: float = Field(default=0.01, gt=0, le=1)
    ndd_quantile: float = Field(default=0.002, gt=0, le=1)
    max_passes: int = Field(default=20, ge=0)
    patience: int = Field(default=3, gt=0)
    fusion_weight: float = Field(default=0.3, ge=0, le=1)
    fusion_gamma: float = Field(default=3.0, gt=0)
    warm_start: bool = False

    @property
    def quantile_ratio(self) -> float:
        return self.dd_quantile / self.ndd_quantile


def _check_range(name: str, value: np.ndarray):
    if not np.all(np.isfinite(value)) or np.any(value < 0.0) or np.any(value > 1.0):
        raise ContractError(f"{name} must lie in [0, 1]")


def compress(a: ScoreLike, gamma: float) -> ScoreLike:
    """g(a) = 0.5 + sign(a - 0.5) * |2a - 1|^gamma / 2; fixes 0, 0.5 and 1"""
    x = np.asarray(a, dtype=np.float64)
    _check_range("acoustic score", x)
    g = 0.5 + np.sign(x - 0.5) * np.abs(2.0 * x - 1.0) ** gamma / 2.0
    return float(g) if g.ndim == 0 else g


def fuse_scores(lex_score: ScoreLike, ac_score: ScoreLike, cfg: SslConfig) -> ScoreLike:
    """(1 - w) * lex + w * g(ac); works elementwise on arrays"""
    lex = np.asarray(lex_score, dtype=np.float64)
    _check_range("lexical score", lex)
    g = np.asarray(compress(ac_score, cfg.fusion_gamma))
    w = cfg.fusion_weight
    fused = (1.0 - w) * lex + w * g
    return float(fused) if fused.ndim == 0 else fused
