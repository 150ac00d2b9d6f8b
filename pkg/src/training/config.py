import enum
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator


class Decay(str, enum.Enum):
    LINEAR = "linear"
    EXPONENTIAL = "exponential"


class Phase(str, enum.Enum):
    PRETRAIN = "pretrain"
    FINETUNE = "finetune"
    SCRATCH = "scratch"


class TrainConfig(BaseModel):
    """
    SGD run settings.

    epochs=0 is allowed and leaves the model untouched (used for an empty
    fine-tuning phase); lr_min may be 0 for linear decay.
    """
    model_config = ConfigDict(frozen=True)

    lr_max: float = Field(default=0.5, ge=0)
    lr_min: float = Field(default=0.005, ge=0)
    decay: Decay = Decay.LINEAR
    epochs: int = Field(default=10, ge=0)
    batch_size: int = Field(default=32, gt=0)
    seed: int = 0
    clip_norm: Optional[float] = Field(default=5.0, gt=0)
    phase: Phase = Phase.SCRATCH

    @model_validator(mode="after")
    def _lr_order(self):
        if self.lr_min > self.lr_max:
            raise ValueError(f"lr_min {self.lr_min} > lr_max {self.lr_max}")
        if self.decay is Decay.EXPONENTIAL and self.lr_min <= 0:
            raise ValueError("exponential decay needs lr_min > 0")
        return self


@dataclass
class EpochRecord:
    epoch: int
    train_loss: float
    dev_loss: float
    dev_eer: float

    def to_record(self) -> Dict[str, float]:
        return {
            "epoch": self.epoch,
            "train_loss": self.train_loss,
            "dev_loss": self.dev_loss,
            "dev_eer": self.dev_eer,
        }


@dataclass
class TrainReport:
    history: List[EpochRecord] = field(default_factory=list)
    best_epoch: Optional[int] = None
    wall_seconds: float = 0.0
    steps: int = 0
    phase: Phase = Phase.SCRATCH

    @property
    def best(self) -> Optional[EpochRecord]:
        if self.best_epoch is None:
            return None
        return self.history[self.best_epoch]

    def records(self) -> List[Dict[str, float]]:
        return [r.to_record() for r in self.history]
