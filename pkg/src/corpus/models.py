import enum
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.exceptions import IntegrityError


class Label(str, enum.Enum):
    DD = "DD"      # device-directed, positive class
    NDD = "NDD"    # non-device-directed

    @property
    def target(self) -> int:
        return 1 if self is Label.DD else 0


class Partition(str, enum.Enum):
    TRAIN = "train"
    DEV = "dev"
    TEST = "test"
    UNLABELED = "unlabeled"


class TurnPair(BaseModel):
    """Current turn (with ASR confidences) and the optional previous turn"""
    model_config = ConfigDict(frozen=True)

    id: str = Field(min_length=1)
    cur_tokens: Tuple[str, ...] = Field(min_length=1)
    cur_confidences: Tuple[float, ...]
    prev_tokens: Tuple[str, ...] = ()
    prev_confidences: Optional[Tuple[float, ...]] = None

    @field_validator("cur_confidences", "prev_confidences")
    @classmethod
    def _confidences_in_range(cls, value):
        if value is None:
            return value
        for c in value:
            if not 0.0 <= c <= 1.0:
                raise ValueError(f"confidence {c} outside [0, 1]")
        return value

    @field_validator("cur_tokens", "prev_tokens")
    @classmethod
    def _tokens_nonblank(cls, value):
        for tok in value:
            if not tok or any(ch.isspace() for ch in tok):
                raise ValueError(f"invalid token {tok!r}")
        return value

    @model_validator(mode="after")
    def _aligned(self):
        if len(self.cur_confidences) != len(self.cur_tokens):
            raise ValueError(
                f"{len(self.cur_tokens)} current tokens but {len(self.cur_confidences)} confidences"
            )
        if self.prev_confidences is not None and len(self.prev_confidences) != len(self.prev_tokens):
            raise ValueError(
                f"{len(self.prev_tokens)} previous tokens but {len(self.prev_confidences)} confidences"
            )
        if not self.prev_tokens and self.prev_confidences:
            raise ValueError("previous-turn confidences without previous-turn tokens")
        return self


class Utterance(TurnPair):
    """A turn pair with an optional gold label"""
    label: Optional[Label] = None

    @property
    def target(self) -> int:
        if self.label is None:
            raise IntegrityError(f"Utterance {self.id} has no label")
        return self.label.target

    def strip_label(self) -> "UnlabeledUtterance":
        return UnlabeledUtterance(**self.model_dump(exclude={"label"}))


class UnlabeledUtterance(TurnPair):
    """A turn pair that carries no label field at all"""

    def with_label(self, label: Label) -> Utterance:
        return Utterance(**self.model_dump(), label=label)


@dataclass
class Corpus:
    """Utterances plus their partition assignment"""
    utterances: List[Utterance]
    partition_map: Dict[str, Partition] = field(default_factory=dict)

    def __post_init__(self):
        self.validate()

    def validate(self):
        seen = set()
        for u in self.utterances:
            if u.id in seen:
                raise IntegrityError(f"Duplicate utterance id: {u.id}")
            seen.add(u.id)
        unknown = set(self.partition_map) - seen
        if unknown:
            raise IntegrityError(f"Partition map names unknown ids: {sorted(unknown)[:5]}")

    def __len__(self) -> int:
        return len(self.utterances)

    def get(self, partition: Partition) -> List[Utterance]:
        return [u for u in self.utterances if self.partition_map.get(u.id) == partition]

    def labeled(self) -> List[Utterance]:
        return [u for u in self.utterances if u.label is not None]

    def unlabeled(self) -> List[UnlabeledUtterance]:
        return [u.strip_label() for u in self.get(Partition.UNLABELED)]

    def class_counts(self, items: Optional[Iterable[Utterance]] = None) -> Dict[Label, int]:
        counts = {Label.DD: 0, Label.NDD: 0}
        for u in (self.utterances if items is None else items):
            if u.label is not None:
                counts[u.label] += 1
        return counts
