"""
Utterance -> per-token feature frames.

Frame t is [embedding(token_t) || confidence_t]. The previous turn (when
used) comes first, each turn opened by its separator token:

    [SEP_PREV, prev tokens...] [SEP_CUR, cur tokens...]
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from src.corpus.models import TurnPair
from src.embeddings.store import OOV, SEP_CUR, SEP_PREV, SPECIAL_TOKENS, EmbeddingStore
from src.exceptions import ConfigError, ContractError, DimensionError
from src.numerics import Matrix

SEPARATOR_CONFIDENCE = 1.0
MISSING_CONFIDENCE = 1.0


class FeatureSet(BaseModel):
    """Which feature groups feed the model: c (current text), p (previous turn), t (confidences)"""
    model_config = ConfigDict(frozen=True)

    use_lex: bool = True
    use_prev: bool = True
    use_conf: bool = True

    @classmethod
    def parse(cls, code: str) -> "FeatureSet":
        """
        Accepts "c,p,t"-style inclusion lists ("c,t") or a single ablation ("-c", "-p", "-t").
        """
        code = code.strip().lower().replace(" ", "")
        if code.startswith("-"):
            dropped = code[1:]
            if dropped not in ("c", "p", "t"):
                raise ConfigError(f"Unknown ablation code: {code}")
            return cls(use_lex=dropped != "c", use_prev=dropped != "p", use_conf=dropped != "t")
        groups = set(filter(None, code.split(",")))
        if not groups or groups - {"c", "p", "t"}:
            raise ConfigError(f"Unknown feature set: {code}")
        return cls(use_lex="c" in groups, use_prev="p" in groups, use_conf="t" in groups)

    @property
    def code(self) -> str:
        groups = [g for g, on in (("c", self.use_lex), ("p", self.use_prev), ("t", self.use_conf)) if on]
        return ",".join(groups)


FULL_FEATURES = FeatureSet()


@dataclass(frozen=True)
class FeatureSequence:
    """T x (d+1) frames, a length-T mask and the positions of special tokens"""
    frames: Matrix
    mask: np.ndarray
    special_slots: Tuple[Tuple[int, int], ...] = ()

    @property
    def length(self) -> int:
        return self.frames.shape[0]

    @property
    def dim(self) -> int:
        return self.frames.shape[1] - 1


def assemble(
    u: TurnPair,
    store: EmbeddingStore,
    use_prev: bool = True,
    use_conf: bool = True,
    use_lex: bool = True,
) -> FeatureSequence:
    """
    Build the feature sequence of one utterance.

    use_prev=False drops the previous turn and its separator; use_conf=False
    sets every confidence to 1.0; use_lex=False zeroes every embedding block
    while keeping the confidences.
    """
    if not u.cur_tokens:
        raise ContractError(f"Utterance {u.id} has no current-turn tokens")
    if len(u.cur_confidences) != len(u.cur_tokens):
        raise ContractError(f"Utterance {u.id}: tokens and confidences are not aligned")

    tokens: List[Optional[str]] = []
    confidences: List[float] = []
    specials: List[Optional[int]] = []

    def _turn(separator: int, turn_tokens: Sequence[str], turn_conf: Optional[Sequence[float]]):
        tokens.append(None)
        specials.append(separator)
        confidences.append(SEPARATOR_CONFIDENCE)
        for i, tok in enumerate(turn_tokens):
            tokens.append(tok)
            specials.append(None if tok in store else OOV)
            confidences.append(turn_conf[i] if turn_conf is not None else MISSING_CONFIDENCE)

    if use_prev and u.prev_tokens:
        _turn(SEP_PREV, u.prev_tokens, u.prev_confidences)
    _turn(SEP_CUR, u.cur_tokens, u.cur_confidences)

    T, d = len(tokens), store.dim
    frames = np.zeros((T, d + 1), dtype=np.float64)
    slots = []
    for t, (tok, special) in enumerate(zip(tokens, specials)):
        if use_lex:
            if special is not None:
                frames[t, :d] = store.special(special)
                slots.append((t, special))
            else:
                frames[t, :d] = store.lookup(tok)
        frames[t, d] = confidences[t] if use_conf else 1.0

    return FeatureSequence(frames=frames, mask=np.ones(T, dtype=bool), special_slots=tuple(slots))


def assemble_all(
    utterances: Sequence[TurnPair], store: EmbeddingStore, features: FeatureSet = FULL_FEATURES
) -> List[FeatureSequence]:
    return [
        assemble(u, store, use_prev=features.use_prev, use_conf=features.use_conf, use_lex=features.use_lex)
        for u in utterances
    ]


@dataclass(frozen=True)
class FeatureBatch:
    """
    Right-padded minibatch.

    ``frames`` is B x T x (d+1) with special-token embedding blocks zeroed;
    ``special`` is the B x T x K one-hot of special tokens, so a model can add
    its own trainable special vectors back in.
    """
    frames: np.ndarray
    mask: np.ndarray
    special: np.ndarray
    targets: Optional[np.ndarray] = None

    @property
    def size(self) -> int:
        return self.frames.shape[0]

    @property
    def steps(self) -> int:
        return self.frames.shape[1]

    @property
    def input_dim(self) -> int:
        return self.frames.shape[2]

    @property
    def lengths(self) -> np.ndarray:
        return self.mask.sum(axis=1)


def build_batch(seqs: Sequence[FeatureSequence], targets: Optional[Sequence[int]] = None) -> FeatureBatch:
    if not seqs:
        raise ContractError("Cannot batch zero sequences")
    width = seqs[0].frames.shape[1]
    for s in seqs:
        if s.frames.shape[1] != width:
            raise DimensionError(f"Frame widths differ in batch: {width} vs {s.frames.shape[1]}")
        if s.length == 0:
            raise ContractError("Empty feature sequence")
    B, T, K = len(seqs), max(s.length for s in seqs), len(SPECIAL_TOKENS)
    frames = np.zeros((B, T, width), dtype=np.float64)
    mask = np.zeros((B, T), dtype=bool)
    special = np.zeros((B, T, K), dtype=np.float64)
    for b, s in enumerate(seqs):
        frames[b, :s.length] = s.frames
        mask[b, :s.length] = s.mask
        for t, k in s.special_slots:
            frames[b, t, :width - 1] = 0.0
            special[b, t, k] = 1.0
    y = None if targets is None else np.asarray(targets, dtype=np.float64).reshape(B, 1)
    return FeatureBatch(frames=frames, mask=mask, special=special, targets=y)
