import enum
from dataclasses import dataclass
from typing import Callable, Dict, Iterator, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from src.embeddings import FULL_FEATURES, EmbeddingStore, FeatureBatch, FeatureSet, build_batch
from src.embeddings.features import FeatureSequence
from src.exceptions import ContractError, DimensionError
from src.numerics import Matrix, Node, concat_cols, constant, matmul, parameter, zeros

SCORE_EPS = 1e-12


class Architecture(str, enum.Enum):
    AVG_DNN = "avg-dnn"
    LSTM = "lstm"
    LSTM_ATTN = "lstm-attn"


class ModelSpec(BaseModel):
    """Everything needed to rebuild a model's shapes (the serialized header)"""
    model_config = ConfigDict(frozen=True)

    arch: Architecture
    dim: int = Field(gt=0)                 # embedding width d; inputs are d+1 wide
    hidden_size: int = Field(default=150, gt=0)
    num_layers: int = Field(default=3, gt=0)
    seed: int = 0
    features: str = FULL_FEATURES.code

    @property
    def input_dim(self) -> int:
        return self.dim + 1

    @property
    def feature_set(self) -> FeatureSet:
        return FeatureSet.parse(self.features)


@dataclass
class ForwardResult:
    logits: Node
    scores: Node
    attention: Optional[np.ndarray] = None   # B x T, rows sum to 1 over unmasked frames


def loss(score: float, label: int) -> float:
    """Binary cross-entropy of one score against a 0/1 label (score clamped to [1e-12, 1-1e-12])"""
    p = min(max(float(score), SCORE_EPS), 1.0 - SCORE_EPS)
    return -(label * np.log(p) + (1 - label) * np.log(1.0 - p))


class Classifier:
    """
    Base class: parameter registry, trainable special-token lexicon and SGD.

    Subclasses register their weights in ``self.params`` and implement
    ``forward``. The lexicon row mask keeps frozen special tokens fixed.
    """

    arch: Architecture

    def __init__(self, spec: ModelSpec, store: Optional[EmbeddingStore] = None):
        if spec.arch != self.arch:
            raise ContractError(f"{type(self).__name__} cannot be built from a {spec.arch.value} spec")
        self.spec = spec
        self.params: Dict[str, Node] = {}
        if store is not None:
            if store.dim != spec.dim:
                raise DimensionError(f"Store dim {store.dim} != model dim {spec.dim}")
            special = store.special_vectors
            self.lexicon_mask = store.trainable_mask
        else:
            special = np.zeros((3, spec.dim))
            self.lexicon_mask = np.array([[1.0], [0.0], [0.0]])
        self.lexicon = parameter(special, name="lexicon.special")

    # === Parameters ===

    def register(self, name: str, value: Matrix) -> Node:
        node = parameter(value, name=name)
        self.params[name] = node
        return node

    def named_parameters(self) -> Iterator[Tuple[str, Node]]:
        yield from self.params.items()
        yield self.lexicon.name, self.lexicon

    def parameters(self) -> List[Node]:
        return [p for _, p in self.named_parameters()]

    def parameter_count(self, include_lexicon: bool = False) -> int:
        count = sum(p.value.size for p in self.params.values())
        if include_lexicon:
            count += int(self.lexicon_mask.sum()) * self.spec.dim
        return count

    def zero_grad(self):
        for p in self.parameters():
            p.zero_grad()

    def gradient_norm(self) -> float:
        total = sum(float((p.grad ** 2).sum()) for p in self.params.values())
        total += float(((self.lexicon.grad * self.lexicon_mask) ** 2).sum())
        return float(np.sqrt(total))

    def sgd_step(self, lr: float, clip_norm: Optional[float] = None) -> float:
        """Plain SGD; returns the pre-clipping global gradient norm"""
        norm = self.gradient_norm()
        factor = lr
        if clip_norm is not None and norm > clip_norm:
            factor = lr * clip_norm / norm
        for p in self.params.values():
            p.value -= factor * p.grad
        self.lexicon.value -= factor * self.lexicon.grad * self.lexicon_mask
        return norm

    def state_dict(self) -> Dict[str, Matrix]:
        return {name: p.value.copy() for name, p in self.named_parameters()}

    def load_state_dict(self, state: Dict[str, Matrix]):
        expected = dict(self.named_parameters())
        missing = set(expected) - set(state)
        if missing:
            raise ContractError(f"State is missing parameters: {sorted(missing)}")
        for name, node in expected.items():
            value = np.asarray(state[name], dtype=np.float64)
            if value.shape != node.shape:
                raise DimensionError(f"{name}: expected {node.shape}, got {value.shape}")
            node.value[...] = value

    # === Inputs ===

    def _check_input(self, batch: FeatureBatch):
        if batch.input_dim != self.spec.input_dim:
            raise DimensionError(
                f"Features are {batch.input_dim} wide, model expects {self.spec.input_dim}"
            )

    def lexicon_block(self) -> Node:
        """K x (d+1): trainable special vectors with a zero confidence column"""
        return concat_cols([self.lexicon, constant(zeros(self.lexicon.rows, 1))])

    def stacked_inputs(self, batch: FeatureBatch) -> Node:
        """
        (T*B) x (d+1) time-major frames with the special-token vectors added
        back in; rows t*B .. (t+1)*B-1 hold step t.
        """
        B, T = batch.size, batch.steps
        frames = batch.frames.transpose(1, 0, 2).reshape(T * B, batch.input_dim)
        x = constant(frames)
        onehot = batch.special.transpose(1, 0, 2).reshape(T * B, -1)
        if onehot.any():
            x = x + matmul(constant(onehot), self.lexicon_block())
        return x

    # === Inference ===

    def forward(self, batch: FeatureBatch) -> ForwardResult:
        raise NotImplementedError

    def score(self, seqs: List[FeatureSequence], batch_size: int = 256) -> np.ndarray:
        """p(DD) for each sequence"""
        out = []
        for start in range(0, len(seqs), batch_size):
            batch = build_batch(seqs[start:start + batch_size])
            out.append(self.forward(batch).scores.value[:, 0])
        return np.concatenate(out) if out else np.zeros(0)


ModelFactory = Callable[[], Classifier]
