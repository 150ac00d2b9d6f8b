"""
Equal error rate and ROC points.

DD is the positive class. At threshold theta an item is accepted when its
score is >= theta:

    FAR(theta) = fraction of NDD accepted
    FRR(theta) = fraction of DD rejected

The EER is read off where FAR - FRR changes sign, interpolating linearly
between the two neighbouring ROC points.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from sklearn.metrics import roc_curve

from src.corpus.models import Utterance
from src.embeddings import EmbeddingStore, FeatureSet, assemble_all
from src.exceptions import ContractError
from src.models import Classifier
from src.models.base import SCORE_EPS

RocPoint = Tuple[float, float, float]   # (far, frr, threshold)


@dataclass
class ScoredSet:
    scores: np.ndarray
    labels: np.ndarray                  # 1 = DD, 0 = NDD
    ids: List[str] = field(default_factory=list)

    def __post_init__(self):
        self.scores = np.asarray(self.scores, dtype=np.float64).ravel()
        self.labels = np.asarray(self.labels, dtype=np.int64).ravel()
        if self.scores.size == 0:
            raise ContractError("ScoredSet is empty")
        if self.scores.shape != self.labels.shape:
            raise ContractError(f"{self.scores.size} scores but {self.labels.size} labels")
        if not np.all(np.isfinite(self.scores)):
            raise ContractError("ScoredSet contains non-finite scores")
        if not np.isin(self.labels, (0, 1)).all():
            raise ContractError("Labels must be 0 (NDD) or 1 (DD)")
        if not self.ids:
            self.ids = [str(i) for i in range(self.scores.size)]

    @classmethod
    def from_items(cls, items: Sequence[Tuple[float, int, str]]) -> "ScoredSet":
        scores, labels, ids = zip(*items) if items else ((), (), ())
        return cls(np.array(scores), np.array(labels), list(ids))

    def __len__(self) -> int:
        return self.scores.size

    @property
    def has_both_classes(self) -> bool:
        return bool(self.labels.any() and not self.labels.all())


@dataclass
class EvalReport:
    eer: float                          # percent
    threshold: float
    roc: List[RocPoint]
    mean_loss: float
    n: int = 0

    def to_record(self) -> Dict[str, float]:
        return {"eer": self.eer, "threshold": self.threshold, "mean_loss": self.mean_loss, "n": self.n}


def mean_loss(s: ScoredSet) -> float:
    p = np.clip(s.scores, SCORE_EPS, 1.0 - SCORE_EPS)
    y = s.labels
    return float(np.mean(-(y * np.log(p) + (1 - y) * np.log(1.0 - p))))


def roc_points(s: ScoredSet) -> List[RocPoint]:
    """
    Points at every distinct score in ascending threshold order, closed by a
    threshold just above the top score where nothing is accepted.
    """
    if not s.has_both_classes:
        raise ContractError("EER needs both DD and NDD items")
    fpr, tpr, thresholds = roc_curve(s.labels, s.scores, pos_label=1, drop_intermediate=False)
    # roc_curve prepends a point above every score; it is replaced by the closing point below
    far = fpr[1:][::-1]
    frr = 1.0 - tpr[1:][::-1]
    thr = thresholds[1:][::-1]
    points = [(float(a), float(r), float(t)) for a, r, t in zip(far, frr, thr)]
    points.append((0.0, 1.0, float(np.nextafter(s.scores.max(), np.inf))))
    return points


def compute_eer(s: ScoredSet) -> EvalReport:
    roc = roc_points(s)
    far = np.array([p[0] for p in roc])
    frr = np.array([p[1] for p in roc])
    thr = np.array([p[2] for p in roc])
    diff = far - frr
    i = int(np.argmax(diff <= 0.0))
    if i == 0 or diff[i] == 0.0:
        eer, threshold = far[i], thr[i]
    else:
        w = diff[i - 1] / (diff[i - 1] - diff[i])
        eer = far[i - 1] + w * (far[i] - far[i - 1])
        threshold = thr[i - 1] + w * (thr[i] - thr[i - 1])
    return EvalReport(
        eer=float(100.0 * eer),
        threshold=float(threshold),
        roc=roc,
        mean_loss=mean_loss(s),
        n=len(s),
    )


def scan_eer(s: ScoredSet) -> float:
    """EER (percent) at the midpoint threshold minimizing |FAR - FRR|, by exhaustive scan"""
    values = np.unique(s.scores)
    candidates = np.concatenate([[values[0] - 1.0], (values[:-1] + values[1:]) / 2.0, [values[-1] + 1.0]])
    dd, ndd = s.scores[s.labels == 1], s.scores[s.labels == 0]
    best, best_gap = 0.0, np.inf
    for theta in candidates:
        far = float(np.mean(ndd >= theta))
        frr = float(np.mean(dd < theta))
        if abs(far - frr) < best_gap:
            best, best_gap = (far + frr) / 2.0, abs(far - frr)
    return 100.0 * best


def score_utterances(
    model: Classifier,
    utterances: Sequence[Utterance],
    store: EmbeddingStore,
    features: Optional[FeatureSet] = None,
    batch_size: int = 256,
) -> ScoredSet:
    features = features or model.spec.feature_set
    scores = model.score(assemble_all(utterances, store, features), batch_size=batch_size)
    return ScoredSet(scores, np.array([u.target for u in utterances]), [u.id for u in utterances])


def evaluate(
    model: Classifier,
    utterances: Sequence[Utterance],
    store: EmbeddingStore,
    features: Optional[FeatureSet] = None,
    batch_size: int = 256,
) -> EvalReport:
    return compute_eer(score_utterances(model, utterances, store, features, batch_size))
