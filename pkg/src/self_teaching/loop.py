"""
Self-teaching: train on the labeled pool, co-score the unlabeled pool with
the lexical model and an acoustic scorer, move the most confident items
into the labeled pool under pseudo-labels, retrain, and repeat until dev
loss stops improving.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from src.corpus.models import Label, TurnPair, UnlabeledUtterance, Utterance
from src.embeddings import EmbeddingStore, FeatureSet, assemble_all
from src.exceptions import ContractError
from src.evaluation.metrics import evaluate
from src.models import Classifier, ModelFactory
from src.self_teaching.fusion import SslConfig, fuse_scores
from src.training import TrainConfig, check_disjoint, train
from src.utils.history import get_history_logger
import logging

logger = logging.getLogger(__name__)

AcousticScorer = Callable[[TurnPair], float]


@dataclass
class PassRecord:
    pass_index: int
    dev_loss: float
    test_eer: float
    added_dd: int
    added_ndd: int

    def to_record(self) -> Dict[str, float]:
        return {
            "pass": self.pass_index,
            "dev_loss": self.dev_loss,
            "test_eer": self.test_eer,
            "added_dd": self.added_dd,
            "added_ndd": self.added_ndd,
        }


@dataclass
class SslState:
    labeled: List[Utterance]
    unlabeled: List[UnlabeledUtterance]
    history: List[PassRecord] = field(default_factory=list)
    selected_pass: Optional[int] = None
    pseudo_labels: Dict[str, Label] = field(default_factory=dict)
    selected_model: Optional[Classifier] = None
    stop_reason: str = ""

    def records(self):
        return [r.to_record() for r in self.history]


def select_model(history: Sequence) -> int:
    """Index of the lowest dev loss; the earliest pass wins ties"""
    if not history:
        raise ContractError("Empty SSL history")
    losses = [h.dev_loss if isinstance(h, PassRecord) else float(h) for h in history]
    return int(np.argmin(losses))


def pseudo_label_counts(n_unlabeled: int, cfg: SslConfig) -> tuple:
    """
    (n_dd, n_ndd): floor(ndd_q * |U|) NDD and DD in exact quantile proportion.

    Both are 0 once |U| < 1 / ndd_q, so the loop stops with those items
    still unlabeled.
    """
    n_ndd = int(math.floor(cfg.ndd_quantile * n_unlabeled + 1e-9))
    n_dd = int(math.floor(n_ndd * cfg.quantile_ratio + 1e-9))
    return n_dd, n_ndd


def _check_priors(labeled: Sequence[Utterance], cfg: SslConfig):
    n_dd = sum(1 for u in labeled if u.label is Label.DD)
    n_ndd = len(labeled) - n_dd
    if n_ndd == 0:
        return
    prior = n_dd / n_ndd
    if abs(cfg.quantile_ratio / prior - 1.0) > 0.10:
        logger.warning(
            f"Quantile ratio {cfg.quantile_ratio:.2f} differs from the labeled prior "
            f"{prior:.2f}:1 by more than 10%"
        )


def _select(ids: List[str], fused: np.ndarray, n_dd: int, n_ndd: int):
    """Top n_dd and bottom n_ndd positions by fused score, ties broken by id"""
    ascending = sorted(range(len(ids)), key=lambda i: (fused[i], ids[i]))
    top = ascending[len(ids) - n_dd:][::-1] if n_dd else []
    return top, ascending[:n_ndd]


def ssl_run(
    factory: ModelFactory,
    labeled: Sequence[Utterance],
    unlabeled: Sequence[UnlabeledUtterance],
    dev: Sequence[Utterance],
    test: Sequence[Utterance],
    acoustic: AcousticScorer,
    store: EmbeddingStore,
    cfg: SslConfig,
    train_cfg: TrainConfig,
    features: Optional[FeatureSet] = None,
    on_pass: Optional[Callable[[SslState, PassRecord], None]] = None,
) -> SslState:
    """
    Pass 0 trains on the gold labeled pool only. Every later pass first
    pseudo-labels the extremes of the fused scores with the previous pass's
    model, then retrains.

    Returns:
        SslState with the per-pass history and the dev-loss-selected pass.
    """
    check_disjoint(labeled, unlabeled, dev, test)
    for u in unlabeled:
        if not isinstance(u, UnlabeledUtterance):
            raise ContractError(f"Unlabeled pool item {u.id} carries a label field")
    _check_priors(labeled, cfg)

    state = SslState(labeled=list(labeled), unlabeled=list(unlabeled))
    history_log = get_history_logger(phase="ssl")
    best_loss, since_best = math.inf, 0
    model: Optional[Classifier] = None

    for pass_index in range(cfg.max_passes + 1):
        added_dd = added_ndd = 0
        if pass_index > 0:
            n_dd, n_ndd = pseudo_label_counts(len(state.unlabeled), cfg)
            if n_ndd == 0 or n_dd + n_ndd > len(state.unlabeled):
                state.stop_reason = (
                    f"unlabeled pool too small for one NDD pseudo-label "
                    f"({len(state.unlabeled)} left, need {math.ceil(1.0 / cfg.ndd_quantile - 1e-9)})"
                )
                logger.info(f"SSL pass {pass_index}: {len(state.unlabeled)} unlabeled items left, stopping")
                break
            feats = features or model.spec.feature_set
            lex = model.score(assemble_all(state.unlabeled, store, feats))
            ac = np.array([acoustic(u) for u in state.unlabeled], dtype=np.float64)
            fused = fuse_scores(lex, ac, cfg)
            ids = [u.id for u in state.unlabeled]
            top, bottom = _select(ids, fused, n_dd, n_ndd)
            moved = {i: Label.DD for i in top}
            moved.update({i: Label.NDD for i in bottom})
            for i, label in sorted(moved.items()):
                u = state.unlabeled[i]
                state.labeled.append(u.with_label(label))
                state.pseudo_labels[u.id] = label
            state.unlabeled = [u for i, u in enumerate(state.unlabeled) if i not in moved]
            added_dd, added_ndd = len(top), len(bottom)

        if model is None or not cfg.warm_start:
            model = factory()
        train(model, state.labeled, dev, store, train_cfg, features)
        dev_report = evaluate(model, dev, store, features)
        test_report = evaluate(model, test, store, features)
        record = PassRecord(
            pass_index=pass_index,
            dev_loss=dev_report.mean_loss,
            test_eer=test_report.eer,
            added_dd=added_dd,
            added_ndd=added_ndd,
        )
        state.history.append(record)
        logger.info(
            f"SSL pass {pass_index}: dev_loss={record.dev_loss:.4f} test_eer={record.test_eer:.1f} "
            f"+{added_dd} DD / +{added_ndd} NDD ({len(state.labeled)} labeled, {len(state.unlabeled)} unlabeled)"
        )
        history_log.info("ssl_pass", **record.to_record())
        if on_pass is not None:
            on_pass(state, record)

        if record.dev_loss < best_loss:
            best_loss, since_best = record.dev_loss, 0
            state.selected_model = model
            if cfg.warm_start:
                snapshot = factory()
                snapshot.load_state_dict(model.state_dict())
                state.selected_model = snapshot
        else:
            since_best += 1
            if since_best >= cfg.patience:
                state.stop_reason = f"dev loss did not improve for {cfg.patience} passes"
                break
    else:
        state.stop_reason = f"reached {cfg.max_passes} passes"

    state.selected_pass = select_model(state.history)
    logger.info(f"SSL selected pass {state.selected_pass} ({state.stop_reason})")
    return state
