"""
Experiment drivers: feature ablation of one architecture, and a side-by-side
comparison of the architectures against the acoustic stand-in.

Rows are independent training runs. They share only the read-only corpus
and embedding store, so they may run in worker threads; a row that fails
records its error and the remaining rows still run.
"""

import asyncio
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from src.corpus.models import Corpus, Partition, TurnPair, Utterance
from src.embeddings import EmbeddingStore, FeatureSet
from src.evaluation.metrics import ScoredSet, compute_eer, evaluate
from src.exceptions import ContractError, DirectednessError
from src.models import Architecture, ModelSpec, build_model
from src.training.config import TrainConfig
from src.training.trainer import train
from src.training.transfer import transfer_train
from src.utils.history import get_history_logger
import logging

logger = logging.getLogger(__name__)

ABLATION_FEATURES = ("c,p,t", "-c", "-p", "-t")
NO_TRANSFER_ROW = "NoTL"

ARCH_LABELS = {
    Architecture.AVG_DNN: "AVG-DNN",
    Architecture.LSTM: "LSTM",
    Architecture.LSTM_ATTN: "LSTM+Attn",
}


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    arch: Architecture = Architecture.LSTM_ATTN
    hidden_size: int = Field(default=150, gt=0)
    num_layers: int = Field(default=3, gt=0)
    seed: int = 0
    train: TrainConfig = Field(default_factory=TrainConfig)
    pretrain: Optional[TrainConfig] = None
    workers: int = Field(default=1, gt=0)


@dataclass
class ExperimentRow:
    name: str
    features: str
    eer: Optional[float] = None
    threshold: Optional[float] = None
    test_loss: Optional[float] = None
    error: Optional[str] = None

    def to_record(self) -> Dict:
        return {
            "row": self.name,
            "features": self.features,
            "eer": self.eer,
            "threshold": self.threshold,
            "test_loss": self.test_loss,
            "error": self.error,
        }


@dataclass(frozen=True)
class _RowPlan:
    name: str
    arch: Architecture
    features: FeatureSet
    transfer: bool


def _splits(corpus: Corpus):
    train_set, dev, test = (corpus.get(p) for p in (Partition.TRAIN, Partition.DEV, Partition.TEST))
    if not (train_set and dev and test):
        raise ContractError("Corpus needs non-empty train, dev and test partitions")
    return train_set, dev, test


def _run_row(
    plan: _RowPlan,
    corpus: Corpus,
    store: EmbeddingStore,
    cfg: ExperimentConfig,
    pretrain: Optional[Corpus],
) -> ExperimentRow:
    row = ExperimentRow(name=plan.name, features=plan.features.code)
    spec = ModelSpec(
        arch=plan.arch,
        dim=store.dim,
        hidden_size=cfg.hidden_size,
        num_layers=cfg.num_layers,
        seed=cfg.seed,
        features=plan.features.code,
    )
    factory = lambda: build_model(spec, store)
    train_cfg = cfg.train.model_copy(update={"seed": cfg.seed})
    try:
        train_set, dev, test = _splits(corpus)
        if plan.transfer and pretrain is not None:
            pre_train, pre_dev, _ = _splits(pretrain)
            pre_cfg = (cfg.pretrain or cfg.train).model_copy(update={"seed": cfg.seed})
            model = transfer_train(
                factory, (pre_train, pre_dev), (train_set, dev), store, pre_cfg, train_cfg, plan.features
            ).model
        else:
            model = factory()
            train(model, train_set, dev, store, train_cfg, plan.features)
        report = evaluate(model, test, store, plan.features)
        row.eer, row.threshold, row.test_loss = report.eer, report.threshold, report.mean_loss
    except DirectednessError as e:
        row.error = str(e)
        logger.error(f"Row {plan.name} failed: {e}")
    return row


async def _run_rows(
    plans: Sequence[_RowPlan],
    corpus: Corpus,
    store: EmbeddingStore,
    cfg: ExperimentConfig,
    pretrain: Optional[Corpus],
) -> List[ExperimentRow]:
    semaphore = asyncio.Semaphore(cfg.workers)
    history = get_history_logger(phase="experiment")

    async def _one(plan: _RowPlan) -> ExperimentRow:
        async with semaphore:
            logger.info(f"Running row {plan.name} ({plan.arch.value}, features {plan.features.code})")
            row = await asyncio.to_thread(_run_row, plan, corpus, store, cfg, pretrain)
            history.info("experiment_row", **row.to_record())
            return row

    return list(await asyncio.gather(*(_one(p) for p in plans)))


def _execute(plans, corpus, store, cfg, pretrain) -> List[ExperimentRow]:
    return asyncio.run(_run_rows(plans, corpus, store, cfg, pretrain))


def run_ablation(
    corpus: Corpus,
    store: EmbeddingStore,
    cfg: ExperimentConfig,
    pretrain: Optional[Corpus] = None,
) -> List[ExperimentRow]:
    """
    Train and test ``cfg.arch`` under the full feature set and with each of
    c (current text), p (previous turn) and t (confidences) removed.

    With a pre-training corpus every row is transfer-trained and a NoTL row
    (full features, no pre-training) is appended.
    """
    if not any(u.prev_tokens for u in corpus.utterances):
        raise ContractError("Ablation needs previous turns in the corpus")
    plans = [
        _RowPlan(name=code, arch=cfg.arch, features=FeatureSet.parse(code), transfer=True)
        for code in ABLATION_FEATURES
    ]
    if pretrain is not None:
        plans.append(_RowPlan(name=NO_TRANSFER_ROW, arch=cfg.arch, features=FeatureSet(), transfer=False))
    return _execute(plans, corpus, store, cfg, pretrain)


def acoustic_row(test: Sequence[Utterance], acoustic: Callable[[TurnPair], float]) -> ExperimentRow:
    scores = np.array([acoustic(u) for u in test], dtype=np.float64)
    report = compute_eer(ScoredSet(scores, np.array([u.target for u in test]), [u.id for u in test]))
    return ExperimentRow(
        name="Acoustic baseline", features="t",
        eer=report.eer, threshold=report.threshold, test_loss=report.mean_loss,
    )


def compare_models(
    corpus: Corpus,
    store: EmbeddingStore,
    cfg: ExperimentConfig,
    acoustic: Optional[Callable[[TurnPair], float]] = None,
    pretrain: Optional[Corpus] = None,
) -> List[ExperimentRow]:
    """AVG-DNN (c,t), AVG-DNN (c,p,t), LSTM and LSTM+Attn under one seed/config, plus the acoustic scorer"""
    plans = [_RowPlan(f"{ARCH_LABELS[Architecture.AVG_DNN]} (c,t)", Architecture.AVG_DNN, FeatureSet.parse("c,t"), True)]
    for arch in (Architecture.AVG_DNN, Architecture.LSTM, Architecture.LSTM_ATTN):
        plans.append(_RowPlan(f"{ARCH_LABELS[arch]} (c,p,t)", arch, FeatureSet(), True))
    rows = _execute(plans, corpus, store, cfg, pretrain)
    if acoustic is not None:
        rows.append(acoustic_row(_splits(corpus)[2], acoustic))
    return rows
