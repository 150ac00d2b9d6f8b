from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

from src.corpus.models import Utterance
from src.embeddings import EmbeddingStore, FeatureSet
from src.exceptions import ConfigError, DirectednessError, TrainingError
from src.models import Classifier, ModelFactory
from src.training.config import Phase, TrainConfig, TrainReport
from src.training.trainer import train
import logging

logger = logging.getLogger(__name__)

Split = Tuple[Sequence[Utterance], Sequence[Utterance]]   # (train, dev)


@dataclass
class TransferResult:
    model: Classifier
    pretrain_report: TrainReport
    finetune_report: TrainReport


def _run_phase(model, data: Split, store, cfg: TrainConfig, features) -> TrainReport:
    try:
        return train(model, data[0], data[1], store, cfg, features)
    except TrainingError as e:
        if e.phase == cfg.phase.value:
            raise
        raise TrainingError(str(e), step=e.step, phase=cfg.phase.value) from e
    except DirectednessError as e:
        raise type(e)(f"[{cfg.phase.value}] {e}") from e


def transfer_train(
    factory: ModelFactory,
    pretrain_data: Split,
    finetune_data: Split,
    store: EmbeddingStore,
    cfg_pre: TrainConfig,
    cfg_ft: TrainConfig,
    features: Optional[FeatureSet] = None,
) -> TransferResult:
    """
    Pre-train from scratch on ``pretrain_data``, then continue from those
    parameters on ``finetune_data`` with every parameter still trainable.
    """
    if cfg_pre.lr_max < cfg_ft.lr_max:
        raise ConfigError(
            f"Pre-training lr_max ({cfg_pre.lr_max}) must be >= fine-tuning lr_max ({cfg_ft.lr_max})"
        )
    cfg_pre = cfg_pre.model_copy(update={"phase": Phase.PRETRAIN})
    cfg_ft = cfg_ft.model_copy(update={"phase": Phase.FINETUNE})

    model = factory()
    logger.info(f"Pre-training {model.spec.arch.value} on {len(pretrain_data[0])} utterances")
    pre_report = _run_phase(model, pretrain_data, store, cfg_pre, features)
    logger.info(f"Fine-tuning on {len(finetune_data[0])} utterances")
    ft_report = _run_phase(model, finetune_data, store, cfg_ft, features)
    return TransferResult(model=model, pretrain_report=pre_report, finetune_report=ft_report)
