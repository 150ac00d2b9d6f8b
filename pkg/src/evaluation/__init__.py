from .metrics import (
    EvalReport, RocPoint, ScoredSet, compute_eer, evaluate, mean_loss, roc_points, scan_eer, score_utterances,
)
from .ablation import (
    ABLATION_FEATURES, NO_TRANSFER_ROW, ExperimentConfig, ExperimentRow,
    acoustic_row, compare_models, run_ablation,
)

__all__ = [
    "EvalReport", "RocPoint", "ScoredSet", "compute_eer", "evaluate", "mean_loss", "roc_points",
    "scan_eer", "score_utterances",
    "ABLATION_FEATURES", "NO_TRANSFER_ROW", "ExperimentConfig", "ExperimentRow",
    "acoustic_row", "compare_models", "run_ablation",
]
