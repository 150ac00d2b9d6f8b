from .config import Decay, EpochRecord, Phase, TrainConfig, TrainReport
from .schedule import learning_rate, range_schedule
from .trainer import check_disjoint, prepare, sgd_update, train
from .lr_finder import RangeTestResult, lr_range_test
from .transfer import TransferResult, transfer_train

__all__ = [
    "Decay", "EpochRecord", "Phase", "TrainConfig", "TrainReport",
    "learning_rate", "range_schedule",
    "check_disjoint", "prepare", "sgd_update", "train",
    "RangeTestResult", "lr_range_test",
    "TransferResult", "transfer_train",
]
