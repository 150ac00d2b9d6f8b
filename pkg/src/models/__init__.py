from typing import Optional

from src.embeddings import EmbeddingStore

from .base import Architecture, Classifier, ForwardResult, ModelFactory, ModelSpec, loss
from .avg_dnn import AvgDnnModel
from .lstm import AttentionHead, LstmAttentionModel, LstmModel

_REGISTRY = {
    Architecture.AVG_DNN: AvgDnnModel,
    Architecture.LSTM: LstmModel,
    Architecture.LSTM_ATTN: LstmAttentionModel,
}


def build_model(spec: ModelSpec, store: Optional[EmbeddingStore] = None) -> Classifier:
    return _REGISTRY[Architecture(spec.arch)](spec, store)


from .serialization import save_model, load_model, read_header  # noqa: E402

__all__ = [
    "Architecture", "Classifier", "ForwardResult", "ModelFactory", "ModelSpec", "loss",
    "AvgDnnModel", "LstmModel", "LstmAttentionModel", "AttentionHead",
    "build_model", "save_model", "load_model", "read_header",
]
