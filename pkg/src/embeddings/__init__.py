from .store import (
    EmbeddingStore, load_vectors, save_vectors,
    SPECIAL_TOKENS, OOV_TOKEN, SEP_PREV_TOKEN, SEP_CUR_TOKEN, OOV, SEP_PREV, SEP_CUR,
)
from .features import (
    FeatureSet, FULL_FEATURES, FeatureSequence, FeatureBatch,
    assemble, assemble_all, build_batch,
)

__all__ = [
    "EmbeddingStore", "load_vectors", "save_vectors",
    "SPECIAL_TOKENS", "OOV_TOKEN", "SEP_PREV_TOKEN", "SEP_CUR_TOKEN", "OOV", "SEP_PREV", "SEP_CUR",
    "FeatureSet", "FULL_FEATURES", "FeatureSequence", "FeatureBatch",
    "assemble", "assemble_all", "build_batch",
]
