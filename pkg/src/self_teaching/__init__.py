from .fusion import SslConfig, compress, fuse_scores
from .loop import AcousticScorer, PassRecord, SslState, pseudo_label_counts, select_model, ssl_run

__all__ = [
    "SslConfig", "compress", "fuse_scores",
    "AcousticScorer", "PassRecord", "SslState", "pseudo_label_counts", "select_model", "ssl_run",
]
