"""
Pre-trained word vectors plus the special tokens the classifier adds.

Pre-trained rows are read-only once loaded. The special tokens (OOV and the
two turn separators) live in a separate small matrix; models copy it into a
trainable parameter, so training never writes into the store.
"""

from pathlib import Path
from typing import Dict, Iterable, Iterator, Optional, Sequence, Tuple, Union

import numpy as np

from src.exceptions import ConfigError, ParseError
from src.numerics import Matrix, make_rng
from src.utils.records import text_lines
import logging

logger = logging.getLogger(__name__)

OOV_TOKEN = "<oov>"
SEP_PREV_TOKEN = "<sep_prev>"
SEP_CUR_TOKEN = "<sep_cur>"
SPECIAL_TOKENS: Tuple[str, ...] = (OOV_TOKEN, SEP_PREV_TOKEN, SEP_CUR_TOKEN)
OOV, SEP_PREV, SEP_CUR = range(len(SPECIAL_TOKENS))

DEFAULT_TRAINABLE = {OOV_TOKEN: True, SEP_PREV_TOKEN: False, SEP_CUR_TOKEN: False}


class EmbeddingStore:
    """Token -> d-vector table with OOV fallback and turn-separator tokens"""

    def __init__(
        self,
        tokens: Sequence[str],
        vectors: Matrix,
        seed: int = 0,
        trainable_flags: Optional[Dict[str, bool]] = None,
        special_vectors: Optional[Matrix] = None,
    ):
        vectors = np.array(vectors, dtype=np.float64)
        if vectors.ndim != 2 or vectors.shape[0] != len(tokens):
            raise ConfigError(f"{len(tokens)} tokens but vector matrix of shape {vectors.shape}")
        vectors.flags.writeable = False
        self.vectors = vectors
        self.dim = vectors.shape[1]
        self.index: Dict[str, int] = {tok: i for i, tok in enumerate(tokens)}
        self.seed = seed

        flags = dict(DEFAULT_TRAINABLE)
        flags.update(trainable_flags or {})
        unknown = set(flags) - set(SPECIAL_TOKENS)
        if unknown:
            raise ConfigError(f"Unknown special tokens in trainable flags: {sorted(unknown)}")
        self.trainable_flags = flags

        if special_vectors is None:
            special_vectors = self._init_special(seed)
        special_vectors = np.array(special_vectors, dtype=np.float64)
        if special_vectors.shape != (len(SPECIAL_TOKENS), self.dim):
            raise ConfigError(f"Special vectors must be {len(SPECIAL_TOKENS)}x{self.dim}")
        special_vectors.flags.writeable = False
        self.special_vectors = special_vectors

    def _init_special(self, seed: int) -> Matrix:
        # Separators: frozen random draws; OOV starts small and is trained
        rng = make_rng(seed)
        scale = float(self.vectors.std()) if self.vectors.size else 0.1
        sep = rng.normal(0.0, scale or 0.1, size=(2, self.dim))
        oov = rng.normal(0.0, 0.01, size=(1, self.dim))
        return np.vstack([oov, sep])

    def __len__(self) -> int:
        return len(self.index)

    def __contains__(self, token: str) -> bool:
        return token in self.index

    @property
    def oov_vector(self) -> Matrix:
        return self.special_vectors[OOV]

    @property
    def trainable_mask(self) -> Matrix:
        """K x 1 column of 1.0 for trainable special tokens, 0.0 for frozen ones"""
        return np.array([[1.0 if self.trainable_flags[t] else 0.0] for t in SPECIAL_TOKENS])

    def lookup(self, token: str) -> Matrix:
        row = self.index.get(token)
        if row is None:
            return self.oov_vector
        return self.vectors[row]

    def special(self, which: int) -> Matrix:
        return self.special_vectors[which]

    def tokens(self) -> Iterator[str]:
        return iter(self.index)


# === Text vector files ===

def _parse_floats(parts: Sequence[str], line_no: int, path: str) -> Matrix:
    try:
        return np.array([float(x) for x in parts], dtype=np.float64)
    except ValueError as e:
        raise ParseError(f"non-numeric vector component ({e})", line=line_no, path=path)


def load_vectors(
    path: Union[str, Path],
    limit: Optional[int] = None,
    seed: int = 0,
    trainable_flags: Optional[Dict[str, bool]] = None,
) -> EmbeddingStore:
    """
    Load a whitespace-delimited text vector file (fastText ``.vec`` compatible).

    The optional first line "N d" is a header. Duplicate tokens keep their
    first occurrence; ``limit`` caps the vocabulary size.
    """
    path = str(path)
    tokens = []
    rows = []
    seen = set()
    dim: Optional[int] = None
    header_dim: Optional[int] = None
    any_line = False

    for line_no, raw in text_lines(path):
        parts = raw.split()
        if not parts:
            continue
        any_line = True
        if line_no == 1 and len(parts) == 2 and all(p.isdigit() for p in parts):
            header_dim = int(parts[1])
            dim = header_dim
            continue
        if limit is not None and limit > 0 and len(tokens) >= limit:
            break
        token, values = parts[0], parts[1:]
        if not values:
            raise ParseError(f"token {token!r} has no vector", line=line_no, path=path)
        if dim is None:
            dim = len(values)
        elif len(values) != dim:
            raise ParseError(
                f"expected {dim} components, got {len(values)}", line=line_no, path=path
            )
        if token in seen:
            continue
        seen.add(token)
        tokens.append(token)
        rows.append(_parse_floats(values, line_no, path))

    if not any_line:
        raise ParseError("empty vector file", path=path)
    if not tokens:
        raise ParseError("vector file has a header but no vectors", path=path)

    store = EmbeddingStore(tokens, np.vstack(rows), seed=seed, trainable_flags=trainable_flags)
    logger.info(f"Loaded {len(store)} vectors of dim {store.dim} from {path}")
    return store


def save_vectors(tokens: Iterable[str], vectors: Matrix, path: Union[str, Path]):
    """Write vectors with a header; floats use shortest round-trip repr"""
    tokens = list(tokens)
    vectors = np.asarray(vectors, dtype=np.float64)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(f"{len(tokens)} {vectors.shape[1]}\n")
        for tok, vec in zip(tokens, vectors):
            f.write(tok + " " + " ".join(repr(float(v)) for v in vec) + "\n")
