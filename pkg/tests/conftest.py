from pathlib import Path

import numpy as np
import pytest

from src.config import settings
from src.corpus import GeneratorSpec, Partition, generate, grammar_vocabulary, synthesize_vectors
from src.embeddings import EmbeddingStore
from src.models import Architecture, ModelSpec, build_model
from src.training import TrainConfig

FIXTURES = Path(__file__).parent

DIM = 8


@pytest.fixture(scope="session", autouse=True)
def _log_dir(tmp_path_factory):
    with pytest.MonkeyPatch.context() as mp:
        mp.setattr(settings, "LOG_DIR", str(tmp_path_factory.mktemp("logs")))
        yield


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def grammar_store() -> EmbeddingStore:
    tokens, vectors = synthesize_vectors(grammar_vocabulary(), dim=DIM, seed=0)
    return EmbeddingStore(tokens, vectors, seed=0)


def small_spec(seed: int = 1, train: int = 120, dev: int = 48, test: int = 48, unlabeled: int = 0, **kw) -> GeneratorSpec:
    return GeneratorSpec(
        n_per_partition={
            Partition.TRAIN: train,
            Partition.DEV: dev,
            Partition.TEST: test,
            Partition.UNLABELED: unlabeled,
        },
        ambiguous_fraction=kw.pop("ambiguous_fraction", 0.1),
        seed=seed,
        **kw,
    )


@pytest.fixture(scope="session")
def small_corpus():
    return generate(small_spec())


@pytest.fixture(scope="session")
def ssl_corpus():
    return generate(small_spec(seed=3, unlabeled=240))


def tiny_model_spec(arch: Architecture, dim: int = DIM, features: str = "c,p,t", seed: int = 0) -> ModelSpec:
    return ModelSpec(arch=arch, dim=dim, hidden_size=6, num_layers=1, seed=seed, features=features)


@pytest.fixture
def tiny_factory(grammar_store):
    def _make(arch: Architecture = Architecture.AVG_DNN, **kw):
        spec = tiny_model_spec(arch, **kw)
        return lambda: build_model(spec, grammar_store)
    return _make


@pytest.fixture
def quick_train() -> TrainConfig:
    return TrainConfig(lr_max=0.5, lr_min=0.05, epochs=2, batch_size=16, seed=0)


def toy_scores(n: int = 200, shift: float = 1.5, seed: int = 0):
    """Gaussian DD/NDD scores squashed to (0, 1)"""
    rng = np.random.default_rng(seed)
    labels = np.array([1] * (n // 2) + [0] * (n - n // 2))
    raw = rng.normal(0.0, 1.0, size=n) + shift * labels
    return 1.0 / (1.0 + np.exp(-raw)), labels
