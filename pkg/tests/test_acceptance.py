"""
Directional experiments on the synthetic corpus. Each one trains several
models end to end, so they are marked slow and skipped by default:

    pytest -m slow
"""

import numpy as np
import pytest

from src.corpus import (
    ConfidenceAcousticScorer, GeneratorSpec, Partition, generate, grammar_vocabulary, synthesize_vectors,
)
from src.embeddings import EmbeddingStore
from src.evaluation import ExperimentConfig, compare_models, evaluate, run_ablation
from src.models import Architecture, ModelSpec, build_model
from src.self_teaching import SslConfig, ssl_run
from src.training import TrainConfig, train, transfer_train

pytestmark = pytest.mark.slow

DIM = 16
SIZES = {Partition.TRAIN: 2400, Partition.DEV: 240, Partition.TEST: 480}
TRAIN = TrainConfig(lr_max=0.5, lr_min=0.005, epochs=10, batch_size=32)
COMPARE_SEEDS = (0, 1, 2)


@pytest.fixture(scope="module")
def store() -> EmbeddingStore:
    tokens, vectors = synthesize_vectors(grammar_vocabulary(), dim=DIM, seed=0)
    return EmbeddingStore(tokens, vectors, seed=0)


def _corpus(seed: int = 0, **kw):
    return generate(GeneratorSpec(n_per_partition=dict(SIZES), seed=seed, **kw))


def _eer(rows, name: str) -> float:
    row = next(r for r in rows if r.name == name)
    assert row.error is None, row.error
    return row.eer


def test_sequence_models_beat_the_word_average(store):
    # seed averaging over 1200 test items resolves EER finer than the 0.5 point margin
    corpus = generate(GeneratorSpec(
        n_per_partition={**SIZES, Partition.TEST: 1200}, seed=1, unstructured_fraction=0.6,
    ))
    eers = {name: [] for name in ("AVG-DNN", "LSTM", "LSTM+Attn")}
    for seed in COMPARE_SEEDS:
        rows = compare_models(
            corpus,
            store,
            ExperimentConfig(hidden_size=32, num_layers=1, seed=seed, train=TRAIN.model_copy(update={"epochs": 15}),
                             workers=2),
            acoustic=ConfidenceAcousticScorer(),
        )
        for name, values in eers.items():
            values.append(_eer(rows, f"{name} (c,p,t)"))
    avg, lstm, attn = (float(np.mean(eers[n])) for n in ("AVG-DNN", "LSTM", "LSTM+Attn"))
    assert lstm <= 0.85 * avg
    assert attn <= lstm + 0.5


def test_ablation_directions(store):
    cfg = ExperimentConfig(arch=Architecture.LSTM, hidden_size=24, num_layers=1, train=TRAIN, workers=2)

    ambiguous = run_ablation(_corpus(seed=2, ambiguous_fraction=0.35, contextual_fraction=0.0), store, cfg)
    full = _eer(ambiguous, "c,p,t")
    assert _eer(ambiguous, "-t") > full
    assert _eer(ambiguous, "-c") > full

    contextual = run_ablation(
        _corpus(seed=3, ambiguous_fraction=0.05, contextual_fraction=0.6, contextual_ndd_fraction=0.6,
                unstructured_fraction=0.2),
        store, cfg,
    )
    assert _eer(contextual, "-p") > _eer(contextual, "c,p,t")


def test_pretraining_helps_a_small_follow_up_set(store):
    wins = 0
    for seed in range(3):
        small = generate(GeneratorSpec(
            n_per_partition={Partition.TRAIN: 300, Partition.DEV: 120, Partition.TEST: 480}, seed=seed,
        ))
        pre = generate(GeneratorSpec.pretrain(
            n_per_partition={Partition.TRAIN: 3000, Partition.DEV: 240}, seed=100 + seed,
        ))
        spec = ModelSpec(arch=Architecture.LSTM, dim=DIM, hidden_size=24, num_layers=1, seed=seed)
        factory = lambda: build_model(spec, store)
        pre_cfg = TRAIN.model_copy(update={"seed": seed, "epochs": 4})
        ft_cfg = TRAIN.model_copy(update={"seed": seed, "lr_max": 0.1, "lr_min": 0.001})
        train_set, dev, test = (small.get(p) for p in (Partition.TRAIN, Partition.DEV, Partition.TEST))

        transferred = transfer_train(
            factory, (pre.get(Partition.TRAIN), pre.get(Partition.DEV)), (train_set, dev), store, pre_cfg, ft_cfg,
        ).model
        scratch = factory()
        train(scratch, train_set, dev, store, TRAIN.model_copy(update={"seed": seed}))
        if evaluate(transferred, test, store).eer <= evaluate(scratch, test, store).eer:
            wins += 1
    assert wins >= 2


def test_self_teaching_does_not_hurt(store):
    corpus = generate(GeneratorSpec(n_per_partition={**SIZES, Partition.TRAIN: 600, Partition.UNLABELED: 6000}, seed=4))
    spec = ModelSpec(arch=Architecture.LSTM, dim=DIM, hidden_size=24, num_layers=1, seed=0, features="c,t")
    cfg = SslConfig(dd_quantile=0.05, ndd_quantile=0.01, max_passes=5)

    state = ssl_run(
        lambda: build_model(spec, store),
        corpus.get(Partition.TRAIN),
        corpus.unlabeled(),
        corpus.get(Partition.DEV),
        corpus.get(Partition.TEST),
        ConfidenceAcousticScorer(),
        store,
        cfg,
        TRAIN.model_copy(update={"epochs": 4}),
    )
    losses = [r.dev_loss for r in state.history]
    assert state.selected_pass == int(np.argmin(losses))
    assert state.history[state.selected_pass].test_eer <= state.history[0].test_eer
    for record in state.history[1:]:
        assert record.added_dd == 5 * record.added_ndd
