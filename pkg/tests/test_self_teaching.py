import logging

import numpy as np
import pytest

from src.corpus import ConfidenceAcousticScorer, Label, Partition
from src.exceptions import ContractError
from src.models import Architecture, build_model
from src.self_teaching import (
    PassRecord, SslConfig, compress, fuse_scores, pseudo_label_counts, select_model, ssl_run,
)
from src.self_teaching.loop import _select
from src.training import TrainConfig
from tests.conftest import tiny_model_spec


# === Fusion ===

def test_compress_fixed_points_and_monotone():
    assert compress(0.0, 3.0) == pytest.approx(0.0)
    assert compress(0.5, 3.0) == pytest.approx(0.5)
    assert compress(1.0, 3.0) == pytest.approx(1.0)
    xs = np.linspace(0.0, 1.0, 101)
    assert np.all(np.diff(compress(xs, 3.0)) >= 0.0)
    # pulls mid-range scores towards 0.5
    assert abs(compress(0.7, 3.0) - 0.5) < abs(0.7 - 0.5)


def test_compress_with_gamma_one_is_identity():
    xs = np.linspace(0.0, 1.0, 11)
    assert compress(xs, 1.0) == pytest.approx(xs)


def test_compress_rejects_out_of_range():
    with pytest.raises(ContractError):
        compress(1.2, 3.0)
    with pytest.raises(ContractError):
        compress(np.array([0.2, np.nan]), 3.0)


def test_fusion_weights():
    lex = np.array([0.1, 0.6, 0.9])
    ac = np.array([0.8, 0.2, 0.5])
    assert np.array_equal(fuse_scores(lex, ac, SslConfig(fusion_weight=0.0)), lex)
    only_ac = fuse_scores(lex, ac, SslConfig(fusion_weight=1.0, fusion_gamma=3.0))
    assert only_ac == pytest.approx(compress(ac, 3.0))
    mixed = fuse_scores(0.6, 0.8, SslConfig(fusion_weight=0.3, fusion_gamma=3.0))
    assert mixed == pytest.approx(0.7 * 0.6 + 0.3 * compress(0.8, 3.0))


def test_fusion_validates_both_inputs_even_at_zero_weight():
    with pytest.raises(ContractError):
        fuse_scores(0.5, 1.5, SslConfig(fusion_weight=0.0))
    with pytest.raises(ContractError):
        fuse_scores(-0.1, 0.5, SslConfig())


# === Selection ===

def test_pseudo_label_counts_keep_the_quantile_ratio():
    cfg = SslConfig()
    assert pseudo_label_counts(60000, cfg) == (600, 120)
    assert pseudo_label_counts(499, cfg) == (0, 0)
    n_dd, n_ndd = pseudo_label_counts(1234, SslConfig(dd_quantile=0.1, ndd_quantile=0.02))
    assert n_dd == 5 * n_ndd


def test_select_model_prefers_earliest_tie():
    assert select_model([0.5, 0.3, 0.4, 0.3]) == 1
    history = [PassRecord(i, loss, 10.0, 0, 0) for i, loss in enumerate([0.4, 0.4, 0.5])]
    assert select_model(history) == 0
    with pytest.raises(ContractError):
        select_model([])


def test_top_and_bottom_never_overlap():
    ids = [f"u{i}" for i in range(6)]
    fused = np.array([0.5, 0.5, 0.5, 0.5, 0.9, 0.1])
    top, bottom = _select(ids, fused, n_dd=3, n_ndd=3)
    assert not set(top) & set(bottom)
    assert top[0] == 4 and bottom[0] == 5


# === Loop ===

@pytest.fixture(scope="module")
def ssl_result(ssl_corpus, grammar_store):
    spec = tiny_model_spec(Architecture.AVG_DNN, features="c,t")
    snapshots = []

    def on_pass(state, record):
        snapshots.append((record.pass_index, len(state.labeled), len(state.unlabeled)))

    state = ssl_run(
        lambda: build_model(spec, grammar_store),
        ssl_corpus.get(Partition.TRAIN),
        ssl_corpus.unlabeled(),
        ssl_corpus.get(Partition.DEV),
        ssl_corpus.get(Partition.TEST),
        ConfidenceAcousticScorer(),
        grammar_store,
        SslConfig(dd_quantile=0.1, ndd_quantile=0.02, max_passes=2, patience=5),
        TrainConfig(lr_max=0.5, lr_min=0.05, epochs=1, batch_size=16),
        on_pass=on_pass,
    )
    return state, snapshots


def test_pass_zero_uses_gold_labels_only(ssl_result):
    state, snapshots = ssl_result
    first = state.history[0]
    assert first.pass_index == 0
    assert (first.added_dd, first.added_ndd) == (0, 0)
    assert snapshots[0][1] == 120


def test_pseudo_labels_follow_the_quantile_ratio(ssl_result):
    state, _ = ssl_result
    for record in state.history[1:]:
        assert record.added_ndd > 0
        assert record.added_dd == 5 * record.added_ndd
    added = sum(r.added_dd for r in state.history)
    assert sum(1 for v in state.pseudo_labels.values() if v is Label.DD) == added


def test_pools_stay_disjoint(ssl_result, ssl_corpus):
    state, snapshots = ssl_result
    labeled_ids = {u.id for u in state.labeled}
    unlabeled_ids = {u.id for u in state.unlabeled}
    assert not labeled_ids & unlabeled_ids
    assert len(labeled_ids) + len(unlabeled_ids) == 120 + 240
    assert set(state.pseudo_labels) <= {u.id for u in ssl_corpus.get(Partition.UNLABELED)}
    for (_, n_lab, n_unl) in snapshots:
        assert n_lab + n_unl == 360


def test_selected_pass_is_the_dev_loss_argmin(ssl_result):
    state, _ = ssl_result
    losses = [r.dev_loss for r in state.history]
    assert state.selected_pass == int(np.argmin(losses))
    assert len(state.history) == 3
    assert state.stop_reason
    assert state.records()[0].keys() == {"pass", "dev_loss", "test_eer", "added_dd", "added_ndd"}


def test_labeled_items_in_the_unlabeled_pool_are_rejected(ssl_corpus, grammar_store, tiny_factory):
    train_set = ssl_corpus.get(Partition.TRAIN)
    with pytest.raises(ContractError):
        ssl_run(
            tiny_factory(), train_set[:60], train_set[60:], ssl_corpus.get(Partition.DEV),
            ssl_corpus.get(Partition.TEST), ConfidenceAcousticScorer(), grammar_store,
            SslConfig(), TrainConfig(epochs=1),
        )


def test_prior_mismatch_is_logged(ssl_corpus, grammar_store, tiny_factory, caplog):
    with caplog.at_level(logging.WARNING, logger="src.self_teaching.loop"):
        state = ssl_run(
            tiny_factory(), ssl_corpus.get(Partition.TRAIN), ssl_corpus.unlabeled(),
            ssl_corpus.get(Partition.DEV), ssl_corpus.get(Partition.TEST),
            ConfidenceAcousticScorer(), grammar_store,
            SslConfig(dd_quantile=0.02, ndd_quantile=0.02, max_passes=0),
            TrainConfig(epochs=1, batch_size=16),
        )
    assert "differs from the labeled prior" in caplog.text
    assert len(state.history) == 1


def test_small_pool_stops_with_items_left(ssl_corpus, grammar_store, tiny_factory):
    pool = ssl_corpus.unlabeled()[:40]
    state = ssl_run(
        tiny_factory(), ssl_corpus.get(Partition.TRAIN), pool,
        ssl_corpus.get(Partition.DEV), ssl_corpus.get(Partition.TEST),
        ConfidenceAcousticScorer(), grammar_store,
        SslConfig(dd_quantile=0.1, ndd_quantile=0.02, max_passes=3),
        TrainConfig(epochs=1, batch_size=16),
    )
    assert len(state.history) == 1
    assert len(state.unlabeled) == 40
    assert "40 left, need 50" in state.stop_reason
