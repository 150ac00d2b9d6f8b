import numpy as np
import pytest

from src.corpus import ConfidenceAcousticScorer, Corpus, Partition
from src.evaluation import (
    NO_TRANSFER_ROW, ExperimentConfig, ScoredSet, acoustic_row, compute_eer, mean_loss,
    roc_points, run_ablation, scan_eer,
)
from src.exceptions import ContractError
from src.models import Architecture
from src.training import TrainConfig
from src.utils import format_table
from tests.conftest import toy_scores


def _set(scores, labels):
    return ScoredSet(np.array(scores, dtype=float), np.array(labels))


def test_perfect_separation():
    report = compute_eer(_set([0.9, 0.8, 0.7, 0.2, 0.1], [1, 1, 1, 0, 0]))
    assert report.eer == pytest.approx(0.0)
    assert 0.2 < report.threshold <= 0.7


def test_inverted_scores():
    assert compute_eer(_set([0.1, 0.2, 0.8, 0.9], [1, 1, 0, 0])).eer == pytest.approx(100.0)


def test_one_overlap_pair():
    # 4 DD, 4 NDD; one NDD outranks one DD
    scores = [0.9, 0.8, 0.7, 0.4, 0.6, 0.3, 0.2, 0.1]
    labels = [1, 1, 1, 1, 0, 0, 0, 0]
    assert compute_eer(_set(scores, labels)).eer == pytest.approx(25.0)


def test_tied_scores_across_classes():
    report = compute_eer(_set([0.5, 0.5, 0.5, 0.5], [1, 0, 1, 0]))
    assert report.eer == pytest.approx(50.0)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_interpolated_eer_agrees_with_threshold_scan(seed):
    scores, labels = toy_scores(n=400, seed=seed)
    s = _set(scores, labels)
    assert compute_eer(s).eer == pytest.approx(scan_eer(s), abs=1.0)


def test_eer_is_invariant_to_monotone_rescaling():
    scores, labels = toy_scores(seed=4)
    a = compute_eer(_set(scores, labels)).eer
    b = compute_eer(_set(scores ** 3, labels)).eer
    assert a == pytest.approx(b)


def test_chance_scores_sit_at_fifty_percent():
    rng = np.random.default_rng(9)
    labels = np.array([1, 0] * 5000)
    eer = compute_eer(_set(rng.uniform(size=labels.size), labels)).eer
    assert 48.0 <= eer <= 52.0


def test_eer_matches_the_scan_on_many_sets():
    for seed in range(50):
        scores, labels = toy_scores(n=1000, shift=0.5 + seed / 25.0, seed=100 + seed)
        s = _set(scores, labels)
        assert compute_eer(s).eer == pytest.approx(scan_eer(s), abs=0.5)


def test_flipping_labels_and_scores_keeps_the_eer():
    scores, labels = toy_scores(n=300, seed=6)
    a = compute_eer(_set(scores, labels)).eer
    b = compute_eer(_set(1.0 - scores, 1 - labels)).eer
    assert a == pytest.approx(b, abs=1e-9)


def test_duplicating_every_item_keeps_the_eer():
    scores, labels = toy_scores(n=300, seed=7)
    a = compute_eer(_set(scores, labels)).eer
    b = compute_eer(_set(np.tile(scores, 2), np.tile(labels, 2))).eer
    assert a == pytest.approx(b, abs=1e-9)


def test_roc_points_are_ordered_and_closed():
    scores, labels = toy_scores(n=50, seed=5)
    roc = roc_points(_set(scores, labels))
    far = [p[0] for p in roc]
    frr = [p[1] for p in roc]
    thr = [p[2] for p in roc]
    assert thr == sorted(thr)
    assert far == sorted(far, reverse=True)
    assert frr == sorted(frr)
    assert roc[0][:2] == (1.0, 0.0)
    assert roc[-1][:2] == (0.0, 1.0)
    assert roc[-1][2] > max(scores)


def test_invalid_scored_sets():
    with pytest.raises(ContractError):
        compute_eer(_set([0.1, 0.9], [1, 1]))
    with pytest.raises(ContractError):
        _set([0.1, float("nan")], [1, 0])
    with pytest.raises(ContractError):
        _set([0.1, 0.2], [1, 2])
    with pytest.raises(ContractError):
        _set([], [])
    with pytest.raises(ContractError):
        _set([0.1, 0.2, 0.3], [1, 0])


def test_mean_loss_and_record():
    s = _set([0.5, 0.5], [1, 0])
    assert mean_loss(s) == pytest.approx(np.log(2.0))
    report = compute_eer(s)
    assert set(report.to_record()) == {"eer", "threshold", "mean_loss", "n"}
    assert report.n == 2


def test_from_items_keeps_ids():
    s = ScoredSet.from_items([(0.8, 1, "a"), (0.3, 0, "b")])
    assert s.ids == ["a", "b"]
    assert s.has_both_classes


# === Experiment drivers ===

def test_acoustic_row(small_corpus):
    row = acoustic_row(small_corpus.get(Partition.TEST), ConfidenceAcousticScorer())
    assert row.error is None
    assert 0.0 <= row.eer < 50.0


def test_ablation_needs_previous_turns(small_corpus, grammar_store):
    stripped = Corpus(
        utterances=[u.model_copy(update={"prev_tokens": (), "prev_confidences": None}) for u in small_corpus.utterances],
        partition_map=dict(small_corpus.partition_map),
    )
    with pytest.raises(ContractError):
        run_ablation(stripped, grammar_store, ExperimentConfig())


def test_ablation_rows(small_corpus, grammar_store):
    cfg = ExperimentConfig(
        arch=Architecture.AVG_DNN, hidden_size=6, num_layers=1, seed=0,
        train=TrainConfig(lr_max=0.5, lr_min=0.05, epochs=1, batch_size=16), workers=2,
    )
    rows = run_ablation(small_corpus, grammar_store, cfg)
    assert [r.name for r in rows] == ["c,p,t", "-c", "-p", "-t"]
    assert [r.features for r in rows] == ["c,p,t", "p,t", "c,t", "c,p"]
    assert all(r.error is None and 0.0 <= r.eer <= 100.0 for r in rows)
    assert NO_TRANSFER_ROW not in [r.name for r in rows]

    table = format_table([r.to_record() for r in rows], ["row", "eer"])
    assert table.splitlines()[0].split() == ["row", "eer"]
    assert len(table.splitlines()) == 2 + len(rows)


def test_failing_row_does_not_stop_the_others(small_corpus, grammar_store):
    # the dev partition is missing, so every row records an error
    no_dev = Corpus(
        utterances=list(small_corpus.utterances),
        partition_map={k: v for k, v in small_corpus.partition_map.items() if v is not Partition.DEV},
    )
    cfg = ExperimentConfig(arch=Architecture.AVG_DNN, hidden_size=4, num_layers=1,
                           train=TrainConfig(epochs=1))
    rows = run_ablation(no_dev, grammar_store, cfg)
    assert len(rows) == 4
    assert all(r.error and r.eer is None for r in rows)
