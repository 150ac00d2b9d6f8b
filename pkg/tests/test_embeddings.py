import numpy as np
import pytest

from src.corpus import TurnPair
from src.embeddings import (
    OOV, SEP_CUR, SEP_PREV, EmbeddingStore, FeatureSet, assemble, build_batch, load_vectors, save_vectors,
)
from src.exceptions import ConfigError, ContractError, DimensionError, ParseError


@pytest.fixture
def store(fixtures_dir):
    return load_vectors(fixtures_dir / "vectors_small.vec")


def _pair(**kw):
    values = dict(
        id="x1",
        prev_tokens=("computer", "play", "music"),
        prev_confidences=(0.9, 0.8, 0.7),
        cur_tokens=("weather", "zzz"),
        cur_confidences=(0.6, 0.5),
    )
    values.update(kw)
    return TurnPair(**values)


def test_load_with_header(store):
    assert len(store) == 7
    assert store.dim == 4
    assert store.lookup("music") == pytest.approx([0.20, 0.35, 0.05, -0.15])


def test_load_without_header_and_duplicates_keep_first(tmp_path):
    path = tmp_path / "v.vec"
    path.write_text("a 1 2\nb 3 4\na 9 9\n", encoding="utf-8")
    store = load_vectors(path)
    assert len(store) == 2
    assert store.lookup("a") == pytest.approx([1.0, 2.0])


def test_limit_caps_vocabulary(fixtures_dir):
    store = load_vectors(fixtures_dir / "vectors_small.vec", limit=3)
    assert list(store.tokens()) == ["computer", "play", "music"]


def test_dimension_mismatch_reports_line(tmp_path):
    path = tmp_path / "v.vec"
    path.write_text("2 3\na 1 2 3\nb 1 2\n", encoding="utf-8")
    with pytest.raises(ParseError) as err:
        load_vectors(path)
    assert err.value.line == 3


def test_non_numeric_component(tmp_path):
    path = tmp_path / "v.vec"
    path.write_text("a 1 x\n", encoding="utf-8")
    with pytest.raises(ParseError):
        load_vectors(path)


def test_undecodable_line_reports_its_number(tmp_path):
    path = tmp_path / "v.vec"
    path.write_bytes("a 1 2\nb\xe9 3 4\n".encode("latin-1"))
    with pytest.raises(ParseError, match="UTF-8") as err:
        load_vectors(path)
    assert (err.value.line, err.value.path) == (2, str(path))


def test_empty_file(tmp_path):
    path = tmp_path / "v.vec"
    path.write_text("", encoding="utf-8")
    with pytest.raises(ParseError):
        load_vectors(path)


def test_save_then_load_keeps_values(tmp_path, store):
    path = tmp_path / "out.vec"
    tokens = list(store.tokens())
    save_vectors(tokens, store.vectors, path)
    again = load_vectors(path)
    assert list(again.tokens()) == tokens
    assert np.array_equal(again.vectors, store.vectors)


def test_oov_lookup_and_read_only_table(store):
    assert np.array_equal(store.lookup("never-seen"), store.oov_vector)
    assert "never-seen" not in store
    with pytest.raises(ValueError):
        store.vectors[0, 0] = 1.0


def test_special_vectors_are_seeded(fixtures_dir):
    a = load_vectors(fixtures_dir / "vectors_small.vec", seed=5)
    b = load_vectors(fixtures_dir / "vectors_small.vec", seed=5)
    c = load_vectors(fixtures_dir / "vectors_small.vec", seed=6)
    assert np.array_equal(a.special_vectors, b.special_vectors)
    assert not np.array_equal(a.special_vectors, c.special_vectors)


def test_bad_store_shapes():
    with pytest.raises(ConfigError):
        EmbeddingStore(["a", "b"], np.zeros((3, 2)))
    with pytest.raises(ConfigError):
        EmbeddingStore(["a"], np.zeros((1, 2)), trainable_flags={"<nope>": True})


# === Feature assembly ===

def test_layout_with_previous_turn(store):
    seq = assemble(_pair(), store)
    assert seq.length == 1 + 3 + 1 + 2
    assert seq.dim == store.dim
    assert dict(seq.special_slots) == {0: SEP_PREV, 4: SEP_CUR, 6: OOV}
    assert seq.frames[1, :4] == pytest.approx(store.lookup("computer"))
    assert seq.frames[:, 4] == pytest.approx([1.0, 0.9, 0.8, 0.7, 1.0, 0.6, 0.5])


def test_without_previous_turn(store):
    seq = assemble(_pair(), store, use_prev=False)
    assert seq.length == 3
    assert dict(seq.special_slots) == {0: SEP_CUR, 2: OOV}


def test_missing_previous_confidences_default_to_one(store):
    seq = assemble(_pair(prev_confidences=None), store)
    assert seq.frames[1:4, 4] == pytest.approx([1.0, 1.0, 1.0])


def test_confidence_and_lexical_ablations(store):
    no_conf = assemble(_pair(), store, use_conf=False)
    assert no_conf.frames[:, 4] == pytest.approx(np.ones(no_conf.length))

    no_lex = assemble(_pair(), store, use_lex=False)
    assert not no_lex.frames[:, :4].any()
    assert no_lex.special_slots == ()
    assert no_lex.frames[5, 4] == pytest.approx(0.6)


def test_feature_set_codes():
    assert FeatureSet.parse("c,p,t") == FeatureSet()
    assert FeatureSet.parse("-p") == FeatureSet(use_prev=False)
    assert FeatureSet.parse("c,t").code == "c,t"
    assert FeatureSet.parse(" -C ").code == "p,t"
    for bad in ("", "-x", "c,q"):
        with pytest.raises(ConfigError):
            FeatureSet.parse(bad)


def test_batch_padding(store):
    long_seq = assemble(_pair(), store)
    short_seq = assemble(_pair(prev_tokens=(), prev_confidences=None), store)
    batch = build_batch([long_seq, short_seq], [1, 0])
    assert batch.frames.shape == (2, 7, 5)
    assert batch.lengths.tolist() == [7, 3]
    assert not batch.frames[1, 3:].any()
    assert batch.special[0, 0, SEP_PREV] == 1.0
    assert batch.special[1, 0, SEP_CUR] == 1.0
    # special-token embedding blocks are zeroed; models add their own vectors back
    assert not batch.frames[0, 0, :4].any()
    assert batch.targets.tolist() == [[1.0], [0.0]]


def test_batch_errors(store, tmp_path):
    with pytest.raises(ContractError):
        build_batch([])
    other = EmbeddingStore(["a"], np.ones((1, 2)))
    with pytest.raises(DimensionError):
        build_batch([assemble(_pair(), store), assemble(_pair(), other)])
