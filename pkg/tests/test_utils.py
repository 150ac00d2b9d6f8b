import logging

import numpy as np
import pytest

from src.exceptions import IntegrityError
from src.utils import (
    HISTORY_LOGGER, file_sha256, format_table, get_history_logger, manifest_path, read_manifest,
    read_records, verify_inputs, write_manifest, write_records, write_roc, write_scores,
)


def test_records_round_floats_and_keep_key_order(tmp_path):
    path = tmp_path / "r.jsonl"
    write_records([{"epoch": np.int64(1), "dev_loss": 0.123456789, "name": "x"}], path)
    assert path.read_text(encoding="utf-8") == '{"epoch": 1, "dev_loss": 0.123457, "name": "x"}\n'
    assert read_records(path) == [{"epoch": 1, "dev_loss": 0.123457, "name": "x"}]


def test_scores_and_roc_files(tmp_path):
    write_scores(np.array([0.5, 0.25]), tmp_path / "s.txt")
    assert (tmp_path / "s.txt").read_text() == "0.500000\n0.250000\n"
    write_roc([(1.0, 0.0, 0.1), (0.0, 1.0, 0.9)], tmp_path / "roc.tsv")
    assert (tmp_path / "roc.tsv").read_text().splitlines()[1] == "0.000000\t1.000000\t0.900000"


def test_table_formatting():
    table = format_table([{"row": "c,p,t", "eer": 9.14}, {"row": "-p", "eer": None}], ["row", "eer"])
    lines = table.splitlines()
    assert lines[2].split() == ["c,p,t", "9.1"]
    assert lines[3].split() == ["-p", "-"]


def test_manifest_is_sorted_and_hashes_inputs(tmp_path):
    data = tmp_path / "corpus.tsv"
    data.write_text("abc", encoding="utf-8")
    out = tmp_path / "model.npz"
    path = write_manifest(out, "train", {"seed": 3, "epochs": 2}, {"corpus": data})
    assert path == manifest_path(out) == tmp_path / "model.npz.manifest"
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[:3] == ["command=train", "epochs=2", "seed=3"]
    assert lines[3] == f"hash.corpus={file_sha256(data)}"

    manifest = read_manifest(path)
    verify_inputs(manifest, {"corpus": data})
    data.write_text("abd", encoding="utf-8")
    with pytest.raises(IntegrityError):
        verify_inputs(manifest, {"corpus": data})


def test_manifest_lists_are_comma_joined(tmp_path):
    path = write_manifest(tmp_path / "corpus.tsv", "gen-corpus", {"fractions": [0.5, 0.25, 0.25], "vectors_out": None})
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines == ["command=gen-corpus", "fractions=0.5,0.25,0.25", "vectors_out="]
    assert read_manifest(path)["fractions"] == "0.5,0.25,0.25"


def test_history_events_reach_the_history_logger(caplog):
    history = logging.getLogger(HISTORY_LOGGER)
    # the CLI stops propagation once its own handlers are attached
    history.addHandler(caplog.handler)
    try:
        with caplog.at_level(logging.INFO, logger=HISTORY_LOGGER):
            get_history_logger(phase="scratch").info("epoch_end", epoch=0, dev_loss=0.5)
    finally:
        history.removeHandler(caplog.handler)
    messages = [r.getMessage() for r in caplog.records if r.name == HISTORY_LOGGER]
    assert set(messages) == {"event='epoch_end' dev_loss=0.5 epoch=0 phase='scratch'"}
