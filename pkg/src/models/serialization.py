"""
Model files: a numpy ``.npz`` container holding a JSON header (the
ModelSpec) under ``__header__`` and one named array per parameter.
"""

import json
import zipfile
from pathlib import Path
from typing import Optional, Union

import numpy as np
from pydantic import ValidationError

from src.exceptions import ModelFormatError
from src.models.base import Architecture, Classifier, ModelSpec
import logging

logger = logging.getLogger(__name__)

HEADER_KEY = "__header__"
FORMAT_VERSION = 1
ZIP_EPOCH = (1980, 1, 1, 0, 0, 0)


def save_model(model: Classifier, path: Union[str, Path]):
    """
    Same layout as ``np.savez`` but with sorted members and fixed zip
    timestamps, so saving identical parameters gives identical bytes.
    """
    header = {"format": FORMAT_VERSION, **model.spec.model_dump(mode="json")}
    arrays = dict(model.state_dict())
    arrays[HEADER_KEY] = np.array(json.dumps(header, sort_keys=True))
    with zipfile.ZipFile(path, "w", compression=zipfile.ZIP_STORED) as zf:
        for name in sorted(arrays):
            info = zipfile.ZipInfo(f"{name}.npy", date_time=ZIP_EPOCH)
            with zf.open(info, "w") as f:
                np.lib.format.write_array(f, np.asanyarray(arrays[name]), allow_pickle=False)
    logger.info(f"Saved {model.spec.arch.value} model to {path}")


def read_header(path: Union[str, Path]) -> ModelSpec:
    path = Path(path)
    if not path.exists():
        raise ModelFormatError(f"Model file not found: {path}")
    try:
        with np.load(path, allow_pickle=False) as data:
            header = json.loads(str(data[HEADER_KEY]))
    except (OSError, ValueError, KeyError, zipfile.BadZipFile) as e:
        raise ModelFormatError(f"{path}: not a model file ({e})")
    if header.pop("format", None) != FORMAT_VERSION:
        raise ModelFormatError(f"{path}: unsupported model format")
    try:
        return ModelSpec(**header)
    except ValidationError as e:
        raise ModelFormatError(f"{path}: bad header ({e.error_count()} errors)")


def load_model(
    path: Union[str, Path],
    expected_arch: Optional[Architecture] = None,
) -> Classifier:
    """Rebuild a model from disk; rejects a file whose architecture tag differs from ``expected_arch``"""
    from src.models import build_model

    spec = read_header(path)
    if expected_arch is not None and spec.arch != expected_arch:
        raise ModelFormatError(
            f"{path}: architecture {spec.arch.value}, expected {Architecture(expected_arch).value}"
        )
    model = build_model(spec)
    with np.load(path, allow_pickle=False) as data:
        state = {name: data[name] for name in data.files if name != HEADER_KEY}
    try:
        model.load_state_dict(state)
    except Exception as e:
        raise ModelFormatError(f"{path}: parameters do not match header ({e})")
    return model
