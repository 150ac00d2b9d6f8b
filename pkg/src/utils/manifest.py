"""
Run manifests: a flat key=value file written beside every output.

It records the command, every resolved option and the sha256 of each input
file, and can be passed back as ``--config`` to repeat the run.
"""

import hashlib
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Union

from dotenv import dotenv_values

from src.exceptions import IntegrityError
import logging

logger = logging.getLogger(__name__)

MANIFEST_SUFFIX = ".manifest"
HASH_PREFIX = "hash."


def file_sha256(path: Union[str, Path], chunk_size: int = 1 << 20) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(chunk_size), b""):
            digest.update(chunk)
    return digest.hexdigest()


def manifest_path(output: Union[str, Path]) -> Path:
    output = Path(output)
    return output.with_name(output.name + MANIFEST_SUFFIX)


def _format_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return ""
    if isinstance(value, (list, tuple)):
        return ",".join(_format_value(v) for v in value)
    return str(value)


def write_manifest(
    output: Union[str, Path],
    command: str,
    options: Mapping[str, Any],
    inputs: Optional[Mapping[str, Union[str, Path]]] = None,
) -> Path:
    """Write ``<output>.manifest``; keys are sorted so reruns produce identical bytes"""
    entries: Dict[str, str] = {"command": command}
    for key in sorted(options):
        entries[key] = _format_value(options[key])
    for name in sorted(inputs or {}):
        entries[f"{HASH_PREFIX}{name}"] = file_sha256(inputs[name])
    path = manifest_path(output)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for key, value in entries.items():
            f.write(f"{key}={value}\n")
    logger.debug(f"Wrote manifest {path}")
    return path


def read_manifest(path: Union[str, Path]) -> Dict[str, str]:
    return {k: (v or "") for k, v in dotenv_values(path).items()}


def verify_inputs(manifest: Mapping[str, str], inputs: Mapping[str, Union[str, Path]]):
    """Raise IntegrityError if an input file no longer matches its recorded hash"""
    for name, path in inputs.items():
        recorded = manifest.get(f"{HASH_PREFIX}{name}")
        if recorded and recorded != file_sha256(path):
            raise IntegrityError(f"Input {name} ({path}) changed since the manifest was written")
