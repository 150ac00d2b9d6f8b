"""
Per-command option resolution: Settings defaults < --config file < CLI flags.

Config files are flat ``key=value`` text (the format run manifests are
written in), read with python-dotenv. Keys may use dashes or underscores.
"""

from pathlib import Path
from typing import Any, Callable, Dict, Mapping, Optional, Type, TypeVar, Union

from dotenv import dotenv_values
from pydantic import BaseModel, ValidationError

from src.exceptions import ConfigError
import logging

logger = logging.getLogger(__name__)

# manifest bookkeeping keys that are not options
RESERVED_KEYS = ("command",)
RESERVED_PREFIXES = ("hash.",)

M = TypeVar("M", bound=BaseModel)


def normalize_key(key: str) -> str:
    return key.strip().lower().replace("-", "_")


def load_config_file(path: Union[str, Path]) -> Dict[str, str]:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"Config file not found: {path}")
    values: Dict[str, str] = {}
    for key, value in dotenv_values(path).items():
        key = normalize_key(key)
        if key in RESERVED_KEYS or key.startswith(RESERVED_PREFIXES):
            continue
        values[key] = "" if value is None else value
    return values


def parse_bool(value: str) -> bool:
    lowered = str(value).strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off", ""):
        return False
    raise ValueError(f"not a boolean: {value!r}")


def merge_options(
    defaults: Mapping[str, Any],
    file_values: Mapping[str, str],
    cli_values: Mapping[str, Any],
    converters: Optional[Mapping[str, Callable[[str], Any]]] = None,
) -> Dict[str, Any]:
    """
    Layer the three sources. Every key of ``file_values`` must be a known
    option; CLI values of None mean "not given".
    """
    converters = converters or {}
    unknown = sorted(set(file_values) - set(defaults))
    if unknown:
        raise ConfigError(f"Unknown config keys: {', '.join(unknown)}")
    merged = dict(defaults)
    for key, raw in file_values.items():
        convert = converters.get(key, str)
        if raw == "" and merged.get(key) is None:
            continue
        try:
            merged[key] = convert(raw)
        except (TypeError, ValueError) as e:
            raise ConfigError(f"Bad value for {key}: {raw!r} ({e})")
    for key, value in cli_values.items():
        if value is not None:
            merged[key] = value
    return merged


def build_config(cls: Type[M], **values) -> M:
    """Instantiate a config model, reporting validation failures as ConfigError"""
    try:
        return cls(**values)
    except ValidationError as e:
        fields = ", ".join(".".join(str(p) for p in err["loc"]) or cls.__name__ for err in e.errors())
        raise ConfigError(f"Invalid {cls.__name__} ({fields}): {e.errors()[0]['msg']}")
