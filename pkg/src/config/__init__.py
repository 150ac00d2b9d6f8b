from .settings import settings
from .loader import build_config, load_config_file, merge_options, parse_bool

__all__ = ["settings", "build_config", "load_config_file", "merge_options", "parse_bool"]
