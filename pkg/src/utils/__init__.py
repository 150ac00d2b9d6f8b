from .history import HISTORY_LOGGER, configure_history, get_history_logger
from .manifest import file_sha256, manifest_path, read_manifest, verify_inputs, write_manifest
from .records import format_table, read_records, text_lines, write_records, write_roc, write_scores

__all__ = [
    "HISTORY_LOGGER", "configure_history", "get_history_logger",
    "file_sha256", "manifest_path", "read_manifest", "verify_inputs", "write_manifest",
    "format_table", "read_records", "text_lines", "write_records", "write_roc", "write_scores",
]
