import json
from pathlib import Path
from typing import Any, Dict, Iterable, Iterator, List, Sequence, Tuple, Union

import numpy as np

from src.exceptions import ParseError


def _plain(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, float):
        return round(value, 6)
    return value


def text_lines(path: Union[str, Path]) -> Iterator[Tuple[int, str]]:
    """(line number, line) pairs of a UTF-8 file; a line that does not decode is a ParseError"""
    with open(path, "rb") as f:
        for line_no, raw in enumerate(f, start=1):
            try:
                yield line_no, raw.decode("utf-8")
            except UnicodeDecodeError as e:
                raise ParseError(f"not valid UTF-8 ({e.reason} at byte {e.start})", line=line_no, path=str(path))


def write_records(records: Iterable[Dict[str, Any]], path: Union[str, Path]):
    """One JSON object per line, keys in insertion order"""
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for record in records:
            f.write(json.dumps({k: _plain(v) for k, v in record.items()}) + "\n")


def read_records(path: Union[str, Path]) -> List[Dict[str, Any]]:
    with open(path, "r", encoding="utf-8") as f:
        return [json.loads(line) for line in f if line.strip()]


def write_scores(scores: Sequence[float], path: Union[str, Path]):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for s in scores:
            f.write(f"{float(s):.6f}\n")


def write_roc(roc: Sequence[Sequence[float]], path: Union[str, Path]):
    """(far, frr, threshold) triples, tab-separated"""
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for far, frr, threshold in roc:
            f.write(f"{far:.6f}\t{frr:.6f}\t{threshold:.6f}\n")


def format_table(rows: Sequence[Dict[str, Any]], columns: Sequence[str]) -> str:
    """Fixed-width text table; floats get one decimal (EER precision)"""
    def cell(v: Any) -> str:
        if v is None:
            return "-"
        if isinstance(v, float):
            return f"{v:.1f}"
        return str(v)

    body = [[cell(r.get(c)) for c in columns] for r in rows]
    widths = [max(len(c), *(len(b[i]) for b in body)) if body else len(c) for i, c in enumerate(columns)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(columns, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines.extend("  ".join(v.ljust(w) for v, w in zip(b, widths)) for b in body)
    return "\n".join(lines)
