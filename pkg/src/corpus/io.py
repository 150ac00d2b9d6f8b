"""
Line-delimited corpus files.

One utterance per line, tab-separated, UTF-8 with LF endings:

    id  label(DD|NDD|U)  prev_tokens  cur_tokens  cur_confidences  [prev_confidences]

Token and confidence fields are space-joined; confidences are printed with
four decimals. Partition assignments live in a sidecar
``<stem>.partitions<suffix>`` file of ``id  partition`` lines.
"""

from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from pydantic import ValidationError

from src.corpus.models import Corpus, Label, Partition, Utterance
from src.exceptions import IntegrityError, ParseError
from src.utils.records import text_lines
import logging

logger = logging.getLogger(__name__)

UNLABELED_TAG = "U"


def partitions_path(path: Union[str, Path]) -> Path:
    path = Path(path)
    return path.with_name(f"{path.stem}.partitions{path.suffix}")


def _format_confidences(values) -> str:
    return " ".join(f"{c:.4f}" for c in values)


def format_utterance(u: Utterance) -> str:
    fields = [
        u.id,
        u.label.value if u.label is not None else UNLABELED_TAG,
        " ".join(u.prev_tokens),
        " ".join(u.cur_tokens),
        _format_confidences(u.cur_confidences),
    ]
    if u.prev_confidences is not None:
        fields.append(_format_confidences(u.prev_confidences))
    return "\t".join(fields)


def _parse_confidences(field: str, line_no: int, path: str) -> Tuple[float, ...]:
    try:
        return tuple(float(x) for x in field.split())
    except ValueError:
        raise ParseError(f"bad confidence list {field!r}", line=line_no, path=path)


def parse_utterance(line: str, line_no: int = 0, path: str = "") -> Utterance:
    fields = line.rstrip("\n").split("\t")
    if len(fields) not in (5, 6):
        raise ParseError(f"expected 5 or 6 tab-separated fields, got {len(fields)}", line=line_no, path=path)
    uid, tag, prev, cur, cur_conf = fields[:5]
    if tag == UNLABELED_TAG:
        label = None
    else:
        try:
            label = Label(tag)
        except ValueError:
            raise ParseError(f"unknown label {tag!r}", line=line_no, path=path)
    cur_tokens = tuple(cur.split())
    if not cur_tokens:
        raise ParseError("empty current-turn tokens", line=line_no, path=path)
    prev_conf = _parse_confidences(fields[5], line_no, path) if len(fields) == 6 else None
    try:
        return Utterance(
            id=uid,
            label=label,
            prev_tokens=tuple(prev.split()),
            cur_tokens=cur_tokens,
            cur_confidences=_parse_confidences(cur_conf, line_no, path),
            prev_confidences=prev_conf,
        )
    except ValidationError as e:
        first = e.errors()[0]
        raise ParseError(first.get("msg", str(e)), line=line_no, path=path)


def read_utterances(path: Union[str, Path]) -> List[Utterance]:
    path = str(path)
    items: List[Utterance] = []
    seen = set()
    for line_no, line in text_lines(path):
        if not line.strip():
            continue
        u = parse_utterance(line, line_no, path)
        if u.id in seen:
            raise IntegrityError(f"{path}:{line_no}: duplicate id {u.id}")
        seen.add(u.id)
        items.append(u)
    return items


def write_utterances(utterances, path: Union[str, Path]):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for u in utterances:
            f.write(format_utterance(u) + "\n")


def load_corpus(path: Union[str, Path]) -> Corpus:
    utterances = read_utterances(path)
    partition_map: Dict[str, Partition] = {}
    side = partitions_path(path)
    if side.exists():
        for line_no, line in text_lines(side):
            if not line.strip():
                continue
            parts = line.rstrip("\n").split("\t")
            if len(parts) != 2:
                raise ParseError("expected 'id<TAB>partition'", line=line_no, path=str(side))
            try:
                partition_map[parts[0]] = Partition(parts[1])
            except ValueError:
                raise ParseError(f"unknown partition {parts[1]!r}", line=line_no, path=str(side))
    corpus = Corpus(utterances=utterances, partition_map=partition_map)
    logger.info(f"Loaded {len(corpus)} utterances from {path}")
    return corpus


def save_corpus(corpus: Corpus, path: Union[str, Path]):
    write_utterances(corpus.utterances, path)
    if corpus.partition_map:
        with open(partitions_path(path), "w", encoding="utf-8", newline="\n") as f:
            for u in corpus.utterances:
                partition: Optional[Partition] = corpus.partition_map.get(u.id)
                if partition is not None:
                    f.write(f"{u.id}\t{partition.value}\n")
    logger.info(f"Saved {len(corpus)} utterances to {path}")
