from typing import Dict, List, Sequence

from src.corpus.models import Corpus, Label, Partition
from src.exceptions import ConfigError, IntegrityError
from src.numerics import make_rng
import logging

logger = logging.getLogger(__name__)

LABELED_ORDER = (Partition.TRAIN, Partition.DEV, Partition.TEST)


def _sizes(fractions: Sequence[float], n: int) -> List[int]:
    sizes = [int(f * n + 1e-9) for f in fractions]
    if abs(sum(fractions) - 1.0) < 1e-6:
        # hand leftovers to the largest remainders so every item is used
        remainders = sorted(range(len(fractions)), key=lambda i: -(fractions[i] * n - sizes[i]))
        for i in remainders[: n - sum(sizes)]:
            sizes[i] += 1
    return sizes


def partition(corpus: Corpus, fractions: Sequence[float], seed: int) -> Corpus:
    """
    Stratified seeded split of the labeled utterances into train/dev/test.

    Items without a gold label go to the unlabeled partition. When the
    fractions sum to less than 1 the remainder stays unassigned.
    """
    fractions = list(fractions)
    if not 1 <= len(fractions) <= len(LABELED_ORDER):
        raise ConfigError(f"Expected 1-{len(LABELED_ORDER)} fractions, got {len(fractions)}")
    if any(f < 0 for f in fractions) or sum(fractions) > 1.0 + 1e-9:
        raise ConfigError(f"Fractions must be non-negative and sum to <= 1: {fractions}")

    rng = make_rng(seed)
    labeled = corpus.labeled()
    by_class: Dict[Label, List[str]] = {Label.DD: [], Label.NDD: []}
    for u in labeled:
        by_class[u.label].append(u.id)
    shuffled = {k: [ids[i] for i in rng.permutation(len(ids))] for k, ids in by_class.items()}

    n = len(labeled)
    sizes = _sizes(fractions, n)
    dd_share = len(by_class[Label.DD]) / n if n else 0.0
    partition_map: Dict[str, Partition] = {}
    cursor = {Label.DD: 0, Label.NDD: 0}
    last = len(sizes) - 1
    for i, size in enumerate(sizes):
        if i == last and abs(sum(fractions) - 1.0) < 1e-6:
            n_dd = len(by_class[Label.DD]) - cursor[Label.DD]
            n_ndd = len(by_class[Label.NDD]) - cursor[Label.NDD]
        else:
            n_dd = min(int(round(size * dd_share)), len(by_class[Label.DD]) - cursor[Label.DD])
            n_ndd = min(size - n_dd, len(by_class[Label.NDD]) - cursor[Label.NDD])
        name = LABELED_ORDER[i]
        if size > 0 and (n_dd == 0 or n_ndd == 0):
            raise IntegrityError(f"Partition {name.value} would contain a single class")
        for label, count in ((Label.DD, n_dd), (Label.NDD, n_ndd)):
            for uid in shuffled[label][cursor[label]:cursor[label] + count]:
                partition_map[uid] = name
            cursor[label] += count
        logger.debug(f"Partition {name.value}: {n_dd} DD / {n_ndd} NDD")

    for u in corpus.utterances:
        if u.label is None:
            partition_map[u.id] = Partition.UNLABELED

    return Corpus(utterances=list(corpus.utterances), partition_map=partition_map)
