"""
Synthetic follow-up corpus.

Four populations per partition:

* ambiguous texts ("thank you", "stop", ...): each class gets its share of
  the ambiguous quota and draws texts from p(text | class), so per-text
  labels follow the prior while the class ratio stays exact;
* structured DD commands from a template grammar, some of them short
  fragments that only make sense after a relevant previous turn;
* unstructured NDD: grammar commands with shuffled word order or spliced
  halves, plus fragments following an unrelated previous turn;
* background NDD speech with low-confidence tokens.

``mode="pretrain"`` emits wakeword-prefixed first turns instead: DD commands
and false-wake NDD, no previous turns.
"""

import enum
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.special import expit

from src.corpus.models import Corpus, Label, Partition, TurnPair, Utterance
from src.embeddings.store import save_vectors
from src.exceptions import ConfigError
from src.numerics import make_rng
import logging

logger = logging.getLogger(__name__)

WAKEWORD = "computer"

# Most frequent texts seen in both classes, with (p(DD), p(NDD)) in percent.
# "okay" sums to 101; rows are normalized when sampling.
AMBIGUITY_TABLE: Dict[str, Tuple[float, float]] = {
    "thank you": (93.2, 6.8),
    "stop": (44.8, 55.2),
    "okay": (45.8, 55.2),
    "cancel": (70.7, 29.3),
    "what": (32.6, 67.4),
    "next": (62.8, 37.2),
    "good night": (61.6, 38.4),
    "play": (36.8, 63.2),
}

DESK_SCALE: Dict[Partition, int] = {
    Partition.TRAIN: 24000,
    Partition.DEV: 2400,
    Partition.TEST: 2400,
    Partition.UNLABELED: 60000,
}

SLOTS: Dict[str, List[str]] = {
    "city": ["seattle", "boston", "paris", "london", "denver", "austin"],
    "when": ["tomorrow", "tonight", "sunday", "monday", "this weekend"],
    "item": ["bananas", "chicken", "milk", "eggs", "bread", "apples", "coffee"],
    "artist": ["adele", "drake", "beyonce", "coldplay", "shakira", "metallica"],
    "genre": ["jazz", "rock", "classical", "country"],
    "n": ["five", "ten", "twenty", "thirty", "fifteen"],
    "device": ["lights", "fan", "heater", "tv", "lamp"],
    "book": ["hamlet", "dune", "emma", "ulysses"],
}

DOMAINS: Dict[str, Dict[str, List[str]]] = {
    "weather": {
        "commands": [
            "what's the weather in {city}", "will it rain {when}",
            "what's the forecast for {when}", "how cold is it in {city}",
        ],
        "fragments": ["and for {when}", "what about {when}", "and in {city}", "how about {city}"],
    },
    "shopping": {
        "commands": [
            "add {item} to my shopping list", "remove {item} from my shopping list",
            "what's on my shopping list", "order more {item}",
        ],
        "fragments": ["add {item}", "and {item}", "also {item} please", "remove the {item}"],
    },
    "music": {
        "commands": [
            "play {artist}", "play some {genre} music",
            "who is {artist}", "play the latest album by {artist}",
        ],
        "fragments": ["play her latest song", "play something similar", "louder please", "the one by {artist}"],
    },
    "timer": {
        "commands": [
            "set a timer for {n} minutes", "how much time is left on my timer",
            "cancel my {n} minute timer", "set an alarm for {n} am",
        ],
        "fragments": ["make it {n} minutes", "and another for {n} minutes", "add {n} more minutes", "how much is left"],
    },
    "home": {
        "commands": [
            "turn on the {device}", "turn off the {device}",
            "dim the {device} to {n} percent", "is the {device} on",
        ],
        "fragments": ["and the {device} too", "dim it a bit more", "turn it back on", "the {device} as well"],
    },
    "trivia": {
        "commands": [
            "who wrote {book}", "are you unique",
            "tell me a joke", "how tall is mount everest",
        ],
        "fragments": ["are you one of a kind", "tell me more about it", "another one", "who else wrote like that"],
    },
}

BACKGROUND: List[str] = [
    "did you reorder your pills", "i don't know what she just ordered",
    "well you got four more hours", "mom what did you say", "what are you doing",
    "it's just flashing yellow", "we should leave at {n}", "did you call {artist} back",
    "i think it is in the kitchen", "can you pass me the {item}",
    "he said it would rain {when}", "where did you put my keys",
]


class GeneratorMode(str, enum.Enum):
    FOLLOW_UP = "follow-up"
    PRETRAIN = "pretrain"


class ConfidenceModel(BaseModel):
    """Per-class Beta(a, b) distributions of token confidences"""
    model_config = ConfigDict(frozen=True)

    dd: Tuple[float, float] = (8.0, 2.0)
    ndd: Tuple[float, float] = (4.0, 4.0)

    @model_validator(mode="after")
    def _positive(self):
        if min(self.dd + self.ndd) <= 0:
            raise ValueError("Beta parameters must be positive")
        return self


class GeneratorSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    mode: GeneratorMode = GeneratorMode.FOLLOW_UP
    n_per_partition: Dict[Partition, int] = Field(default_factory=lambda: dict(DESK_SCALE))
    dd_ndd_ratio: float = Field(default=5.0, gt=0)
    ambiguity_table: Dict[str, Tuple[float, float]] = Field(default_factory=lambda: dict(AMBIGUITY_TABLE))
    ambiguous_fraction: float = Field(default=0.297, ge=0, le=1)
    # of the non-ambiguous NDD
    unstructured_fraction: float = Field(default=0.4, ge=0, le=1)
    contextual_ndd_fraction: float = Field(default=0.2, ge=0, le=1)
    # of the non-ambiguous DD
    contextual_fraction: float = Field(default=0.3, ge=0, le=1)
    # of the unstructured NDD that splice two commands instead of shuffling one
    splice_fraction: float = Field(default=0.25, ge=0, le=1)
    confidence_model: ConfidenceModel = Field(default_factory=ConfidenceModel)
    seed: int = 0
    id_prefix: str = "utt"

    @model_validator(mode="after")
    def _consistent(self):
        if self.unstructured_fraction + self.contextual_ndd_fraction > 1.0:
            raise ValueError("unstructured_fraction + contextual_ndd_fraction must be <= 1")
        for text, (p_dd, p_ndd) in self.ambiguity_table.items():
            if p_dd < 0 or p_ndd < 0 or p_dd + p_ndd <= 0:
                raise ValueError(f"bad priors for {text!r}")
        if any(n < 0 for n in self.n_per_partition.values()):
            raise ValueError("partition sizes must be non-negative")
        return self

    @classmethod
    def pretrain(cls, **overrides) -> "GeneratorSpec":
        values = dict(
            mode=GeneratorMode.PRETRAIN,
            ambiguous_fraction=0.0,
            contextual_fraction=0.0,
            contextual_ndd_fraction=0.0,
            unstructured_fraction=0.5,
            id_prefix="pre",
        )
        values.update(overrides)
        return cls(**values)

    def dd_prior(self, text: str) -> float:
        p_dd, p_ndd = self.ambiguity_table[text]
        return p_dd / (p_dd + p_ndd)


# === Grammar ===

def _expand(template: str, rng: np.random.Generator) -> Tuple[str, ...]:
    out: List[str] = []
    for word in template.split():
        if word.startswith("{") and word.endswith("}"):
            fillers = SLOTS[word[1:-1]]
            out.extend(fillers[int(rng.integers(len(fillers)))].split())
        else:
            out.append(word)
    return tuple(out)


def _template_words(templates: Sequence[str]) -> List[str]:
    words: List[str] = []
    for template in templates:
        for word in template.split():
            if word.startswith("{") and word.endswith("}"):
                for filler in SLOTS[word[1:-1]]:
                    words.extend(filler.split())
            else:
                words.append(word)
    return words


def grammar_vocabulary() -> Dict[str, str]:
    """Every token the generator can emit, mapped to its cluster name"""
    groups: Dict[str, set] = {}
    for name, domain in DOMAINS.items():
        groups[name] = set(_template_words(domain["commands"] + domain["fragments"]))
    groups["background"] = set(_template_words(BACKGROUND))
    groups["ambiguous"] = {w for text in AMBIGUITY_TABLE for w in text.split()}
    groups["wake"] = {WAKEWORD}
    owner: Dict[str, str] = {}
    for name in sorted(groups):
        for token in groups[name]:
            owner[token] = "function" if token in owner and owner[token] != name else name
    return dict(sorted(owner.items()))


def slot_tokens() -> List[str]:
    return sorted({w for fillers in SLOTS.values() for f in fillers for w in f.split()})


def synthesize_vectors(
    vocabulary: Mapping[str, str],
    dim: int,
    seed: int,
    oov_rate: float = 0.1,
) -> Tuple[List[str], np.ndarray]:
    """
    Domain-clustered word vectors: tokens sharing a cluster sit around a
    common centre. A fraction ``oov_rate`` of the slot fillers is left out so
    the OOV path gets exercised.
    """
    if dim <= 0:
        raise ConfigError(f"Vector dim must be positive, got {dim}")
    if not 0.0 <= oov_rate < 1.0:
        raise ConfigError(f"oov_rate must be in [0, 1), got {oov_rate}")
    rng = make_rng(seed)
    clusters = sorted(set(vocabulary.values()))
    centres = {name: rng.normal(0.0, 0.5, size=dim) for name in clusters}
    fillers = [t for t in slot_tokens() if t in vocabulary]
    n_drop = int(round(oov_rate * len(fillers)))
    dropped = {fillers[i] for i in rng.permutation(len(fillers))[:n_drop]}

    tokens = [t for t in vocabulary if t not in dropped]
    vectors = np.stack([centres[vocabulary[t]] + rng.normal(0.0, 0.25, size=dim) for t in tokens])
    logger.info(f"Synthesized {len(tokens)} vectors of dim {dim} ({len(dropped)} tokens left out of vocabulary)")
    return tokens, vectors


def write_synthetic_vectors(path: Union[str, Path], dim: int, seed: int, oov_rate: float = 0.1):
    tokens, vectors = synthesize_vectors(grammar_vocabulary(), dim, seed, oov_rate)
    save_vectors(tokens, vectors, path)


@dataclass(frozen=True)
class ConfidenceAcousticScorer:
    """Acoustic stand-in: logistic curve over the mean current-turn confidence"""
    slope: float = 10.0
    center: float = 0.65

    def __call__(self, u: TurnPair) -> float:
        return float(expit(self.slope * (float(np.mean(u.cur_confidences)) - self.center)))


# === Generation ===

@dataclass
class _Draft:
    label: Label
    cur: Tuple[str, ...]
    conf: Tuple[float, ...]
    prev: Tuple[str, ...] = ()
    prev_conf: Optional[Tuple[float, ...]] = None


class CorpusGenerator:
    """Draws every population from one seeded generator, partition by partition"""

    def __init__(self, spec: GeneratorSpec):
        self.spec = spec
        self.rng = make_rng(spec.seed)
        self._domains = sorted(DOMAINS)
        self._texts = list(spec.ambiguity_table)

    def _pick(self, options: Sequence):
        return options[int(self.rng.integers(len(options)))]

    def _confidences(self, label: Label, n: int) -> Tuple[float, ...]:
        a, b = self.spec.confidence_model.dd if label is Label.DD else self.spec.confidence_model.ndd
        return tuple(round(float(c), 4) for c in self.rng.beta(a, b, size=n))

    def _domain(self, exclude: Optional[str] = None) -> str:
        return self._pick([d for d in self._domains if d != exclude])

    def command(self, domain: Optional[str] = None) -> Tuple[str, ...]:
        domain = domain or self._domain()
        return _expand(self._pick(DOMAINS[domain]["commands"]), self.rng)

    def fragment(self, domain: str) -> Tuple[str, ...]:
        return _expand(self._pick(DOMAINS[domain]["fragments"]), self.rng)

    def background(self) -> Tuple[str, ...]:
        return _expand(self._pick(BACKGROUND), self.rng)

    def unstructured(self) -> Tuple[str, ...]:
        """A command with broken word order, or two commands spliced together"""
        if self.rng.random() < self.spec.splice_fraction:
            a, b = self.command(), self.command()
            cut_a = int(self.rng.integers(1, len(a))) if len(a) > 1 else 1
            cut_b = int(self.rng.integers(0, len(b)))
            spliced = a[:cut_a] + b[cut_b:]
            if len(spliced) >= 2 and spliced not in (a, b):
                return spliced
        tokens = self.command()
        while len(tokens) < 3:
            tokens = self.command()
        shuffled = tokens
        while shuffled == tokens:
            shuffled = tuple(tokens[i] for i in self.rng.permutation(len(tokens)))
        return shuffled

    def first_turn(self, domain: Optional[str] = None) -> Tuple[str, ...]:
        return (WAKEWORD,) + self.command(domain)

    def ambiguous(self) -> Tuple[Tuple[str, ...], Label]:
        text = self._pick(self._texts)
        label = Label.DD if self.rng.random() < self.spec.dd_prior(text) else Label.NDD
        return tuple(text.split()), label

    def sample_ambiguous(self, n: int, text: Optional[str] = None) -> List[Tuple[str, Label]]:
        """n (text, label) draws; with ``text`` set, only that row is sampled"""
        out = []
        for _ in range(n):
            if text is None:
                tokens, label = self.ambiguous()
                out.append((" ".join(tokens), label))
            else:
                label = Label.DD if self.rng.random() < self.spec.dd_prior(text) else Label.NDD
                out.append((text, label))
        return out

    # --- populations ---

    def _with_prev(self, draft: _Draft, domain: Optional[str] = None) -> _Draft:
        if self.spec.mode is GeneratorMode.FOLLOW_UP:
            draft.prev = self.first_turn(domain)
            draft.prev_conf = self._confidences(Label.DD, len(draft.prev))
        return draft

    def _wake(self, tokens: Tuple[str, ...]) -> Tuple[str, ...]:
        return (WAKEWORD,) + tokens if self.spec.mode is GeneratorMode.PRETRAIN else tokens

    def _text_weights(self, label: Label) -> np.ndarray:
        """p(text | label) by Bayes over a uniform text prior"""
        p_dd = np.array([self.spec.dd_prior(t) for t in self._texts])
        w = p_dd if label is Label.DD else 1.0 - p_dd
        total = w.sum()
        if total <= 0.0:
            return np.full(len(self._texts), 1.0 / len(self._texts))
        return w / total

    def ambiguous_ndd_share(self) -> float:
        """Expected NDD share of ambiguous items when texts are drawn uniformly"""
        return float(np.mean([1.0 - self.spec.dd_prior(t) for t in self._texts]))

    def _ambiguous_draft(self, label: Label) -> _Draft:
        text = self._texts[int(self.rng.choice(len(self._texts), p=self._text_weights(label)))]
        tokens = tuple(text.split())
        return self._with_prev(_Draft(label, tokens, self._confidences(label, len(tokens))))

    def ambiguous_quota(self, n_amb: int, n_dd: int, n_ndd: int) -> Tuple[int, int]:
        """
        (DD, NDD) split of ``n_amb`` ambiguous items: the prior-implied NDD
        share, clamped so that neither class quota is exceeded.
        """
        if n_amb > n_dd + n_ndd:
            raise ConfigError(f"{n_amb} ambiguous items do not fit in {n_dd + n_ndd}")
        amb_ndd = int(round(n_amb * self.ambiguous_ndd_share()))
        amb_ndd = min(max(amb_ndd, n_amb - n_dd), n_ndd)
        return n_amb - amb_ndd, amb_ndd

    def _structured_dd(self) -> _Draft:
        cur = self._wake(self.command())
        return self._with_prev(_Draft(Label.DD, cur, self._confidences(Label.DD, len(cur))))

    def _contextual(self, label: Label) -> _Draft:
        domain = self._domain()
        cur = self.fragment(domain)
        prev_domain = domain if label is Label.DD else self._domain(exclude=domain)
        draft = _Draft(label, cur, self._confidences(Label.DD, len(cur)))
        return self._with_prev(draft, prev_domain)

    def _unstructured_ndd(self) -> _Draft:
        cur = self._wake(self.unstructured())
        return self._with_prev(_Draft(Label.NDD, cur, self._confidences(Label.DD, len(cur))))

    def _background_ndd(self) -> _Draft:
        cur = self._wake(self.background())
        return self._with_prev(_Draft(Label.NDD, cur, self._confidences(Label.NDD, len(cur))))

    def _partition_drafts(self, partition: Partition, n: int) -> List[_Draft]:
        spec = self.spec
        ratio = spec.dd_ndd_ratio
        n_dd = int(round(n * ratio / (ratio + 1.0)))
        n_ndd = n - n_dd
        if n > 0 and (n_dd == 0 or n_ndd == 0):
            raise ConfigError(f"{partition.value}: {n} items at ratio {ratio}:1 leaves a class empty")

        amb_dd, amb_ndd = self.ambiguous_quota(int(round(spec.ambiguous_fraction * n)), n_dd, n_ndd)
        drafts = [self._ambiguous_draft(Label.DD) for _ in range(amb_dd)]
        drafts += [self._ambiguous_draft(Label.NDD) for _ in range(amb_ndd)]
        rest_dd, rest_ndd = n_dd - amb_dd, n_ndd - amb_ndd

        follow_up = spec.mode is GeneratorMode.FOLLOW_UP
        n_ctx = int(round(spec.contextual_fraction * rest_dd)) if follow_up else 0
        drafts += [self._contextual(Label.DD) for _ in range(n_ctx)]
        drafts += [self._structured_dd() for _ in range(rest_dd - n_ctx)]

        n_unstructured = int(round(spec.unstructured_fraction * rest_ndd))
        n_ctx_ndd = int(round(spec.contextual_ndd_fraction * rest_ndd)) if follow_up else 0
        n_ctx_ndd = min(n_ctx_ndd, rest_ndd - n_unstructured)
        drafts += [self._unstructured_ndd() for _ in range(n_unstructured)]
        drafts += [self._contextual(Label.NDD) for _ in range(n_ctx_ndd)]
        drafts += [self._background_ndd() for _ in range(rest_ndd - n_unstructured - n_ctx_ndd)]

        order = self.rng.permutation(len(drafts))
        logger.debug(
            f"{partition.value}: {n_dd} DD ({amb_dd} ambiguous, {n_ctx} contextual), "
            f"{n_ndd} NDD ({n_unstructured} unstructured, {n_ctx_ndd} contextual)"
        )
        return [drafts[i] for i in order]

    def generate(self) -> Corpus:
        utterances: List[Utterance] = []
        partition_map: Dict[str, Partition] = {}
        for partition in Partition:
            n = self.spec.n_per_partition.get(partition, 0)
            for i, draft in enumerate(self._partition_drafts(partition, n)):
                uid = f"{self.spec.id_prefix}-{partition.value}-{i:06d}"
                utterances.append(Utterance(
                    id=uid,
                    label=None if partition is Partition.UNLABELED else draft.label,
                    prev_tokens=draft.prev,
                    cur_tokens=draft.cur,
                    cur_confidences=draft.conf,
                    prev_confidences=draft.prev_conf,
                ))
                partition_map[uid] = partition
        logger.info(f"Generated {len(utterances)} {self.spec.mode.value} utterances (seed {self.spec.seed})")
        return Corpus(utterances=utterances, partition_map=partition_map)


def generate(spec: GeneratorSpec) -> Corpus:
    return CorpusGenerator(spec).generate()
