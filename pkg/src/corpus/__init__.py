from .models import Corpus, Label, Partition, TurnPair, UnlabeledUtterance, Utterance
from .io import load_corpus, save_corpus, read_utterances, write_utterances, partitions_path
from .partition import partition
from .generator import (
    AMBIGUITY_TABLE, WAKEWORD, ConfidenceAcousticScorer, CorpusGenerator, GeneratorMode,
    GeneratorSpec, generate, grammar_vocabulary, synthesize_vectors, write_synthetic_vectors,
)

__all__ = [
    "Corpus", "Label", "Partition", "TurnPair", "UnlabeledUtterance", "Utterance",
    "load_corpus", "save_corpus", "read_utterances", "write_utterances", "partitions_path",
    "partition",
    "AMBIGUITY_TABLE", "WAKEWORD", "ConfidenceAcousticScorer", "CorpusGenerator", "GeneratorMode",
    "GeneratorSpec", "generate", "grammar_vocabulary", "synthesize_vectors", "write_synthetic_vectors",
]
