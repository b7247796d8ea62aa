"""boundkit: Unigram-LM subword tokenization with configurable word-boundary
marking, plus the evaluation battery around it (vocabulary statistics, corpus
compression and entropy measures, bigram perplexity, morpheme recovery)."""

from .errors import BoundkitError, DataError, InvariantError, ParseError, TrainingError
from .pretokenize import PretokMode, pretokenize
from .vocab import (DEFAULT_META, MarkingScheme, Piece, PositionClass,
                    TrainerConfig, UNK_SURFACE, Vocabulary, load_vocab,
                    save_vocab, strip_mark)
from .segmenter import (Lattice, Segmenter, build_lattice, decode, encode_line,
                        mark_word, viterbi, viterbi_full)
from .trainer import (SeedCandidate, TrainResult, em_step, prune,
                      seed_vocabulary, train, train_detailed)
from .kernels import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"

__all__ = [
    "BoundkitError", "DataError", "InvariantError", "ParseError",
    "TrainingError", "PretokMode", "pretokenize", "DEFAULT_META",
    "MarkingScheme", "Piece", "PositionClass", "TrainerConfig", "UNK_SURFACE",
    "Vocabulary", "load_vocab", "save_vocab", "strip_mark", "Lattice",
    "Segmenter", "build_lattice", "decode", "encode_line", "mark_word",
    "viterbi", "viterbi_full", "SeedCandidate", "TrainResult", "em_step",
    "prune", "seed_vocabulary", "train", "train_detailed", "KERNEL_BACKEND",
    "__version__",
]
