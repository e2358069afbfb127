from .baselines import baseline_independent, baseline_memm, independent_task
from .chunk import ChunkActionAlphabet, ChunkTask
from .data import LabeledSentence, Sentence, Token
from .features import FeatureConfig, load_lexicon
from .losses import (
    OUT,
    ChunkSpan,
    bio_decode,
    bio_encode,
    bio_label_set,
    bio_repair,
    chunk_types,
    f1_and_cost,
    f1_from_counts,
    hamming_loss,
)
from .lowerbound import MarkovLowerBoundSpec, kaariainen_formula, kaariainen_simulation
from .sequence import SequenceInstance, SequenceLabelingTask, make_task_instances
from .synth import KINDS, chunked, noisy_history, separable_sequence, synth_generate

__all__ = [
    "OUT",
    "KINDS",
    "ChunkActionAlphabet",
    "ChunkSpan",
    "ChunkTask",
    "FeatureConfig",
    "LabeledSentence",
    "MarkovLowerBoundSpec",
    "Sentence",
    "SequenceInstance",
    "SequenceLabelingTask",
    "Token",
    "baseline_independent",
    "baseline_memm",
    "bio_decode",
    "bio_encode",
    "bio_label_set",
    "bio_repair",
    "chunk_types",
    "chunked",
    "f1_and_cost",
    "f1_from_counts",
    "hamming_loss",
    "independent_task",
    "kaariainen_formula",
    "kaariainen_simulation",
    "load_lexicon",
    "make_task_instances",
    "noisy_history",
    "separable_sequence",
    "synth_generate",
]
