import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from searn.tasks import ChunkTask, LabeledSentence, Sentence, SequenceLabelingTask, bio_label_set  # noqa: E402
from searn.tasks.features import FeatureConfig  # noqa: E402

SMALL = FeatureConfig(hash_bits=16)


def random_labeled(rng, T, labels, vocab=4):
    words = [f"t{rng.integers(vocab)}" for _ in range(T)]
    labs = [labels[rng.integers(len(labels))] for _ in range(T)]
    return LabeledSentence(Sentence.from_words(words), labs)


def tiny_hamming(rng, T=None, n_labels=None, n_instances=3):
    """Random Hamming task with ``T <= 4`` and at most 3 labels."""
    T = T or int(rng.integers(1, 5))
    n_labels = n_labels or int(rng.integers(2, 4))
    labels = [f"L{k}" for k in range(n_labels)]
    task = SequenceLabelingTask(labels, features=SMALL)
    items = [random_labeled(rng, T, labels) for _ in range(n_instances)]
    return task, [task.make_instance(it, key=k) for k, it in enumerate(items)]


def random_bio(rng, T, types):
    labs = []
    for _ in range(T):
        r = rng.random()
        if r < 0.3:
            labs.append("O")
        else:
            typ = types[rng.integers(len(types))]
            labs.append(("B-" if rng.random() < 0.5 else "I-") + typ)
    return labs


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def small_features():
    return SMALL


def word_f1_task(types=("A", "B")):
    return SequenceLabelingTask(bio_label_set(types), "f1", SMALL)


def chunk_task(types=("A", "B"), max_phrase=3):
    return ChunkTask(types, max_phrase, SMALL)
