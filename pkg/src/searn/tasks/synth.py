"""Seeded synthetic datasets for tests and demos.

``separable_sequence``
    Every token's word is drawn from a vocabulary owned by its label, so
    the label is a deterministic (linear) function of the word.
``noisy_history``
    Labels follow a sticky Markov chain.  Each token shows a hint that
    equals the true label only with probability ``hint_accuracy``.  With
    the true previous label in hand, copying it is the best rule, so a
    model trained on true histories learns to copy and then propagates
    its own mistakes at test time.
``chunked``
    Random segmentations into typed chunks and out tokens; chunk-initial
    and chunk-internal words come from type-specific vocabularies.
"""

from __future__ import annotations

import numpy as np

from .data import LabeledSentence, Sentence
from .losses import ChunkSpan, bio_encode

KINDS = ("separable_sequence", "noisy_history", "chunked")


def label_names(n_labels: int):
    return [f"L{i}" for i in range(n_labels)]


def separable_sequence(n, length=5, n_labels=3, vocab_per_label=4, rng=None):
    rng = np.random.default_rng(rng)
    names = label_names(n_labels)
    data = []
    for _ in range(n):
        labs = rng.integers(n_labels, size=length)
        words = [f"w{lab}_{rng.integers(vocab_per_label)}" for lab in labs]
        data.append(LabeledSentence(Sentence.from_words(words), tuple(names[l] for l in labs)))
    return data


def noisy_history(n, length=10, n_labels=2, stay=0.9, hint_accuracy=0.8, rng=None):
    rng = np.random.default_rng(rng)
    names = label_names(n_labels)
    data = []
    for _ in range(n):
        labs = [int(rng.integers(n_labels))]
        for _ in range(length - 1):
            if rng.random() < stay:
                labs.append(labs[-1])
            else:
                labs.append(int((labs[-1] + 1 + rng.integers(n_labels - 1)) % n_labels))
        words = []
        for lab in labs:
            hint = lab
            if rng.random() >= hint_accuracy:
                hint = int((lab + 1 + rng.integers(n_labels - 1)) % n_labels)
            words.append(f"h{hint}")
        data.append(LabeledSentence(Sentence.from_words(words), tuple(names[l] for l in labs)))
    return data


def chunked(n, length=8, types=("NP", "VP"), max_phrase=3, p_out=0.3, vocab=3, rng=None):
    rng = np.random.default_rng(rng)
    data = []
    for _ in range(n):
        spans, words, pos = [], [], 0
        while pos < length:
            if rng.random() < p_out:
                words.append(f"o_{rng.integers(vocab)}")
                pos += 1
                continue
            typ = types[int(rng.integers(len(types)))]
            m = int(min(rng.integers(1, max_phrase + 1), length - pos))
            spans.append(ChunkSpan(pos, m, typ))
            words.append(f"b{typ}_{rng.integers(vocab)}")
            words += [f"i{typ}_{rng.integers(vocab)}" for _ in range(m - 1)]
            pos += m
        labels = tuple(bio_encode(spans, length))
        data.append(LabeledSentence(Sentence.from_words(words), labels))
    return data


def synth_generate(kind, params=None, rng=None):
    """Dispatch on ``kind``; ``params`` are keyword arguments of the generator."""
    params = dict(params or {})
    gens = {
        "separable_sequence": separable_sequence,
        "noisy_history": noisy_history,
        "chunked": chunked,
    }
    if kind not in gens:
        raise ValueError(f"unknown generator {kind!r}; expected one of {KINDS}")
    return gens[kind](rng=rng, **params)
