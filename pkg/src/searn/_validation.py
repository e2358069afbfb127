"""Input checks shared by the estimator wrappers."""

from __future__ import annotations

import numpy as np

from .tasks.data import LabeledSentence, Sentence


def as_sentence(x) -> Sentence:
    if isinstance(x, Sentence):
        return x
    if isinstance(x, str):
        raise TypeError("a sentence must be a sequence of tokens, not a single string")
    words = list(x)
    if not words:
        raise ValueError("empty sentence")
    if not all(isinstance(w, str) for w in words):
        raise TypeError("tokens must be strings")
    return Sentence.from_words(words)


def check_sequences(X):
    """List of :class:`Sentence` from sentences or token lists."""
    if X is None:
        raise ValueError("X is None")
    out = [as_sentence(x) for x in X]
    if not out:
        raise ValueError("X holds no sentences")
    return out


def check_labeled(X, y):
    sents = check_sequences(X)
    if y is None:
        raise ValueError("y is required")
    y = [tuple(str(lab) for lab in labels) for labels in y]
    if len(y) != len(sents):
        raise ValueError(f"X has {len(sents)} sentences but y has {len(y)} label sequences")
    return [LabeledSentence(s, labels) for s, labels in zip(sents, y)]


def as_sparse_rows(X):
    """Feature rows as ``{index: value}`` dicts from a 2-D array or a dict list."""
    if isinstance(X, (list, tuple)) and X and isinstance(X[0], dict):
        rows = [{int(k): float(v) for k, v in row.items() if v != 0} for row in X]
        for row in rows:
            if not all(np.isfinite(v) for v in row.values()):
                raise ValueError("feature values must be finite")
        return rows
    arr = np.asarray(X, dtype=float)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D feature array, got shape {arr.shape}")
    if arr.shape[0] == 0:
        raise ValueError("no samples")
    if not np.all(np.isfinite(arr)):
        raise ValueError("feature values must be finite")
    return [{int(j): float(row[j]) for j in np.flatnonzero(row)} for row in arr]


def check_costs(C, n_samples: int):
    C = np.asarray(C, dtype=float)
    if C.ndim != 2 or C.shape[0] != n_samples:
        raise ValueError(f"costs must have shape ({n_samples}, k), got {C.shape}")
    if C.shape[1] < 1:
        raise ValueError("costs need at least one action")
    if not np.all(np.isfinite(C)) or np.any(C < 0):
        raise ValueError("costs must be finite and non-negative")
    return C
