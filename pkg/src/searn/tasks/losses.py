"""Hamming loss, chunk F1, and BIO <-> span conversion."""

from __future__ import annotations

from dataclasses import dataclass

from ..exceptions import LengthMismatch

OUT = "O"


@dataclass(frozen=True, order=True)
class ChunkSpan:
    start: int
    length: int
    label: str

    @property
    def end(self) -> int:
        """One past the last token."""
        return self.start + self.length


def hamming_loss(y, y_hat) -> int:
    """Number of positions where the two label sequences differ."""
    if len(y) != len(y_hat):
        raise LengthMismatch(f"lengths differ: {len(y)} vs {len(y_hat)}")
    return sum(1 for a, b in zip(y, y_hat) if a != b)


def f1_from_counts(correct: int, n_gold: int, n_pred: int) -> float:
    if n_gold + n_pred == 0:
        return 1.0
    return 2.0 * correct / (n_gold + n_pred)


def f1_and_cost(y_chunks, y_hat_chunks):
    """Chunk F1 ``2|y & y_hat| / (|y| + |y_hat|)`` and its cost ``1 - F1``.

    Two empty span sets score F1 = 1.
    """
    gold, pred = set(y_chunks), set(y_hat_chunks)
    f1 = f1_from_counts(len(gold & pred), len(gold), len(pred))
    return f1, 1.0 - f1


def split_label(label):
    """``'B-NP' -> ('B', 'NP')``; ``'O' -> ('O', None)``."""
    if label == OUT or not label:
        return OUT, None
    if len(label) > 2 and label[1] == "-" and label[0] in "BI":
        return label[0], label[2:]
    raise ValueError(f"not a BIO label: {label!r}")


def bio_decode(labels):
    """Spans of a BIO sequence.

    An ``I-X`` that does not continue a chunk of type ``X`` opens a new
    chunk, as if it were ``B-X``.
    """
    spans = []
    start, kind = None, None
    for i, lab in enumerate(labels):
        tag, typ = split_label(lab)
        if tag == "I" and kind == typ:
            continue
        if kind is not None:
            spans.append(ChunkSpan(start, i - start, kind))
            start, kind = None, None
        if tag in ("B", "I"):
            start, kind = i, typ
    if kind is not None:
        spans.append(ChunkSpan(start, len(labels) - start, kind))
    return spans


def bio_encode(spans, length: int):
    """Inverse of :func:`bio_decode` for non-overlapping spans."""
    labels = [OUT] * length
    for sp in sorted(spans):
        if sp.length < 1 or sp.start < 0 or sp.end > length:
            raise ValueError(f"span {sp} does not fit a sentence of length {length}")
        if any(labels[i] != OUT for i in range(sp.start, sp.end)):
            raise ValueError(f"span {sp} overlaps another span")
        labels[sp.start] = "B-" + sp.label
        for i in range(sp.start + 1, sp.end):
            labels[i] = "I-" + sp.label
    return labels


def bio_repair(labels):
    """Rewrite dangling ``I-X`` tags as ``B-X`` so decode and tags agree."""
    return bio_encode(bio_decode(labels), len(labels))


def bio_label_set(types):
    """Label alphabet ``O, B-T1, I-T1, B-T2, ...`` for the given chunk types."""
    out = [OUT]
    for t in types:
        out += ["B-" + t, "I-" + t]
    return out


def chunk_types(label_sequences):
    """Sorted chunk types appearing in BIO label sequences."""
    types = set()
    for labels in label_sequences:
        for lab in labels:
            tag, typ = split_label(lab)
            if typ is not None:
                types.add(typ)
    return sorted(types)
