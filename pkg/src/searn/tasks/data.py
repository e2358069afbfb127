"""Sentence records shared by the task plugins and the CoNLL reader."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Token:
    """Surface text plus optional named attributes such as a POS tag."""

    text: str
    attrs: tuple = ()

    def attr(self, name, default=None):
        for key, value in self.attrs:
            if key == name:
                return value
        return default


@dataclass(frozen=True)
class Sentence:
    tokens: tuple

    def __post_init__(self):
        if len(self.tokens) < 1:
            raise ValueError("a sentence needs at least one token")

    def __len__(self):
        return len(self.tokens)

    @classmethod
    def from_words(cls, words, **columns) -> "Sentence":
        """Build from a word list; keyword lists become per-token attributes."""
        words = list(words)
        for name, values in columns.items():
            if len(values) != len(words):
                raise ValueError(f"column {name!r} has {len(values)} entries for {len(words)} words")
        toks = []
        for i, w in enumerate(words):
            attrs = tuple((name, values[i]) for name, values in columns.items())
            toks.append(Token(str(w), attrs))
        return cls(tuple(toks))

    @property
    def words(self) -> tuple:
        return tuple(t.text for t in self.tokens)


@dataclass(frozen=True)
class LabeledSentence:
    sentence: Sentence
    labels: tuple

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        if len(self.labels) != len(self.sentence):
            raise ValueError(
                f"{len(self.labels)} labels for a sentence of {len(self.sentence)} tokens"
            )

    def __len__(self):
        return len(self.sentence)
