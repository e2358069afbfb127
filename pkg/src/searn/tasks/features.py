"""Hashed indicator features for sequence states.

Feature names are hashed into ``2 ** hash_bits`` slots.  The lower half
holds observation features (functions of the input only); the upper half
holds structural features (functions of earlier predictions).  The
partition lets callers verify a feature vector ignores the prefix.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from sklearn.utils import murmurhash3_32

BOS = "<s>"
EOS = "</s>"


@dataclass(frozen=True)
class FeatureConfig:
    hash_bits: int = 20
    window: int = 2
    affix: int = 3
    history: int = 3
    use_pos: bool = True
    structural: bool = True
    # ((name, frozenset_of_lowercased_entries), ...)
    lexicons: tuple = field(default=(), compare=True)

    def __post_init__(self):
        if not 2 <= self.hash_bits <= 30:
            raise ValueError("hash_bits must lie in [2, 30]")

    @property
    def half(self) -> int:
        return 1 << (self.hash_bits - 1)

    def describe(self) -> dict:
        return {
            "hash_bits": self.hash_bits,
            "window": self.window,
            "affix": self.affix,
            "history": self.history,
            "use_pos": self.use_pos,
            "structural": self.structural,
            "lexicons": {name: sorted(entries) for name, entries in self.lexicons},
        }

    @classmethod
    def from_description(cls, d: dict) -> "FeatureConfig":
        lex = tuple((name, frozenset(entries)) for name, entries in sorted(d.get("lexicons", {}).items()))
        return cls(
            hash_bits=d["hash_bits"],
            window=d["window"],
            affix=d["affix"],
            history=d["history"],
            use_pos=d["use_pos"],
            structural=d["structural"],
            lexicons=lex,
        )


def load_lexicon(path, name=None):
    """Read a one-entry-per-line UTF-8 lexicon into a ``(name, frozenset)`` pair."""
    from pathlib import Path

    p = Path(path)
    with open(p, encoding="utf-8") as fh:
        entries = frozenset(line.strip().lower() for line in fh if line.strip())
    return (name or p.stem, entries)


def hash_name(name: str, config: FeatureConfig, structural: bool = False) -> int:
    h = murmurhash3_32(name, seed=0, positive=True) % config.half
    return h + config.half if structural else h


def word_shape(word: str) -> str:
    out = []
    for ch in word:
        c = "X" if ch.isupper() else "x" if ch.islower() else "d" if ch.isdigit() else ch
        if not out or out[-1] != c:
            out.append(c)
    return "".join(out)


def _token_names(sentence, i, config):
    n = len(sentence)
    names = []
    for k in range(-config.window, config.window + 1):
        j = i + k
        if j < 0:
            names.append(f"w[{k}]={BOS}")
            continue
        if j >= n:
            names.append(f"w[{k}]={EOS}")
            continue
        tok = sentence.tokens[j]
        names.append(f"w[{k}]={tok.text}")
        names.append(f"lw[{k}]={tok.text.lower()}")
        if config.use_pos:
            pos = tok.attr("pos")
            if pos is not None:
                names.append(f"pos[{k}]={pos}")
                names.append(f"pos1[{k}]={pos[:1]}")
    tok = sentence.tokens[i]
    word = tok.text
    names.append("shape=" + word_shape(word))
    names.append("cap=" + ("1" if word[:1].isupper() else "0"))
    for a in range(1, config.affix + 1):
        if len(word) >= a:
            names.append(f"pre{a}={word[:a]}")
            names.append(f"suf{a}={word[-a:]}")
    low = word.lower()
    for name, entries in config.lexicons:
        if low in entries:
            names.append("lex=" + name)
    return names


@lru_cache(maxsize=8192)
def observation_table(sentence, config: FeatureConfig) -> tuple:
    """Per-position observation feature dicts for a whole sentence (cached)."""
    table = []
    for i in range(len(sentence)):
        feats = {hash_name("bias", config): 1.0}
        for name in _token_names(sentence, i, config):
            idx = hash_name(name, config)
            feats[idx] = feats.get(idx, 0.0) + 1.0
        table.append(feats)
    return tuple(table)


@lru_cache(maxsize=8192)
def window_table(sentence, config: FeatureConfig, span: int) -> tuple:
    """Features of the tokens at offsets ``0..span-1`` from each position."""
    n = len(sentence)
    table = []
    for i in range(n):
        feats = {}
        for k in range(span):
            j = i + k
            word = sentence.tokens[j].text if j < n else EOS
            names = [f"sub{k}={word}", f"lsub{k}={word.lower()}"]
            if config.use_pos and j < n:
                pos = sentence.tokens[j].attr("pos")
                if pos is not None:
                    names.append(f"subpos{k}={pos}")
            for name in names:
                idx = hash_name(name, config)
                feats[idx] = feats.get(idx, 0.0) + 1.0
        table.append(feats)
    return tuple(table)


def history_features(history, config: FeatureConfig, prefix="y") -> dict:
    """Unigram/bigram/trigram indicators over the most recent predictions."""
    if not config.structural:
        return {}
    feats = {}
    padded = [BOS] * config.history + list(history[-config.history:])
    for order in range(1, config.history + 1):
        name = f"{prefix}{order}=" + "|".join(padded[-order:])
        idx = hash_name(name, config, structural=True)
        feats[idx] = feats.get(idx, 0.0) + 1.0
    return feats


def merge(*dicts) -> dict:
    out = dict(dicts[0])
    for d in dicts[1:]:
        for k, v in d.items():
            out[k] = out.get(k, 0.0) + v
    return out
