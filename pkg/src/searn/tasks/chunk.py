"""Chunk-at-a-time segmentation under chunk F1.

Each step emits a whole segment ``(length m, type l)`` starting at the
first unlabeled token; a final "complete" action ends the search.  Type
0 is the out-of-chunk segment, which always has length 1.  Actions that
would run past the sentence end are masked, so every trajectory covers
exactly N tokens before completing.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from ..core import TaskDefinition
from ..exceptions import MissingReference
from .data import LabeledSentence, Sentence
from .features import FeatureConfig, history_features, merge, observation_table, window_table
from .losses import OUT, ChunkSpan, bio_decode, bio_encode, f1_from_counts
from .sequence import SequenceInstance


@dataclass(frozen=True)
class ChunkActionAlphabet:
    """Encoding of ``(length, type)`` pairs as ids ``(m - 1) * L + l`` plus "complete"."""

    max_phrase: int
    n_types: int

    @property
    def size(self) -> int:
        return self.max_phrase * self.n_types + 1

    @property
    def complete(self) -> int:
        return self.max_phrase * self.n_types

    def encode(self, length: int, type_id: int) -> int:
        if not (1 <= length <= self.max_phrase and 0 <= type_id < self.n_types):
            raise ValueError(f"({length}, {type_id}) is outside the alphabet")
        return (length - 1) * self.n_types + type_id

    def decode(self, action: int):
        """``(length, type_id)``, or ``None`` for the complete action."""
        if action == self.complete:
            return None
        if not 0 <= action < self.complete:
            raise ValueError(f"action {action} is outside the alphabet")
        return action // self.n_types + 1, action % self.n_types


class ChunkTask(TaskDefinition):
    kind = "chunk"
    loss_kind = "f1"

    def __init__(self, types, max_phrase: int = 5, features: FeatureConfig | None = None):
        types = tuple(types)
        if OUT in types:
            raise ValueError("'O' is implicit; pass chunk types only")
        if max_phrase < 1:
            raise ValueError("max_phrase must be positive")
        self.types = types
        self.type_names = (OUT,) + types
        self.type_ids = {t: i for i, t in enumerate(self.type_names)}
        self.max_phrase = max_phrase
        self.alphabet = ChunkActionAlphabet(max_phrase, len(self.type_names))
        self.n_actions = self.alphabet.size
        self.feature_config = features or FeatureConfig()
        self._legal_cache: dict = {}

    def describe(self) -> dict:
        return {
            "kind": self.kind,
            "loss": self.loss_kind,
            "types": list(self.types),
            "max_phrase": self.max_phrase,
            "features": self.feature_config.describe(),
        }

    def with_features(self, **changes) -> "ChunkTask":
        return type(self)(self.types, self.max_phrase, replace(self.feature_config, **changes))

    def make_instance(self, item, key: int = 0) -> SequenceInstance:
        if isinstance(item, LabeledSentence):
            spans = bio_decode(item.labels)
            for sp in spans:
                if sp.label not in self.type_ids:
                    raise ValueError(f"chunk type {sp.label!r} is not in the task alphabet")
            return SequenceInstance(item.sentence, tuple(item.labels), frozenset(spans), key)
        if isinstance(item, Sentence):
            return SequenceInstance(item, None, None, key)
        raise TypeError(f"expected Sentence or LabeledSentence, got {type(item).__name__}")

    def horizon(self, instance) -> int:
        return len(instance.sentence) + 1

    def has_reference(self, instance) -> bool:
        return instance.ref_spans is not None

    # -- search space --------------------------------------------------------

    def position(self, state) -> int:
        pos = 0
        for a in state.prefix:
            seg = self.alphabet.decode(a)
            if seg is not None:
                pos += seg[0]
        return pos

    def is_terminal(self, state) -> bool:
        return bool(state.prefix) and state.prefix[-1] == self.alphabet.complete

    def _legal_for_remaining(self, remaining: int):
        cached = self._legal_cache.get(remaining)
        if cached is None:
            if remaining == 0:
                cached = (self.alphabet.complete,)
            else:
                acts = [self.alphabet.encode(1, 0)]
                for m in range(1, min(self.max_phrase, remaining) + 1):
                    acts += [self.alphabet.encode(m, l) for l in range(1, len(self.type_names))]
                cached = tuple(sorted(acts))
            self._legal_cache[remaining] = cached
        return cached

    def legal_actions(self, state):
        if self.is_terminal(state):
            return ()
        return self._legal_for_remaining(len(state.instance.sentence) - self.position(state))

    def spans(self, prefix):
        """Typed spans emitted by an action prefix (out segments excluded)."""
        out, pos = [], 0
        for a in prefix:
            seg = self.alphabet.decode(a)
            if seg is None:
                continue
            m, l = seg
            if l != 0:
                out.append(ChunkSpan(pos, m, self.type_names[l]))
            pos += m
        return out

    def features(self, state) -> dict:
        cfg = self.feature_config
        sentence = state.instance.sentence
        pos = self.position(state)
        if pos >= len(sentence):
            return {}
        obs = merge(observation_table(sentence, cfg)[pos], window_table(sentence, cfg, self.max_phrase)[pos])
        if not cfg.structural:
            return obs
        hist = []
        for a in state.prefix[-cfg.history:]:
            m, l = self.alphabet.decode(a)
            hist.append(f"{self.type_names[l]}/{m}")
        return merge(obs, history_features(hist, cfg, prefix="c"))

    def output(self, state):
        return tuple(bio_encode(self.spans(state.prefix), len(state.instance.sentence)))

    # -- reference-aware quantities -----------------------------------------

    def _gold(self, instance):
        if instance.ref_spans is None:
            raise MissingReference("instance has no reference chunks")
        return instance.ref_spans

    def initial_action(self, state) -> int:
        gold = self._gold(state.instance)
        n = len(state.instance.sentence)
        pos = self.position(state)
        if pos >= n:
            return self.alphabet.complete
        for sp in gold:
            if sp.start == pos and sp.length <= self.max_phrase:
                return self.alphabet.encode(sp.length, self.type_ids[sp.label])
        # out of chunk, inside an already-lost chunk, or a chunk too long to emit
        return self.alphabet.encode(1, 0)

    def loss(self, state) -> float:
        gold = self._gold(state.instance)
        pred = set(self.spans(state.prefix))
        return 1.0 - f1_from_counts(len(gold & pred), len(gold), len(pred))

    def max_loss(self, instance) -> float:
        return 1.0

    def completion_cost(self, state, action) -> float:
        gold = self._gold(state.instance)
        prefix = state.prefix + (action,)
        pred = self.spans(prefix)
        correct = sum(1 for sp in pred if sp in gold)
        pos = sum(self.alphabet.decode(a)[0] for a in prefix if a != self.alphabet.complete)
        future = sum(1 for sp in gold if sp.start >= pos and sp.length <= self.max_phrase)
        return 1.0 - f1_from_counts(correct + future, len(gold), len(pred) + future)
