"""Word-at-a-time sequence labeling: one label decision per token."""

from __future__ import annotations

from dataclasses import dataclass, replace

from ..core import TaskDefinition
from ..exceptions import MissingReference
from .data import LabeledSentence, Sentence
from .features import FeatureConfig, history_features, merge, observation_table
from .losses import OUT, bio_decode, bio_repair, f1_from_counts, split_label

LOSSES = ("hamming", "f1")


@dataclass(frozen=True, eq=False)
class SequenceInstance:
    """A sentence plus (optionally) its reference label ids.

    Compared by identity: instances are handles, and identity hashing
    keeps memo tables cheap.
    """

    sentence: Sentence
    reference: tuple | None = None
    ref_spans: frozenset | None = None
    key: int = 0

    def __len__(self):
        return len(self.sentence)


class SequenceLabelingTask(TaskDefinition):
    """Left-to-right labeling under Hamming loss or chunk F1 over BIO tags.

    Under F1 the loss is ``1 - F1`` of the decoded chunks and ``labels``
    must be a BIO alphabet (see :func:`~searn.tasks.losses.bio_label_set`).
    """

    kind = "sequence"

    def __init__(self, labels, loss="hamming", features: FeatureConfig | None = None):
        if loss not in LOSSES:
            raise ValueError(f"loss must be one of {LOSSES}, got {loss!r}")
        self.labels = tuple(labels)
        if len(self.labels) < 1:
            raise ValueError("need at least one label")
        self.label_ids = {lab: i for i, lab in enumerate(self.labels)}
        if len(self.label_ids) != len(self.labels):
            raise ValueError("duplicate labels")
        self.loss_kind = loss
        self.feature_config = features or FeatureConfig()
        self.n_actions = len(self.labels)
        self._all_actions = tuple(range(self.n_actions))
        if loss == "f1":
            self._split = [split_label(lab) for lab in self.labels]
            if OUT not in self.label_ids:
                raise ValueError("an F1 task needs the 'O' label")
            self._out = self.label_ids[OUT]

    def describe(self) -> dict:
        return {
            "kind": self.kind,
            "loss": self.loss_kind,
            "labels": list(self.labels),
            "features": self.feature_config.describe(),
        }

    def with_features(self, **changes) -> "SequenceLabelingTask":
        return type(self)(self.labels, self.loss_kind, replace(self.feature_config, **changes))

    # -- instances -----------------------------------------------------------

    def make_instance(self, item, key: int = 0) -> SequenceInstance:
        """Wrap a :class:`Sentence` or :class:`LabeledSentence`."""
        if isinstance(item, LabeledSentence):
            labels = list(item.labels)
            if self.loss_kind == "f1":
                labels = bio_repair(labels)
            try:
                ref = tuple(self.label_ids[lab] for lab in labels)
            except KeyError as exc:
                raise ValueError(f"label {exc.args[0]!r} is not in the task alphabet") from None
            spans = frozenset(bio_decode(labels)) if self.loss_kind == "f1" else None
            return SequenceInstance(item.sentence, ref, spans, key)
        if isinstance(item, Sentence):
            return SequenceInstance(item, None, None, key)
        raise TypeError(f"expected Sentence or LabeledSentence, got {type(item).__name__}")

    def horizon(self, instance) -> int:
        return len(instance.sentence)

    def has_reference(self, instance) -> bool:
        return instance.reference is not None

    # -- search space --------------------------------------------------------

    def legal_actions(self, state):
        return self._all_actions

    def is_terminal(self, state) -> bool:
        return len(state.prefix) >= len(state.instance.sentence)

    def features(self, state) -> dict:
        obs = observation_table(state.instance.sentence, self.feature_config)[state.t]
        if not self.feature_config.structural:
            return dict(obs)
        hist = [self.labels[a] for a in state.prefix[-self.feature_config.history:]]
        return merge(obs, history_features(hist, self.feature_config))

    def output(self, state):
        return tuple(self.labels[a] for a in state.prefix)

    # -- reference-aware quantities -----------------------------------------

    def _reference(self, instance):
        if instance.reference is None:
            raise MissingReference("instance has no reference labels")
        return instance.reference

    def initial_action(self, state) -> int:
        ref = self._reference(state.instance)
        t = state.t
        if self.loss_kind == "hamming":
            return ref[t]
        tag, typ = self._split[ref[t]]
        if tag == "B":
            return ref[t]
        if tag == "I" and t > 0:
            prev_tag, prev_typ = self._split[state.prefix[-1]]
            if prev_tag in ("B", "I") and prev_typ == typ:
                return ref[t]
        return self._out

    def loss(self, state) -> float:
        ref = self._reference(state.instance)
        if self.loss_kind == "hamming":
            return float(sum(1 for a, b in zip(ref, state.prefix) if a != b))
        pred = set(bio_decode(self.output(state)))
        gold = state.instance.ref_spans
        return 1.0 - f1_from_counts(len(gold & pred), len(gold), len(pred))

    def max_loss(self, instance) -> float:
        if self.loss_kind == "hamming":
            return float(len(instance.sentence))
        return 1.0

    def completion_cost(self, state, action) -> float:
        ref = self._reference(state.instance)
        if self.loss_kind == "hamming":
            past = sum(1 for a, b in zip(ref, state.prefix) if a != b)
            return float(past + (action != ref[state.t]))
        return self._f1_completion(state, action, ref)

    def _f1_completion(self, state, action, ref) -> float:
        # past spans are exact; the open span (if any) is extended by the
        # initial policy exactly while the reference continues the same
        # chunk; every reference chunk starting later is recovered
        gold = state.instance.ref_spans
        labels = [self.labels[a] for a in state.prefix] + [self.labels[action]]
        t = state.t
        spans = bio_decode(labels)
        open_span = spans[-1] if spans and spans[-1].end == t + 1 else None
        closed = spans[:-1] if open_span is not None else spans
        correct = sum(1 for sp in closed if sp in gold)
        n_pred = len(closed)
        if open_span is not None:
            end = t + 1
            n = len(ref)
            while end < n:
                tag, typ = self._split[ref[end]]
                if tag == "I" and typ == open_span.label:
                    end += 1
                else:
                    break
            final = type(open_span)(open_span.start, end - open_span.start, open_span.label)
            correct += final in gold
            n_pred += 1
        future = sum(1 for sp in gold if sp.start > t)
        return 1.0 - f1_from_counts(correct + future, len(gold), n_pred + future)


def make_task_instances(task, items):
    return [task.make_instance(item, key=i) for i, item in enumerate(items)]
