"""Beam search recast as greedy search over queues.

A wrapped state is a bounded queue of base states.  An abstract action
``i * A + a`` expands queue entry ``i`` with base action ``a``: the child
joins the queue (the parent stays), the queue is re-sorted and cut back
to ``beam_width``.  The extra action ``finish = beam_width * A`` is legal
once some entry is a completed base output and ends the search with the
first such entry.  With ``beam_width=1`` every expansion replaces the
single entry, so wrapped trajectories are base trajectories plus a final
``finish``.

Entries are ordered by base depth (deepest first), then score (higher
first), then insertion order.  Scores accumulate ``scorer(state, action)``
along the path and default to 0.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import SearchState, TaskDefinition
from .tasks.features import hash_name


@dataclass(frozen=True)
class BeamQueueState:
    """``entries`` are ``(base_state, score, seq)`` in queue order."""

    entries: tuple
    completed: SearchState | None = None
    next_seq: int = 0

    def __len__(self):
        return len(self.entries)

    @property
    def states(self):
        return [e[0] for e in self.entries]

    @property
    def scores(self):
        return [e[1] for e in self.entries]


def _order(entry):
    state, score, seq = entry
    return (-state.t, -score, seq)


class BeamTask(TaskDefinition):
    """A task whose states are beam queues over ``base`` states."""

    kind = "beam"

    def __init__(self, base: TaskDefinition, beam_width: int, scorer=None):
        if beam_width < 1:
            raise ValueError("beam_width must be at least 1")
        self.base = base
        self.beam_width = beam_width
        self.scorer = scorer
        self.base_actions = base.n_actions
        self.finish = beam_width * base.n_actions
        self.n_actions = self.finish + 1
        self.loss_kind = getattr(base, "loss_kind", None)
        self._queues: dict = {}

    def describe(self) -> dict:
        return {"kind": self.kind, "beam_width": self.beam_width, "base": self.base.describe()}

    def make_instance(self, item, key: int = 0):
        return self.base.make_instance(item, key)

    def encode(self, entry: int, base_action: int) -> int:
        return entry * self.base_actions + base_action

    def decode(self, action: int):
        """``(entry, base_action)``, or ``None`` for ``finish``."""
        if action == self.finish:
            return None
        return divmod(action, self.base_actions)

    # -- queue bookkeeping ---------------------------------------------------

    def _step_cap(self, instance) -> int:
        return self.beam_width * self.base.horizon(instance)

    def horizon(self, instance) -> int:
        return self._step_cap(instance) + self.base.horizon(instance) + 1

    def queue(self, state) -> BeamQueueState:
        key = (state.instance, state.prefix)
        q = self._queues.get(key)
        if q is not None:
            return q
        if not state.prefix:
            q = BeamQueueState(((self.base.initial_state(state.instance), 0.0, 0),), None, 1)
        else:
            parent = self.queue(SearchState(state.instance, state.prefix[:-1]))
            q = self._apply(parent, state.prefix[-1])
        if len(self._queues) > 200_000:
            self._queues.clear()
        self._queues[key] = q
        return q

    def _apply(self, q: BeamQueueState, action: int) -> BeamQueueState:
        dec = self.decode(action)
        if dec is None:
            done = next(s for s, _, _ in q.entries if self.base.is_terminal(s))
            return BeamQueueState(q.entries, done, q.next_seq)
        i, a = dec
        parent, score, _ = q.entries[i]
        gain = 0.0 if self.scorer is None else float(self.scorer(parent, a))
        child = (self.base.next_state(parent, a), score + gain, q.next_seq)
        entries = tuple(sorted(q.entries + (child,), key=_order)[: self.beam_width])
        return BeamQueueState(entries, None, q.next_seq + 1)

    # -- search space --------------------------------------------------------

    def is_terminal(self, state) -> bool:
        return bool(state.prefix) and state.prefix[-1] == self.finish

    def legal_actions(self, state):
        if self.is_terminal(state):
            return ()
        q = self.queue(state)
        base = self.base
        has_goal = any(base.is_terminal(s) for s in q.states)
        if state.t >= self._step_cap(state.instance):
            # past the cap: finish if possible, else deepen the deepest entry
            if has_goal:
                return (self.finish,)
            i = next(k for k, s in enumerate(q.states) if not base.is_terminal(s))
            return tuple(self.encode(i, a) for a in base.legal_actions(q.states[i]))
        present = {s.prefix for s in q.states}
        acts = []
        for i, s in enumerate(q.states):
            if base.is_terminal(s):
                continue
            for a in base.legal_actions(s):
                if s.prefix + (a,) not in present:
                    acts.append(self.encode(i, a))
        if has_goal:
            acts.append(self.finish)
        return tuple(acts)

    def features(self, state) -> dict:
        """Base features of every entry, each entry's copy keyed by its rank.

        Rank 0 keeps the base indices, so a width-1 queue sees exactly the
        base features.  Wider queues also get goal/open indicators per rank.
        """
        q = self.queue(state)
        base = self.base
        feats: dict = {}
        if self.beam_width > 1:
            cfg = base.feature_config
            mask = (1 << cfg.hash_bits) - 1
        for i, s in enumerate(q.states):
            if not base.is_terminal(s):
                for idx, v in base.features(s).items():
                    key = idx if i == 0 else (idx ^ (i * 0x9E3779B1)) & mask
                    feats[key] = feats.get(key, 0.0) + v
            if self.beam_width > 1:
                name = f"rank{i}:{'goal' if base.is_terminal(s) else 'open'}"
                idx = hash_name(name, cfg, structural=True)
                feats[idx] = feats.get(idx, 0.0) + 1.0
        return feats

    def _goal(self, state):
        q = self.queue(state)
        if q.completed is None:
            raise ValueError("search has not finished")
        return q.completed

    def output(self, state):
        return self.base.output(self._goal(state))

    def has_reference(self, instance) -> bool:
        return self.base.has_reference(instance)

    def loss(self, state) -> float:
        return self.base.loss(self._goal(state))

    def max_loss(self, instance) -> float:
        return self.base.max_loss(instance)

    def initial_action(self, state) -> int:
        """Expand (or finish with) the entry whose best completion is cheapest."""
        base = self.base
        q = self.queue(state)
        legal = set(self.legal_actions(state))
        best, best_cost = None, None
        for i, s in enumerate(q.states):
            if base.is_terminal(s):
                act, cost = self.finish, base.loss(s)
                # finish always picks the first goal in queue order
                if s is not next(g for g in q.states if base.is_terminal(g)):
                    continue
            else:
                a = base.initial_action(s)
                act, cost = self.encode(i, a), base.completion_cost(s, a)
            if act in legal and (best_cost is None or cost < best_cost):
                best, best_cost = act, cost
        if best is None:
            return min(legal)
        return best


def beam_wrap(task: TaskDefinition, beam_width: int, scorer=None) -> BeamTask:
    """Wrap ``task`` so that beam search becomes greedy search over queues.

    ``scorer(base_state, base_action)`` adds to a hypothesis's score;
    :meth:`classifier_scorer` builds one from a trained classifier.
    """
    return BeamTask(task, beam_width, scorer)


def classifier_scorer(classifier, task: TaskDefinition):
    """Per-action classifier scores of the base task as a beam scorer."""

    def score(state, action):
        return classifier.score(task.features(state), action)

    return score
