"""Search states, task interface, stochastic policy mixtures and rollouts.

A structured prediction problem is cast as a left-to-right search: a
:class:`SearchState` is an input instance plus the decisions made so far,
and a policy picks the next decision.  :class:`TaskDefinition` is the
plugin interface every concrete problem implements.

Randomness is always passed explicitly as a ``numpy.random.Generator``
(the "random stream"); nothing in this package touches global RNG state.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .exceptions import (
    IllegalAction,
    MissingReference,
    NoLearnedComponent,
    TerminalState,
)

WEIGHT_TOL = 1e-9


def make_rng(seed=None) -> np.random.Generator:
    """Return a ``Generator`` from a seed, an existing generator, or ``None``."""
    return np.random.default_rng(seed)


def derive_rng(*keys: int) -> np.random.Generator:
    """Deterministic generator keyed by a tuple of non-negative integers."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(k) for k in keys])))


@dataclass(frozen=True)
class SearchState:
    """An input instance together with the prefix of decisions taken so far."""

    instance: Any
    prefix: tuple = ()

    @property
    def t(self) -> int:
        return len(self.prefix)


class TaskDefinition:
    """Interface of a structured prediction task.

    Subclasses define the action alphabet, the transition rule, the loss,
    the reference-aware initial policy and the feature map.  Instances are
    opaque to the core machinery; only the task looks inside them.
    """

    n_actions: int = 0

    def initial_state(self, instance) -> SearchState:
        return SearchState(instance, ())

    def horizon(self, instance) -> int:
        raise NotImplementedError

    def legal_actions(self, state) -> Sequence[int]:
        raise NotImplementedError

    def is_terminal(self, state) -> bool:
        raise NotImplementedError

    def next_state(self, state, action):
        """Transition without validation; use :func:`advance` from outside."""
        return SearchState(state.instance, state.prefix + (action,))

    def features(self, state) -> dict:
        raise NotImplementedError

    def has_reference(self, instance) -> bool:
        raise NotImplementedError

    def initial_action(self, state) -> int:
        """Action of the reference-aware initial policy at ``state``."""
        raise NotImplementedError

    def output(self, state):
        """Map a terminal state to the task-level structured output."""
        raise NotImplementedError

    def loss(self, state) -> float:
        """Loss of a terminal state against the instance's reference."""
        raise NotImplementedError

    def max_loss(self, instance) -> float:
        """Largest loss any complete output can incur on ``instance``."""
        raise NotImplementedError

    def completion_cost(self, state, action) -> float:
        """Loss of taking ``action`` and then following the initial policy.

        Tasks with a closed form override this; the default rolls the
        initial policy out explicitly.
        """
        s = self.next_state(state, action)
        while not self.is_terminal(s):
            s = self.next_state(s, self.initial_action(s))
        return self.loss(s)


def advance(state, action: int, task: TaskDefinition):
    """Append ``action`` to ``state`` after checking it is allowed."""
    if task.is_terminal(state):
        raise TerminalState(f"state at step {state.t} is terminal")
    if action not in task.legal_actions(state):
        raise IllegalAction(f"action {action} is not legal at step {state.t}")
    return task.next_state(state, action)


class _InitialPolicy:
    """Marker for the reference-aware initial policy inside a mixture."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def act(self, state, task):
        if not task.has_reference(state.instance):
            raise MissingReference("initial policy needs reference labels")
        return task.initial_action(state)

    def __repr__(self):
        return "INITIAL_POLICY"

    def __reduce__(self):
        return (_InitialPolicy, ())


INITIAL_POLICY = _InitialPolicy()


@dataclass(frozen=True)
class MixturePolicy:
    """Stochastic interpolation of policies.

    ``components`` is a tuple of ``(policy, weight)`` pairs where each
    policy has an ``act(state, task)`` method or is :data:`INITIAL_POLICY`.
    Every evaluation draws a fresh component.
    """

    components: tuple
    generation: int = 0

    def __post_init__(self):
        comps = tuple((p, float(w)) for p, w in self.components)
        object.__setattr__(self, "components", comps)
        if not comps:
            raise ValueError("a mixture needs at least one component")
        if any(w < 0 for _, w in comps):
            raise ValueError("mixture weights must be non-negative")
        total = sum(w for _, w in comps)
        if abs(total - 1.0) > WEIGHT_TOL:
            raise ValueError(f"mixture weights sum to {total!r}, not 1")
        if sum(1 for p, _ in comps if p is INITIAL_POLICY) > 1:
            raise ValueError("at most one initial-policy component is allowed")

    @classmethod
    def initial(cls) -> "MixturePolicy":
        return cls(((INITIAL_POLICY, 1.0),), 0)

    @classmethod
    def single(cls, policy, generation=0) -> "MixturePolicy":
        return cls(((policy, 1.0),), generation)

    @property
    def weights(self) -> tuple:
        return tuple(w for _, w in self.components)

    @property
    def pi_weight(self) -> float:
        for p, w in self.components:
            if p is INITIAL_POLICY:
                return w
        return 0.0

    @property
    def learned(self) -> list:
        return [p for p, _ in self.components if p is not INITIAL_POLICY]

    def act(self, state, task, rng):
        return policy_choose(self, state, task, rng)


def policy_choose(policy: MixturePolicy, state, task: TaskDefinition, rng: np.random.Generator) -> int:
    """Draw one mixture component by weight and return its action.

    Exactly one uniform draw is consumed per call, even for a
    single-component mixture, so streams stay aligned across policies.
    """
    u = rng.random()
    acc = 0.0
    chosen = policy.components[-1][0]
    for component, weight in policy.components:
        acc += weight
        if u < acc:
            chosen = component
            break
    return chosen.act(state, task)


@dataclass(frozen=True)
class Trajectory:
    states: tuple
    actions: tuple
    final_output: Any
    loss: float | None = None
    final_state: Any = field(default=None, compare=False)


def rollout(policy, start, task: TaskDefinition, rng: np.random.Generator) -> Trajectory:
    """Run ``policy`` from ``start`` until the task reports a terminal state."""
    states, actions = [], []
    s = start
    while not task.is_terminal(s):
        a = policy_choose(policy, s, task, rng)
        states.append(s)
        actions.append(a)
        s = advance(s, a, task)
    loss = task.loss(s) if task.has_reference(s.instance) else None
    return Trajectory(tuple(states), tuple(actions), task.output(s), loss, s)


def interpolate(current: MixturePolicy, learned, beta: float) -> MixturePolicy:
    """Return ``beta * learned + (1 - beta) * current`` as a flat mixture."""
    if not 0.0 <= beta <= 1.0:
        raise ValueError(f"beta must lie in [0, 1], got {beta!r}")
    gen = current.generation + 1
    if beta == 0.0:
        return MixturePolicy(current.components, gen)
    if beta == 1.0:
        return MixturePolicy(((learned, 1.0),), gen)
    comps = [(learned, beta)] + [(p, w * (1.0 - beta)) for p, w in current.components]
    return MixturePolicy(tuple(_renormalize(comps)), gen)


def strip_initial_policy(policy: MixturePolicy) -> MixturePolicy:
    """Drop the initial-policy component and rescale the rest proportionally."""
    learned = [(p, w) for p, w in policy.components if p is not INITIAL_POLICY]
    if not learned:
        raise NoLearnedComponent("mixture holds only the initial policy")
    if len(learned) == len(policy.components):
        return policy
    mass = 1.0 - policy.pi_weight
    if mass <= 0.0:
        mass = sum(w for _, w in learned)
    if mass <= 0.0:
        # every learned component has zero weight; fall back to uniform
        learned = [(p, 1.0) for p, _ in learned]
        mass = float(len(learned))
    comps = [(p, w / mass) for p, w in learned]
    return MixturePolicy(tuple(_renormalize(comps)), policy.generation)


def _renormalize(comps):
    # absorbs float drift so the sum-to-one check never trips on long chains
    total = sum(w for _, w in comps)
    return [(p, w / total) for p, w in comps]
