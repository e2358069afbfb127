"""Bound formulas and exact-enumeration checks on tiny problems.

Everything here evaluates expectations exactly by walking every
randomization path of a mixture policy, which is only feasible for short
horizons and small alphabets.  These routines serve as oracles for the
sampled quantities computed during training.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import INITIAL_POLICY, MixturePolicy, interpolate
from .exceptions import TooLargeToEnumerate

MAX_ENUM_HORIZON = 5
MAX_ENUM_ACTIONS = 3
MAX_ENUM_COMPONENTS = 4


@dataclass(frozen=True)
class BoundInputs:
    T: int
    c_max: float
    L_pi: float
    ell_avg: float

    def __post_init__(self):
        if self.T < 1:
            raise ValueError("T must be at least 1")
        if min(self.c_max, self.L_pi, self.ell_avg) < 0:
            raise ValueError("bound inputs must be non-negative")


def theorem2_bound(inputs: BoundInputs) -> float:
    """``L_pi + 2 T ell_avg ln T + (1 + ln T) c_max / T``."""
    if inputs.T < 2:
        raise ValueError("the bound needs T >= 2 so that ln T > 0")
    T = inputs.T
    lnT = math.log(T)
    return inputs.L_pi + 2.0 * T * inputs.ell_avg * lnT + (1.0 + lnT) * inputs.c_max / T


def iteration_bound(T: int, C: float, beta: float, ell_avg: float, c_max: float, L_pi: float) -> float:
    """Loss bound after ``C / beta`` iterations at a fixed ``beta``.

    ``L_pi + C T ell_avg + c_max (C T^2 beta / 2 + T exp(-C))``.
    """
    return L_pi + C * T * ell_avg + c_max * (0.5 * C * T * T * beta + T * math.exp(-C))


def degradation_bound(L_h: float, T: int, beta: float, cs_loss: float, c_max: float) -> float:
    """One-step bound ``L(h) + T beta cs_loss + beta^2 T^2 c_max / 2``."""
    return L_h + T * beta * cs_loss + 0.5 * beta * beta * T * T * c_max


# -- exact expectations -----------------------------------------------------


class ExactEvaluator:
    """Memoized exact values of a fixed mixture policy on one task.

    ``value(s)`` is the expected final loss when the policy runs from
    ``s``; ``q(s, a)`` is the expected loss of taking ``a`` first.
    """

    def __init__(self, policy: MixturePolicy, task):
        self.policy = policy
        self.task = task
        self._v: dict = {}

    def action_distribution(self, state) -> dict:
        dist: dict = {}
        for comp, w in self.policy.components:
            if w == 0.0:
                continue
            a = comp.act(state, self.task)
            dist[a] = dist.get(a, 0.0) + w
        return dist

    def value(self, state) -> float:
        key = (state.instance, state.prefix)
        v = self._v.get(key)
        if v is None:
            if self.task.is_terminal(state):
                v = float(self.task.loss(state))
            else:
                v = sum(p * self.q(state, a) for a, p in self.action_distribution(state).items())
            self._v[key] = v
        return v

    def q(self, state, action) -> float:
        return self.value(self.task.next_state(state, action))

    def regrets(self, state) -> dict:
        qs = {a: self.q(state, a) for a in self.task.legal_actions(state)}
        best = min(qs.values())
        return {a: q - best for a, q in qs.items()}

    def state_distribution(self, instance):
        """Yield ``(state, probability)`` for every non-terminal state visited."""
        frontier = [(self.task.initial_state(instance), 1.0)]
        while frontier:
            nxt = []
            for s, p in frontier:
                if self.task.is_terminal(s):
                    continue
                yield s, p
                for a, pa in self.action_distribution(s).items():
                    nxt.append((self.task.next_state(s, a), p * pa))
            frontier = nxt


def exact_loss(policy, instances, task) -> float:
    """Exact mean expected loss ``L(D, h)`` over a uniform instance set."""
    ev = ExactEvaluator(policy, task)
    return sum(ev.value(task.initial_state(x)) for x in instances) / len(instances)


def exact_cs_loss(policy, classifier, instances, task, T: int | None = None) -> float:
    """Exact cost-sensitive loss of ``classifier`` on the example distribution of ``policy``.

    Per instance, regrets of the classifier's choices along the policy's
    path are summed and divided by ``T`` (the maximum horizon), so the
    result is a per-step average.
    """
    ev = ExactEvaluator(policy, task)
    if T is None:
        T = max(task.horizon(x) for x in instances)
    total = 0.0
    for x in instances:
        for s, p in ev.state_distribution(x):
            total += p * ev.regrets(s)[classifier.act(s, task)]
    return total / (T * len(instances))


def exact_c_max(instances, task) -> float:
    """Mean over instances of the largest loss of any complete output."""
    total = 0.0
    for x in instances:
        best = 0.0
        stack = [task.initial_state(x)]
        while stack:
            s = stack.pop()
            if task.is_terminal(s):
                best = max(best, float(task.loss(s)))
                continue
            stack.extend(task.next_state(s, a) for a in task.legal_actions(s))
        total += best
    return total / len(instances)


def _check_enumerable(task, instances, policies):
    if max(task.horizon(x) for x in instances) > MAX_ENUM_HORIZON + 1:
        raise TooLargeToEnumerate("horizon too long for exact enumeration")
    if task.n_actions > MAX_ENUM_ACTIONS and getattr(task, "kind", "") != "chunk":
        raise TooLargeToEnumerate("action alphabet too large for exact enumeration")
    for pol in policies:
        if isinstance(pol, MixturePolicy) and len(pol.components) > MAX_ENUM_COMPONENTS:
            raise TooLargeToEnumerate("mixture has too many components")


def lemma1_check(problem, h: MixturePolicy, h_prime, beta: float):
    """Check the one-iteration degradation bound exactly.

    ``problem`` is ``(task, instances)`` with a fixed horizon ``T``.
    Returns ``(lhs, rhs, holds)`` where ``lhs = L(D, h_new)`` for
    ``h_new = beta h' + (1 - beta) h`` and ``rhs`` is
    :func:`degradation_bound`.
    """
    task, instances = problem
    instances = list(instances)
    h_new = interpolate(h, h_prime, beta)
    _check_enumerable(task, instances, [h, h_new])
    T = max(task.horizon(x) for x in instances)
    lhs = exact_loss(h_new, instances, task)
    L_h = exact_loss(h, instances, task)
    cs = exact_cs_loss(h, h_prime, instances, task, T)
    c_max = exact_c_max(instances, task)
    rhs = degradation_bound(L_h, T, beta, cs, c_max)
    return lhs, rhs, lhs <= rhs + 1e-12


def lemma2_check(problem, classifiers, beta: float):
    """Check the multi-iteration bound for a fixed sequence of learned policies.

    Starting from the initial policy, interpolate each classifier in turn
    with weight ``beta`` (so ``C = len(classifiers) * beta``), strip the
    initial policy, and compare its exact loss to :func:`iteration_bound`
    with ``ell_avg`` the mean exact cost-sensitive loss of each classifier
    under the policy it was mixed into.  Returns ``(lhs, rhs, holds)``.
    """
    from .core import strip_initial_policy

    task, instances = problem
    instances = list(instances)
    T = max(task.horizon(x) for x in instances)
    h = MixturePolicy.initial()
    cs_losses = []
    for clf in classifiers:
        cs_losses.append(exact_cs_loss(h, clf, instances, task, T))
        h = interpolate(h, clf, beta)
    final = strip_initial_policy(h)
    lhs = exact_loss(final, instances, task)
    C = len(classifiers) * beta
    rhs = iteration_bound(
        T,
        C,
        beta,
        sum(cs_losses) / len(cs_losses),
        exact_c_max(instances, task),
        exact_loss(MixturePolicy.initial(), instances, task),
    )
    return lhs, rhs, lhs <= rhs + 1e-12


class TablePolicy:
    """Deterministic pseudo-random policy keyed on ``(instance key, prefix)``."""

    def __init__(self, seed: int):
        self.seed = seed

    def act(self, state, task):
        legal = list(task.legal_actions(state))
        key = hash((self.seed, getattr(state.instance, "key", 0)) + tuple(state.prefix))
        return legal[key % len(legal)]

    def __repr__(self):
        return f"TablePolicy({self.seed})"


def brute_force_best_actions(state, task) -> set:
    """Actions from which some completion attains the minimum total loss."""

    def best_from(s):
        if task.is_terminal(s):
            return float(task.loss(s))
        return min(best_from(task.next_state(s, a)) for a in task.legal_actions(s))

    vals = {a: best_from(task.next_state(state, a)) for a in task.legal_actions(state)}
    best = min(vals.values())
    return {a for a, v in vals.items() if abs(v - best) <= 1e-12}


def all_outputs(instance, task):
    """Every terminal state reachable from the initial state."""
    out = []
    stack = [task.initial_state(instance)]
    while stack:
        s = stack.pop()
        if task.is_terminal(s):
            out.append(s)
            continue
        stack.extend(task.next_state(s, a) for a in task.legal_actions(s))
    return out


__all__ = [
    "BoundInputs",
    "ExactEvaluator",
    "INITIAL_POLICY",
    "TablePolicy",
    "all_outputs",
    "brute_force_best_actions",
    "degradation_bound",
    "exact_c_max",
    "exact_cs_loss",
    "exact_loss",
    "iteration_bound",
    "lemma1_check",
    "lemma2_check",
    "theorem2_bound",
]
