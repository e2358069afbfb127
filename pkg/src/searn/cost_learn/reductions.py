"""Weighted-all-pairs and costing reductions.

Weighted all pairs (WAP) turns one k-class cost-sensitive example into
importance-weighted binary examples, one per action pair.  With costs
shifted so the minimum is 0, define for each action ``a``

    v(a) = integral from 0 to c(a) of  dt / |{b : c(b) <= t}|

i.e. the area under the reciprocal count of actions whose cost lies
below the threshold.  The pair ``(i, j)`` gets importance
``|v(i) - v(j)|`` and its binary label prefers the cheaper action.
Tied costs give zero importance and are dropped.

Costing then converts importance weights into an unweighted sample by
rejection sampling: keep each example with probability
``importance / max_importance``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..exceptions import EmptyInput, MismatchedActionCount


@dataclass(frozen=True)
class CostSensitiveExample:
    """Feature dict paired with a per-action cost (regret) vector.

    ``legal`` optionally marks which actions were available; pairs
    involving an unavailable action are never emitted.
    """

    features: dict
    costs: tuple
    legal: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "costs", tuple(float(c) for c in self.costs))
        if self.legal is not None:
            object.__setattr__(self, "legal", tuple(bool(x) for x in self.legal))
            if len(self.legal) != len(self.costs):
                raise MismatchedActionCount("legal mask and cost vector differ in length")

    @property
    def action_count(self) -> int:
        return len(self.costs)

    def is_legal(self, a: int) -> bool:
        return self.legal is None or self.legal[a]


@dataclass(frozen=True)
class WeightedBinaryExample:
    features: dict
    label: int
    importance: float = 1.0

    def __post_init__(self):
        if self.label not in (-1, 1):
            raise ValueError(f"binary label must be -1 or +1, got {self.label!r}")


def wap_values(costs) -> np.ndarray:
    """Per-action WAP potentials ``v(a)``; pair importances are their differences."""
    c = np.asarray(costs, dtype=float)
    order = np.argsort(c, kind="stable")
    sorted_c = c[order] - c[order[0]]
    # between the m-th and (m+1)-th smallest cost exactly m actions lie below
    steps = np.diff(sorted_c) / np.arange(1, len(c))
    v_sorted = np.concatenate(([0.0], np.cumsum(steps)))
    v = np.empty_like(v_sorted)
    v[order] = v_sorted
    return v


def wap_reduce(examples):
    """Reduce cost-sensitive examples to ``((i, j), WeightedBinaryExample)`` pairs.

    Label ``+1`` means action ``i`` (the lower id of the pair) is cheaper.
    """
    examples = list(examples)
    if not examples:
        return []
    k = examples[0].action_count
    if k < 2:
        raise MismatchedActionCount("need at least two actions")
    out = []
    for ex in examples:
        if ex.action_count != k:
            raise MismatchedActionCount(f"expected {k} actions, got {ex.action_count}")
        if ex.legal is None:
            idx = list(range(k))
            v = wap_values(ex.costs)
        else:
            idx = [a for a in range(k) if ex.legal[a]]
            if len(idx) < 2:
                continue
            sub = wap_values([ex.costs[a] for a in idx])
            v = np.zeros(k)
            v[idx] = sub
        for pos, i in enumerate(idx):
            ci = ex.costs[i]
            for j in idx[pos + 1:]:
                cj = ex.costs[j]
                if ci == cj:
                    continue
                imp = abs(float(v[i] - v[j]))
                if imp <= 0.0:
                    continue
                label = 1 if ci < cj else -1
                out.append(((i, j), WeightedBinaryExample(ex.features, label, imp)))
    return out


def costing_resample(examples, rng: np.random.Generator):
    """Rejection-sample importance-weighted examples into unweighted ones."""
    examples = list(examples)
    if not examples:
        raise EmptyInput("costing needs at least one example")
    imps = np.array([e.importance for e in examples], dtype=float)
    if not np.all(np.isfinite(imps)):
        raise ValueError("importances must be finite")
    top = imps.max()
    if top <= 0.0:
        return []
    draws = rng.random(len(examples))
    keep = draws < imps / top
    return [
        WeightedBinaryExample(e.features, e.label, 1.0)
        for e, k in zip(examples, keep)
        if k
    ]
