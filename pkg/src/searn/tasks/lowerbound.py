"""Hamming loss of a history-conditioned predictor that trusts its own past.

Construction: binary labels ``y_0 .. y_T`` with ``y_t = y_{t-1} xor d_t``,
where the flip bit ``d_t`` is visible in the input.  A classifier trained
on true histories predicts ``y_{t-1} xor d_t`` but errs independently
with probability ``eps``.  At test time it is fed its own previous output,
so ``yhat_t xor y_t = yhat_{t-1} xor y_{t-1} xor e_t``: correctness flips
with probability ``eps`` per step, starting from a correct ``yhat_0``.

Hence ``P(wrong at t) = (1 - (1 - 2 eps)^t) / 2`` and summing over the
``T + 1`` positions gives

    T/2 + 1/2 - (1 - (1 - 2 eps)^(T+1)) / (4 eps)

which approaches ``T/2`` for large ``T``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class MarkovLowerBoundSpec:
    epsilon: float
    T: int
    trials: int = 10000

    def __post_init__(self):
        if not 0.0 < self.epsilon < 0.5:
            raise ValueError("epsilon must lie in (0, 0.5)")
        if self.T < 1 or self.trials < 1:
            raise ValueError("T and trials must be positive")


def kaariainen_formula(epsilon: float, T: int) -> float:
    return T / 2.0 - (1.0 - (1.0 - 2.0 * epsilon) ** (T + 1)) / (4.0 * epsilon) + 0.5


def kaariainen_simulation(spec: MarkovLowerBoundSpec, rng=None, chunk: int = 50000):
    """Simulate the construction; return ``(mean Hamming loss, closed form)``."""
    rng = np.random.default_rng(rng)
    T = spec.T
    total = 0.0
    done = 0
    while done < spec.trials:
        m = min(chunk, spec.trials - done)
        y0 = rng.integers(0, 2, size=(m, 1), dtype=np.int8)
        flips = rng.integers(0, 2, size=(m, T), dtype=np.int8)
        errors = (rng.random((m, T)) < spec.epsilon).astype(np.int8)
        y = np.concatenate([y0, y0 ^ (np.cumsum(flips, axis=1) % 2).astype(np.int8)], axis=1)
        # yhat_t = yhat_{t-1} xor d_t xor e_t, starting from yhat_0 = y_0
        steps = flips ^ errors
        yhat = np.concatenate([y0, y0 ^ (np.cumsum(steps, axis=1) % 2).astype(np.int8)], axis=1)
        total += float((y != yhat).sum())
        done += m
    return total / spec.trials, kaariainen_formula(spec.epsilon, T)
