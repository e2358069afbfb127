"""From-scratch binary learners over sparse ``{index: value}`` features."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..exceptions import EmptyInput


def dot(weights: dict, features: dict) -> float:
    if len(weights) < len(features):
        return sum(v * features[i] for i, v in weights.items() if i in features)
    return sum(v * weights[i] for i, v in features.items() if i in weights)


@dataclass
class BinaryScorer:
    """Linear scorer ``w . x + b``; positive scores predict ``+1``."""

    weights: dict = field(default_factory=dict)
    bias: float = 0.0

    def score(self, features: dict) -> float:
        return dot(self.weights, features) + self.bias

    def predict(self, features: dict) -> int:
        return 1 if self.score(features) >= 0.0 else -1


def train_binary_perceptron(examples, epochs: int = 5, rng=None) -> BinaryScorer:
    """Averaged perceptron.

    Mistakes (``y * score <= 0``) trigger an update scaled by the
    example's importance.  The returned weights are the average of the
    weight vector over every example visit.
    """
    examples = list(examples)
    if not examples:
        raise EmptyInput("perceptron needs at least one example")
    if epochs < 1:
        raise ValueError("epochs must be positive")
    rng = np.random.default_rng(rng)
    w: dict = {}
    acc: dict = {}  # sum of c * delta, for the averaging trick
    b = 0.0
    acc_b = 0.0
    c = 1
    order = np.arange(len(examples))
    for _ in range(epochs):
        rng.shuffle(order)
        for n in order:
            ex = examples[n]
            y = ex.label
            s = dot(w, ex.features) + b
            if y * s <= 0.0:
                step = y * ex.importance
                for i, v in ex.features.items():
                    w[i] = w.get(i, 0.0) + step * v
                    acc[i] = acc.get(i, 0.0) + c * step * v
                b += step
                acc_b += c * step
            c += 1
    avg = {i: wi - acc.get(i, 0.0) / c for i, wi in w.items()}
    avg = {i: v for i, v in avg.items() if v != 0.0}
    return BinaryScorer(avg, b - acc_b / c)


def _log1pexp(z: float) -> float:
    if z > 35.0:
        return z
    if z < -35.0:
        return math.exp(z)
    return math.log1p(math.exp(z))


def _sigmoid(z: float) -> float:
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


def logistic_objective(scorer: BinaryScorer, examples, l2: float) -> float:
    """Mean importance-weighted log-loss plus ``l2 / 2 * ||w||^2`` (bias unpenalized)."""
    total = sum(ex.importance * _log1pexp(-ex.label * scorer.score(ex.features)) for ex in examples)
    reg = 0.5 * l2 * sum(v * v for v in scorer.weights.values())
    return total / len(examples) + reg


def logistic_gradient(scorer: BinaryScorer, examples, l2: float):
    """Analytic gradient of :func:`logistic_objective`; returns ``(grad_w, grad_b)``."""
    n = len(examples)
    gw = {i: l2 * v for i, v in scorer.weights.items()}
    gb = 0.0
    for ex in examples:
        y = ex.label
        g = -y * ex.importance * _sigmoid(-y * scorer.score(ex.features)) / n
        for i, v in ex.features.items():
            gw[i] = gw.get(i, 0.0) + g * v
        gb += g
    return gw, gb


def _schedule(name, eta0, l2):
    if callable(name):
        return name
    if name == "constant":
        return lambda t: eta0
    if name == "invscaling":
        return lambda t: eta0 / math.sqrt(1.0 + t)
    if name == "optimal":
        if l2 <= 0:
            raise ValueError("the 'optimal' schedule needs l2 > 0")
        return lambda t: eta0 / (1.0 + eta0 * l2 * t)
    raise ValueError(f"unknown learning rate schedule {name!r}")


def train_binary_logreg(
    examples,
    l2: float = 1e-4,
    epochs: int = 10,
    learning_rate_schedule="optimal",
    rng=None,
    eta0: float = 0.5,
) -> BinaryScorer:
    """Importance-weighted, L2-regularized logistic regression by SGD.

    Each step follows the gradient of one example's term of
    :func:`logistic_objective`, regularizer included.  Examples are
    reshuffled every epoch; the last iterate is returned.
    """
    examples = list(examples)
    if not examples:
        raise EmptyInput("logistic regression needs at least one example")
    if l2 < 0:
        raise ValueError("l2 must be non-negative")
    if epochs < 1:
        raise ValueError("epochs must be positive")
    if learning_rate_schedule == "optimal" and l2 <= 0:
        learning_rate_schedule = "invscaling"
    rate = _schedule(learning_rate_schedule, eta0, l2)
    rng = np.random.default_rng(rng)
    # w = scale * v keeps the L2 shrinkage O(1) per step
    v: dict = {}
    scale = 1.0
    b = 0.0
    order = np.arange(len(examples))
    t = 0
    for _ in range(epochs):
        rng.shuffle(order)
        for idx in order:
            ex = examples[idx]
            eta = rate(t)
            t += 1
            z = scale * dot(v, ex.features) + b
            g = -ex.label * ex.importance * _sigmoid(-ex.label * z)
            shrink = 1.0 - eta * l2
            if shrink <= 0.0:
                raise ValueError("learning rate too large for the l2 strength")
            scale *= shrink
            step = -eta * g / scale
            for i, x in ex.features.items():
                v[i] = v.get(i, 0.0) + step * x
            b -= eta * g
            if scale < 1e-9:
                v = {i: val * scale for i, val in v.items()}
                scale = 1.0
    weights = {i: scale * val for i, val in v.items() if val != 0.0}
    return BinaryScorer(weights, b)
