"""Cost-sensitive multiclass classifier built from pairwise binary scorers."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from ..exceptions import EmptyInput, MismatchedActionCount
from .binary import BinaryScorer, dot, train_binary_logreg, train_binary_perceptron
from .reductions import costing_resample, wap_reduce

LEARNERS = ("perceptron", "logreg")


@dataclass
class LinearClassifier:
    """Per-action linear scores ``w[a] . x + bias[a]``; predicts the argmax.

    Ties break toward the lowest action id.  Actions at or beyond
    ``action_count`` score zero, which lets a classifier act in an
    extended action space (see :mod:`searn.beam`).
    """

    weights: list
    bias: list
    action_count: int
    name: str = field(default="", compare=False)

    @classmethod
    def zeros(cls, action_count: int) -> "LinearClassifier":
        return cls([{} for _ in range(action_count)], [0.0] * action_count, action_count)

    def score(self, features: dict, action: int) -> float:
        if action >= self.action_count:
            return 0.0
        return dot(self.weights[action], features) + self.bias[action]

    def scores(self, features: dict) -> list:
        return [self.score(features, a) for a in range(self.action_count)]

    def predict(self, features: dict, legal=None) -> int:
        candidates = range(self.action_count) if legal is None else legal
        best, best_score = None, -np.inf
        for a in sorted(candidates):
            s = self.score(features, a)
            if s > best_score:
                best, best_score = a, s
        if best is None:
            raise ValueError("no candidate actions")
        return best

    def act(self, state, task) -> int:
        return self.predict(task.features(state), task.legal_actions(state))

    def action_scores(self, state, task) -> dict:
        feats = task.features(state)
        return {a: self.score(feats, a) for a in task.legal_actions(state)}


@dataclass
class LearnerConfig:
    epochs: int = 5
    l2: float = 1e-4
    learning_rate_schedule: str = "optimal"
    eta0: float = 0.5
    costing_rounds: int = 1


def _train_binary(kind, examples, config: LearnerConfig, rng) -> BinaryScorer:
    if kind == "perceptron":
        return train_binary_perceptron(examples, epochs=config.epochs, rng=rng)
    if kind == "logreg":
        return train_binary_logreg(
            examples,
            l2=config.l2,
            epochs=config.epochs,
            learning_rate_schedule=config.learning_rate_schedule,
            rng=rng,
            eta0=config.eta0,
        )
    raise ValueError(f"unknown learner {kind!r}; expected one of {LEARNERS}")


def train_cost_sensitive(examples, learner_kind="perceptron", config=None, rng=None) -> LinearClassifier:
    """Weighted all pairs, then costing, then one binary learner per pair.

    Pairwise scorers are folded into per-action weights: scorer ``(i, j)``
    adds its margin to action ``i`` and subtracts it from action ``j``, so
    an action's score is the sum of its signed pairwise margins.

    Random draws happen in a fixed order: for each pair in lexicographic
    order, ``costing_rounds`` resamples, then the binary learner.
    """
    examples = list(examples)
    if not examples:
        raise EmptyInput("no cost-sensitive examples to train on")
    config = config or LearnerConfig()
    rng = np.random.default_rng(rng)
    k = examples[0].action_count
    if any(ex.action_count != k for ex in examples):
        raise MismatchedActionCount("examples disagree on the number of actions")
    clf = LinearClassifier.zeros(k)
    clf.name = learner_kind
    if k < 2:
        return clf
    by_pair: dict = {}
    for pair, bex in wap_reduce(examples):
        by_pair.setdefault(pair, []).append(bex)
    for pair in combinations(range(k), 2):
        batch = by_pair.get(pair)
        if not batch:
            continue
        sample = []
        for _ in range(config.costing_rounds):
            sample.extend(costing_resample(batch, rng))
        if not sample:
            continue
        scorer = _train_binary(learner_kind, sample, config, rng)
        i, j = pair
        wi, wj = clf.weights[i], clf.weights[j]
        for f, v in scorer.weights.items():
            wi[f] = wi.get(f, 0.0) + v
            wj[f] = wj.get(f, 0.0) - v
        clf.bias[i] += scorer.bias
        clf.bias[j] -= scorer.bias
    for w in clf.weights:
        for f in [f for f, v in w.items() if v == 0.0]:
            del w[f]
    return clf


def classifier_cs_loss(classifier: LinearClassifier, examples) -> float:
    """Mean cost of the classifier's chosen action (0 means per-state optimal)."""
    examples = list(examples)
    if not examples:
        return 0.0
    total = 0.0
    for ex in examples:
        legal = None if ex.legal is None else [a for a in range(ex.action_count) if ex.legal[a]]
        total += ex.costs[classifier.predict(ex.features, legal)]
    return total / len(examples)
