"""Single-iteration baselines.

One iteration with ``beta = 1`` trains a classifier purely on states the
initial policy visits, i.e. on true histories, which is exactly how a
maximum-entropy Markov model is trained.  Dropping the prefix-dependent
features on top of that gives independent per-position classification.
"""

from __future__ import annotations

from dataclasses import replace


def _one_shot(config):
    from ..training import SearnConfig

    config = config or SearnConfig()
    return replace(config, beta_mode="fixed", beta=1.0, max_iterations=1)


def baseline_memm(dataset, task, learner_kind="perceptron", config=None):
    from ..training import searn_train

    policy, _ = searn_train(dataset, task, learner_kind, _one_shot(config))
    return policy


def independent_task(task):
    """Same task with structural (prefix-dependent) features switched off."""
    return task.with_features(structural=False)


def baseline_independent(dataset, task, learner_kind="perceptron", config=None):
    """Returns ``(policy, task)``: the policy must be decoded with the returned task."""
    from ..training import searn_train

    flat = independent_task(task)
    policy, _ = searn_train(dataset, flat, learner_kind, _one_shot(config))
    return policy, flat
