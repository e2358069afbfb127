"""scikit-learn style wrappers around the training loop and the learner stack."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import as_sparse_rows, check_costs, check_labeled, check_sequences
from .cost_learn import CostSensitiveExample, LearnerConfig, train_cost_sensitive
from .io import evaluate
from .tasks import (
    ChunkTask,
    FeatureConfig,
    SequenceLabelingTask,
    bio_label_set,
    chunk_types,
    make_task_instances,
)
from .training import SearnConfig, predict_outputs, searn_train


class SearnTagger(BaseEstimator):
    """Sequence labeler / chunker trained by iterated cost-sensitive learning.

    ``X`` is a list of token lists (or :class:`~searn.tasks.Sentence`), ``y``
    a list of label lists.  ``beta`` is a number, ``"auto"`` or ``"analytic"``.
    """

    def __init__(
        self,
        task="sequence",
        loss="hamming",
        learner="perceptron",
        beta="auto",
        iterations=10,
        cost_mode="approximation",
        mc_samples=1,
        beam_width=1,
        max_phrase=5,
        hash_bits=20,
        epochs=5,
        l2=1e-4,
        seed=0,
    ):
        self.task = task
        self.loss = loss
        self.learner = learner
        self.beta = beta
        self.iterations = iterations
        self.cost_mode = cost_mode
        self.mc_samples = mc_samples
        self.beam_width = beam_width
        self.max_phrase = max_phrase
        self.hash_bits = hash_bits
        self.epochs = epochs
        self.l2 = l2
        self.seed = seed

    def _build_task(self, labeled):
        feats = FeatureConfig(hash_bits=self.hash_bits)
        seqs = [d.labels for d in labeled]
        if self.task == "chunk":
            if self.loss != "f1":
                raise ValueError("the chunk task is scored by F1; set loss='f1'")
            return ChunkTask(chunk_types(seqs), self.max_phrase, feats)
        if self.task != "sequence":
            raise ValueError(f"unknown task {self.task!r}")
        if self.loss == "f1":
            return SequenceLabelingTask(bio_label_set(chunk_types(seqs)), "f1", feats)
        return SequenceLabelingTask(sorted({lab for s in seqs for lab in s}), self.loss, feats)

    def _config(self):
        if self.beta == "analytic":
            kw = {"beta_mode": "analytic", "max_iterations": self.iterations}
        elif self.beta == "auto":
            kw = {"beta_mode": "auto", "max_iterations": self.iterations}
        else:
            kw = {"beta_mode": "fixed", "beta": float(self.beta), "max_iterations": self.iterations}
        return SearnConfig(
            cost_mode=self.cost_mode,
            sample_count=self.mc_samples,
            beam_width=self.beam_width,
            seed=self.seed,
            learner=LearnerConfig(epochs=self.epochs, l2=self.l2),
            **kw,
        )

    def fit(self, X, y, X_dev=None, y_dev=None):
        train = check_labeled(X, y)
        dev = check_labeled(X_dev, y_dev) if X_dev is not None else None
        task = self._build_task(train + (dev or []))
        config = self._config()
        dev_inst = make_task_instances(task, dev) if dev else None
        self.policy_, self.reports_ = searn_train(
            make_task_instances(task, train), task, self.learner, config, dev=dev_inst
        )
        self.task_ = task
        self.n_iter_ = len(self.reports_)
        return self

    def predict(self, X):
        check_is_fitted(self, "policy_")
        sents = check_sequences(X)
        instances = make_task_instances(self.task_, sents)
        return [list(p) for p in predict_outputs(self.policy_, instances, self.task_, self.beam_width, self.seed)]

    def score(self, X, y):
        """Token accuracy under Hamming loss, corpus F1 under F1."""
        report = evaluate(y, self.predict(X), self.task_.loss_kind)
        return 1.0 - report.value if report.loss_kind == "hamming" else report.value


class CostSensitiveClassifier(BaseEstimator):
    """Weighted-all-pairs + costing classifier on a dense or sparse feature matrix.

    ``fit(X, C)`` takes a cost matrix ``C`` of shape ``(n_samples, k)``;
    ``predict`` returns the index of the highest-scoring action.
    """

    def __init__(self, learner="perceptron", epochs=5, l2=1e-4, costing_rounds=1, seed=0):
        self.learner = learner
        self.epochs = epochs
        self.l2 = l2
        self.costing_rounds = costing_rounds
        self.seed = seed

    def fit(self, X, C):
        rows = as_sparse_rows(X)
        C = check_costs(C, len(rows))
        regrets = C - C.min(axis=1, keepdims=True)
        examples = [CostSensitiveExample(r, tuple(c)) for r, c in zip(rows, regrets)]
        config = LearnerConfig(epochs=self.epochs, l2=self.l2, costing_rounds=self.costing_rounds)
        self.classifier_ = train_cost_sensitive(examples, self.learner, config, np.random.default_rng(self.seed))
        self.n_actions_ = C.shape[1]
        return self

    def decision_function(self, X):
        check_is_fitted(self, "classifier_")
        return np.array([self.classifier_.scores(r) for r in as_sparse_rows(X)])

    def predict(self, X):
        check_is_fitted(self, "classifier_")
        return np.array([self.classifier_.predict(r) for r in as_sparse_rows(X)])
