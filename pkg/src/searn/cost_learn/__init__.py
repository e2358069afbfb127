from .binary import (
    BinaryScorer,
    logistic_gradient,
    logistic_objective,
    train_binary_logreg,
    train_binary_perceptron,
)
from .multiclass import (
    LEARNERS,
    LearnerConfig,
    LinearClassifier,
    classifier_cs_loss,
    train_cost_sensitive,
)
from .reductions import (
    CostSensitiveExample,
    WeightedBinaryExample,
    costing_resample,
    wap_reduce,
    wap_values,
)

__all__ = [
    "BinaryScorer",
    "CostSensitiveExample",
    "LEARNERS",
    "LearnerConfig",
    "LinearClassifier",
    "WeightedBinaryExample",
    "classifier_cs_loss",
    "costing_resample",
    "logistic_gradient",
    "logistic_objective",
    "train_binary_logreg",
    "train_binary_perceptron",
    "train_cost_sensitive",
    "wap_reduce",
    "wap_values",
]
