"""Structured prediction by iterated cost-sensitive classification."""

from .core import (
    INITIAL_POLICY,
    MixturePolicy,
    SearchState,
    TaskDefinition,
    Trajectory,
    advance,
    derive_rng,
    interpolate,
    make_rng,
    policy_choose,
    rollout,
    strip_initial_policy,
)
from .beam import BeamQueueState, BeamTask, beam_wrap
from .estimators import CostSensitiveClassifier, SearnTagger
from .training import (
    IterationReport,
    SearnConfig,
    beta_line_search,
    estimate_action_cost,
    generate_examples,
    regret_costs,
    searn_train,
)
from .theory import BoundInputs, lemma1_check, theorem2_bound

__version__ = "0.1.0"

__all__ = [
    "INITIAL_POLICY",
    "BeamQueueState",
    "BeamTask",
    "BoundInputs",
    "CostSensitiveClassifier",
    "IterationReport",
    "MixturePolicy",
    "SearchState",
    "SearnConfig",
    "SearnTagger",
    "TaskDefinition",
    "Trajectory",
    "advance",
    "beam_wrap",
    "beta_line_search",
    "derive_rng",
    "estimate_action_cost",
    "generate_examples",
    "interpolate",
    "lemma1_check",
    "make_rng",
    "policy_choose",
    "regret_costs",
    "rollout",
    "searn_train",
    "strip_initial_policy",
    "theorem2_bound",
]
