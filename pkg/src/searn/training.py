"""The iterative training loop and its per-action cost estimates.

Each iteration rolls the current policy over every training instance,
turns every visited state into a cost-sensitive example whose costs are
per-action regrets, trains a new classifier on those examples, and mixes
it into the policy with weight ``beta``.  The loop ends once the initial
policy's share of the mixture is negligible, and the initial policy is
then stripped out.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .core import (
    INITIAL_POLICY,
    MixturePolicy,
    advance,
    derive_rng,
    interpolate,
    rollout,
    strip_initial_policy,
)
from .beam import beam_wrap
from .cost_learn import CostSensitiveExample, LearnerConfig, classifier_cs_loss, train_cost_sensitive
from .exceptions import EmptyInput, MissingReference, NoLearnedComponent

logger = logging.getLogger(__name__)

COST_MODES = ("approximation", "monte_carlo", "single_sample")
BETA_MODES = ("auto", "fixed", "analytic", "dev_line_search")
DEFAULT_BETA_GRID = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0)

# stream tags for derive_rng, so example generation, training and
# line search never share draws
_GEN, _TRAIN, _SEARCH = 0, 1, 2


@dataclass
class SearnConfig:
    """Training knobs.

    ``beta_mode="auto"`` line-searches ``beta_grid`` when a dev set is
    given and otherwise uses the fixed ``beta``.  ``analytic`` sets
    ``beta = 1 / T**3`` and, when ``max_iterations`` is ``None``, runs
    ``ceil(2 T**3 ln T)`` iterations.
    """

    beta_mode: str = "auto"
    beta: float = 0.5
    beta_grid: tuple = DEFAULT_BETA_GRID
    max_iterations: int | None = 10
    pi_weight_stop_threshold: float = 1e-4
    cost_mode: str = "approximation"
    sample_count: int = 1
    beam_width: int = 1
    seed: int = 0
    learner: LearnerConfig = field(default_factory=LearnerConfig)

    def __post_init__(self):
        if self.beta_mode not in BETA_MODES:
            raise ValueError(f"beta_mode must be one of {BETA_MODES}")
        if self.beta_mode in ("fixed", "auto") and not 0.0 < self.beta <= 1.0:
            raise ValueError("fixed beta must lie in (0, 1]")
        if self.cost_mode not in COST_MODES:
            raise ValueError(f"cost_mode must be one of {COST_MODES}")
        if self.sample_count < 1:
            raise ValueError("sample_count must be at least 1")
        if not 0.0 < self.pi_weight_stop_threshold < 1.0:
            raise ValueError("pi_weight_stop_threshold must lie in (0, 1)")
        if self.beam_width < 1:
            raise ValueError("beam_width must be at least 1")
        if self.max_iterations is not None and self.max_iterations < 0:
            raise ValueError("max_iterations must be non-negative")
        if not self.beta_grid or any(not 0.0 <= b <= 1.0 for b in self.beta_grid):
            raise ValueError("beta_grid must be a non-empty list of probabilities")


@dataclass(frozen=True)
class IterationReport:
    iteration: int
    cs_loss: float
    pi_weight: float
    example_count: int
    running_avg_loss: float
    beta: float
    dev_loss: float | None = None


class ProgressLog:
    """Line-oriented JSON progress records written to a text stream."""

    def __init__(self, stream=None):
        self.stream = stream

    def emit(self, event: str, **fields):
        record = {"event": event, **fields}
        logger.debug("%s", record)
        if self.stream is not None:
            self.stream.write(json.dumps(record, sort_keys=True) + "\n")
            self.stream.flush()


# -- per-action costs -------------------------------------------------------


def _policy_loss_from(policy, state, task, rng) -> float:
    traj = rollout(policy, state, task, rng)
    if traj.loss is None:
        raise MissingReference("cost estimation needs reference labels")
    return traj.loss


def estimate_action_cost(policy, state, action, task, config: SearnConfig, rng) -> float:
    """Expected loss of taking ``action`` at ``state`` and then following ``policy``.

    ``approximation`` completes with the initial policy instead (exact, no
    randomness).  ``monte_carlo`` averages ``sample_count`` independent
    rollouts.  ``single_sample`` runs one rollout; callers pass a stream
    seeded identically for sibling actions so their draws are tied.
    """
    if config.cost_mode == "approximation":
        if not task.has_reference(state.instance):
            raise MissingReference("approximation mode needs reference labels")
        advance(state, action, task)  # legality check
        return float(task.completion_cost(state, action))
    nxt = advance(state, action, task)
    if config.cost_mode == "single_sample":
        return _policy_loss_from(policy, nxt, task, rng)
    total = 0.0
    for _ in range(config.sample_count):
        total += _policy_loss_from(policy, nxt, task, rng)
    return total / config.sample_count


def regret_costs(policy, state, task, config: SearnConfig, rng) -> np.ndarray:
    """Per-action regrets over the full alphabet; illegal actions get ``nan``.

    The minimum over legal actions is exactly 0.  In both sampling modes
    every sibling action is estimated from an identical copy of one
    stream, so sample ``k`` of each action sees the same draws whenever
    the rollouts stay aligned.
    """
    legal = list(task.legal_actions(state))
    if not legal:
        raise ValueError("state has no legal actions")
    costs = np.full(task.n_actions, np.nan)
    if config.cost_mode == "approximation":
        for a in legal:
            costs[a] = estimate_action_cost(policy, state, a, task, config, rng)
    else:
        # every sibling action replays the same stream (common random numbers)
        tie_seed = int(rng.integers(2**63 - 1))
        for a in legal:
            costs[a] = estimate_action_cost(policy, state, a, task, config, derive_rng(tie_seed))
    costs[legal] -= np.min(costs[legal])
    return costs


def _as_example(features, costs) -> CostSensitiveExample:
    legal = ~np.isnan(costs)
    top = float(np.max(costs[legal]))
    filled = np.where(legal, costs, top)
    mask = None if legal.all() else tuple(bool(x) for x in legal)
    return CostSensitiveExample(features, tuple(float(c) for c in filled), mask)


def generate_examples(policy, instance, task, config: SearnConfig, rng):
    """Roll ``policy`` over one labeled instance; one example per decision state.

    States with a single legal action carry no decision and are skipped.
    """
    if not task.has_reference(instance):
        raise MissingReference("training instances need reference labels")
    traj = rollout(policy, task.initial_state(instance), task, rng)
    out = []
    for state in traj.states:
        if len(task.legal_actions(state)) < 2:
            continue
        costs = regret_costs(policy, state, task, config, rng)
        out.append(_as_example(task.features(state), costs))
    return out


# -- the loop ---------------------------------------------------------------


def analytic_beta(T: int) -> float:
    return 1.0 / T**3


def analytic_iterations(T: int) -> int:
    return max(1, math.ceil(2 * T**3 * math.log(T))) if T > 1 else 1


def mean_rollout_loss(policy, instances, task, seed: int = 0) -> float:
    """Mean loss of ``policy`` over labeled instances, one rollout each.

    Instance ``i`` always uses stream ``(seed, i)``, so comparing policies
    with the same seed uses common random numbers.
    """
    total = 0.0
    for i, inst in enumerate(instances):
        traj = rollout(policy, task.initial_state(inst), task, derive_rng(seed, _SEARCH, i))
        total += traj.loss
    return total / len(instances)


def beta_line_search(dev, candidates, current, learned, task, seed: int = 0) -> float:
    """Choose the interpolation weight minimizing dev-set loss.

    Each candidate's mixture is evaluated with the initial policy stripped,
    since that is what would be deployed; a candidate whose mixture has no
    learned part is skipped.  Ties break toward the larger ``beta``.
    """
    if not dev:
        raise EmptyInput("line search needs a dev set")
    candidates = sorted(set(float(b) for b in candidates), reverse=True)
    if not candidates:
        raise EmptyInput("line search needs at least one candidate")
    if len(candidates) == 1:
        return candidates[0]
    best, best_loss = candidates[0], math.inf
    for beta in candidates:
        try:
            policy = strip_initial_policy(interpolate(current, learned, beta))
        except NoLearnedComponent:
            continue
        loss = mean_rollout_loss(policy, dev, task, seed)
        if loss < best_loss:
            best, best_loss = beta, loss
    return best


def search_task(task, beam_width: int = 1):
    """The space policies act in: ``task`` itself, or its beam wrapping."""
    return beam_wrap(task, beam_width) if beam_width > 1 else task


def predict_outputs(policy, instances, task, beam_width: int = 1, seed: int = 0):
    """Decode every instance with ``policy``; instance ``i`` uses stream ``(seed, i)``."""
    space = search_task(task, beam_width)
    return [
        rollout(policy, space.initial_state(inst), space, derive_rng(seed, _SEARCH, i)).final_output
        for i, inst in enumerate(instances)
    ]


def _max_horizon(task, instances) -> int:
    return max(task.horizon(inst) for inst in instances)


def searn_train(dataset, task, learner_kind="perceptron", config: SearnConfig | None = None, dev=None, log=None):
    """Train a policy; returns ``(stripped MixturePolicy, [IterationReport, ...])``.

    ``dataset`` and ``dev`` are lists of task instances with references.
    """
    config = config or SearnConfig()
    dataset = list(dataset)
    if not dataset:
        raise EmptyInput("training set is empty")
    task = search_task(task, config.beam_width)
    log = log if isinstance(log, ProgressLog) else ProgressLog(log)
    T = _max_horizon(task, dataset)
    mode = config.beta_mode
    if mode == "auto":
        mode = "dev_line_search" if dev else "fixed"
    if mode == "dev_line_search" and not dev:
        raise EmptyInput("dev_line_search needs a dev set")
    max_iter = config.max_iterations
    if mode == "analytic":
        fixed_beta = analytic_beta(T)
        if max_iter is None:
            max_iter = analytic_iterations(T)
    else:
        fixed_beta = config.beta
        if max_iter is None:
            raise ValueError("max_iterations is required unless beta_mode is 'analytic'")

    policy = MixturePolicy.initial()
    reports = []
    cs_total = 0.0
    it = 0
    while it < max_iter and policy.pi_weight >= config.pi_weight_stop_threshold:
        it += 1
        examples = []
        for idx, inst in enumerate(dataset):
            examples += generate_examples(policy, inst, task, config, derive_rng(config.seed, _GEN, it, idx))
        if not examples:
            raise EmptyInput("no decision states in the training set")
        clf = train_cost_sensitive(examples, learner_kind, config.learner, derive_rng(config.seed, _TRAIN, it))
        cs = classifier_cs_loss(clf, examples)
        cs_total += cs
        if mode == "dev_line_search":
            beta = beta_line_search(dev, config.beta_grid, policy, clf, task, seed=config.seed)
        else:
            beta = fixed_beta
        policy = interpolate(policy, clf, beta)
        dev_loss = None
        if dev and policy.learned:
            dev_loss = mean_rollout_loss(strip_initial_policy(policy), dev, task, config.seed)
        report = IterationReport(it, cs, policy.pi_weight, len(examples), cs_total / it, beta, dev_loss)
        reports.append(report)
        log.emit("iteration", **asdict(report))
    final = strip_initial_policy(policy)
    return final, reports


def bound_estimates(dataset, task, reports) -> dict:
    """Training-set estimates feeding the iteration-count bound report.

    ``L_pi`` is the initial policy's mean loss and ``c_max`` the mean of
    the per-instance maximum loss; both are estimates, not certificates.
    """
    dataset = list(dataset)
    pi = MixturePolicy.initial()
    L_pi = mean_rollout_loss(pi, dataset, task)
    c_max = float(np.mean([task.max_loss(inst) for inst in dataset]))
    ell_avg = reports[-1].running_avg_loss if reports else 0.0
    return {
        "T": _max_horizon(task, dataset),
        "c_max": c_max,
        "L_pi": L_pi,
        "ell_avg": ell_avg,
        "iterations": len(reports),
    }


__all__ = [
    "COST_MODES",
    "INITIAL_POLICY",
    "IterationReport",
    "ProgressLog",
    "SearnConfig",
    "analytic_beta",
    "analytic_iterations",
    "beta_line_search",
    "bound_estimates",
    "estimate_action_cost",
    "generate_examples",
    "mean_rollout_loss",
    "predict_outputs",
    "regret_costs",
    "search_task",
    "searn_train",
]
