"""Independent reference computations used by the test-suite.

Nothing here imports the package's own enumeration or reduction code;
each oracle recomputes its quantity from the definition by a different
route (brute force, numerical integration, explicit Markov chains).
"""

from __future__ import annotations

import itertools
import math

import numpy as np
from scipy import integrate, optimize


# -- weighted all pairs -----------------------------------------------------


def wap_pair_weight(costs, i, j):
    """``|int_{c_i}^{c_j} dt / #{b : c_b <= t}|`` by adaptive quadrature."""
    costs = np.asarray(costs, dtype=float)
    lo, hi = sorted((costs[i], costs[j]))
    if lo == hi:
        return 0.0

    def density(t):
        return 1.0 / np.count_nonzero(costs <= t + 1e-15)

    pts = sorted(set(float(c) for c in costs if lo < c < hi))
    val, _ = integrate.quad(density, lo, hi, points=pts or None, limit=200, epsabs=1e-13, epsrel=1e-12)
    return val


# -- losses -----------------------------------------------------------------


def hamming_recount(y, y_hat):
    n = 0
    for k in range(len(y)):
        if y[k] != y_hat[k]:
            n += 1
    return n


def chunks_of(labels):
    """Spans ``(start, length, type)`` of a BIO sequence, written as a state machine."""
    out = []
    cur = None
    for i, lab in enumerate(list(labels) + ["O"]):
        if lab == "O":
            if cur:
                out.append((cur[0], i - cur[0], cur[1]))
            cur = None
            continue
        tag, typ = lab.split("-", 1)
        if tag == "I" and cur is not None and cur[1] == typ:
            continue
        if cur:
            out.append((cur[0], i - cur[0], cur[1]))
        cur = (i, typ)
    return set(out)


def f1_cost(gold_labels, pred_labels):
    g, p = chunks_of(gold_labels), chunks_of(pred_labels)
    if not g and not p:
        return 0.0
    return 1.0 - 2.0 * len(g & p) / (len(g) + len(p))


# -- brute-force optimal completions -----------------------------------------


def best_completion_actions(task, state):
    """Actions that begin some minimum-loss completion, by full enumeration."""

    def best(s):
        if task.is_terminal(s):
            return task.loss(s)
        return min(best(task.next_state(s, a)) for a in task.legal_actions(s))

    vals = {a: best(task.next_state(state, a)) for a in task.legal_actions(state)}
    m = min(vals.values())
    return {a for a, v in vals.items() if v <= m + 1e-12}


# -- exact expectations by enumerating every randomization path -------------


def exact_expected_loss(components, state, task):
    """Expected final loss of the mixture ``[(policy, weight), ...]`` from ``state``.

    Enumerates explicit sequences of component choices, one per step,
    rather than memoizing over states.
    """
    total = 0.0
    stack = [(state, 1.0)]
    while stack:
        s, p = stack.pop()
        if task.is_terminal(s):
            total += p * task.loss(s)
            continue
        for pol, w in components:
            if w == 0:
                continue
            a = pol.act(s, task)
            stack.append((task.next_state(s, a), p * w))
    return total


def exact_action_cost(components, state, action, task):
    return exact_expected_loss(components, task.next_state(state, action), task)


# -- logistic regression -----------------------------------------------------


def logistic_reference(X, y, importance, l2):
    """Full-batch L-BFGS optimum of the mean weighted log-loss + l2/2 |w|^2.

    The bias is not regularized.  Returns ``(w, b, objective)``.
    """
    X = np.asarray(X, float)
    y = np.asarray(y, float)
    s = np.asarray(importance, float)
    n, d = X.shape

    def f(theta):
        w, b = theta[:d], theta[d]
        m = y * (X @ w + b)
        loss = np.logaddexp(0.0, -m)
        sig = np.exp(-np.logaddexp(0.0, m))  # 1 / (1 + e^m)
        g = -(s * y * sig)
        obj = (s * loss).sum() / n + 0.5 * l2 * (w @ w)
        grad_w = X.T @ g / n + l2 * w
        grad_b = g.sum() / n
        return obj, np.concatenate([grad_w, [grad_b]])

    res = optimize.minimize(f, np.zeros(d + 1), jac=True, method="L-BFGS-B", options={"gtol": 1e-12, "ftol": 1e-15, "maxiter": 10000})
    return res.x[:d], res.x[d], res.fun


def central_difference(fun, x, h=1e-6):
    x = np.asarray(x, float)
    g = np.zeros_like(x)
    for k in range(len(x)):
        e = np.zeros_like(x)
        e[k] = h
        g[k] = (fun(x + e) - fun(x - e)) / (2 * h)
    return g


# -- self-conditioned error chain --------------------------------------------


def markov_expected_hamming(eps, T):
    """Expected number of wrong positions among ``T + 1`` by propagating
    the two-state (correct / wrong) distribution step by step."""
    p_wrong = 0.0
    total = 0.0
    for _ in range(T + 1):
        total += p_wrong
        p_wrong = p_wrong * (1 - eps) + (1 - p_wrong) * eps
    return total


def log_horizon_bound_by_hand(T, ell, c_max, L_pi):
    return L_pi + 2 * T * ell * math.log(T) + (1 + math.log(T)) * c_max / T


def all_label_sequences(n_labels, T):
    return list(itertools.product(range(n_labels), repeat=T))
