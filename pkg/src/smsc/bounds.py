"""Closed-form approximation guarantees for ratio-marginal greedy.

Exponentials of near-one bases are evaluated in log space (``log1p`` /
``expm1``) so that submodular curvature close to 1 stays accurate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class BoundInputs:
    gamma: float
    c: float = 0.0
    beta: float = 1.0
    gamma_strict: float | None = None

    def __post_init__(self):
        _gamma(self.gamma)
        _curv(self.c)
        if self.gamma_strict is not None:
            _gamma(self.gamma_strict)
        if not self.beta > 0:
            raise ValueError("beta must be positive")


def _gamma(gamma: float) -> float:
    if not 0.0 <= gamma < 1.0:
        raise ValueError(f"supermodular curvature must lie in [0, 1), got {gamma}")
    return float(gamma)


def _curv(c: float) -> float:
    if not 0.0 <= c < 1.0:
        raise ValueError(f"submodular curvature must lie in [0, 1), got {c}")
    return float(c)


def bound_beta(gamma: float, beta: float) -> float:
    """``1 - exp(-beta (1 - gamma))``."""
    _gamma(gamma)
    if not beta > 0:
        raise ValueError("beta must be positive")
    return -math.expm1(-beta * (1.0 - gamma))


def bound_main(gamma: float) -> float:
    """Objective guarantee at the first overflow: ``1 - exp(-(1 - gamma))``."""
    return bound_beta(gamma, 1.0)


def bound_overflow_cap(gamma: float) -> float:
    """Worst-case budget overflow factor ``(2 - gamma) / (1 - gamma)``."""
    _gamma(gamma)
    return (2.0 - gamma) / (1.0 - gamma)


def _curv_f_log_residual(c: float, gamma: float) -> float:
    # log of (1 - (1-c)(1-gamma)) ** (1 / (1-c)); -inf when the base is 0
    base = (1.0 - c) * (1.0 - gamma)
    if base >= 1.0:
        return -math.inf
    return math.log1p(-base) / (1.0 - c)


def bound_curv_f(c: float, gamma: float) -> float:
    """``1 - (1 - (1-c)(1-gamma)) ** (1/(1-c))``."""
    _curv(c)
    _gamma(gamma)
    return -math.expm1(_curv_f_log_residual(c, gamma))


def bound_beyond(c: float, gamma: float, beta_plus: float) -> float:
    """Guarantee after continuing greedy to ``g(S_K) = beta_plus * theta``.

    At ``gamma = 0`` the closed form is singular; its limit
    ``1 - exp(-(beta_plus - 1)) * c ** (1/(1-c))`` is returned instead.
    """
    _curv(c)
    _gamma(gamma)
    if beta_plus < 1:
        raise ValueError("beta_plus must be at least 1")
    log_res = _curv_f_log_residual(c, gamma)
    if log_res == -math.inf:
        return 1.0
    if gamma < 1e-15:
        log_growth = -(beta_plus - 1.0)
    else:
        # with a = (1-gamma)/gamma the base (beta+a)/(1+a) is 1 + (beta-1)*gamma
        log_growth = -(1.0 - gamma) * math.log1p((beta_plus - 1.0) * gamma) / gamma
    return -math.expm1(log_growth + log_res)


def bound_dual_cost(beta_primal: float, epsilon: float, B_star: float) -> float:
    """Cost guarantee of binary search on budgets: ``beta (1 + eps/B*) B*``."""
    if not B_star > 0:
        raise ValueError("B* must be positive")
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    if beta_primal < 1:
        raise ValueError("primal beta must be at least 1")
    return beta_primal * (1.0 + epsilon / B_star) * B_star


def bound_table(gamma: float, c: float = 0.0, beta: float = 1.0) -> dict[str, float]:
    """Every guarantee for one ``(c, gamma, beta)`` point (``beta`` doubles as ``beta_plus``)."""
    return {
        "main": bound_main(gamma),
        "overflow_cap": bound_overflow_cap(gamma),
        "beta": bound_beta(gamma, beta),
        "curv_f": bound_curv_f(c, gamma),
        "beyond": bound_beyond(c, gamma, max(beta, 1.0)),
    }
