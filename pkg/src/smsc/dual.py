"""Cost minimisation under a coverage target via binary search on the budget."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable

from . import bounds
from .exact import primal_opt
from .greedy import BeforeOverflow, EmptyAfterPreprocessing, StopPolicy, run_ratio_marginal
from .setfn import SetFunction

log = logging.getLogger(__name__)

Primal = Callable[[float], int]


class TargetUnreachable(ValueError):
    pass


class PrimalFailure(RuntimeError):
    pass


@dataclass
class DualConfig:
    tau: float
    epsilon: float | None = None      # default g(V) * 2**-20
    alpha: float = 1.0
    primal: Primal | None = None      # default: ratio-marginal greedy, BeforeOverflow

    def __post_init__(self):
        if self.tau < 0:
            raise ValueError("tau must be nonnegative")
        if self.epsilon is not None and not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if not 0 < self.alpha <= 1:
            raise ValueError("alpha must lie in (0, 1]")


@dataclass
class DualResult:
    set: int
    f: float
    g: float
    budget_found: float
    iterations: int
    trace: list[tuple[float, float, bool]] = field(default_factory=list)   # (budget, f, accepted)
    non_monotone: bool = False


def greedy_primal(f: SetFunction, g: SetFunction, policy: StopPolicy = BeforeOverflow()) -> Primal:
    def run(budget: float) -> int:
        if budget <= 0:
            return 0
        try:
            return run_ratio_marginal(f, g, budget, policy).mask
        except EmptyAfterPreprocessing:
            return 0
    return run


def exhaustive_primal(f: SetFunction, g: SetFunction) -> Primal:
    return lambda budget: primal_opt(f, g, budget).best_set


def choose_alpha(gamma: float, c: float | None = None) -> float:
    """Strongest available objective factor for the greedy primal."""
    if c is None or c >= 1.0:
        return bounds.bound_main(gamma)
    return bounds.bound_curv_f(c, gamma)


def solve_dual(f: SetFunction, g: SetFunction, config: DualConfig) -> DualResult:
    """Bisect the budget ``B`` until ``R - L <= epsilon``, keeping the last accepted set.

    A probe is accepted when the primal set reaches ``alpha * tau``.  If no
    probe is accepted, one last probe at ``R`` decides.
    """
    full = (1 << f.n) - 1
    target = config.alpha * config.tau
    if f.value(full) < target:
        raise TargetUnreachable(f"f(V) = {f.value(full)} is below alpha*tau = {target}")
    primal = config.primal or greedy_primal(f, g)
    L, R = 0.0, g.value(full)
    eps = config.epsilon if config.epsilon is not None else R * 2.0 ** -20
    if eps <= 0:
        eps = 2.0 ** -20

    best = None
    trace: list[tuple[float, float, bool]] = []
    while R - L > eps:
        B = (L + R) / 2
        S = primal(B)
        val = f.value(S)
        ok = val >= target
        trace.append((B, val, ok))
        if ok:
            R, best = B, S
        else:
            L = B
    if best is None:
        S = primal(R)
        val = f.value(S)
        ok = val >= target
        trace.append((R, val, ok))
        if not ok:
            raise PrimalFailure(f"primal output at the full budget {R} misses alpha*tau = {target}")
        best = S

    non_mono = _non_monotone(trace)
    if non_mono:
        log.warning("primal value is not monotone in the budget; bisection may mis-bracket")
    return DualResult(best, f.value(best), g.value(best), R, len(trace), trace, non_mono)


def _non_monotone(trace: list[tuple[float, float, bool]], tol: float = 1e-12) -> bool:
    # bisection itself never probes a larger budget after an acceptance, so
    # compare the primal values instead: a larger budget must not do worse
    probes = sorted((b, v) for b, v, _ in trace)
    vals = [v for _, v in probes]
    return any(a > b + tol * max(1.0, abs(a)) for a, b in zip(vals, vals[1:]))


def iteration_bound(gV: float, eps: float) -> int:
    return max(0, math.ceil(math.log2(gV / eps))) if gV > eps else 0
