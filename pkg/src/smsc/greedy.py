"""Ratio-marginal greedy and the baseline heuristics it is compared against."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .setfn import SetFunction

TIE_RTOL = 1e-12


class EmptyAfterPreprocessing(ValueError):
    pass


@dataclass(frozen=True)
class BeforeOverflow:
    """Return the last set that still fits the budget."""

    name = "before_overflow"


@dataclass(frozen=True)
class FirstOverflow:
    """Return the first set whose cost exceeds the budget."""

    name = "first_overflow"


@dataclass(frozen=True)
class ContinueTo:
    """Keep adding elements until ``g(S) >= beta_plus * theta``."""

    beta_plus: float
    name = "continue_to"

    def __post_init__(self):
        if not self.beta_plus > 1:
            raise ValueError("beta_plus must exceed 1")


StopPolicy = BeforeOverflow | FirstOverflow | ContinueTo


@dataclass(frozen=True)
class Step:
    element: int
    f: float
    g: float
    ratio: float


@dataclass
class GreedyTrace:
    steps: list[Step]
    theta: float
    dropped: list[int]
    policy: StopPolicy
    returned_prefix: int
    algorithm: str = "ratio_marginal"
    overflow_step: int | None = None   # prefix length of the first set with g > theta

    @property
    def selected(self) -> list[int]:
        return [s.element for s in self.steps[:self.returned_prefix]]

    @property
    def mask(self) -> int:
        return prefix_mask(self, self.returned_prefix)

    @property
    def f_values(self) -> list[float]:
        return [0.0] + [s.f for s in self.steps]

    @property
    def g_values(self) -> list[float]:
        return [0.0] + [s.g for s in self.steps]

    @property
    def value(self) -> float:
        return self.f_values[self.returned_prefix]

    @property
    def cost(self) -> float:
        return self.g_values[self.returned_prefix]


def prefix_mask(trace: GreedyTrace, i: int) -> int:
    mask = 0
    for s in trace.steps[:i]:
        mask |= 1 << s.element
    return mask


def empirical_beta(trace: GreedyTrace, step: int) -> float:
    """``g(S_step) / theta`` where ``S_step`` is the prefix of length ``step``."""
    if not 0 <= step <= len(trace.steps):
        raise IndexError(f"step {step} outside trace of length {len(trace.steps)}")
    return trace.g_values[step] / trace.theta


def _best_ratio(df: np.ndarray, dg: np.ndarray) -> int:
    """Index of the largest ``df/dg``; zero-cost gains win outright, ties go to the front."""
    free = dg <= 0
    if free.any():
        idx = np.flatnonzero(free)
        top = df[idx].max()
        return int(idx[np.flatnonzero(df[idx] >= top * (1 - TIE_RTOL))[0]])
    b = int(np.argmax(df / dg))
    lhs = df * dg[b]          # cross-multiplied comparison against the leader
    rhs = df[b] * dg
    tied = lhs >= rhs - TIE_RTOL * np.maximum(np.abs(lhs), np.abs(rhs))
    return int(np.flatnonzero(tied)[0])


def _best_max(score: np.ndarray) -> int:
    top = score.max()
    return int(np.flatnonzero(score >= top - TIE_RTOL * abs(top))[0])


def _run(f: SetFunction, g: SetFunction, theta: float, policy: StopPolicy, chooser,
         algorithm: str) -> GreedyTrace:
    if not theta > 0:
        raise ValueError("theta must be positive")
    n = f.n
    if g.n != n:
        raise ValueError("objective and cost live on different ground sets")
    single = g.gains(0, range(n))
    dropped = [v for v in range(n) if single[v] > theta]
    pool = [v for v in range(n) if single[v] <= theta]
    if not pool:
        raise EmptyAfterPreprocessing("every element alone exceeds the budget")

    steps: list[Step] = []
    S, f_S, g_S = 0, 0.0, 0.0
    overflow = None
    limit = policy.beta_plus * theta if isinstance(policy, ContinueTo) else None
    while pool:
        df = np.asarray(f.gains(S, pool), dtype=float)
        live = df > 0
        if not live.any():
            break
        cand = [v for v, ok in zip(pool, live) if ok]
        df = df[live]
        dg = np.asarray(g.gains(S, cand), dtype=float)
        pick = chooser(S, cand, df, dg)
        v = cand[pick]
        S |= 1 << v
        f_S, g_S = f.value(S), g.value(S)
        ratio = math.inf if dg[pick] <= 0 else df[pick] / dg[pick]
        steps.append(Step(v, float(f_S), float(g_S), float(ratio)))
        pool.remove(v)
        if g_S > theta and overflow is None:
            overflow = len(steps)
            if not isinstance(policy, ContinueTo):
                break
        if limit is not None and g_S >= limit:
            break

    if isinstance(policy, BeforeOverflow) and overflow is not None:
        returned = overflow - 1
    else:
        returned = len(steps)
    return GreedyTrace(steps, theta, dropped, policy, returned, algorithm, overflow)


def run_ratio_marginal(f: SetFunction, g: SetFunction, theta: float,
                       policy: StopPolicy = FirstOverflow()) -> GreedyTrace:
    """Greedy on ``f(v|S) / g(v|S)``.

    Elements whose singleton cost already exceeds ``theta`` are dropped first.
    Candidates with zero objective gain are never taken; zero-cost gains count
    as an infinite ratio.  Ties go to the lowest element index.
    """
    return _run(f, g, theta, policy, lambda S, cand, df, dg: _best_ratio(df, dg), "ratio_marginal")


BASELINES = ("greedy_f", "greedy_g", "ratio_fg", "random")


def run_baseline(kind: str, f: SetFunction, g: SetFunction, theta: float,
                 policy: StopPolicy = FirstOverflow(), seed: int = 0) -> GreedyTrace:
    """Baseline heuristics sharing the preprocessing, stopping and tie rules.

    ``greedy_f`` maximises ``f(v|S)``, ``greedy_g`` minimises ``g(v|S)``,
    ``ratio_fg`` maximises ``f(S+v) / g(S+v)`` and ``random`` picks uniformly
    (deterministic in ``seed``).
    """
    if kind == "greedy_f":
        chooser = lambda S, cand, df, dg: _best_max(df)
    elif kind == "greedy_g":
        chooser = lambda S, cand, df, dg: _best_max(-dg)
    elif kind == "ratio_fg":
        def chooser(S, cand, df, dg):
            f_new = f.value(S) + df
            g_new = g.value(S) + dg
            return _best_ratio(f_new, g_new)
    elif kind == "random":
        rng = np.random.default_rng(seed)
        chooser = lambda S, cand, df, dg: int(rng.integers(len(cand)))
    else:
        raise ValueError(f"unknown baseline {kind!r}; expected one of {BASELINES}")
    return _run(f, g, theta, policy, chooser, kind)


def run_algorithm(name: str, f, g, theta, policy, seed: int = 0) -> GreedyTrace:
    if name == "ratio_marginal":
        return run_ratio_marginal(f, g, theta, policy)
    return run_baseline(name, f, g, theta, policy, seed)


TRACE_COLUMNS = ["algorithm", "step", "element", "f", "g", "ratio", "beta"]


def trace_rows(trace: GreedyTrace) -> list[dict]:
    return [{"algorithm": trace.algorithm, "step": i, "element": s.element, "f": repr(s.f),
             "g": repr(s.g), "ratio": repr(s.ratio), "beta": repr(s.g / trace.theta)}
            for i, s in enumerate(trace.steps, start=1)]


def write_traces_csv(path, traces: Sequence[GreedyTrace]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=TRACE_COLUMNS)
        w.writeheader()
        for t in traces:
            w.writerows(trace_rows(t))
