"""Exhaustive oracles: primal optimum, dual optimum and the cost/value frontier.

All three read the full value tables of ``f`` and ``g`` (one pass over the
``2**n`` subsets, built incrementally by the function families).
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .setfn import GroundSetTooLarge, SetFunction

EXACT_CAP = 20


class Infeasible(ValueError):
    pass


@dataclass(frozen=True)
class ExactResult:
    best_set: int
    best_value: float
    best_cost: float
    feasible_count: int
    enumerated: int


def _tables(f: SetFunction, g: SetFunction, cap: int):
    if f.n != g.n:
        raise ValueError("objective and cost live on different ground sets")
    if f.n > cap:
        raise GroundSetTooLarge(f"n={f.n} exceeds exhaustive-search cap {cap}")
    return f.table(), g.table()


def primal_opt(f: SetFunction, g: SetFunction, theta: float, cap: int = EXACT_CAP) -> ExactResult:
    """``max f(S)`` subject to ``g(S) <= theta``; ties prefer lower cost, then lower mask."""
    F, G = _tables(f, g, cap)
    feasible = np.flatnonzero(G <= theta)   # never empty: g(0) = 0
    order = np.lexsort((feasible, G[feasible], -F[feasible]))
    best = int(feasible[order[0]])
    return ExactResult(best, float(F[best]), float(G[best]), int(feasible.size), int(F.size))


def dual_opt(f: SetFunction, g: SetFunction, tau: float, cap: int = EXACT_CAP) -> ExactResult:
    """``min g(S)`` subject to ``f(S) >= tau``; ties prefer higher value, then lower mask."""
    F, G = _tables(f, g, cap)
    feasible = np.flatnonzero(F >= tau)
    if feasible.size == 0:
        raise Infeasible(f"target {tau} exceeds f(V) = {F[-1]}")
    order = np.lexsort((feasible, -F[feasible], G[feasible]))
    best = int(feasible[order[0]])
    return ExactResult(best, float(G[best]), float(G[best]), int(feasible.size), int(F.size))


@dataclass(frozen=True)
class FrontierPoint:
    theta: float
    f_opt: float
    witness_mask: int


def pareto_frontier(f: SetFunction, g: SetFunction, grid: Sequence[float],
                    cap: int = EXACT_CAP) -> list[FrontierPoint]:
    """Best objective within each cost threshold of ``grid`` (rows kept in grid order)."""
    F, G = _tables(f, g, cap)
    idx = np.arange(F.size)
    order = np.lexsort((idx, -F, G))        # by cost; within equal cost best value first
    g_sorted = G[order]
    f_sorted = F[order]
    run_best = np.maximum.accumulate(f_sorted)
    # position of the running maximum (first time it was attained)
    improved = np.concatenate(([True], f_sorted[1:] > run_best[:-1]))
    arg_pos = np.maximum.accumulate(np.where(improved, np.arange(F.size), 0))
    out = []
    for theta in grid:
        pos = int(np.searchsorted(g_sorted, theta, side="right")) - 1
        if pos < 0:
            out.append(FrontierPoint(float(theta), 0.0, 0))
            continue
        out.append(FrontierPoint(float(theta), float(run_best[pos]), int(order[arg_pos[pos]])))
    return out


def frontier_f_at(f: SetFunction, g: SetFunction, thetas: Sequence[float]) -> np.ndarray:
    return np.array([p.f_opt for p in pareto_frontier(f, g, thetas)])


def write_frontier_csv(path, points: Sequence[FrontierPoint]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["theta", "f_opt", "witness_mask"])
        for p in points:
            w.writerow([repr(p.theta), repr(p.f_opt), p.witness_mask])
