"""Benchmark harness: algorithm comparisons and theorem fuzzing against exact oracles."""
from __future__ import annotations

import hashlib
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import bounds
from .exact import FrontierPoint, pareto_frontier, primal_opt, write_frontier_csv
from .families import instance_to_dict, make_random_instance
from .greedy import (ContinueTo, FirstOverflow, GreedyTrace, run_algorithm,
                     trace_rows, write_traces_csv)
from .setfn import PAIR_CAP, SetFunction, curvature_report

ALGORITHMS = ("ratio_marginal", "greedy_f", "greedy_g", "ratio_fg", "random")
FUZZ_TOL = 1e-9


def config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:10]


# ---------------------------------------------------------------------------
# comparisons


def step_value(trace: GreedyTrace, x: float) -> float:
    """``f`` of the longest prefix whose cost is at most ``x`` (step interpolation)."""
    g = np.asarray(trace.g_values)
    i = int(np.searchsorted(g, x, side="right")) - 1
    return trace.f_values[max(i, 0)]


def area_under_curve(trace: GreedyTrace, cap: float) -> float:
    """Integral of the step curve ``x -> step_value(trace, x)`` over ``[0, cap]``."""
    g = np.minimum(np.asarray(trace.g_values), cap)
    f = np.asarray(trace.f_values)
    widths = np.diff(np.append(g, cap))
    return float(np.sum(f * np.clip(widths, 0.0, None)))


@dataclass
class BenchmarkReport:
    instance: dict
    budget_cap: float
    theta: float
    curves: dict[str, GreedyTrace]
    frontier: list[FrontierPoint] | None = None
    curvature: dict | None = None
    bounds: list[dict] = field(default_factory=list)
    violations: list[dict] = field(default_factory=list)

    def auc(self) -> dict[str, float]:
        return {k: area_under_curve(t, self.budget_cap) for k, t in self.curves.items()}

    def frontier_ratios(self, algorithm: str = "ratio_marginal") -> list[tuple[float, float, float]]:
        """``(cost, f_alg, f_opt)`` at every realized cost of ``algorithm`` within the cap."""
        if self.frontier is None:
            raise ValueError("report was built without the exact frontier")
        opt = {p.theta: p.f_opt for p in self.frontier}
        tr = self.curves[algorithm]
        return [(g, f, opt[g]) for f, g in zip(tr.f_values, tr.g_values) if g <= self.budget_cap]

    def to_json(self) -> dict:
        return {
            "instance": self.instance,
            "budget_cap": self.budget_cap,
            "theta": self.theta,
            "curves": {k: trace_rows(t) for k, t in self.curves.items()},
            "auc": self.auc(),
            "frontier": None if self.frontier is None else [asdict(p) for p in self.frontier],
            "curvature": self.curvature,
            "bounds": self.bounds,
            "violations": self.violations,
        }


def run_comparison(f: SetFunction, g: SetFunction, algorithms: Sequence[str] = ALGORITHMS,
                   budget_cap: float | None = None, *, budget_fraction: float = 0.5,
                   theta: float | None = None, with_opt: bool = False, with_curvature: bool = False,
                   seed: int = 0, descriptor: dict | None = None) -> BenchmarkReport:
    """Run every algorithm until its cost reaches ``budget_cap``.

    ``budget_cap`` defaults to ``budget_fraction * g(V)``; the reference budget
    ``theta`` used for preprocessing defaults to half the cap.  For debate
    instances ``f`` already holds a fixed scenario batch, so all algorithms see
    the same randomness.
    """
    full = (1 << f.n) - 1
    cap = float(budget_cap if budget_cap is not None else budget_fraction * g.value(full))
    if not cap > 0:
        raise ValueError("budget cap must be positive")
    theta = float(theta if theta is not None else cap / 2)
    policy = ContinueTo(cap / theta)
    curves = {name: run_algorithm(name, f, g, theta, policy, seed) for name in algorithms}

    frontier = None
    if with_opt:
        grid = sorted({x for t in curves.values() for x in t.g_values if x <= cap} | {cap})
        frontier = pareto_frontier(f, g, grid)

    curv, bound_rows = None, []
    if with_curvature and f.n <= PAIR_CAP:
        rep = curvature_report(f, g)
        curv = rep.as_dict()
        if "ratio_marginal" in curves:
            bound_rows = _bounds_along(curves["ratio_marginal"], rep.gamma_weak, rep.c_sub)
    return BenchmarkReport(descriptor or {}, cap, theta, curves, frontier, curv, bound_rows)


def _bounds_along(trace: GreedyTrace, gamma: float, c: float) -> list[dict]:
    rows = []
    if gamma >= 1:
        return rows
    for step, gi in enumerate(trace.g_values[1:], start=1):
        beta = gi / trace.theta
        row = {"step": step, "beta": beta}
        if beta <= 1:
            row["before_overflow"] = bounds.bound_beta(gamma, beta) if beta > 0 else 0.0
        elif c < 1:
            row["beyond"] = bounds.bound_beyond(c, gamma, beta)
        rows.append(row)
    return rows


def write_report(report: BenchmarkReport, outdir, seed: int, config: dict) -> dict[str, Path]:
    """Write curve CSV, optional frontier CSV and JSON report; names embed seed and config hash."""
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    stem = f"seed{seed}_{config_hash(config)}"
    paths = {"curves": out / f"curves_{stem}.csv", "report": out / f"report_{stem}.json"}
    write_traces_csv(paths["curves"], list(report.curves.values()))
    if report.frontier is not None:
        paths["frontier"] = out / f"frontier_{stem}.csv"
        write_frontier_csv(paths["frontier"], report.frontier)
    paths["report"].write_text(json.dumps(report.to_json(), indent=2, sort_keys=True))
    return paths


# ---------------------------------------------------------------------------
# theorem fuzzing


@dataclass
class FuzzResult:
    violations: list[dict]
    advisory: list[dict]
    checks: dict[str, int]
    instances: int

    @property
    def ok(self) -> bool:
        return not self.violations


def _instance(seed: int, size_range: tuple[int, int]):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(size_range[0], size_range[1] + 1))
    f, g = make_random_instance(seed, n, private_atoms=bool(rng.integers(2)))
    singles = g.gains(0, range(n))
    lo, hi = float(np.min(singles)), g.value((1 << n) - 1)
    theta = lo * (hi / lo) ** float(rng.uniform(0.0, 1.0))
    return f, g, theta


def fuzz_instance(seed: int, size_range: tuple[int, int] = (5, 10), bound_scale: float = 1.0,
                  beta_plus: float = 3.0) -> tuple[list[dict], list[dict], dict[str, int]]:
    """Check every applicable guarantee on one random instance.

    All inequalities are compared after normalising ``f`` by ``f*`` and ``g``
    by ``theta`` (or ``g*``), with absolute tolerance ``FUZZ_TOL``.
    ``bound_scale`` inflates every bound and exists to test the harness.
    """
    f, g, theta = _instance(seed, size_range)
    curv = curvature_report(f, g)
    gam, gam_s, c = curv.gamma_weak, curv.gamma_strict, curv.c_sub
    opt = primal_opt(f, g, theta)
    f_star, g_star = opt.best_value, opt.best_cost
    viol, adv = [], []
    checks = {k: 0 for k in ("boundary", "overflow_cap", "before_overflow", "curv_f", "curv_recur",
                             "strict_curvature", "beyond_overflow")}
    if f_star <= 0:
        return viol, adv, checks

    def fail(where, theorem, **details):
        where.append({"theorem": theorem, "seed": seed, "details": details,
                      "curvature": {"gamma": gam, "gamma_strict": gam_s, "c": c},
                      "opt": {"f": f_star, "g": g_star},
                      "instance": instance_to_dict(f, g, theta, seed)})

    def below(lhs, rhs):
        return lhs < rhs - FUZZ_TOL

    tr = run_algorithm("ratio_marginal", f, g, theta, FirstOverflow())
    F = [x / f_star for x in tr.f_values]
    G = [x / theta for x in tr.g_values]
    main = bound_scale * bounds.bound_main(gam) if gam < 1 else 0.0
    k = tr.overflow_step

    # (a) overflow characterisation
    checks["boundary"] += 1
    if k is None:
        if below(F[-1], bound_scale):
            fail(viol, "boundary", note="no overflow and f below f*", f=F[-1])
    elif gam < 1:
        beta = G[k]
        alt = bound_scale * bounds.bound_beta(gam, beta)
        if below(F[k - 1], main) and below(F[k], alt):
            fail(viol, "boundary", step=k, beta=beta, f_prev=F[k - 1], f_k=F[k], main=main, alt=alt)

    # (b) overflow cap
    if k is not None and gam < 1:
        checks["overflow_cap"] += 1
        cap = bounds.bound_overflow_cap(gam) / bound_scale
        if G[k] > cap + FUZZ_TOL:
            fail(viol, "overflow_cap", step=k, beta=G[k], cap=cap)

    # (c) every feasible prefix
    if gam < 1:
        for i in range(1, len(G)):
            if G[i] > 1:
                break
            checks["before_overflow"] += 1
            b = bound_scale * bounds.bound_beta(gam, G[i]) if G[i] > 0 else 0.0
            if below(F[i], b):
                fail(viol, "before_overflow", step=i, beta=G[i], f=F[i], bound=b)

    # (d) one-element overshoot with curvature of f
    if gam < 1:
        checks["curv_f"] += 1
        b = bound_scale * (bounds.bound_curv_f(c, gam) if c < 1 else bounds.bound_main(gam))
        if below(F[-1], b):
            fail(viol, "curv_f", step=len(F) - 1, f=F[-1], bound=b, c=c)

    # (e) recurrence at each step that starts within min(theta, g*)
    if g_star > 0:
        for i in range(len(tr.steps)):
            gi = tr.g_values[i]
            if gi > min(theta, g_star):
                break
            checks["curv_recur"] += 1
            df = tr.f_values[i + 1] - tr.f_values[i]
            dg = tr.g_values[i + 1] - gi
            lhs = (1 - (1 - c) * (1 - gam) * gi / g_star) * df / f_star
            rhs = bound_scale * (1 - tr.f_values[i] / f_star) * (1 - gam) * dg / g_star
            if below(lhs, rhs):
                fail(viol, "curv_recur", step=i, lhs=lhs, rhs=rhs)

    # advisory: strict curvature and continuing past overflow
    long = run_algorithm("ratio_marginal", f, g, theta, ContinueTo(beta_plus))
    for i in range(1, len(long.steps) + 1):
        beta = long.g_values[i] / theta
        fi = long.f_values[i] / f_star
        if gam_s < 1:
            checks["strict_curvature"] += 1
            b = bound_scale * bounds.bound_beta(gam_s, beta)
            if below(fi, b):
                fail(adv, "strict_curvature", step=i, beta=beta, f=fi, bound=b)
        if beta >= 1 and gam < 1 and c < 1:
            checks["beyond_overflow"] += 1
            b = bound_scale * bounds.bound_beyond(c, gam, beta)
            if below(fi, b):
                fail(adv, "beyond_overflow", step=i, beta=beta, f=fi, bound=b)
    return viol, adv, checks


def _fuzz_job(args):
    return fuzz_instance(*args)


def fuzz_theorems(n_instances: int = 200, seed: int = 0, size_range: tuple[int, int] = (5, 10),
                  workers: int = 1, bound_scale: float = 1.0) -> FuzzResult:
    """Fuzz the greedy guarantees; violations are data, never exceptions."""
    if size_range[1] > PAIR_CAP:
        raise ValueError(f"size_range upper end {size_range[1]} exceeds curvature cap {PAIR_CAP}")
    if size_range[0] < 1 or size_range[0] > size_range[1]:
        raise ValueError(f"invalid size_range {size_range}")
    jobs = [(seed * 1_000_003 + i, tuple(size_range), bound_scale) for i in range(n_instances)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_fuzz_job, jobs, chunksize=max(1, n_instances // (4 * workers))))
    else:
        results = [_fuzz_job(j) for j in jobs]
    viol, adv, checks = [], [], {}
    for v, a, ch in results:
        viol.extend(v)
        adv.extend(a)
        for key, cnt in ch.items():
            checks[key] = checks.get(key, 0) + cnt
    return FuzzResult(viol, adv, checks, n_instances)


def write_fuzz_report(result: FuzzResult, outdir, seed: int, config: dict) -> Path:
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"verify_seed{seed}_{config_hash(config)}.json"
    path.write_text(json.dumps({"instances": result.instances, "checks": result.checks,
                                "violations": result.violations, "advisory": result.advisory},
                               indent=2, sort_keys=True, default=_json_default))
    return path


def _json_default(x):
    if isinstance(x, float) and not math.isfinite(x):
        return repr(x)
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    raise TypeError(f"not serialisable: {type(x)}")
