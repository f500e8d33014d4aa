"""Command line entry point.

Every subcommand takes an optional JSON ``--config``; explicit flags win over
the file, and the resolved configuration is written next to the outputs.

Exit codes: 0 success, 1 violation or infeasible target, 2 configuration error.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import bounds
from .bench import ALGORITHMS, config_hash, fuzz_theorems, run_comparison, write_fuzz_report, write_report
from .debate import DebateConfig, build_instance
from .dual import DualConfig, PrimalFailure, TargetUnreachable, choose_alpha, exhaustive_primal, greedy_primal, solve_dual
from .families import (NoAdmissibleEpsilon, instance_to_dict, load_instance, make_random_instance,
                       make_tightness, tightness_expected_ratio, tightness_limit)
from .greedy import BeforeOverflow, FirstOverflow, run_ratio_marginal
from .setfn import PAIR_CAP, members, curvature_report

log = logging.getLogger("smsc")

OK, VIOLATION, CONFIG_ERROR = 0, 1, 2


class ConfigError(ValueError):
    pass


DEFAULTS = {
    "bench": {"source": "synthetic", "instance": None, "n": 8, "seed": 0, "m": 15, "T": 100,
              "rounds": 2, "view": "global", "peer_count": 3, "n_scenarios": 20,
              "budget_fraction": 0.5, "with_opt": False, "algorithms": list(ALGORITHMS), "out": "out"},
    "tightness": {"k": 300, "gamma": 1 / 3},
    "verify": {"n_instances": 200, "seed": 0, "min_n": 5, "max_n": 10, "workers": None,
               "corrupt_bound": 1.0, "out": "out"},
    "dual": {"instance": None, "n": 8, "seed": 0, "tau": None, "alpha": "auto", "epsilon": None,
             "primal": "greedy", "out": None},
    "curvature": {"instance": None, "n": 8, "seed": 0},
    "bounds": {"gamma": 0.5, "c": 0.0, "beta": 1.0},
}


def _resolve(cmd: str, args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS[cmd])
    if args.config:
        try:
            loaded = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        unknown = set(loaded) - set(cfg)
        if unknown:
            raise ConfigError(f"unknown config keys for {cmd}: {sorted(unknown)}")
        cfg.update(loaded)
    for key in cfg:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    return cfg


def _identity(cfg: dict) -> dict:
    # settings that cannot change results stay out of file names
    return {k: v for k, v in cfg.items() if k not in ("out", "workers")}


def _snapshot(cfg: dict, cmd: str, outdir) -> Path:
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"config_{cmd}_seed{cfg.get('seed', 0)}_{config_hash(_identity(cfg))}.json"
    path.write_text(json.dumps(cfg, indent=2, sort_keys=True))
    return path


def _synthetic(cfg: dict):
    if cfg.get("instance"):
        d = load_instance(cfg["instance"])
        return d["f"], d["g"], d["theta"]
    f, g = make_random_instance(cfg["seed"], cfg["n"])
    return f, g, None


def _print_json(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True))


# ---------------------------------------------------------------------------
# subcommands


def cmd_bench(cfg: dict) -> int:
    algos = cfg["algorithms"]
    bad = [a for a in algos if a not in ALGORITHMS]
    if bad:
        raise ConfigError(f"unknown algorithms {bad}")
    if cfg["source"] == "debate":
        try:
            dc = DebateConfig(m=cfg["m"], T=cfg["T"], rounds=cfg["rounds"], view=cfg["view"],
                              peer_count=cfg["peer_count"], n_scenarios=cfg["n_scenarios"],
                              seed=cfg["seed"])
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc
        inst = build_instance(dc)
        f, g, theta = inst.objective, inst.cost, None
        desc = {"kind": "debate", "config": dc.to_dict()}
    else:
        f, g, theta = _synthetic(cfg)
        desc = instance_to_dict(f, g, theta, cfg["seed"])
    if cfg["with_opt"] and f.n > 20:
        raise ConfigError(f"exact frontier needs n <= 20, got {f.n}")
    report = run_comparison(f, g, algos, budget_fraction=cfg["budget_fraction"],
                            with_opt=cfg["with_opt"], with_curvature=f.n <= PAIR_CAP,
                            seed=cfg["seed"], descriptor=desc)
    paths = write_report(report, cfg["out"], cfg["seed"], _identity(cfg))
    paths["config"] = _snapshot(cfg, "bench", cfg["out"])
    for name, tr in report.curves.items():
        print(f"{name:15s} steps={len(tr.steps):3d} f={tr.value:.6g} g={tr.cost:.6g}")
    if report.frontier is not None:
        print(f"{'opt':15s} f={report.frontier[-1].f_opt:.6g} at cap {report.budget_cap:.6g}")
    for key, p in paths.items():
        print(f"{key}: {p}")
    return OK


def cmd_tightness(cfg: dict) -> int:
    try:
        inst = make_tightness(int(cfg["k"]), float(cfg["gamma"]))
    except NoAdmissibleEpsilon as exc:
        print(f"error: {exc}", file=sys.stderr)
        return VIOLATION
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    tr = run_ratio_marginal(inst.objective, inst.cost, inst.theta, BeforeOverflow())
    realized = tr.value / inst.objective.value(inst.O)
    _print_json({"k": inst.k, "gamma": inst.gamma, "k_prime": inst.k_prime, "epsilon": inst.epsilon,
                 "selected": len(tr.selected), "realized_ratio": realized,
                 "closed_form_ratio": tightness_expected_ratio(inst),
                 "asymptotic_bound": tightness_limit(inst.gamma)})
    return OK


def cmd_verify(cfg: dict) -> int:
    if cfg["max_n"] > PAIR_CAP:
        raise ConfigError(f"max_n={cfg['max_n']} exceeds the exact curvature cap {PAIR_CAP}")
    if not 1 <= cfg["min_n"] <= cfg["max_n"]:
        raise ConfigError("need 1 <= min_n <= max_n")
    workers = cfg["workers"] or os.cpu_count() or 1
    res = fuzz_theorems(cfg["n_instances"], cfg["seed"], (cfg["min_n"], cfg["max_n"]),
                        workers=workers, bound_scale=cfg["corrupt_bound"])
    path = write_fuzz_report(res, cfg["out"], cfg["seed"], _identity(cfg))
    _snapshot(cfg, "verify", cfg["out"])
    print(f"instances={res.instances} checks={sum(res.checks.values())} "
          f"violations={len(res.violations)} advisory={len(res.advisory)}")
    print(f"log: {path}")
    return OK if res.ok else VIOLATION


def cmd_dual(cfg: dict) -> int:
    f, g, _ = _synthetic(cfg)
    full = (1 << f.n) - 1
    tau = cfg["tau"] if cfg["tau"] is not None else 0.5 * f.value(full)
    if cfg["primal"] == "exhaustive":
        primal = exhaustive_primal(f, g)
    elif cfg["primal"] == "greedy":
        primal = greedy_primal(f, g, FirstOverflow())
    else:
        raise ConfigError(f"unknown primal {cfg['primal']!r}")
    if cfg["alpha"] == "auto":
        if cfg["primal"] == "exhaustive":
            alpha = 1.0
        else:
            if f.n > PAIR_CAP:
                raise ConfigError("alpha=auto needs exact curvature (n <= 12)")
            rep = curvature_report(f, g)
            alpha = choose_alpha(rep.gamma_weak, rep.c_sub) if rep.gamma_weak < 1 else 0.0
    else:
        alpha = float(cfg["alpha"])
    try:
        res = solve_dual(f, g, DualConfig(tau, cfg["epsilon"], alpha, primal))
    except (TargetUnreachable, PrimalFailure) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return VIOLATION
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    out = {"tau": tau, "alpha": alpha, "set": members(res.set), "f": res.f, "g": res.g,
           "budget_found": res.budget_found, "iterations": res.iterations,
           "non_monotone": res.non_monotone}
    _print_json(out)
    if cfg["out"]:
        _snapshot(cfg, "dual", cfg["out"])
    return OK


def cmd_curvature(cfg: dict) -> int:
    f, g, _ = _synthetic(cfg)
    if f.n > PAIR_CAP:
        raise ConfigError(f"exact curvature needs n <= {PAIR_CAP}")
    _print_json(curvature_report(f, g).as_dict())
    return OK


def cmd_bounds(cfg: dict) -> int:
    try:
        table = bounds.bound_table(cfg["gamma"], cfg["c"], cfg["beta"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    for key, val in table.items():
        print(f"{key:13s} {val!r}")
    return OK


COMMANDS = {"bench": cmd_bench, "tightness": cmd_tightness, "verify": cmd_verify,
            "dual": cmd_dual, "curvature": cmd_curvature, "bounds": cmd_bounds}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="smsc", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="cmd", required=True)

    def common(sp, seed=True):
        sp.add_argument("--config", help="JSON config file; flags override its values")
        if seed:
            sp.add_argument("--seed", type=int)

    b = sub.add_parser("bench", help="compare algorithms on one instance")
    common(b)
    src = b.add_mutually_exclusive_group()
    src.add_argument("--debate", dest="source", action="store_const", const="debate")
    src.add_argument("--synthetic", dest="source", action="store_const", const="synthetic")
    b.add_argument("--instance", help="synthetic instance JSON file")
    b.add_argument("--n", type=int)
    b.add_argument("--m", type=int)
    b.add_argument("--T", type=int)
    b.add_argument("--rounds", type=int)
    b.add_argument("--view", choices=["global", "local"])
    b.add_argument("--peer-count", dest="peer_count", type=int)
    b.add_argument("--n-scenarios", dest="n_scenarios", type=int)
    b.add_argument("--budget-fraction", dest="budget_fraction", type=float)
    b.add_argument("--with-opt", dest="with_opt", action="store_const", const=True)
    b.add_argument("--algorithms", nargs="+")
    b.add_argument("--out")

    t = sub.add_parser("tightness", help="run greedy on the adversarial instance")
    common(t, seed=False)
    t.add_argument("--k", type=int)
    t.add_argument("--gamma", type=float)

    v = sub.add_parser("verify", help="fuzz the approximation guarantees")
    common(v)
    v.add_argument("--n-instances", dest="n_instances", type=int)
    v.add_argument("--min-n", dest="min_n", type=int)
    v.add_argument("--max-n", dest="max_n", type=int)
    v.add_argument("--workers", type=int)
    v.add_argument("--corrupt-bound", dest="corrupt_bound", type=float,
                   help="multiply every bound by this factor (harness self-test)")
    v.add_argument("--out")

    d = sub.add_parser("dual", help="minimise cost subject to a value target")
    common(d)
    d.add_argument("--instance")
    d.add_argument("--n", type=int)
    d.add_argument("--tau", type=float)
    d.add_argument("--alpha", help="'auto' or a number in (0, 1]")
    d.add_argument("--epsilon", type=float)
    d.add_argument("--primal", choices=["greedy", "exhaustive"])
    d.add_argument("--out")

    c = sub.add_parser("curvature", help="exact curvatures with witnesses")
    common(c)
    c.add_argument("--instance")
    c.add_argument("--n", type=int)

    bd = sub.add_parser("bounds", help="table of the closed-form guarantees")
    common(bd, seed=False)
    bd.add_argument("--gamma", type=float)
    bd.add_argument("--c", type=float)
    bd.add_argument("--beta", type=float)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _resolve(args.cmd, args)
        return COMMANDS[args.cmd](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return CONFIG_ERROR
    except (OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return CONFIG_ERROR


if __name__ == "__main__":
    sys.exit(main())
