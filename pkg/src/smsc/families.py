"""Concrete objective / cost families and the adversarial tightness instance."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .setfn import SetFunction, members


class WeightedCoverage(SetFunction):
    """``f(S)`` = total weight of atoms covered by at least one element of ``S``."""

    def __init__(self, weights: Sequence[float], covers: Sequence[Sequence[int]],
                 labels: Sequence[str] | None = None):
        self.weights = np.asarray(weights, dtype=float)
        if (self.weights < 0).any():
            raise ValueError("atom weights must be nonnegative")
        self.covers = [sorted(set(int(a) for a in c)) for c in covers]
        n_atoms = len(self.weights)
        rows = [i for i, c in enumerate(self.covers) for _ in c]
        cols = [a for c in self.covers for a in c]
        if cols and (min(cols) < 0 or max(cols) >= n_atoms):
            raise ValueError("cover references an unknown atom")
        self._M = sp.csr_matrix((np.ones(len(cols)), (rows, cols)), shape=(len(self.covers), n_atoms))
        super().__init__(len(self.covers), "objective", labels)

    def _covered(self, elements) -> np.ndarray:
        if len(elements) == 0:
            return np.zeros(len(self.weights), dtype=bool)
        return np.asarray(self._M[elements].sum(axis=0)).ravel() > 0

    def _compute(self, mask: int) -> float:
        return float(self.weights[self._covered(members(mask))].sum())

    def _compute_rows(self, rows: np.ndarray) -> np.ndarray:
        hit = (self._M.T @ rows.T.astype(float)).T > 0
        return hit @ self.weights

    def gains(self, S: int, candidates: Sequence[int]) -> np.ndarray:
        open_w = np.where(self._covered(members(S)), 0.0, self.weights)
        return self._M[list(candidates)] @ open_w

    def to_dict(self) -> dict:
        return {"type": "coverage", "weights": self.weights.tolist(), "covers": self.covers}


class PowerCost(SetFunction):
    """``g(S) = (sum of unit costs in S) ** p``; supermodular for ``p >= 1``."""

    def __init__(self, unit_costs: Sequence[float], p: float = 2.0):
        self.unit_costs = np.asarray(unit_costs, dtype=float)
        if (self.unit_costs < 0).any():
            raise ValueError("unit costs must be nonnegative")
        if p < 1:
            raise ValueError("exponent must be >= 1")
        self.p = float(p)
        super().__init__(len(self.unit_costs), "cost")

    def _compute(self, mask: int) -> float:
        return float(self.unit_costs[members(mask)].sum() ** self.p)

    def _compute_rows(self, rows: np.ndarray) -> np.ndarray:
        return (rows @ self.unit_costs) ** self.p

    def to_dict(self) -> dict:
        return {"type": "power", "unit_costs": self.unit_costs.tolist(), "p": self.p}


class EdgeCountCost(SetFunction):
    """``g(S) = offset·[S nonempty] + |E_S|`` for the edges induced by ``S``."""

    def __init__(self, n: int, edges: Sequence[tuple[int, int]], offset: float = 0.0):
        self.edges = [(int(a), int(b)) for a, b in edges]
        self.offset = float(offset)
        if self.offset < 0:
            raise ValueError("offset must be nonnegative")
        self._a = np.array([a for a, _ in self.edges], dtype=int)
        self._b = np.array([b for _, b in self.edges], dtype=int)
        super().__init__(n, "cost")

    def _compute(self, mask: int) -> float:
        if not mask:
            return 0.0
        inside = sum(1 for a, b in self.edges if (mask >> a) & 1 and (mask >> b) & 1)
        return self.offset + inside

    def _compute_rows(self, rows: np.ndarray) -> np.ndarray:
        induced = (rows[:, self._a] & rows[:, self._b]).sum(axis=1) if self.edges else 0
        return self.offset * rows.any(axis=1) + induced

    def to_dict(self) -> dict:
        return {"type": "edges", "n": self.n, "edges": self.edges, "offset": self.offset}


def from_dict(d: dict) -> SetFunction:
    kind = d["type"]
    if kind == "coverage":
        return WeightedCoverage(d["weights"], d["covers"])
    if kind == "power":
        return PowerCost(d["unit_costs"], d["p"])
    if kind == "edges":
        return EdgeCountCost(d["n"], [tuple(e) for e in d["edges"]], d.get("offset", 0.0))
    raise ValueError(f"unknown set-function type {kind!r}")


# ---------------------------------------------------------------------------
# tightness instance


class NoAdmissibleEpsilon(ValueError):
    pass


class JumpCost(SetFunction):
    """Unit cost per element plus a jump once all of ``V`` sits next to any ``o_j``.

    ``g(S) = |S| + jump·[V ⊆ S]·|S ∩ O|``, and ``inf`` whenever ``u ∈ S``.
    Elements are laid out as ``v_1..v_k', o_1..o_k, u``.
    """

    def __init__(self, k_prime: int, k: int, jump: float):
        self.k_prime, self.k, self.jump = k_prime, k, float(jump)
        self._v_mask = (1 << k_prime) - 1
        self._o_mask = ((1 << k) - 1) << k_prime
        self.u = k_prime + k
        super().__init__(k_prime + k + 1, "cost")

    def _compute(self, mask: int) -> float:
        if (mask >> self.u) & 1:
            return math.inf
        size = bin(mask).count("1")
        if mask & self._v_mask == self._v_mask:
            return size + self.jump * bin(mask & self._o_mask).count("1")
        return float(size)

    def _compute_rows(self, rows: np.ndarray) -> np.ndarray:
        kp = self.k_prime
        size = rows.sum(axis=1).astype(float)
        full_v = rows[:, :kp].all(axis=1)
        n_o = rows[:, kp:kp + self.k].sum(axis=1)
        out = size + self.jump * full_v * n_o
        return np.where(rows[:, self.u], np.inf, out)

    def gains(self, S: int, candidates: Sequence[int]) -> np.ndarray:
        cand = np.asarray(list(candidates), dtype=int)
        if (S >> self.u) & 1:
            return np.full(len(cand), np.nan)
        base = self.value(S)
        size = bin(S).count("1") + 1
        missing_v = self._v_mask & ~S
        n_o = bin(S & self._o_mask).count("1")
        is_v = cand < self.k_prime
        is_o = (cand >= self.k_prime) & (cand < self.u)
        # v completes V only if it is the single missing v
        completes = is_v & np.array([missing_v == (1 << int(c)) for c in cand], dtype=bool)
        full_after = completes | (is_o & (missing_v == 0))
        o_after = n_o + is_o
        new = size + self.jump * full_after * o_after
        new = np.where(cand == self.u, np.inf, new)
        return new - base


@dataclass(frozen=True)
class TightnessInstance:
    k: int
    gamma: float
    epsilon: float
    k_prime: int
    objective: WeightedCoverage
    cost: JumpCost

    @property
    def theta(self) -> float:
        return float(self.k)

    def v(self, i: int) -> int:
        """Index of ``v_i`` (1-based as in the construction)."""
        return i - 1

    def o(self, j: int) -> int:
        return self.k_prime + j - 1

    @property
    def u(self) -> int:
        return self.k_prime + self.k

    @property
    def V(self) -> int:
        return (1 << self.k_prime) - 1

    @property
    def O(self) -> int:
        return ((1 << self.k) - 1) << self.k_prime


def _admissible_k_prime(k: int, gamma: float) -> tuple[int, float]:
    if not 0.0 <= gamma < 1.0:
        raise NoAdmissibleEpsilon(f"gamma={gamma} must lie in [0, 1)")
    slope = 1.0 - gamma
    # smallest integer strictly above k·(1-gamma), guarding against float dust
    k_prime = math.floor(k * slope + 1e-9) + 1
    eps = k_prime / slope - k
    if not (0.0 < eps <= 2.0 + 1e-12 and 1 <= k_prime < k):
        raise NoAdmissibleEpsilon(
            f"no admissible epsilon in (0, 2] makes (k+eps)(1-gamma) an integer below k "
            f"(k={k}, gamma={gamma})")
    return k_prime, eps


def make_tightness(k: int, gamma: float) -> TightnessInstance:
    """Weighted max-cover instance on which ratio-marginal greedy is exactly tight.

    Weights are the integer construction divided by ``k**k'`` so that large
    ``k`` stays inside binary64.
    """
    if k < 3:
        raise ValueError("k must be at least 3")
    k_prime, eps = _admissible_k_prime(k, gamma)
    log_keep = math.log1p(-1.0 / k)
    tiny = math.exp(-k_prime * math.log(k))   # k^{-k'}, may underflow to 0

    weights: list[float] = []
    covers: list[list[int]] = [[] for _ in range(k_prime + k + 1)]
    # shared atoms: v_i's region is k equal atoms, atom (i, j) also inside o_j
    for i in range(1, k_prime + 1):
        w = math.exp((i - 1) * log_keep) / k
        for j in range(1, k + 1):
            covers[i - 1].append(len(weights))
            covers[k_prime + j - 1].append(len(weights))
            weights.append(w)
    private = math.exp(k_prime * log_keep) - tiny   # ((k-1)^{k'} - 1) / k^{k'}
    for j in range(1, k + 1):
        covers[k_prime + j - 1].append(len(weights))
        if j == 1:
            covers[k_prime + k].append(len(weights))  # u duplicates o_1's private region
        weights.append(private)

    labels = ([f"v{i}" for i in range(1, k_prime + 1)] + [f"o{j}" for j in range(1, k + 1)] + ["u"])
    f = WeightedCoverage(weights, covers, labels=labels)
    g = JumpCost(k_prime, k, jump=k + eps - k_prime - 1)
    return TightnessInstance(k, float(gamma), eps, k_prime, f, g)


def tightness_expected_ratio(inst: TightnessInstance) -> float:
    """Closed-form greedy/optimal ratio ``(1 - (1-1/k)^k') / (1 - k^-k')``."""
    k, kp = inst.k, inst.k_prime
    num = -math.expm1(kp * math.log1p(-1.0 / k))
    den = -math.expm1(-kp * math.log(k))
    return num / den


def tightness_limit(gamma: float) -> float:
    return -math.expm1(-(1.0 - gamma))


# ---------------------------------------------------------------------------
# random fuzzing instances


def make_random_instance(seed: int, n: int, *, p: float | None = None,
                         atoms: tuple[int, int] | None = None,
                         weight_range: tuple[float, float] = (0.1, 1.0),
                         cover_size: tuple[int, int] = (1, 4),
                         cost_range: tuple[float, float] = (0.5, 2.0),
                         private_atoms: bool = False):
    """Random weighted coverage objective and power cost, deterministic in ``seed``.

    With ``private_atoms`` every element also covers an atom of its own, which
    keeps the submodular curvature of the objective below 1.
    """
    if not 1 <= n <= 16:
        raise ValueError("random instances support 1 <= n <= 16")
    rng = np.random.default_rng(seed)
    lo, hi = atoms if atoms is not None else (n, 3 * n)
    n_atoms = int(rng.integers(lo, hi + 1))
    weights = rng.uniform(*weight_range, size=n_atoms)
    covers = []
    for _ in range(n):
        size = int(rng.integers(cover_size[0], min(cover_size[1], n_atoms) + 1))
        covers.append(sorted(rng.choice(n_atoms, size=size, replace=False).tolist()))
    if private_atoms:
        weights = np.concatenate([weights, rng.uniform(*weight_range, size=n)])
        covers = [c + [n_atoms + v] for v, c in enumerate(covers)]
    unit = rng.uniform(*cost_range, size=n)
    exponent = float(rng.choice([1.0, 1.5, 2.0])) if p is None else float(p)
    return WeightedCoverage(weights, covers), PowerCost(unit, exponent)


# ---------------------------------------------------------------------------
# instance files


def instance_to_dict(f: SetFunction, g: SetFunction, theta: float | None = None,
                     seed: int | None = None) -> dict:
    return {"kind": "synthetic", "objective": f.to_dict(), "cost": g.to_dict(),
            "theta": theta, "seed": seed}


def save_instance(path, f, g, theta=None, seed=None) -> None:
    Path(path).write_text(json.dumps(instance_to_dict(f, g, theta, seed), indent=2))


def load_instance(path) -> dict:
    """Read an instance file; returns ``{"f", "g", "theta", "seed"}``."""
    d = json.loads(Path(path).read_text())
    if d.get("kind", "synthetic") != "synthetic":
        raise ValueError(f"unsupported instance kind {d.get('kind')!r}")
    return {"f": from_dict(d["objective"]), "g": from_dict(d["cost"]),
            "theta": d.get("theta"), "seed": d.get("seed")}
