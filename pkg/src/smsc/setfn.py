"""Set functions over small ground sets, structural checks and exact curvature.

Subsets are Python ``int`` bitmasks over element indices ``0..n-1``.  Every
function is assumed grounded (``f(0) == 0``); this is checked on construction.
Exhaustive routines work on the full value table of a function, which is built
once (vectorised where the family allows it) and reused.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

TOL = 1e-9
STRUCTURE_CAP = 16
PAIR_CAP = 12
TABLE_CAP = 20


class GroundSetTooLarge(ValueError):
    pass


class NotGrounded(ValueError):
    pass


class DegenerateObjective(ValueError):
    pass


def mask_of(elements: Iterable[int]) -> int:
    mask = 0
    for v in elements:
        mask |= 1 << int(v)
    return mask


def members(mask: int) -> list[int]:
    bits = bin(mask)[:1:-1]
    return [i for i, b in enumerate(bits) if b == "1"]


def all_members(n: int) -> np.ndarray:
    """Boolean membership matrix of shape ``(2**n, n)``; row ``m`` is mask ``m``."""
    idx = np.arange(1 << n, dtype=np.int64)
    return ((idx[:, None] >> np.arange(n, dtype=np.int64)) & 1).astype(bool)


def rows_to_masks(rows: np.ndarray) -> list[int]:
    return [mask_of(np.flatnonzero(r)) for r in rows]


@dataclass(frozen=True)
class GroundSet:
    size: int
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.size < 1:
            raise ValueError("ground set needs at least one element")
        if self.labels is not None and len(self.labels) != self.size:
            raise ValueError("one label per element expected")

    @property
    def full(self) -> int:
        return (1 << self.size) - 1

    def label(self, v: int) -> str:
        return self.labels[v] if self.labels else str(v)


class SetFunction:
    """Memoised black-box set function.

    Subclasses set their own state and then call ``super().__init__``; they
    implement ``_compute(mask)`` and may override ``_compute_rows`` (batched
    evaluation from a membership matrix) or ``gains`` for speed.
    """

    def __init__(self, n: int, kind: str = "objective", labels: Sequence[str] | None = None):
        self.ground = GroundSet(n, tuple(labels) if labels is not None else None)
        self.n = n
        self.kind = kind
        self._cache: dict[int, float] = {}
        self._lock = threading.Lock()
        self._table: np.ndarray | None = None
        v0 = float(self._compute(0))
        if abs(v0) > 1e-12:
            raise NotGrounded(f"value of the empty set is {v0}, expected 0")
        self._cache[0] = 0.0

    # -- subclass hooks -------------------------------------------------
    def _compute(self, mask: int) -> float:
        raise NotImplementedError

    def _compute_rows(self, rows: np.ndarray) -> np.ndarray:
        return np.array([self._compute(m) for m in rows_to_masks(rows)], dtype=float)

    # -- evaluation -----------------------------------------------------
    def _check(self, mask: int):
        if mask < 0 or mask >> self.n:
            raise ValueError(f"subset {mask:#x} is outside the ground set of size {self.n}")

    def value(self, S: int, cached: bool = True) -> float:
        self._check(S)
        if not cached:
            return float(self._compute(S))
        hit = self._cache.get(S)
        if hit is not None:
            return hit
        val = float(self._compute(S))
        with self._lock:
            self._cache.setdefault(S, val)
        return val

    __call__ = value

    def values(self, masks: Sequence[int]) -> np.ndarray:
        out = np.empty(len(masks))
        missing = []
        for i, m in enumerate(masks):
            self._check(m)
            hit = self._cache.get(m)
            if hit is None:
                missing.append(i)
            else:
                out[i] = hit
        if missing:
            rows = np.zeros((len(missing), self.n), dtype=bool)
            for r, i in enumerate(missing):
                rows[r, members(masks[i])] = True
            vals = np.asarray(self._compute_rows(rows), dtype=float)
            with self._lock:
                for r, i in enumerate(missing):
                    out[i] = self._cache.setdefault(masks[i], float(vals[r]))
        return out

    def marginal(self, v: int, S: int) -> float:
        if (S >> v) & 1:
            raise ValueError(f"element {v} is already in the set")
        return self.value(S | (1 << v)) - self.value(S)

    def gains(self, S: int, candidates: Sequence[int]) -> np.ndarray:
        """Marginal values ``f(v | S)`` for each candidate ``v`` (none may be in ``S``)."""
        base = self.value(S)
        return self.values([S | (1 << v) for v in candidates]) - base

    def table(self) -> np.ndarray:
        """Values of every subset, indexed by mask."""
        if self.n > TABLE_CAP:
            raise GroundSetTooLarge(f"n={self.n} exceeds the table cap {TABLE_CAP}")
        if self._table is None:
            rows = all_members(self.n)
            chunks = [self._compute_rows(rows[i:i + 4096]) for i in range(0, len(rows), 4096)]
            tab = np.concatenate(chunks).astype(float)
            tab[0] = 0.0
            self._table = tab
        return self._table

    # -- derived functions ----------------------------------------------
    def restrict(self, elements: Sequence[int]) -> "SetFunction":
        """The function seen only on ``elements``; new index ``i`` is ``elements[i]``."""
        elements = list(elements)
        parent = self

        def fn(mask: int) -> float:
            return parent.value(mask_of(elements[i] for i in members(mask)))

        labels = [self.ground.label(e) for e in elements]
        return FunctionSet(len(elements), fn, kind=self.kind, labels=labels)

    def scaled(self, factor: float) -> "SetFunction":
        parent = self
        return FunctionSet(self.n, lambda m: factor * parent.value(m), kind=self.kind,
                           labels=self.ground.labels)


class FunctionSet(SetFunction):
    """Wraps a plain callable ``fn(mask) -> float``."""

    def __init__(self, n: int, fn: Callable[[int], float], kind: str = "objective",
                 labels: Sequence[str] | None = None):
        self._fn = fn
        super().__init__(n, kind, labels)

    def _compute(self, mask: int) -> float:
        return float(self._fn(mask))


def from_callable(n: int, fn: Callable[[int], float], kind: str = "objective") -> SetFunction:
    return FunctionSet(n, fn, kind)


def modular(weights: Sequence[float], kind: str = "objective") -> SetFunction:
    w = np.asarray(weights, dtype=float)
    return FunctionSet(len(w), lambda m: float(sum(w[i] for i in members(m))), kind)


def cardinality(n: int, kind: str = "objective") -> SetFunction:
    return FunctionSet(n, lambda m: float(bin(m).count("1")), kind)


# ---------------------------------------------------------------------------
# exhaustive structure checks


@dataclass
class StructureReport:
    monotone: bool
    submodular: bool
    supermodular: bool
    witnesses: dict = field(default_factory=dict)

    @property
    def failing_witness(self):
        for key in ("monotone", "submodular", "supermodular"):
            if key in self.witnesses:
                return key, self.witnesses[key]
        return None


def _subset_reduce(arr: np.ndarray, n: int, op) -> np.ndarray:
    """out[B] = op over all A subset of B of arr[A]  (sum-over-subsets DP)."""
    out = arr.copy()
    for i in range(n):
        view = out.reshape(-1, 2, 1 << i)
        view[:, 1, :] = op(view[:, 1, :], view[:, 0, :])
    return out


def _submasks_ascending(B: int) -> list[int]:
    subs = []
    sub = B
    while True:
        subs.append(sub)
        if sub == 0:
            return subs[::-1]
        sub = (sub - 1) & B


def _insert_zero_bit(idx: np.ndarray, e: int) -> np.ndarray:
    low = idx & ((1 << e) - 1)
    high = idx >> e
    return (high << (e + 1)) | low


def check_structure(fn: SetFunction, cap: int = STRUCTURE_CAP, tol: float = TOL) -> StructureReport:
    """Exhaustive monotonicity / submodularity / supermodularity check.

    Every triple ``A ⊆ B``, ``e ∉ B`` is covered: for each ``e`` the marginal
    ``m_e(X) = f(X+e) - f(X)`` is compared against its min/max over all
    subsets of ``X`` via a subset-reduction, which is exact.  Witnesses are the
    first violation in (B, e, A) ascending mask order.
    """
    n = fn.n
    if n > cap:
        raise GroundSetTooLarge(f"n={n} exceeds structure-check cap {cap}")
    F = fn.table()
    wit = {}

    sub_max = _subset_reduce(F, n, np.maximum)
    bad = np.flatnonzero(sub_max > F + tol)
    if bad.size:
        B = int(bad[0])
        A = next(a for a in _submasks_ascending(B) if F[a] > F[B] + tol)
        wit["monotone"] = (A, B)

    half = np.arange(1 << (n - 1), dtype=np.int64)
    sub_viol = np.zeros((n, 1 << n), dtype=bool)
    sup_viol = np.zeros((n, 1 << n), dtype=bool)
    marg = {}
    for e in range(n):
        X = _insert_zero_bit(half, e)
        m = F[X | (1 << e)] - F[X]
        marg[e] = (X, m)
        lo = _subset_reduce(m, n - 1, np.minimum)
        hi = _subset_reduce(m, n - 1, np.maximum)
        sub_viol[e, X] = lo < m - tol
        sup_viol[e, X] = hi > m + tol

    for name, viol, worse in (("submodular", sub_viol, lambda a, b: a < b - tol),
                              ("supermodular", sup_viol, lambda a, b: a > b + tol)):
        hits = np.argwhere(viol.T)  # rows ordered by B, then e
        if hits.size:
            B, e = int(hits[0][0]), int(hits[0][1])
            mB = F[B | (1 << e)] - F[B]
            A = next(a for a in _submasks_ascending(B)
                     if worse(F[a | (1 << e)] - F[a], mB))
            wit[name] = (A, B, e)

    return StructureReport(monotone="monotone" not in wit,
                           submodular="submodular" not in wit,
                           supermodular="supermodular" not in wit,
                           witnesses=wit)


# ---------------------------------------------------------------------------
# curvature


@dataclass(frozen=True)
class CurvatureReport:
    gamma_weak: float
    gamma_strict: float
    c_sub: float | None
    witnesses: dict

    def as_dict(self) -> dict:
        w = self.witnesses
        weak = w.get("gamma_weak")
        return {
            "gamma_weak": self.gamma_weak,
            "gamma_strict": self.gamma_strict,
            "c_sub": self.c_sub,
            "witnesses": {
                "gamma_weak": None if weak is None else {"S": members(weak[0]), "T": members(weak[1])},
                **{k: None if w.get(k) is None else {"v": w[k][0], "S": members(w[k][1])}
                   for k in ("gamma_strict", "c_sub")},
            },
        }


def _unit(x: float) -> float:
    # clamp to [0, 1] and drop rounding dust so modular inputs give exactly 0
    return 0.0 if x <= 1e-12 else float(min(1.0, x))


def curvature_supermodular_weak(g: SetFunction, cap: int = PAIR_CAP, tol: float = TOL):
    """``1 - min g(T) / g(T|S)`` over ordered pairs with ``g(T) >= g(S)``.

    Pairs may overlap; ``T`` is nonempty and pairs with ``g(T|S) = 0`` are
    skipped.  Returns ``(gamma, (S, T))``; the witness is ``None`` when no pair
    qualifies (then ``gamma = 0``).
    """
    n = g.n
    if n > cap:
        raise GroundSetTooLarge(f"n={n} exceeds pair-enumeration cap {cap}")
    G = g.table()
    size = 1 << n
    T = np.arange(size, dtype=np.int64)
    gT = G[T]
    best, arg = np.inf, None
    block = max(1, (1 << 22) // size)
    for start in range(0, size, block):
        S = np.arange(start, min(size, start + block), dtype=np.int64)
        gS = G[S][:, None]
        denom = G[S[:, None] | T[None, :]] - gS
        ok = (gT[None, :] >= gS - tol) & (denom > tol)
        ok[:, 0] = False
        if not ok.any():
            continue
        ratio = np.where(ok, gT[None, :] / np.where(ok, denom, 1.0), np.inf)
        flat = int(np.argmin(ratio))
        r = ratio.flat[flat]
        if r < best:
            best = float(r)
            arg = (int(S[flat // size]), int(flat % size))
    if arg is None:
        return 0.0, None
    return _unit(1.0 - best), arg


def curvature_supermodular_strict(g: SetFunction, cap: int = STRUCTURE_CAP, tol: float = TOL):
    """``1 - min g(v) / g(v|S)`` over ``v ∉ S`` with ``g(v|S) > 0``; returns ``(gamma', (v, S))``."""
    n = g.n
    if n > cap:
        raise GroundSetTooLarge(f"n={n} exceeds cap {cap}")
    G = g.table()
    half = np.arange(1 << (n - 1), dtype=np.int64)
    best, arg = np.inf, None
    for v in range(n):
        X = _insert_zero_bit(half, v)
        d = G[X | (1 << v)] - G[X]
        ok = d > tol
        if not ok.any():
            continue
        ratio = np.where(ok, G[1 << v] / np.where(ok, d, 1.0), np.inf)
        i = int(np.argmin(ratio))
        if ratio[i] < best:
            best, arg = float(ratio[i]), (v, int(X[i]))
    if arg is None:
        return 0.0, None
    return _unit(1.0 - best), arg


def curvature_submodular(f: SetFunction, cap: int = STRUCTURE_CAP, tol: float = TOL):
    """``1 - min f(v|S) / f(v)`` over ``v ∉ S`` with ``f(v) > 0``; returns ``(c, (v, S))``."""
    n = f.n
    if n > cap:
        raise GroundSetTooLarge(f"n={n} exceeds cap {cap}")
    F = f.table()
    half = np.arange(1 << (n - 1), dtype=np.int64)
    best, arg = np.inf, None
    for v in range(n):
        fv = F[1 << v]
        if fv <= tol:
            continue
        X = _insert_zero_bit(half, v)
        ratio = (F[X | (1 << v)] - F[X]) / fv
        i = int(np.argmin(ratio))
        if ratio[i] < best:
            best, arg = float(ratio[i]), (v, int(X[i]))
    if arg is None:
        raise DegenerateObjective("every singleton has zero value; curvature undefined")
    return _unit(1.0 - best), arg


def curvature_report(f: SetFunction | None, g: SetFunction) -> CurvatureReport:
    gw, wit_w = curvature_supermodular_weak(g)
    gs, wit_s = curvature_supermodular_strict(g)
    c, wit_c = (None, None) if f is None else curvature_submodular(f)
    return CurvatureReport(gw, gs, c, {"gamma_weak": wit_w, "gamma_strict": wit_s, "c_sub": wit_c})
