"""Synthetic multi-agent debate: who should agent-0 debate with?

All randomness (initially-correct answers, per-round acceptance coins, local
peer draws) is sampled up front into scenarios, so the objective is a fixed
set function of the selected agents.  Correctness is kept as packed bits over
questions and a whole batch of candidate sets is simulated at once.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .setfn import SetFunction

GLOBAL, LOCAL = "global", "local"


@dataclass
class DebateConfig:
    m: int = 15
    T: int = 100
    rounds: int = 2
    view: str = GLOBAL
    peer_count: int = 3
    prompt_tokens: float = 100.0
    output_tokens: float = 50.0
    n_scenarios: int = 20
    seed: int = 0
    accuracy: tuple[float, float] = (0.1, 0.7)
    openness: tuple[float, float] = (0.1, 0.9)
    input_price: tuple[float, float] = (0.5, 1.5)
    output_price: tuple[float, float] = (2.0, 6.0)
    price_mixing: float = 0.7
    equal_prices: bool = False

    def __post_init__(self):
        if self.m < 1 or self.T < 1:
            raise ValueError("need m >= 1 agents and T >= 1 questions")
        if self.rounds < 1:
            raise ValueError("need at least one round")
        if self.view not in (GLOBAL, LOCAL):
            raise ValueError(f"view must be {GLOBAL!r} or {LOCAL!r}")
        if self.view == LOCAL and self.peer_count < 1:
            raise ValueError("local view needs peer_count >= 1")
        if self.n_scenarios < 1:
            raise ValueError("need at least one scenario")
        if not 0.0 <= self.price_mixing <= 1.0:
            raise ValueError("price_mixing must lie in [0, 1]")
        if self.output_price[0] <= self.input_price[1] and not self.equal_prices:
            raise ValueError("output prices must sit above input prices")
        for name in ("accuracy", "openness", "input_price", "output_price"):
            setattr(self, name, tuple(float(x) for x in getattr(self, name)))

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "DebateConfig":
        return cls(**d)


@dataclass
class AgentPool:
    """Per-agent parameters; index ``m`` (the last one) is agent-0."""

    accuracy: np.ndarray
    openness: np.ndarray
    cost_in: np.ndarray
    cost_out: np.ndarray
    T: int

    @property
    def m(self) -> int:
        return len(self.accuracy) - 1

    @property
    def agent0(self) -> int:
        return self.m

    def to_dict(self) -> dict:
        return {k: (v.tolist() if isinstance(v, np.ndarray) else v) for k, v in asdict(self).items()}


@dataclass
class DebateScenario:
    initial_correct: np.ndarray          # (m+1, T) bool
    acceptance_coins: np.ndarray         # (m+1, T, rounds) bool
    peer_edges: np.ndarray | None = None  # (rounds, m+1, peer_count) agent ids, local view only
    _packed: tuple = field(default=None, repr=False, compare=False)

    def packed(self):
        if self._packed is None:
            init = np.packbits(self.initial_correct, axis=-1)
            coins = np.packbits(np.moveaxis(self.acceptance_coins, -1, 0), axis=-1)
            self._packed = (init, coins)
        return self._packed


def generate_pool(config: DebateConfig, seed: int | None = None) -> AgentPool:
    """Sample ``m`` agents plus agent-0.

    Prices follow ``lo + (hi-lo) * (w * rank_of_accuracy + (1-w) * noise)``,
    so ``price_mixing = 1`` makes price order equal accuracy order.
    """
    rng = np.random.default_rng(config.seed if seed is None else seed)
    size = config.m + 1
    acc = rng.uniform(*config.accuracy, size=size)
    openness = rng.uniform(*config.openness, size=size)
    span = config.accuracy[1] - config.accuracy[0]
    acc_norm = (acc - config.accuracy[0]) / span if span > 0 else np.zeros(size)
    w = config.price_mixing
    z_in = w * acc_norm + (1 - w) * rng.uniform(size=size)
    z_out = w * acc_norm + (1 - w) * rng.uniform(size=size)
    if config.equal_prices:
        c_in = np.full(size, config.input_price[0])
        c_out = np.full(size, config.output_price[0])
    else:
        c_in = config.input_price[0] + (config.input_price[1] - config.input_price[0]) * z_in
        c_out = config.output_price[0] + (config.output_price[1] - config.output_price[0]) * z_out
    return AgentPool(acc, openness, c_in, c_out, config.T)


def sample_scenarios(pool: AgentPool, config: DebateConfig) -> list[DebateScenario]:
    rng = np.random.default_rng(np.random.SeedSequence([config.seed, 0xDEB]))
    size, T, r = pool.m + 1, config.T, config.rounds
    n_right = np.floor(pool.accuracy * T).astype(int)
    out = []
    for _ in range(config.n_scenarios):
        order = np.argsort(rng.random((size, T)), axis=1)
        init = np.zeros((size, T), dtype=bool)
        for i in range(size):
            init[i, order[i, :n_right[i]]] = True
        coins = rng.random((size, T, r)) < pool.openness[:, None, None]
        peers = None
        if config.view == LOCAL:
            k = min(config.peer_count, size - 1)
            keys = rng.random((r, size, size))
            keys[:, np.arange(size), np.arange(size)] = np.inf   # never your own peer
            peers = np.argsort(keys, axis=2)[:, :, :k]
        out.append(DebateScenario(init, coins, peers))
    return out


def simulate(rows: np.ndarray, pool: AgentPool, scenarios: list[DebateScenario],
             config: DebateConfig) -> np.ndarray:
    """Mean number of questions agent-0 gets right, for each membership row.

    ``rows`` is a ``(B, m)`` boolean matrix of selected agents; agent-0 always
    takes part.
    """
    B = rows.shape[0]
    part = np.concatenate([rows.astype(bool), np.ones((B, 1), dtype=bool)], axis=1)
    part_bytes = np.where(part, np.uint8(0xFF), np.uint8(0))[:, :, None]
    total = np.zeros(B)
    for sc in scenarios:
        init, coins = sc.packed()
        state = init[None] & part_bytes
        for t in range(config.rounds):
            if config.view == GLOBAL:
                exposed = np.bitwise_or.reduce(state, axis=1, keepdims=True)
            else:
                exposed = np.bitwise_or.reduce(state[:, sc.peer_edges[t]], axis=2)
            state = state | (coins[t][None] & exposed & part_bytes)
        total += np.bitwise_count(state[:, -1]).sum(axis=1)
    return total / len(scenarios)


class DebateObjective(SetFunction):
    """Expected agent-0 correctness gained by debating with ``S`` (grounded)."""

    def __init__(self, pool: AgentPool, scenarios: list[DebateScenario], config: DebateConfig):
        self.pool, self.scenarios, self.config = pool, scenarios, config
        self.baseline = float(simulate(np.zeros((1, pool.m), dtype=bool), pool, scenarios, config)[0])
        super().__init__(pool.m, "objective")

    def _compute_rows(self, rows: np.ndarray) -> np.ndarray:
        return simulate(rows, self.pool, self.scenarios, self.config) - self.baseline

    def _compute(self, mask: int) -> float:
        row = np.array([[(mask >> i) & 1 for i in range(self.n)]], dtype=bool)
        return float(self._compute_rows(row)[0])


def token_cost_raw(rows: np.ndarray, pool: AgentPool, config: DebateConfig) -> np.ndarray:
    """Token spend of the whole workflow; agent-0 is always a participant.

    Every round each participant reads the prompt, from round 2 on also the
    previous outputs of all other participants, and writes ``O`` tokens.
    """
    rows = rows.astype(float)
    m = pool.m
    ci = rows @ pool.cost_in[:m] + pool.cost_in[m]
    co = rows @ pool.cost_out[:m] + pool.cost_out[m]
    size = rows.sum(axis=1) + 1
    P, O, r = config.prompt_tokens, config.output_tokens, config.rounds
    return r * (P * ci + O * co) + (r - 1) * O * (size - 1) * ci


class DebateCost(SetFunction):
    """Extra token cost of adding ``S`` to agent-0's debate (grounded)."""

    def __init__(self, pool: AgentPool, config: DebateConfig):
        self.pool, self.config = pool, config
        self.baseline = float(token_cost_raw(np.zeros((1, pool.m)), pool, config)[0])
        super().__init__(pool.m, "cost")

    def _compute_rows(self, rows: np.ndarray) -> np.ndarray:
        return token_cost_raw(rows, self.pool, self.config) - self.baseline

    def _compute(self, mask: int) -> float:
        row = np.array([[(mask >> i) & 1 for i in range(self.n)]], dtype=bool)
        return float(self._compute_rows(row)[0])


def _reject_agent0(S: int, pool: AgentPool):
    if (S >> pool.agent0) & 1:
        raise ValueError("agent-0 always participates and cannot be selected")


def objective_value(S: int, pool: AgentPool, scenarios, config: DebateConfig) -> float:
    _reject_agent0(S, pool)
    return DebateObjective(pool, scenarios, config).value(S)


def cost_value(S: int, pool: AgentPool, config: DebateConfig) -> float:
    _reject_agent0(S, pool)
    return DebateCost(pool, config).value(S)


@dataclass
class DebateInstance:
    config: DebateConfig
    pool: AgentPool
    scenarios: list[DebateScenario]
    objective: DebateObjective
    cost: DebateCost


def build_instance(config: DebateConfig) -> DebateInstance:
    pool = generate_pool(config)
    scenarios = sample_scenarios(pool, config)
    return DebateInstance(config, pool, scenarios, DebateObjective(pool, scenarios, config),
                          DebateCost(pool, config))


def save_config(path, config: DebateConfig) -> None:
    with open(path, "w") as fh:
        json.dump({"kind": "debate", "config": config.to_dict()}, fh, indent=2)
