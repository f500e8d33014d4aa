import logging

import pytest

from smsc import bounds
from smsc.dual import (DualConfig, PrimalFailure, TargetUnreachable, choose_alpha, exhaustive_primal,
                       greedy_primal, iteration_bound, solve_dual)
from smsc.exact import dual_opt
from smsc.greedy import FirstOverflow
from smsc.setfn import cardinality, curvature_supermodular_weak


def test_modular_case_is_exact():
    f, g = cardinality(6), cardinality(6, kind="cost")
    r = solve_dual(f, g, DualConfig(3.0, 0.01))
    assert (r.f, r.g) == (3.0, 3.0)
    assert 3.0 <= r.budget_found <= 3.01


def test_exhaustive_primal_on_toy(toy):
    f, g = toy
    r = solve_dual(f, g, DualConfig(3.0, 0.01, primal=exhaustive_primal(f, g)))
    B = dual_opt(f, g, 3.0).best_value
    assert B == 4.0 and B <= r.budget_found <= B + 0.01
    assert r.f >= 3.0 and not r.non_monotone


def test_greedy_primal_cost_guarantee(toy):
    f, g = toy
    gamma, _ = curvature_supermodular_weak(g)
    alpha = bounds.bound_main(gamma)
    r = solve_dual(f, g, DualConfig(3.0, 0.01, alpha, greedy_primal(f, g, FirstOverflow())))
    assert r.f >= alpha * 3.0
    assert r.g <= bounds.bound_overflow_cap(gamma) * (1 + 0.01 / 4) * 4


def test_unreachable_target(toy):
    f, g = toy
    with pytest.raises(TargetUnreachable):
        solve_dual(f, g, DualConfig(5.0, 0.01))


def test_primal_that_never_delivers(toy):
    f, g = toy
    with pytest.raises(PrimalFailure):
        solve_dual(f, g, DualConfig(3.0, 0.01, primal=lambda B: 0))


def test_non_monotone_primal_is_logged(toy, caplog):
    f, g = toy
    odd = lambda B: 0b011 if B >= 4 else (0b111 if B >= 2 else 0)   # more budget, less value
    with caplog.at_level(logging.WARNING):
        r = solve_dual(f, g, DualConfig(3.0, 0.5, primal=odd))
    assert r.non_monotone
    assert "not monotone" in caplog.text


def test_config_validation():
    with pytest.raises(ValueError):
        DualConfig(1.0, alpha=0.0)
    with pytest.raises(ValueError):
        DualConfig(1.0, epsilon=0.0)


def test_choose_alpha():
    assert choose_alpha(0.9) == pytest.approx(0.09516258196404043, abs=1e-15)
    assert choose_alpha(0.5, 0.2) == bounds.bound_curv_f(0.2, 0.5)
    assert choose_alpha(0.5, 1.0) == bounds.bound_main(0.5)


def test_iteration_bound(toy):
    f, g = toy
    r = solve_dual(f, g, DualConfig(3.0, 0.01))
    assert r.iterations <= iteration_bound(9.0, 0.01) + 1
