import math

import numpy as np
import pytest

from smsc.families import (EdgeCountCost, JumpCost, NoAdmissibleEpsilon, PowerCost, WeightedCoverage,
                           load_instance, make_random_instance, make_tightness, save_instance,
                           tightness_expected_ratio, tightness_limit)
from smsc.setfn import check_structure, curvature_supermodular_weak

# 50-digit evaluations of the closed forms (mpmath, see test_oracles)
RATIO_K300_G13 = 0.48886378276401045846
RATIO_K10_G12 = 0.46855946855946855947
LIMIT_G13 = 0.48658288096740797313


def test_coverage_union_weights():
    f = WeightedCoverage([0.5, 1.0, 2.0], [[0, 1], [1, 2], []])
    assert f.value(0b011) == 3.5
    assert f.value(0b100) == 0.0
    assert np.allclose(f.gains(0b001, [1, 2]), [2.0, 0.0])


def test_coverage_rejects_bad_atoms():
    with pytest.raises(ValueError):
        WeightedCoverage([1.0], [[3]])
    with pytest.raises(ValueError):
        WeightedCoverage([-1.0], [[0]])


def test_power_cost_values():
    g = PowerCost([1.0, 2.0, 3.0], p=2)
    assert g.value(0b111) == 36.0
    assert g.value(0b101) == 16.0


def test_power_cost_equal_units_curvature():
    g = PowerCost([1.0] * 8, p=2)
    assert curvature_supermodular_weak(g)[0] == pytest.approx(2 / 3, abs=1e-12)


def test_edge_count_cost():
    g = EdgeCountCost(4, [(0, 1), (1, 2), (2, 3)])
    assert g.value(0) == 0.0
    assert g.value(0b0111) == 2.0
    assert check_structure(g).supermodular


def test_edge_count_offset_breaks_supermodularity():
    # the first element pays the offset, later non-adjacent ones pay nothing
    g = EdgeCountCost(4, [(0, 1), (1, 2), (2, 3)], offset=0.5)
    assert g.value(0b0111) == 2.5
    rep = check_structure(g)
    assert rep.monotone and not rep.supermodular
    A, B, e = rep.witnesses["supermodular"]
    assert g.marginal(e, A) > g.marginal(e, B)


@pytest.mark.parametrize("k,gamma,eps,kp", [(300, 1 / 3, 1.5, 201), (10, 0.5, 2.0, 6)])
def test_tightness_parameters(k, gamma, eps, kp):
    inst = make_tightness(k, gamma)
    assert inst.k_prime == kp
    assert inst.epsilon == pytest.approx(eps, abs=1e-9)
    assert (k + inst.epsilon) * (1 - gamma) == pytest.approx(kp, abs=1e-9)


def test_tightness_without_admissible_epsilon():
    with pytest.raises(NoAdmissibleEpsilon):
        make_tightness(10, 0.0)


def test_tightness_probe_costs():
    inst = make_tightness(10, 0.5)
    g = inst.cost
    assert g.value(1 << inst.v(3)) == 1.0
    assert g.value(1 << inst.o(2)) == 1.0
    assert g.value(inst.V) == inst.k_prime
    assert g.value(inst.V | 1 << inst.o(4)) == pytest.approx(inst.k + inst.epsilon)
    assert math.isinf(g.value(1 << inst.u))


def test_tightness_coverage_identities():
    inst = make_tightness(10, 0.5)
    k, kp, f = inst.k, inst.k_prime, inst.objective
    assert f.value(1 << inst.o(1)) == pytest.approx(1 - k ** -kp, rel=1e-12)
    assert f.value(inst.O) == pytest.approx(k * (1 - k ** -kp), rel=1e-12)
    assert f.value(inst.V) == pytest.approx(k * (1 - (1 - 1 / k) ** kp), rel=1e-12)
    assert f.value(1 << inst.v(3)) == pytest.approx((1 - 1 / k) ** 2, rel=1e-12)
    assert f.value(1 << inst.u) == pytest.approx((1 - 1 / k) ** kp - k ** -kp, rel=1e-12)


def test_tightness_closed_forms():
    assert tightness_expected_ratio(make_tightness(300, 1 / 3)) == pytest.approx(RATIO_K300_G13, abs=1e-15)
    assert tightness_expected_ratio(make_tightness(10, 0.5)) == pytest.approx(RATIO_K10_G12, abs=1e-15)
    assert tightness_limit(1 / 3) == pytest.approx(LIMIT_G13, abs=1e-15)


def test_tightness_ratio_approaches_limit():
    gaps = [abs(tightness_expected_ratio(make_tightness(k, 0.5)) - tightness_limit(0.5))
            for k in (10, 100, 1000)]
    assert gaps[0] > gaps[1] > gaps[2]


@pytest.mark.parametrize("k,gamma", [(6, 0.5), (7, 1 / 3), (8, 0.25), (5, 0.4)])
def test_tightness_structure(k, gamma):
    inst = make_tightness(k, gamma)
    finite = list(range(inst.k_prime + inst.k))
    assert check_structure(inst.cost.restrict(finite)).supermodular
    rep = check_structure(inst.objective)
    assert rep.monotone and rep.submodular


@pytest.mark.parametrize("k,gamma,exhaustive", [
    (3, 0.5, 1 / 3), (4, 2 / 3, 0.6), (6, 0.5, 0.5), (6, 1 / 3, 1 / 3), (8, 0.5, 4 / 7),
])
def test_tightness_cost_curvature(k, gamma, exhaustive):
    # Balanced splits of V + o_1 can beat the (V, o_1) pair, so the exhaustive
    # curvature is only bounded below by 1 - k'/(k+eps-1).
    inst = make_tightness(k, gamma)
    kp = inst.k_prime
    sub = inst.cost.restrict(list(range(kp)) + [inst.o(1)])
    gw, _ = curvature_supermodular_weak(sub)
    assert gw >= 1 - kp / (k + inst.epsilon - 1) - 1e-12
    assert gw == pytest.approx(exhaustive, abs=1e-12)


def test_random_instance_deterministic_and_structured():
    f1, g1 = make_random_instance(1, 6)
    f2, g2 = make_random_instance(1, 6)
    assert np.array_equal(f1.table(), f2.table()) and np.array_equal(g1.table(), g2.table())
    assert check_structure(f1).submodular and check_structure(g1).supermodular


def test_random_instance_modular_cost():
    _, g = make_random_instance(4, 7, p=1)
    assert curvature_supermodular_weak(g)[0] == 0.0


def test_instance_file_roundtrip(tmp_path):
    f, g = make_random_instance(2, 5)
    path = tmp_path / "inst.json"
    save_instance(path, f, g, theta=3.5, seed=2)
    d = load_instance(path)
    assert d["theta"] == 3.5 and d["seed"] == 2
    assert np.array_equal(d["f"].table(), f.table())
    assert np.array_equal(d["g"].table(), g.table())
