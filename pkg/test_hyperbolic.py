import math

import numpy as np
import pytest

import dyn_hyperbolic
from dyn_hyperbolic import (HEMPEL_K, VALIDITY_THRESHOLD, annulus_AN, annulus_AN_log, configured_working_d,
                            diameter_upper, forced_value_check, k_constant, lemma2_floor, measure_d_constant,
                            measure_working_d, omega01_density_lower, quasihyperbolic_upper, radial_distance_lower)
from dyn_plane_domains import Annulus, Disk, PlanarDomain
from utils.errors import (BelowThreshold, DegenerateDomain, HypothesisFailed, Inconclusive, NotSimplyConnected,
                          PreconditionViolated)


def test_density_lower_bound():
    z = math.exp(6.0)
    assert omega01_density_lower(z) == pytest.approx(1.0 / (2.0 * z * 6.0))
    with pytest.raises(BelowThreshold):
        omega01_density_lower(10.0)


def test_radial_distance():
    assert radial_distance_lower(math.exp(5), math.exp(10)) == pytest.approx(0.5 * math.log(2.0))
    assert radial_distance_lower(200.0, 200.0) == 0.0
    with pytest.raises(BelowThreshold):
        radial_distance_lower(300.0, 200.0)


def test_k_constant():
    assert k_constant(0.0) == pytest.approx(math.exp(5.0))
    assert math.isinf(k_constant(1000.0))
    with pytest.raises(PreconditionViolated):
        k_constant(-1.0)


def test_growth_floor():
    assert lemma2_floor(1.0, math.exp(200.0), 1.0) == pytest.approx(math.exp(200.0 / math.e), rel=1e-9)
    with pytest.raises(HypothesisFailed):
        lemma2_floor(1.0, 10.0, 1.0)


def test_covered_annulus():
    bounds = annulus_AN(1.0, math.exp(100.0), 1.0, 1)
    assert not bounds.empty
    assert bounds.log_r_lower == pytest.approx(-100.0 / (math.e - 1.0))
    assert bounds.log_r_upper == pytest.approx(100.0 - 5.0 * math.e)
    assert bounds.contains(1.0)
    assert annulus_AN(1.0, math.exp(100.0), 1.0, 20).empty


def test_covered_annulus_around_alpha():
    bounds = annulus_AN(0.5, math.exp(100.0), 1.0, 1, alpha=2.0)
    assert bounds.center == 2.0
    assert not bounds.empty
    assert bounds.contains(3.0)


def test_covered_annulus_log_space_beyond_float_range():
    log_lower, log_upper = annulus_AN_log(0.0, 5000.0, 1.0, 3)
    assert log_lower < 0 < log_upper
    assert log_upper == pytest.approx(5000.0 - 15.0 * math.e)


def test_zero_modulus_lower_radius():
    bounds = annulus_AN(0.0, math.exp(50.0), 1.0, 1)
    assert bounds.r_lower == 0.0
    assert bounds.contains(1e-30)


def test_forced_value_check():
    assert forced_value_check(1.0, math.exp(100.0), 1e-3, 1.0)
    assert not forced_value_check(1.0, math.exp(100.0), math.exp(90.0), 1.0)
    assert not forced_value_check(1.0, 10.0, 1e-3, 1.0)


def test_quasihyperbolic_disk_radius():
    estimate = quasihyperbolic_upper(PlanarDomain(Disk(0j, 1.0)), 0.0, 0.5)
    assert estimate.upper_bound == pytest.approx(math.log(2.0), rel=1e-6)
    assert estimate.path_witness[0] == 0.0
    assert estimate.path_witness[-1] == 0.5


def test_quasihyperbolic_is_scale_invariant():
    small = quasihyperbolic_upper(PlanarDomain(Disk(0j, 1.0)), 0.2j, -0.6)
    large = quasihyperbolic_upper(PlanarDomain(Disk(0j, 10.0)), 2j, -6.0)
    assert large.upper_bound == pytest.approx(small.upper_bound, rel=1e-2)


def test_quasihyperbolic_preconditions():
    with pytest.raises(NotSimplyConnected):
        quasihyperbolic_upper(PlanarDomain(Annulus(1.0, 2.0)), 1.5, -1.5)
    with pytest.raises(PreconditionViolated):
        quasihyperbolic_upper(PlanarDomain(Disk(0j, 1.0)), 0.0, 2.0)


def test_diameter_upper_takes_the_worst_pair():
    domain = PlanarDomain(Disk(0j, 1.0))
    estimate = diameter_upper(domain, [0.0, 0.5, -0.5])
    assert estimate.upper_bound >= 2.0 * math.log(2.0) - 1e-9
    assert {estimate.path_witness[0], estimate.path_witness[-1]} == {0.5, -0.5}


def test_measure_d_constant_rejects_bad_input():
    with pytest.raises(PreconditionViolated):
        measure_d_constant(20.0, 0, "case1")
    with pytest.raises(PreconditionViolated):
        measure_d_constant(20.0, 1, "case3")


@pytest.mark.slow
def test_measure_d_constant_is_seeded():
    first = measure_d_constant(100.0, 2, "case1", seed=5)
    again = measure_d_constant(100.0, 2, "case1", seed=5)
    assert first > 0.0
    assert first == again


def test_density_constants():
    assert HEMPEL_K == pytest.approx(4.3768796, abs=1e-6)
    assert VALIDITY_THRESHOLD == pytest.approx(148.4131591, abs=1e-6)


def test_radial_distance_closed_forms():
    assert radial_distance_lower(math.exp(5.0), math.exp(5.0 * math.e)) == pytest.approx(0.5, abs=1e-12)
    for d in (0.1, 1.0, 3.0):
        assert radial_distance_lower(math.exp(5.0), k_constant(d)) == pytest.approx(d / 2.0, abs=1e-12)


def test_measure_d_constant_skips_failed_trials(monkeypatch):
    calls = []

    def flaky_trial(rng, R, params, divisions):
        calls.append(R)
        if len(calls) == 1:
            raise DegenerateDomain("no cut through alpha", {"R": R})
        return 1.5 * len(calls)

    monkeypatch.setattr(dyn_hyperbolic, "_case1_trial", flaky_trial)
    assert measure_d_constant(50.0, 3, "case1") == pytest.approx(4.5)
    assert len(calls) == 3


def test_measure_d_constant_needs_one_domain(monkeypatch):
    def failing_trial(rng, R, params, divisions):
        raise DegenerateDomain("no cut through alpha", {"R": R})

    monkeypatch.setattr(dyn_hyperbolic, "_case2_trial", failing_trial)
    with pytest.raises(Inconclusive):
        measure_d_constant(50.0, 2, "case2")


def test_working_d_takes_the_larger_construction(monkeypatch):
    monkeypatch.setattr(dyn_hyperbolic, "_case1_trial", lambda rng, R, params, divisions: 1.0)
    monkeypatch.setattr(dyn_hyperbolic, "_case2_trial", lambda rng, R, params, divisions: 2.5 + params["N"])
    working = measure_working_d(64.0, 3, trials=2, margin=1.5)
    assert working.source == "measured"
    assert working.half_by_scenario == {"case1": 1.0, "case2": 5.5}
    assert working.d == pytest.approx(16.5)
    assert working.to_dict()["R"] == 64.0
    with pytest.raises(PreconditionViolated):
        measure_working_d(64.0, 3, margin=0.5)


def test_configured_working_d():
    assert configured_working_d(20.0).to_dict()["source"] == "configured"
    with pytest.raises(PreconditionViolated):
        configured_working_d(0.0)
