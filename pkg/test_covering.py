import math

import numpy as np
import pytest

from app.trace_utils import TraceLog
import dyn_covering
from dyn_covering import (BudgetExhausted, CoveringCertificate, case1_search, case2b_certificate,
                          check_dichotomy_hypotheses, choose_j, default_schedule, find_self_covering_V, find_witnesses,
                          hypothesis_threshold, run_dichotomy, sublevel_components)
from dyn_entropy import backward_orbit_separated_count, certificate_entropy_bound, prepare_backward_orbit_params
from dyn_function_model import ExpAffine, LacunaryProduct, Polynomial
from dyn_hyperbolic import measure_working_d
from dyn_plane_domains import build_AR
from dyn_winding import CoveringGridReport, covering_report
from utils.errors import CertificationFailed, Inconclusive, PreconditionViolated


def test_hypotheses_for_large_growth():
    R = math.exp(3.0)
    report = check_dichotomy_hypotheses(3.0 * R, R ** 8, R, 8, 1, 0.5)
    assert report.passed
    assert report.margins["k_power"] > 0

    small = math.exp(1.0)
    failed = check_dichotomy_hypotheses(3.0 * small, small ** 8, small, 8, 1, 0.5)
    assert not failed.passed
    assert not failed.k_power_ok


def test_hypotheses_need_m_below_M():
    with pytest.raises(PreconditionViolated):
        check_dichotomy_hypotheses(10.0, 5.0, 100.0, 2, 1, 0.5)


def test_hypothesis_threshold():
    threshold = hypothesis_threshold(8, 1, 0.5)
    assert threshold == pytest.approx(5.0 * math.exp(0.5) / 4.0, abs=1e-3)
    assert hypothesis_threshold(2, 1, 1.2) is None


def test_choose_j():
    assert choose_j(ExpAffine(), 64.0, 2, 20.0, "advisory") == 2
    assert choose_j(Polynomial([0, 0, 1]), 64.0, 2, 20.0, "advisory") == 3
    strict = choose_j(ExpAffine(), 64.0, 1, 0.5, "strict")
    assert 0.5 * strict * math.log(64.0) > 5.0 * math.exp(0.5)


def test_find_witnesses_for_exponential():
    witnesses = find_witnesses(ExpAffine(), 64.0, 2)
    assert witnesses is not None
    assert witnesses.w_M == pytest.approx(64.0, abs=1e-6)
    assert witnesses.log_M == pytest.approx(64.0, rel=1e-9)
    assert witnesses.log_m < math.log(3.0 * 64.0)
    assert 0.0 < abs(witnesses.theta) < math.pi / 2.0


def test_find_witnesses_for_polynomial():
    assert find_witnesses(Polynomial([0, 0, 1]), 64.0, 3) is None
    with pytest.raises(PreconditionViolated):
        find_witnesses(ExpAffine(), 1.0, 2)


def test_dichotomy_requires_checked_hypotheses():
    with pytest.raises(PreconditionViolated):
        run_dichotomy(ExpAffine(), 64.0, 0.0, 2, 2, 20.0, None)


def test_default_schedule():
    assert default_schedule(64.0, 2.0, 3) == [64.0, 128.0, 256.0]


def test_search_rejects_zero_multiplicity():
    with pytest.raises(PreconditionViolated):
        find_self_covering_V(ExpAffine(), 0, [64.0])


def test_polynomial_exhausts_the_budget():
    trace = TraceLog()
    result = find_self_covering_V(Polynomial([0, 0, 1]), 2, [64.0, 128.0, 256.0], budget=2, trace=trace)
    assert isinstance(result, BudgetExhausted)
    assert result.schedule == [64.0, 128.0]
    assert result.to_dict()["status"] == "BudgetExhausted"
    assert trace.messages() == ["witness |f|>R^j never found"] * 2


def test_sublevel_set_of_exponential():
    sublevel = sublevel_components(ExpAffine(), 64.0)
    assert len(sublevel.components) == 1
    assert sublevel.crosses_all()
    assert sublevel.components[0].diameter > 200.0
    with pytest.raises(PreconditionViolated):
        sublevel_components(ExpAffine(), 64.0, grid_step=1.0)


def test_case1_diameter_failure():
    R = 20.0 * math.pi
    alpha = complex(math.log(R), R)
    with pytest.raises(CertificationFailed) as info:
        case1_search(ExpAffine(), R, 0.0, 2, 2, alpha, d=0.01)
    assert info.value.constraint == "diameter"


@pytest.mark.slow
def test_case1_vacuous_route():
    certificate = case1_search(ExpAffine(), 64.0, 0.0, 2, 2, 0.0)
    assert isinstance(certificate, CoveringCertificate)
    assert certificate.case_tag == "I"
    assert certificate.details["vacuous"]
    assert certificate.grid_report.ok and certificate.self_inclusion_evidence.ok


@pytest.mark.slow
def test_exponential_certificate():
    result = find_self_covering_V(ExpAffine(), 2, [64.0], d=None)
    assert isinstance(result, CoveringCertificate)
    assert result.case_tag == "IIb"
    assert result.grid_report.min_count >= 2
    assert result.self_inclusion_evidence.min_count >= 2
    assert result.enclosing_radius == 128.0

    working = result.details["working_d"]
    assert working["source"] == "measured"
    assert working["R"] == 64.0
    assert working["d"] == pytest.approx(2.0 * working["margin"] * max(working["half_by_scenario"].values()))
    assert result.details["hypotheses"]["mode"] == "advisory"
    assert "hypothesis_threshold_log_R" in result.details


@pytest.mark.slow
def test_lacunary_product_certificate():
    spec = LacunaryProduct([2.0, 16.0, 256.0, 8192.0])
    result = find_self_covering_V(spec, 3, default_schedule(64.0, 2.0, 10))
    assert isinstance(result, CoveringCertificate)
    assert result.case_tag == "IIa"
    assert result.grid_report.min_count >= 3


def test_skipped_scan_points_block_full_covering(monkeypatch):
    def scan_with_a_skip(spec, source, target, grid_step, N, threads=1):
        return CoveringGridReport(source.domain_id, target.domain_id, N, grid_step, np.array([100.0 + 0j]),
                                  np.array([[0, 0]]), np.array([-1]), [],
                                  [{"grid_index": [0, 0], "point": [100.0, 0.0], "reason": "OnTarget"}])

    monkeypatch.setattr(dyn_covering, "covering_report", scan_with_a_skip)
    hypotheses = check_dichotomy_hypotheses(3.0 * 64.0, 64.0 ** 8, 64.0, 8, 1, 0.5)
    with pytest.raises(Inconclusive) as info:
        run_dichotomy(ExpAffine(), 64.0, 0.0, 8, 1, 0.5, hypotheses)
    assert len(info.value.details["skipped"]) == 1


@pytest.mark.slow
def test_case1_diameter_guard_uses_the_working_d():
    R = 20.0 * math.pi
    alpha = complex(math.log(R), R)
    with pytest.raises(CertificationFailed) as info:
        case1_search(ExpAffine(), R, 0.0, 2, 2, alpha, d=0.01)
    bound = info.value.details["upper_bound"]

    with pytest.raises(CertificationFailed) as tight:
        case1_search(ExpAffine(), R, 0.0, 2, 2, alpha, d=2.0 * bound * (1.0 - 1e-6))
    assert tight.value.constraint == "diameter"

    working = measure_working_d(R, 2)
    assert working.source == "measured"
    if bound > working.d / 2.0:
        with pytest.raises(CertificationFailed) as measured:
            case1_search(ExpAffine(), R, 0.0, 2, 2, alpha, d=None)
        assert measured.value.constraint == "diameter"
        assert measured.value.details["d"] == pytest.approx(working.d)
    else:
        try:
            result = case1_search(ExpAffine(), R, 0.0, 2, 2, alpha, d=None)
        except CertificationFailed as error:
            assert error.constraint != "diameter"
        else:
            assert result.details["diameter"]["upper_bound"] <= working.d / 2.0


@pytest.mark.slow
def test_slit_annulus_past_the_annulus_shortcut():
    spec = Polynomial([0.0, 0.0, 1.0 / 64.0])
    R, N = 64.0, 2
    a_r = build_AR(R)
    sublevel = sublevel_components(spec, R)
    report = covering_report(spec, a_r, a_r, R / 8.0, N)
    assert report.ok
    certificate = case2b_certificate(spec, R, N, 1, 1e3, sublevel, report=report)
    assert certificate.case_tag == "IIb"
    assert certificate.details["ell"] == 2
    assert certificate.details["alpha"] == [40.0, 0.0]
    assert len(certificate.V.slits) >= 2
    assert certificate.V.component_count(R / 16.0) == (1, 1)
    assert certificate.grid_report.min_count >= N
    assert certificate.self_inclusion_evidence.min_count >= N


@pytest.fixture(scope="module")
def exponential_n4_certificate():
    result = find_self_covering_V(ExpAffine(), 4, default_schedule(64.0, 2.0, 8))
    assert isinstance(result, CoveringCertificate)
    return result


@pytest.mark.slow
def test_exponential_certificate_covers_four_times(exponential_n4_certificate):
    result = exponential_n4_certificate
    assert result.case_tag == "IIb"
    assert result.grid_report.min_count >= 4
    assert result.self_inclusion_evidence.min_count >= 4
    assert result.self_inclusion_evidence.grid_step == pytest.approx(result.grid_report.grid_step / 2.0)


@pytest.mark.slow
def test_exponential_certificate_backward_orbits(exponential_n4_certificate):
    spec, result = ExpAffine(), exponential_n4_certificate
    params = prepare_backward_orbit_params(spec, result.V, result.R, 3, 3, branch_cap=4)
    assert params.degree_product == 1
    count = backward_orbit_separated_count(spec, result, params)
    assert int(count) >= 4 ** 9
    assert count.meets_floor
    bound = certificate_entropy_bound(spec, result, params)
    assert bound.measured >= 0.95 * math.log(4.0)
