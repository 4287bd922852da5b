import math

import numpy as np
import pytest

from dyn_function_model import ExpAffine, LacunaryProduct, Polynomial
from dyn_plane_domains import Annulus, Disk, PlanarDomain
from dyn_winding import (BoundaryCache, count_on_contour, count_preimages, covering_report, locate_preimages,
                         rouche_transfer, shifted_log, winding_number)
from utils.errors import BoundaryHit, MarginTooSmall, NeedsRefinement, OnTarget, PreconditionViolated

CUBE = Polynomial([0, 0, 0, 1])
SQUARE = Polynomial([0, 0, 1])


def _circle(n, radius=1.0):
    return radius * np.exp(2j * np.pi * np.arange(n) / n)


def test_winding_number_of_circle():
    loop = _circle(64)
    assert winding_number(loop, 0) == 1
    assert winding_number(loop, 2) == 0
    assert winding_number(loop[::-1], 0) == -1


def test_winding_number_errors():
    with pytest.raises(NeedsRefinement):
        winding_number(_circle(3), 0)
    with pytest.raises(OnTarget):
        winding_number(_circle(8), 1)


def test_shifted_log_matches_direct_log():
    f = np.array([3.0 + 1j, 0.1 - 0.2j, -5.0])
    w = 0.5 + 0.5j
    expected = np.log(f - w)
    got = shifted_log(np.log(f), w)
    assert np.allclose(np.exp(got), np.exp(expected))


def test_count_on_contour_refines_coarse_loops():
    assert count_on_contour(CUBE, _circle(6, 2.0), 1.0) == 3


def test_count_preimages():
    assert count_preimages(CUBE, PlanarDomain(Disk(0j, 2.0)), 1.0).count == 3
    assert count_preimages(ExpAffine(), PlanarDomain(Disk(0j, 1.0)), 0.0).count == 0
    assert count_preimages(ExpAffine(), PlanarDomain(Disk(0j, 7.0)), 1.0).count == 3
    assert count_preimages(SQUARE, PlanarDomain(Disk(0j, 1.0)), 0.0).count == 2


def test_count_preimages_in_annulus():
    result = count_preimages(SQUARE, PlanarDomain(Annulus(1.0, 2.0)), 2.25)
    assert result.count == 2
    assert result.min_boundary_gap > 0


def test_target_on_boundary():
    with pytest.raises(BoundaryHit):
        count_preimages(SQUARE, PlanarDomain(Disk(0j, 1.0)), 1.0)


def test_boundary_cache_batch_agrees_with_single_counts():
    cache = BoundaryCache(CUBE, PlanarDomain(Disk(0j, 2.0)))
    targets = np.array([0.5, 3.0j, 20.0])
    batch = cache.count_batch(targets)
    for w, result in zip(targets, batch):
        single = cache.count(w).count
        if not isinstance(result, NeedsRefinement):
            assert result.count == single
    assert [cache.count(w).count for w in targets] == [3, 3, 0]


def test_rouche_transfer():
    cubic = rouche_transfer(CUBE, PlanarDomain(Disk(0j, 2.0)), 7.0, 0.0)
    assert cubic.count == 3
    assert cubic.margin > 0

    exp_case = rouche_transfer(ExpAffine(), PlanarDomain(Disk(0j, 1.0)), math.exp(-1.0) - 0.05, 0.2)
    assert exp_case.count == 0


def test_rouche_transfer_failures():
    with pytest.raises(PreconditionViolated):
        rouche_transfer(CUBE, PlanarDomain(Disk(0j, 2.0)), 7.0, 8.0)
    with pytest.raises(MarginTooSmall):
        rouche_transfer(CUBE, PlanarDomain(Disk(0j, 2.0)), 9.0, 0.0)


def test_covering_report():
    source, target = PlanarDomain(Disk(0j, 2.0), domain_id="src"), PlanarDomain(Disk(0j, 3.0), domain_id="dst")
    report = covering_report(SQUARE, source, target, 0.5, 2)
    assert report.ok
    assert report.min_count == 2
    assert report.fraction_ok == 1.0
    rows = report.csv_rows()
    assert rows[0] == ["row", "col", "re", "im", "count", "status"]
    assert len(rows) == report.points.size + 1

    strict = covering_report(SQUARE, source, target, 0.5, 3)
    assert not strict.ok
    assert len(strict.failing) == strict.points.size


def test_covering_report_is_thread_independent():
    source, target = PlanarDomain(Disk(0j, 2.0)), PlanarDomain(Disk(0j, 3.0))
    serial = covering_report(CUBE, source, target, 0.25, 3, threads=1)
    parallel = covering_report(CUBE, source, target, 0.25, 3, threads=4)
    assert serial.counts.tolist() == parallel.counts.tolist()


def test_covering_report_rejects_bad_step():
    with pytest.raises(PreconditionViolated):
        covering_report(SQUARE, PlanarDomain(Disk(0j, 2.0)), PlanarDomain(Disk(0j, 3.0)), 0.0, 2)


def test_locate_preimages_of_cube():
    clusters = locate_preimages(CUBE, PlanarDomain(Disk(0j, 2.0)), 1.0)
    assert len(clusters) == 3
    roots = np.exp(2j * np.pi * np.arange(3) / 3)
    for cluster in clusters:
        assert cluster.multiplicity == 1
        assert np.min(np.abs(roots - cluster.center)) < 1e-9


def test_locate_preimages_of_exponential():
    clusters = locate_preimages(ExpAffine(), PlanarDomain(Disk(0j, 10.0)), 2.0)
    assert len(clusters) == 3
    assert all(abs(c.center.real - math.log(2.0)) < 1e-9 for c in clusters)


def test_locate_preimages_double_root_and_cap():
    clusters = locate_preimages(SQUARE, PlanarDomain(Disk(0j, 1.0)), 0.0)
    assert sum(c.multiplicity for c in clusters) == 2
    assert all(abs(c.center) < 1e-3 for c in clusters)
    assert len(locate_preimages(CUBE, PlanarDomain(Disk(0j, 2.0)), 1.0, cap=1)) == 1


def _exp_branches_inside(w, radius):
    """Moduli of the solutions of e^z = w with |Im z| <= radius + 2 pi."""
    log_w = np.log(complex(w))
    ks = np.arange(-int(radius) - 2, int(radius) + 3)
    return np.abs(log_w.real + 1j * (log_w.imag + 2.0 * np.pi * ks))


def test_exponential_branch_counts_match_the_closed_form():
    rng = np.random.default_rng(11)
    domain = PlanarDomain(Disk(0j, 10.0))
    checked = 0
    while checked < 50:
        w = np.exp(rng.uniform(-3.0, 3.0)) * np.exp(1j * rng.uniform(-np.pi, np.pi))
        moduli = _exp_branches_inside(w, 10.0)
        if np.min(np.abs(moduli - 10.0)) < 0.05:
            continue
        assert count_preimages(ExpAffine(), domain, w).count == int(np.sum(moduli < 10.0))
        checked += 1


def test_random_polynomials_have_degree_many_preimages():
    rng = np.random.default_rng(12)
    for _ in range(200):
        degree = int(rng.integers(1, 7))
        coeffs = rng.normal(size=degree + 1) + 1j * rng.normal(size=degree + 1)
        w = complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0))
        shifted = np.abs(coeffs[:-1])
        shifted[0] = abs(coeffs[0]) + abs(w)
        radius = 2.0 * (1.0 + float(np.max(shifted)) / abs(coeffs[-1]))
        spec = Polynomial(coeffs)
        assert count_preimages(spec, PlanarDomain(Disk(0j, radius)), w).count == degree


def test_rouche_transfer_agrees_with_direct_counts():
    rng = np.random.default_rng(13)
    for _ in range(50):
        degree = int(rng.integers(2, 5))
        coeffs = np.append(0.5 * (rng.normal(size=degree) + 1j * rng.normal(size=degree)), 1.0)
        spec = Polynomial(coeffs)
        radius = 2.0 * (1.0 + float(np.max(np.abs(coeffs[:-1]))))
        domain = PlanarDomain(Disk(0j, radius))
        r = 0.5 * float(np.min(np.abs(spec.value(_circle(4096, radius)))))
        w = 0.9 * r * math.sqrt(rng.uniform()) * np.exp(1j * rng.uniform(0.0, 2.0 * np.pi))
        transfer = rouche_transfer(spec, domain, r, w)
        assert transfer.count == count_preimages(spec, domain, w).count == degree


def test_counts_are_stable_under_refinement():
    rng = np.random.default_rng(14)
    domain = PlanarDomain(Annulus(1.0, 5.0))
    for _ in range(10):
        w = complex(rng.uniform(-30.0, 30.0), rng.uniform(-30.0, 30.0))
        moduli = _exp_branches_inside(w, 5.0)
        if np.min(np.abs(moduli - 5.0)) < 0.05 or np.min(np.abs(moduli - 1.0)) < 0.05:
            continue
        counts = {count_preimages(ExpAffine(), domain, w, max_edge_length=h).count for h in (0.5, 0.1, 0.02)}
        assert counts == {int(np.sum((moduli > 1.0) & (moduli < 5.0)))}
    for w in (0.3, 2.0 + 1.0j, -5.0j):
        assert count_on_contour(CUBE, _circle(8, 3.0), w) == count_on_contour(CUBE, _circle(4096, 3.0), w) == 3


def test_derivatives_match_central_differences():
    rng = np.random.default_rng(15)
    specs = [ExpAffine(0.7 - 0.4j, 0.2 + 0.1j), Polynomial([1.0, -2.0j, 0.5, 0.25 + 1j]),
             LacunaryProduct([2.0, 16.0, 256.0])]
    z = rng.uniform(-1.5, 1.5, 20) + 1j * rng.uniform(-1.5, 1.5, 20)
    h = 1e-6
    for spec in specs:
        for step in (h, 1j * h):
            central = (spec.value(z + step) - spec.value(z - step)) / (2.0 * step)
            np.testing.assert_allclose(spec.derivative_value(z), central, rtol=1e-6, atol=1e-8)
