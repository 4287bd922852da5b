import math

import numpy as np
import pytest

from dyn_hyperbolic import annulus_AN
from dyn_plane_domains import (CR_HALF_ANGLE, Annulus, Disk, PlanarDomain, boundary_contour, boundary_distance,
                               build_AR, build_case1_domain, build_case2_domain, build_CR, build_DR, contains)
from utils.errors import (DegenerateDomain, NotSimplyConnected, PreconditionViolated, ToolkitError,
                          WitnessTooClose)


def test_annulus_membership_and_distance():
    a_r = build_AR(9.0)
    assert contains(a_r, 9.0)
    assert not contains(a_r, 4.5)
    assert not contains(a_r, 18.5j)
    assert boundary_distance(a_r, 9.0) == pytest.approx(4.5)
    assert boundary_distance(a_r, 100.0) == 0.0


def test_sector_membership():
    d_r = build_DR(9.0, 0.0)
    assert contains(d_r, 9.0)
    assert contains(d_r, 9.0j)
    assert not contains(d_r, -9.0)
    c_r = build_CR(9.0, np.pi)
    assert contains(c_r, -9.0)
    assert not contains(c_r, 9.0)


def test_contains_is_vectorised():
    d = PlanarDomain(Disk(0j, 1.0))
    mask = contains(d, np.array([[0.0, 0.5], [1.0, 2.0]]))
    assert mask.shape == (2, 2)
    assert mask.tolist() == [[True, True], [False, False]]


def test_regions_need_large_radius():
    with pytest.raises(PreconditionViolated):
        build_AR(1.0)


def test_removed_disk_and_slit():
    d = PlanarDomain(Disk(0j, 10.0), removed_disks=[(5.0, 1.0)], slits=[np.array([-2j, -9j])], slit_halfwidth=0.1)
    assert not contains(d, 5.5)
    assert not contains(d, -5j)
    assert contains(d, -5j + 0.5)
    assert boundary_distance(d, 3.0) == pytest.approx(1.0)
    assert boundary_distance(d, -5j + 0.5) == pytest.approx(0.4)


def test_boundary_contours_orientation():
    disk = boundary_contour(PlanarDomain(Disk(0j, 2.0)), 0.1)
    assert len(disk) == 1 and disk[0].orientation == 1
    assert disk[0].length() == pytest.approx(2 * np.pi * 2.0, rel=1e-2)
    assert np.max(disk[0].edge_lengths()) <= 0.1 + 1e-9

    ring = boundary_contour(PlanarDomain(Annulus(1.0, 2.0)), 0.1)
    assert sorted(c.orientation for c in ring) == [-1, 1]


def test_simply_connected_flag_is_checked():
    flagged = PlanarDomain(Annulus(1.0, 2.0), simply_connected_flag=True)
    with pytest.raises(NotSimplyConnected):
        flagged.boundary_contour(0.1)
    assert not PlanarDomain(Annulus(1.0, 2.0)).is_simply_connected()
    assert build_DR(9.0, 0.0).is_simply_connected()


def test_removing_a_disk_drops_the_flag():
    d_r = build_DR(9.0, 0.0)
    holed = d_r.with_removed_disk(9.0, 0.5)
    assert not holed.simply_connected_flag
    assert holed.component_count(0.2) == (1, 2)


def test_slit_that_covers_everything_is_degenerate():
    d = PlanarDomain(Disk(0j, 1.0), slits=[np.array([0j])], slit_halfwidth=5.0)
    with pytest.raises(DegenerateDomain):
        d.boundary_contour(0.1)


def test_domain_dict_round_trip():
    d = build_case2_domain(20.0, [], 0.1, 20.0, 2.0, 20.0 * np.exp(2j * np.pi / 3), 20.0 * np.exp(-2j * np.pi / 3))
    again = PlanarDomain.from_dict(d.to_dict())
    samples = np.array([15.0, 20.0 + 0.5j, 20.0 * np.exp(2j * np.pi / 3), -30.0])
    assert again.contains(samples).tolist() == d.contains(samples).tolist()


def test_case1_domain_cases():
    R, z1, z2 = 20.0, 20.0j, -20.0j
    assert build_case1_domain(-100.0, R, z1, z2).meta["case"] == "i"
    assert build_case1_domain(12.0, R, z1, z2).meta["case"] == "ii"
    domain = build_case1_domain(20.0, R, z1, z2)
    assert domain.meta["case"] == "iii"
    assert domain.contains(np.array([z1, z2])).all()
    assert not domain.contains(20.0)
    assert domain.component_count(R / 16.0) == (1, 1)


def test_case1_rejects_witness_near_alpha():
    with pytest.raises(WitnessTooClose):
        build_case1_domain(20.0j, 20.0, 20.0j + 0.5, -20.0j)


def test_case2_domain_avoids_points():
    R = 20.0
    z1, z2 = R * np.exp(2j * np.pi / 3), R * np.exp(-2j * np.pi / 3)
    avoided = [-R]
    domain = build_case2_domain(R, avoided, 0.1, R, 2.0, z1, z2)
    assert domain.contains(np.array([z1, z2])).all()
    assert not domain.contains(R)
    assert not domain.contains(-R)
    assert domain.is_simply_connected(R / 16.0)


def _in_sector(rng, r_in, r_out, theta, half_angle):
    radius = math.sqrt(rng.uniform(r_in ** 2, r_out ** 2))
    return radius * np.exp(1j * (theta + rng.uniform(-half_angle, half_angle)))


def _random_case1_domain(rng, R):
    z1 = _in_sector(rng, 2.0 * R / 3.0, 3.0 * R / 2.0, 0.0, CR_HALF_ANGLE)
    z2 = _in_sector(rng, 2.0 * R / 3.0, 3.0 * R / 2.0, 0.0, CR_HALF_ANGLE)
    alpha = _in_sector(rng, R / 2.0, 2.0 * R, 0.0, np.pi)
    return build_case1_domain(alpha, R, z1, z2), (z1, z2)


def _random_case2_domain(rng, R):
    N = int(rng.integers(2, 5))
    eps = 1.0 / (2.0 * N * (N + 2))
    r_lo, r_hi = R / 2.0 + eps * R, 2.0 * R - eps * R
    z1, z2 = _in_sector(rng, r_lo, r_hi, 0.0, np.pi), _in_sector(rng, r_lo, r_hi, 0.0, np.pi)
    points = [_in_sector(rng, r_lo, r_hi, 0.0, np.pi) for _ in range(int(rng.integers(1, N + 2)))]
    points = [x for x in points if min(abs(x - z1), abs(x - z2)) >= eps * R]
    if not points:
        raise DegenerateDomain("no admissible alpha drawn", {"R": R})
    return build_case2_domain(points[0], points[1:], eps, R, 2.0, z1, z2), (z1, z2)


@pytest.mark.slow
def test_random_slit_domains_have_one_contour():
    rng = np.random.default_rng(21)
    R = 20.0
    built = {"case1": 0, "case2": 0}
    attempts = 0
    while sum(built.values()) < 1000:
        attempts += 1
        assert attempts < 5000
        scenario = "case1" if attempts % 2 else "case2"
        try:
            domain, witnesses = (_random_case1_domain if scenario == "case1" else _random_case2_domain)(rng, R)
        except ToolkitError:
            continue
        assert domain.component_count(R / 16.0) == (1, 1)
        assert domain.contains(np.array(witnesses)).all()
        built[scenario] += 1
    assert min(built.values()) > 0


def test_nested_regions():
    rng = np.random.default_rng(22)
    for _ in range(20):
        R = float(np.exp(rng.uniform(np.log(10.0), np.log(1e4))))
        theta = float(rng.uniform(-np.pi, np.pi))
        c_r, d_r, a_r = build_CR(R, theta), build_DR(R, theta), build_AR(R)
        z = R * (rng.uniform(-2.5, 2.5, 2000) + 1j * rng.uniform(-2.5, 2.5, 2000))
        in_c, in_d, in_a = c_r.contains(z), d_r.contains(z), a_r.contains(z)
        assert np.all(in_d[in_c])
        assert np.all(in_a[in_d])
        assert in_c.any()


def test_covered_annulus_is_monotone():
    rng = np.random.default_rng(23)
    for _ in range(100):
        m = float(np.exp(rng.uniform(-5.0, 5.0)))
        M = float(np.exp(rng.uniform(10.0, 400.0)))
        d = float(rng.uniform(0.1, 3.0))
        N = int(rng.integers(1, 5))
        base = annulus_AN(m, M, d, N)
        more_preimages = annulus_AN(m, M, d, N + 1)
        assert more_preimages.log_r_upper < base.log_r_upper
        assert more_preimages.log_r_lower == base.log_r_lower
        larger_M = annulus_AN(m, M * 2.0, d, N)
        assert larger_M.log_r_upper > base.log_r_upper
        assert larger_M.log_r_lower < base.log_r_lower
        assert annulus_AN(m * 2.0, M, d, N).log_r_lower > base.log_r_lower
        assert annulus_AN(m, M, d + 0.1, N).log_r_upper < base.log_r_upper
