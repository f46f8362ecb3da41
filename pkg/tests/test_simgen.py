"""Generator contracts: geometry, noise calibration, determinism."""
import numpy as np
import pytest
from scipy.stats import chi2

from landskew.errors import DataError
from landskew.simgen import SimConfig, sample_spirals, simulate


def one_cloud(**kw):
    cfg = SimConfig(n_clouds=1, **kw)
    return simulate(cfg)[0]


# ---------------------------------------------------------------------------
# circle
# ---------------------------------------------------------------------------

def test_circle_equispaced_decagon():
    cloud = one_cloud(design="circle", seed=1, size_range=(10, 10),
                      radius_mean=1.0, radius_sd=0.0, equispaced=True)
    assert cloud.n == 10 and cloud.dim == 2
    assert np.allclose(np.linalg.norm(cloud.points, axis=1), 1.0, rtol=1e-12)
    gaps = np.linalg.norm(np.roll(cloud.points, -1, axis=0) - cloud.points, axis=1)
    assert np.allclose(gaps, 2.0 * np.sin(np.pi / 10.0), rtol=1e-12)


def test_circle_noiseless_points_on_circle():
    cloud = one_cloud(design="circle", seed=5)
    norms = np.linalg.norm(cloud.points, axis=1)
    assert np.allclose(norms, norms[0], rtol=1e-12)
    assert 10 <= cloud.n <= 30


def test_circle_noise_variance_calibrated():
    kw = dict(design="circle", seed=77, size_range=(10000, 10000),
              radius_mean=1.0, radius_sd=0.0)
    noisy = one_cloud(noise_sigma_factor=0.1, **kw)
    clean = one_cloud(noise_sigma_factor=0.0, **kw)
    noise = noisy.points - clean.points
    var = noise.var()
    assert abs(var - 0.01) <= 0.05 * 0.01


def test_circle_scale_equivariance_under_same_seed():
    kw = dict(design="circle", seed=9, size_range=(15, 25))
    base = one_cloud(radius_mean=1.0, radius_sd=0.3, **kw)
    scaled = one_cloud(radius_mean=2.5, radius_sd=0.75, **kw)
    assert np.allclose(scaled.points, 2.5 * base.points, rtol=1e-12)


def test_simulate_bitwise_deterministic():
    cfg = SimConfig(design="circle", n_clouds=4, seed=123, noise_sigma_factor=0.05)
    a = simulate(cfg)
    b = simulate(cfg)
    for ca, cb in zip(a, b):
        assert np.array_equal(ca.points, cb.points)
    assert not np.array_equal(a[0].points[: a[1].n], a[1].points[: a[0].n])


# ---------------------------------------------------------------------------
# two circles
# ---------------------------------------------------------------------------

def test_two_circles_forced_geometry():
    cloud = one_cloud(design="two-circles", seed=3, size_range=(30, 30),
                      radius_mean=1.0, radius_sd=0.0, fixed_ratio=0.5)
    centre = np.array([1.5, 0.0])
    d_big = np.abs(np.linalg.norm(cloud.points, axis=1) - 1.0)
    d_small = np.abs(np.linalg.norm(cloud.points - centre, axis=1) - 0.5)
    on_big = d_big <= 1e-12
    on_small = d_small <= 1e-12
    assert np.all(on_big | on_small)
    # circumference-proportional split: share 0.5/1.5 of 30 -> 10 small points
    assert on_small.sum() == 10 and on_big.sum() == 20


def test_two_circles_tangency_point():
    # circles touch at (R, 0): external tangency
    cloud = one_cloud(design="two-circles", seed=8, radius_sd=0.0,
                      radius_mean=2.0, fixed_ratio=0.25, size_range=(40, 40))
    centre = np.array([2.5, 0.0])
    r_small = 0.5
    # the small circle's closest approach to the origin is R = 2
    assert np.min(np.linalg.norm(cloud.points - centre, axis=1)) >= r_small - 1e-9


# ---------------------------------------------------------------------------
# spirals
# ---------------------------------------------------------------------------

def test_spirals_envelope_and_symmetry():
    cloud = one_cloud(design="spirals", seed=2, fixed_revolutions=2.0)
    assert cloud.n == 2000
    radii = np.linalg.norm(cloud.points, axis=1)
    assert np.isclose(radii.max(), 1.0, rtol=1e-12)
    assert np.array_equal(cloud.points[1000:], -cloud.points[:1000])


def test_spirals_tightness_controls_arm_gap():
    # more revolutions => windings closer together => smaller inter-arm gap
    # and a smaller dominant merge scale (the landscape shifts left)
    def arm_gap(u):
        cloud = one_cloud(design="spirals", seed=1, fixed_revolutions=u)
        arm1, arm2 = cloud.points[:1000], cloud.points[1000:]
        d = np.sqrt(((arm1[:, None, :] - arm2[None, :, :]) ** 2).sum(-1))
        return d.min()

    g5, g2 = arm_gap(5.0), arm_gap(2.0)
    assert g5 < g2
    assert np.isclose(g5, 1.0 / 10.0, rtol=0.2)
    assert np.isclose(g2, 1.0 / 4.0, rtol=0.2)


def test_spirals_random_revolutions_within_range():
    rng = np.random.default_rng(0)
    cfg = SimConfig(design="spirals", n_clouds=1, seed=6)
    cloud = sample_spirals(cfg, rng)
    assert np.linalg.norm(cloud.points, axis=1).max() <= 1.0 + 1e-12


# ---------------------------------------------------------------------------
# torus
# ---------------------------------------------------------------------------

def test_torus_forced_geometry():
    cloud = one_cloud(design="torus", seed=4, radius_mean=2.0, radius_sd=0.0,
                      fixed_ratio=0.5)
    assert cloud.n == 1000 and cloud.dim == 3
    axis_dist = np.hypot(cloud.points[:, 0], cloud.points[:, 1])
    assert axis_dist.min() >= 1.0 - 1e-12 and axis_dist.max() <= 3.0 + 1e-12
    on_torus = (axis_dist - 2.0) ** 2 + cloud.points[:, 2] ** 2
    assert np.allclose(on_torus, 1.0, rtol=1e-12)


def test_torus_downscaled_size():
    cloud = one_cloud(design="torus", seed=4, n_points=137)
    assert cloud.n == 137


def test_torus_tube_angle_density():
    # area-uniform: tube angle density proportional to (R + r*cos(theta))
    big_r, ratio = 2.0, 0.5
    r = big_r * ratio
    cloud = one_cloud(design="torus", seed=11, radius_mean=big_r, radius_sd=0.0,
                      fixed_ratio=ratio, n_points=100000)
    axis_dist = np.hypot(cloud.points[:, 0], cloud.points[:, 1])
    theta = np.arctan2(cloud.points[:, 2] / r, (axis_dist - big_r) / r)
    bins = np.linspace(-np.pi, np.pi, 37)
    counts, _ = np.histogram(theta, bins)
    expected = big_r * np.diff(bins) + r * np.diff(np.sin(bins))
    expected *= cloud.n / (2.0 * np.pi * big_r)
    stat = np.sum((counts - expected) ** 2 / expected)
    assert chi2.sf(stat, len(counts) - 1) > 1e-3


# ---------------------------------------------------------------------------
# config validation
# ---------------------------------------------------------------------------

def test_noise_rejected_where_undefined():
    for design in ("spirals", "torus"):
        with pytest.raises(DataError):
            SimConfig(design=design, noise_sigma_factor=0.1)


def test_bad_design_and_size_range():
    with pytest.raises(DataError):
        SimConfig(design="klein-bottle")
    with pytest.raises(DataError):
        SimConfig(size_range=(5, 2))
