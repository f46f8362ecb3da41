"""Seeded generators for the simulated point-cloud designs.

Designs
-------
``circle``       one circle; count M ~ DiscreteUniform(size_range), radius
                 r ~ |Normal(radius_mean, radius_sd^2)|, angles uniform (or
                 equispaced starting at angle 0 when ``equispaced`` is set);
                 optional isotropic noise with per-coordinate variance
                 r * noise_sigma_factor^2.
``two-circles``  a large circle centred at the origin and a small circle
                 externally tangent to it on the +x axis; small/large radius
                 ratio ~ Beta(10, 10); points split between the circles in
                 proportion to circumference; noise variance scales with the
                 radius of the circle each point lies on.
``spirals``      two interleaved Archimedean spiral arms (the second arm is the
                 point reflection of the first), a common tightness drawn as
                 u ~ Uniform(2, 5) full revolutions, outer radius exactly 1,
                 1000 points per arm equispaced in arc length.
``torus``        area-uniform sample of a torus of revolution in R^3; major
                 radius |Normal(radius_mean, radius_sd^2)|, minor/major ratio
                 ~ Beta(10, 10); tube angle drawn by rejection against the
                 density proportional to (R + r*cos(theta)).

Randomness: one 64-bit PCG64 stream per cloud, split from the master seed with
``numpy.random.SeedSequence(seed).spawn(n_clouds)``.  Per design the draw order
is fixed and documented in each sampler, so equal configs reproduce bitwise
identical clouds and forcing one parameter (e.g. radius_sd=0) does not shift
the remaining draws.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from .errors import DataError

__all__ = ["PointCloud", "SimConfig", "simulate", "sample_circle",
           "sample_two_circles", "sample_spirals", "sample_torus",
           "SPIRAL_POINTS_PER_ARM", "TORUS_POINTS"]

SPIRAL_POINTS_PER_ARM = 1000
TORUS_POINTS = 1000
_DESIGNS = ("circle", "two-circles", "spirals", "torus")


@dataclass
class PointCloud:
    """A finite point set in R^dim."""

    points: np.ndarray
    dim: int
    label: Optional[str] = None

    def __post_init__(self) -> None:
        self.points = np.asarray(self.points, np.float64)
        if self.points.ndim != 2:
            raise DataError("points must be a 2-D array")
        if self.points.shape[1] != self.dim:
            raise DataError(
                f"dim mismatch: points have {self.points.shape[1]} columns, dim={self.dim}"
            )

    @property
    def n(self) -> int:
        return self.points.shape[0]


@dataclass
class SimConfig:
    design: str = "circle"
    n_clouds: int = 20
    seed: int = 0
    noise_sigma_factor: float = 0.0
    size_range: Tuple[int, int] = (10, 30)
    radius_mean: float = 1.0
    radius_sd: float = 0.3
    label: Optional[str] = None
    # test/repro hooks
    equispaced: bool = False            # circle only: deterministic angles
    fixed_ratio: Optional[float] = None  # two-circles / torus: force the Beta draw
    fixed_revolutions: Optional[float] = None  # spirals: force the Uniform draw
    n_points: Optional[int] = None      # torus/spirals: override the default 1000/2000
    split: str = "proportional"         # two-circles: how points divide between circles

    def __post_init__(self) -> None:
        if self.design not in _DESIGNS:
            raise DataError(f"unknown design {self.design!r}; expected one of {_DESIGNS}")
        if self.split not in ("proportional", "equal", "per-circle"):
            raise DataError(
                f"unknown split {self.split!r}; expected proportional, equal or per-circle"
            )
        lo, hi = self.size_range
        if not (0 < lo <= hi):
            raise DataError(f"invalid size_range {self.size_range}")
        if self.noise_sigma_factor < 0:
            raise DataError("noise_sigma_factor must be >= 0")
        if self.noise_sigma_factor > 0 and self.design in ("spirals", "torus"):
            raise DataError(f"additive noise is not defined for design {self.design!r}")


def _draw_size(cfg: SimConfig, rng: np.random.Generator) -> int:
    lo, hi = cfg.size_range
    return int(rng.integers(lo, hi + 1))


def _draw_radius(cfg: SimConfig, rng: np.random.Generator) -> float:
    return float(abs(rng.normal(cfg.radius_mean, cfg.radius_sd)))


def sample_circle(cfg: SimConfig, rng: np.random.Generator) -> PointCloud:
    """Draw order: M, radius, angles, noise."""
    m = _draw_size(cfg, rng)
    r = _draw_radius(cfg, rng)
    if cfg.equispaced:
        theta = 2.0 * np.pi * np.arange(m) / m
    else:
        theta = rng.uniform(0.0, 2.0 * np.pi, m)
    pts = r * np.column_stack((np.cos(theta), np.sin(theta)))
    c = cfg.noise_sigma_factor
    if c > 0:
        pts = pts + rng.normal(0.0, np.sqrt(r) * c, (m, 2))
    return PointCloud(pts, 2, cfg.label)


def sample_two_circles(cfg: SimConfig, rng: np.random.Generator) -> PointCloud:
    """Draw order: M, large radius, ratio, [small M,] large angles, small angles, noise.

    ``split`` controls how the points divide between the circles:

    - ``proportional`` (default): one size draw M; each circle receives points
      in proportion to its circumference.  With M in the low tens the small
      circle gets few points, so its loop is often born late or not at all.
    - ``equal``: one size draw M, halved between the circles.
    - ``per-circle``: each circle receives its own independent size draw, so
      both loops are expressed at the same sampling density.
    """
    m = _draw_size(cfg, rng)
    big_r = _draw_radius(cfg, rng)
    ratio = float(rng.beta(10.0, 10.0)) if cfg.fixed_ratio is None else cfg.fixed_ratio
    small_r = big_r * ratio
    if cfg.split == "per-circle":
        n_big = m
        n_small = _draw_size(cfg, rng)
    elif cfg.split == "equal":
        n_small = m // 2
        n_big = m - n_small
    else:
        n_small = int(np.floor(m * ratio / (1.0 + ratio) + 0.5))
        n_small = min(max(n_small, 1), m - 1)
        n_big = m - n_small
    th_big = rng.uniform(0.0, 2.0 * np.pi, n_big)
    th_small = rng.uniform(0.0, 2.0 * np.pi, n_small)
    big = big_r * np.column_stack((np.cos(th_big), np.sin(th_big)))
    centre = np.array([big_r + small_r, 0.0])
    small = centre + small_r * np.column_stack((np.cos(th_small), np.sin(th_small)))
    c = cfg.noise_sigma_factor
    if c > 0:
        big = big + rng.normal(0.0, np.sqrt(big_r) * c, (n_big, 2))
        small = small + rng.normal(0.0, np.sqrt(small_r) * c, (n_small, 2))
    return PointCloud(np.vstack((big, small)), 2, cfg.label)


def _spiral_arm(u: float, n: int) -> np.ndarray:
    # rho(theta) = a*theta with the outer radius pinned to 1 at u revolutions;
    # points equispaced in arc length on theta in [pi/2, 2*pi*u].
    a = 1.0 / (2.0 * np.pi * u)
    th_lo, th_hi = 0.5 * np.pi, 2.0 * np.pi * u

    def arclen(th: np.ndarray) -> np.ndarray:
        return 0.5 * a * (th * np.sqrt(1.0 + th * th) + np.arcsinh(th))

    dense = np.linspace(th_lo, th_hi, 4096)
    s_dense = arclen(dense)
    s_targets = np.linspace(s_dense[0], s_dense[-1], n)
    theta = np.interp(s_targets, s_dense, dense)
    rho = a * theta
    return np.column_stack((rho * np.cos(theta), rho * np.sin(theta)))


def sample_spirals(cfg: SimConfig, rng: np.random.Generator) -> PointCloud:
    """Draw order: revolutions u only (the arms are deterministic given u)."""
    u = float(rng.uniform(2.0, 5.0)) if cfg.fixed_revolutions is None else cfg.fixed_revolutions
    per_arm = (SPIRAL_POINTS_PER_ARM if cfg.n_points is None
               else max(cfg.n_points // 2, 2))
    arm = _spiral_arm(u, per_arm)
    return PointCloud(np.vstack((arm, -arm)), 2, cfg.label)


def sample_torus(cfg: SimConfig, rng: np.random.Generator) -> PointCloud:
    """Draw order: major radius, ratio, axis angles, tube-angle rejection stream."""
    big_r = _draw_radius(cfg, rng)
    ratio = float(rng.beta(10.0, 10.0)) if cfg.fixed_ratio is None else cfg.fixed_ratio
    r = big_r * ratio
    n = cfg.n_points if cfg.n_points is not None else TORUS_POINTS
    phi = rng.uniform(0.0, 2.0 * np.pi, n)
    theta = np.empty(0)
    while theta.size < n:
        cand = rng.uniform(0.0, 2.0 * np.pi, max(2 * n, 64))
        accept = rng.uniform(0.0, 1.0, cand.size) <= (big_r + r * np.cos(cand)) / (big_r + r)
        theta = np.concatenate((theta, cand[accept]))
    theta = theta[:n]
    ring = big_r + r * np.cos(theta)
    pts = np.column_stack((ring * np.cos(phi), ring * np.sin(phi), r * np.sin(theta)))
    return PointCloud(pts, 3, cfg.label)


_SAMPLERS = {
    "circle": sample_circle,
    "two-circles": sample_two_circles,
    "spirals": sample_spirals,
    "torus": sample_torus,
}


def simulate(cfg: SimConfig) -> list[PointCloud]:
    """One cloud per spawned child stream of the master seed."""
    sampler = _SAMPLERS[cfg.design]
    seqs = np.random.SeedSequence(cfg.seed).spawn(cfg.n_clouds)
    return [sampler(cfg, np.random.Generator(np.random.PCG64(s))) for s in seqs]
