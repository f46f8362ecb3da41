"""Elastic (phase-amplitude) alignment of landscapes via square-root slopes.

A landscape with K levels on the unit grid is treated as a curve in R^K.  Its
square-root slope representation is

    q(t) = Lambda'(t) / sqrt(|Lambda'(t)|)      (q = 0 where the speed vanishes)

under which reparameterisation acts by (q, gamma) = q(gamma(t)) sqrt(gamma'(t))
and is an isometry of the L2 metric.  The amplitude distance between two
landscapes is the L2 distance after minimising over warps; the minimiser is
found by dynamic programming over monotone lattice paths (see kernels.dp_align).
The Karcher mean iterates align-to-mean / average / re-centre, keeping the
per-iteration alignment error non-increasing.
"""
from __future__ import annotations

import concurrent.futures
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import kernels
from ._backend import thread_count
from .errors import DataError, NumericalError
from .landscape import Landscape

__all__ = [
    "Warp",
    "AlignmentResult",
    "srvf",
    "inverse_srvf",
    "warp_action",
    "warp_landscape",
    "elastic_distance",
    "align_pair",
    "karcher_mean",
    "center_warps",
    "invert_warp",
    "compose_warps",
]

_STEPS = kernels.warp_step_set()


@dataclass
class Warp:
    """A boundary-preserving, strictly increasing map of [0, 1] on the grid."""

    values: np.ndarray  # (T,) with values[0] = 0, values[-1] = 1

    def __post_init__(self) -> None:
        v = np.asarray(self.values, np.float64).ravel()
        if v.size < 2:
            raise DataError("warp needs at least two grid points")
        if abs(v[0]) > 1e-9 or abs(v[-1] - 1.0) > 1e-9:
            raise DataError("warp must map 0 to 0 and 1 to 1")
        if np.any(np.diff(v) <= 0):
            raise DataError("warp must be strictly increasing")
        v = v.copy()
        v[0], v[-1] = 0.0, 1.0
        self.values = v

    @property
    def T(self) -> int:
        return self.values.size

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.T)

    @classmethod
    def identity(cls, T: int) -> "Warp":
        return cls(np.linspace(0.0, 1.0, T))

    def __call__(self, t: np.ndarray) -> np.ndarray:
        return np.interp(t, self.grid, self.values)

    def deriv(self) -> np.ndarray:
        return np.gradient(self.values, 1.0 / (self.T - 1))

    def max_identity_deviation(self) -> float:
        return float(np.abs(self.values - self.grid).max())


def invert_warp(warp: Warp) -> Warp:
    """Piecewise-linear inverse: swap the roles of grid and values."""
    return Warp(np.interp(warp.grid, warp.values, warp.grid))


def compose_warps(outer: Warp, inner: Warp) -> Warp:
    """(outer o inner)(t) = outer(inner(t)), sampled on the grid."""
    if outer.T != inner.T:
        raise DataError("warps must share the grid size")
    return Warp(np.interp(inner.values, outer.grid, outer.values))


def center_warps(warps: Sequence[Warp]) -> tuple[Warp, list[Warp]]:
    """Cross-sectional mean warp and the warps re-expressed about it.

    Returns (mean_warp, centered) with centered[i] = warps[i] o mean_warp^-1,
    so the centered collection averages to (approximately) the identity.
    """
    if not warps:
        raise DataError("center_warps needs at least one warp")
    stack = np.stack([w.values for w in warps])
    mean = Warp(stack.mean(axis=0))
    inv = invert_warp(mean)
    return mean, [compose_warps(w, inv) for w in warps]


# ---------------------------------------------------------------------------
# square-root slope transform
# ---------------------------------------------------------------------------

def _zero_eps(scale_s: float) -> float:
    return 1e-12 * (1.0 + float(scale_s))


def srvf(values: np.ndarray, scale_s: float = 1.0) -> np.ndarray:
    """Square-root slope field of a (K, T) curve on the unit grid."""
    vals = np.atleast_2d(np.asarray(values, np.float64))
    T = vals.shape[1]
    h = 1.0 / (T - 1)
    deriv = np.gradient(vals, h, axis=1)
    speed = np.sqrt(np.sum(deriv * deriv, axis=0))
    eps = _zero_eps(scale_s)
    root = np.sqrt(np.where(speed > eps, speed, 1.0))
    q = deriv / root
    q[:, speed <= eps] = 0.0
    return q


def inverse_srvf(q: np.ndarray, scale_s: float = 1.0,
                 degree: int = 1, source_id: Optional[str] = None) -> Landscape:
    """Integrate q |q| from zero initial values back to a curve."""
    q = np.atleast_2d(np.asarray(q, np.float64))
    T = q.shape[1]
    h = 1.0 / (T - 1)
    speed = np.sqrt(np.sum(q * q, axis=0))
    integrand = q * speed[None, :]
    vals = np.zeros_like(q)
    vals[:, 1:] = np.cumsum(0.5 * h * (integrand[:, 1:] + integrand[:, :-1]),
                            axis=1)
    return Landscape(vals, scale_s, degree, source_id)


def warp_action(q: np.ndarray, warp: Warp) -> np.ndarray:
    """(q, gamma) = q(gamma(t)) sqrt(gamma'(t)) on the shared grid."""
    q = np.atleast_2d(np.asarray(q, np.float64))
    if q.shape[1] != warp.T:
        raise DataError("curve and warp grid sizes differ")
    gd = warp.deriv()
    if gd.min() < 0.0:
        raise NumericalError("warp derivative went negative")
    root = np.sqrt(gd)
    grid = warp.grid
    out = np.empty_like(q)
    for k in range(q.shape[0]):
        out[k] = np.interp(warp.values, grid, q[k]) * root
    return out


def warp_landscape(ls: Landscape, warp: Warp) -> Landscape:
    """Landscape-domain warp: Lambda o gamma, level by level."""
    if ls.T != warp.T:
        raise DataError("landscape and warp grid sizes differ")
    vals = np.empty_like(ls.values)
    grid = ls.grid
    for k in range(ls.K):
        vals[k] = np.interp(warp.values, grid, ls.values[k])
    return Landscape(vals, ls.scale_s, ls.degree, ls.source_id)


# ---------------------------------------------------------------------------
# pairwise alignment
# ---------------------------------------------------------------------------

def _trapezoid_weights(T: int) -> np.ndarray:
    h = 1.0 / (T - 1)
    w = np.full(T, h)
    w[0] = w[-1] = 0.5 * h
    return w


def _weighted_sq_norm(q: np.ndarray, w: np.ndarray) -> float:
    return float(np.sum(np.sum(q * q, axis=0) * w))


def _coarsen(q: np.ndarray, tg: np.ndarray) -> np.ndarray:
    grid = np.linspace(0.0, 1.0, q.shape[1])
    out = np.empty((q.shape[0], tg.size))
    for k in range(q.shape[0]):
        out[k] = np.interp(tg, grid, q[k])
    return out


def _align_srvf(q1: np.ndarray, q2: np.ndarray,
                dp_grid: Optional[int] = None,
                tie_tol: float = 1e-12) -> tuple[float, np.ndarray]:
    """Optimal warp of q2 onto q1.  Returns (squared cost, warp values).

    With ``dp_grid`` set, the lattice search runs on a coarser grid and the
    warp is linearly refined back to the full grid; the reported cost is the
    lattice objective at the search resolution.
    """
    T = q1.shape[1]
    if dp_grid is not None and not (8 <= dp_grid <= T):
        raise DataError("dp_grid must lie in [8, T]")
    if dp_grid is not None and dp_grid < T:
        tg = np.linspace(0.0, 1.0, dp_grid)
        c1, c2 = _coarsen(q1, tg), _coarsen(q2, tg)
        cost, path = kernels.dp_align(c1, c2, _STEPS, 1.0 / (dp_grid - 1),
                                      tie_tol)
        gx = path[:, 0] / (dp_grid - 1)
        gy = path[:, 1] / (dp_grid - 1)
        gamma = np.interp(np.linspace(0.0, 1.0, T), gx, gy)
    else:
        cost, path = kernels.dp_align(q1, q2, _STEPS, 1.0 / (T - 1), tie_tol)
        gx = path[:, 0] / (T - 1)
        gy = path[:, 1] / (T - 1)
        gamma = np.interp(np.linspace(0.0, 1.0, T), gx, gy)
    return float(cost), gamma


def _check_comparable(l1: Landscape, l2: Landscape) -> None:
    if l1.T != l2.T:
        raise DataError("landscapes must share the grid size T")
    if l1.K != l2.K:
        raise DataError("landscapes must share the level count K "
                        "(pad with with_levels)")
    if abs(l1.scale_s - l2.scale_s) > 1e-9 * max(l1.scale_s, l2.scale_s):
        raise DataError("landscapes live on different domains; "
                        "apply common_domain first")


def align_pair(l1: Landscape, l2: Landscape,
               dp_grid: Optional[int] = None,
               tie_tol: float = 1e-12) -> tuple[float, Warp, Landscape]:
    """Warp l2 onto l1.  Returns (amplitude distance, warp, warped l2).

    With ``dp_grid`` the warp search runs on a coarse lattice but the distance
    is re-evaluated on the full grid, so values stay comparable across runs.
    """
    _check_comparable(l1, l2)
    q1 = srvf(l1.values, l1.scale_s)
    q2 = srvf(l2.values, l2.scale_s)
    cost, gamma = _align_srvf(q1, q2, dp_grid, tie_tol)
    warp = Warp(gamma)
    if dp_grid is not None and dp_grid < l1.T:
        w = _trapezoid_weights(l1.T)
        cost = _weighted_sq_norm(q1 - warp_action(q2, warp), w)
    return float(np.sqrt(max(cost, 0.0))), warp, warp_landscape(l2, warp)


def elastic_distance(l1: Landscape, l2: Landscape,
                     dp_grid: Optional[int] = None,
                     tie_tol: float = 1e-12) -> tuple[float, Warp]:
    """Amplitude distance between two landscapes and the optimal warp of l2."""
    dist, warp, _ = align_pair(l1, l2, dp_grid, tie_tol)
    return dist, warp


# ---------------------------------------------------------------------------
# Karcher mean with orbit centering
# ---------------------------------------------------------------------------

@dataclass
class AlignmentResult:
    mean: Landscape                 # inverse transform of the mean srvf
    mean_srvf: np.ndarray           # (K, T)
    warps: list[Warp]               # per input, centred so they average to id
    aligned: list[Landscape]        # inputs composed with their warps
    aligned_srvf: np.ndarray        # (n, K, T)
    sse_trace: np.ndarray           # alignment error per iteration
    iterations: int = 0
    converged: bool = False
    scale_s: float = 1.0
    degree: int = 1

    @property
    def n(self) -> int:
        return len(self.warps)


def _map_indexed(fn: Callable[[int], tuple], n: int) -> list:
    workers = min(thread_count(), n)
    if workers <= 1 or n <= 1:
        return [fn(i) for i in range(n)]
    with concurrent.futures.ThreadPoolExecutor(workers) as pool:
        return list(pool.map(fn, range(n)))


def karcher_mean(landscapes: Sequence[Landscape],
                 tol: float = 1e-4,
                 max_iter: int = 20,
                 dp_grid: Optional[int] = None,
                 tie_tol: float = 1e-12,
                 init: str = "mean") -> AlignmentResult:
    """Elastic sample mean by alternating align / average / re-centre.

    The iteration-0 template is the cross-sectional average of the square-root
    slope fields (``init="mean"``) or the sample medoid (``init="medoid"``).
    The averaged template is smeared wherever the sample is out of phase, but
    it keeps mass near every recurring feature, so features present in only
    part of the sample still attract their counterparts instead of being
    crushed to zero width against a template that lacks them; the medoid is a
    sharper template but has exactly that failure mode.  Each iteration aligns
    every curve to the current mean, records the summed squared alignment
    error, re-centres the warps about their cross-sectional mean, and averages
    the aligned curves.  Stops when the error change falls below ``tol``
    (relative), the iteration cap is hit, or an iteration fails to improve
    (the previous state is kept, so the recorded trace is non-increasing).
    """
    if not landscapes:
        raise DataError("karcher_mean needs at least one landscape")
    first = landscapes[0]
    for ls in landscapes[1:]:
        _check_comparable(first, ls)
    n, K, T = len(landscapes), first.K, first.T
    scale_s, degree = first.scale_s, first.degree
    qs = np.stack([srvf(ls.values, scale_s) for ls in landscapes])
    w = _trapezoid_weights(T)

    if n == 1:
        ident = Warp.identity(T)
        return AlignmentResult(
            mean=inverse_srvf(qs[0], scale_s, degree),
            mean_srvf=qs[0].copy(), warps=[ident],
            aligned=[landscapes[0]], aligned_srvf=qs.copy(),
            sse_trace=np.zeros(1), iterations=1, converged=True,
            scale_s=scale_s, degree=degree)

    if init == "medoid":
        # smallest total unaligned squared distance to the others
        diffs = qs[:, None] - qs[None, :]
        sq = np.sum(np.sum(diffs * diffs, axis=2) * w[None, None, :], axis=2)
        mean_q = qs[int(np.argmin(sq.sum(axis=1)))].copy()
    elif init == "mean":
        mean_q = qs.mean(axis=0)
    else:
        raise DataError("init must be 'mean' or 'medoid'")

    trace: list[float] = []
    best_state = None
    prev_sse = np.inf
    converged = False
    iterations = 0

    for _ in range(max_iter):
        def _one(i: int, mq=mean_q):
            cost, gamma = _align_srvf(mq, qs[i], dp_grid, tie_tol)
            return gamma
        gammas = _map_indexed(_one, n)
        warps = [Warp(g) for g in gammas]
        aligned = np.stack([warp_action(qs[i], warps[i]) for i in range(n)])
        sse = float(sum(_weighted_sq_norm(mean_q - aligned[i], w)
                        for i in range(n)))
        if sse > prev_sse * (1.0 + 1e-12):
            break  # keep the previous (better) state
        iterations += 1
        trace.append(sse)

        # re-centre this iteration's solution about the mean warp
        mean_warp, warps_c = center_warps(warps)
        aligned_c = np.stack([warp_action(qs[i], warps_c[i])
                              for i in range(n)])
        new_mean = aligned_c.mean(axis=0)
        best_state = (warps_c, aligned_c, new_mean)

        if prev_sse < np.inf and abs(prev_sse - sse) <= tol * max(prev_sse, 1e-30):
            converged = True
            break
        prev_sse = sse
        mean_q = new_mean

    warps_c, aligned_c, mean_q = best_state
    aligned_ls = [warp_landscape(landscapes[i], warps_c[i]) for i in range(n)]
    return AlignmentResult(
        mean=inverse_srvf(mean_q, scale_s, degree),
        mean_srvf=mean_q, warps=list(warps_c), aligned=aligned_ls,
        aligned_srvf=aligned_c, sse_trace=np.asarray(trace),
        iterations=iterations, converged=converged,
        scale_s=scale_s, degree=degree)
