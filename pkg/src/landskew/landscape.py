"""Grid-sampled persistence landscapes on a normalised domain.

A landscape is the decreasing sequence of functions lambda_k(t) = k-th largest
value among the triangle functions of the diagram pairs,

    tri(b, d; t) = max(0, min(t - b, d - t)),

sampled on a uniform T-point grid.  The domain [0, domain_end] is rescaled to
[0, 1]; amplitudes keep their original units, so each level is Lipschitz with
constant ``scale_s`` on the normalised grid.  Samples are made comparable by
re-expressing every landscape over the largest domain end in the sample
(``common_domain``).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .errors import DataError
from .persistence import PersistenceDiagram

__all__ = [
    "Landscape",
    "triangle_function",
    "landscape_from_diagram",
    "common_domain",
    "auto_levels",
]

DEFAULT_GRID = 512


@dataclass
class Landscape:
    values: np.ndarray          # (K, T); level k sampled on the unit grid
    scale_s: float              # original domain end (normalisation scale)
    degree: int = 1
    source_id: Optional[str] = None

    def __post_init__(self) -> None:
        self.values = np.atleast_2d(np.asarray(self.values, np.float64))
        if self.values.ndim != 2 or self.values.shape[1] < 2:
            raise DataError("landscape values must be a (K, T>=2) array")
        if self.scale_s <= 0:
            raise DataError("scale_s must be positive")

    @property
    def K(self) -> int:
        return self.values.shape[0]

    @property
    def T(self) -> int:
        return self.values.shape[1]

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.T)

    def evaluate(self, t: np.ndarray) -> np.ndarray:
        """Piecewise-linear evaluation of every level at normalised times t."""
        t = np.asarray(t, np.float64)
        out = np.empty((self.K,) + t.shape)
        for k in range(self.K):
            out[k] = np.interp(t, self.grid, self.values[k])
        return out

    def with_levels(self, K: int) -> "Landscape":
        """Truncate or zero-pad to exactly K levels."""
        if K == self.K:
            return self
        if K < self.K:
            vals = self.values[:K]
        else:
            vals = np.vstack(
                (self.values, np.zeros((K - self.K, self.T)))
            )
        return Landscape(vals, self.scale_s, self.degree, self.source_id)

    def clamped(self) -> "Landscape":
        """Non-negative copy (reporting only; see inverse-SRVF note)."""
        return Landscape(np.maximum(self.values, 0.0), self.scale_s,
                         self.degree, self.source_id)

    def check_strict(self, tol: float = 1e-9) -> None:
        """Invariants of diagram-built landscapes; raises on violation."""
        v = self.values
        slack = tol * max(1.0, self.scale_s)
        if v.min() < -slack:
            raise DataError("landscape has negative values")
        if np.any(v[1:] > v[:-1] + slack):
            raise DataError("landscape levels are not decreasing in k")
        if np.abs(v[:, 0]).max() > slack or np.abs(v[:, -1]).max() > slack:
            raise DataError("landscape does not vanish at the domain ends")
        h = 1.0 / (self.T - 1)
        if np.abs(np.diff(v, axis=1)).max() > self.scale_s * h + slack:
            raise DataError("landscape violates the Lipschitz bound")


def triangle_function(b: float, d: float, t: np.ndarray) -> np.ndarray:
    """Tent of the pair (b, d): rises from b, peaks at the midpoint, dies at d."""
    t = np.asarray(t, np.float64)
    return np.maximum(0.0, np.minimum(t - b, d - t))


def _pairs_of(dg: Union[PersistenceDiagram, np.ndarray]) -> np.ndarray:
    if isinstance(dg, PersistenceDiagram):
        return dg.pairs
    return np.asarray(dg, np.float64).reshape(-1, 2)


def landscape_from_diagram(dg: Union[PersistenceDiagram, np.ndarray],
                           K: Optional[int] = None,
                           T: int = DEFAULT_GRID,
                           domain_end: Optional[float] = None,
                           degree: Optional[int] = None,
                           source_id: Optional[str] = None) -> Landscape:
    """Sample the landscape of a diagram on a T-point normalised grid.

    ``domain_end`` defaults to the diagram's largest death; a smaller value is
    an error (the landscape would be truncated).  ``K=None`` keeps exactly the
    levels that are somewhere positive on the grid (at least one).
    """
    pairs = _pairs_of(dg)
    if degree is None:
        degree = dg.degree if isinstance(dg, PersistenceDiagram) else 1
    if source_id is None and isinstance(dg, PersistenceDiagram):
        source_id = dg.source_id
    if T < 2:
        raise DataError("grid size T must be >= 2")
    max_death = float(pairs[:, 1].max()) if pairs.size else 0.0
    if domain_end is None:
        domain_end = max_death
    if pairs.size and domain_end < max_death * (1.0 - 1e-12):
        raise DataError(
            f"domain_end {domain_end} truncates the diagram "
            f"(largest death {max_death}); enlarge it or filter the diagram"
        )
    if domain_end <= 0:
        domain_end = 1.0  # empty diagram: flat landscape on a unit window
    grid = np.linspace(0.0, 1.0, T)
    u = grid * domain_end
    if pairs.size:
        tri = np.maximum(
            0.0,
            np.minimum(u[None, :] - pairs[:, 0][:, None],
                       pairs[:, 1][:, None] - u[None, :]),
        )
        levels = -np.sort(-tri, axis=0)
        positive = int(np.sum(levels.max(axis=1) > 0.0))
    else:
        levels = np.zeros((0, T))
        positive = 0
    if K is None:
        K = max(positive, 1)
    if K < 1:
        raise DataError("K must be >= 1")
    out = np.zeros((K, T))
    take = min(K, levels.shape[0])
    out[:take] = levels[:take]
    ls = Landscape(out, float(domain_end), degree, source_id)
    ls.check_strict()
    return ls


def auto_levels(landscapes: Iterable[Landscape]) -> int:
    """Largest number of somewhere-positive levels across a sample."""
    best = 1
    for ls in landscapes:
        positive = int(np.sum(ls.values.max(axis=1) > 0.0))
        best = max(best, positive)
    return best


def common_domain(landscapes: Sequence[Landscape]) -> list[Landscape]:
    """Re-express all landscapes over the largest domain end in the sample.

    A landscape with a smaller scale is evaluated at t * (s / s_i) (zero beyond
    its old domain) so all outputs share scale_s = s on the same grid.
    """
    if not landscapes:
        return []
    t_sizes = {ls.T for ls in landscapes}
    if len(t_sizes) != 1:
        raise DataError("common_domain requires equal grid sizes")
    s = max(ls.scale_s for ls in landscapes)
    out = []
    for ls in landscapes:
        if ls.scale_s == s:
            out.append(ls)
            continue
        u = ls.grid * (s / ls.scale_s)
        vals = np.empty_like(ls.values)
        for k in range(ls.K):
            vals[k] = np.interp(u, ls.grid, ls.values[k], right=0.0)
        re = Landscape(vals, s, ls.degree, ls.source_id)
        re.check_strict()
        out.append(re)
    return out
