"""Persistence diagrams for point clouds.

Degree 0 is computed as single-linkage merge heights (all components are born
at filtration value 0 and die when they merge).  Degree 1 pairs creator edges
with the killing triangles through Z/2 column reduction of the boundary
matrix.  Two filtrations are offered:

- Rips in any ambient dimension: an edge enters at half the pairwise distance
  ("radius" convention) or at the distance itself ("diameter"); a triangle
  enters at the max of its edges.
- Cech in the plane only: edges as in radius-convention Rips; a triangle
  enters at the radius of the minimum enclosing circle of its three vertices
  (circumradius for acute triangles, half the longest side otherwise).

Ties are ordered by (value, dimension, lexicographic vertex tuple): at equal
value an edge precedes any triangle, so zero-persistence pairs cancel exactly.

Essential classes (alive at max_scale) are dropped by default because the
downstream landscape construction needs finite deaths; ``cap_essential=True``
keeps them with death = max_scale.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional, Tuple

import numpy as np

from . import kernels
from .errors import DataError, SizeCapError
from .simgen import PointCloud

__all__ = [
    "PersistenceDiagram",
    "Filtration",
    "DEG1_POINT_CAP",
    "rips_filtration",
    "cech2d_filtration",
    "persistence_deg0",
    "persistence_deg1",
    "persistence_deg1_rips",
    "persistence_deg1_cech2d",
    "subsample_cloud",
]

DEG1_POINT_CAP = 400
_CONVENTIONS = ("radius", "diameter")


@dataclass
class PersistenceDiagram:
    degree: int
    pairs: np.ndarray            # (m, 2) birth/death, sorted by (birth, death)
    convention: str
    max_scale: float
    source_id: Optional[str] = None

    def __post_init__(self) -> None:
        self.pairs = np.asarray(self.pairs, np.float64).reshape(-1, 2)
        if self.convention not in _CONVENTIONS:
            raise DataError(f"unknown convention {self.convention!r}")
        if self.pairs.size and not np.all(self.pairs[:, 0] < self.pairs[:, 1]):
            raise DataError("diagram pairs must satisfy birth < death")

    @property
    def persistences(self) -> np.ndarray:
        return self.pairs[:, 1] - self.pairs[:, 0]

    def top(self, j: int) -> "PersistenceDiagram":
        """Keep the j most persistent pairs (stable order among ties)."""
        if j <= 0 or self.pairs.shape[0] <= j:
            return self
        order = np.argsort(-self.persistences, kind="stable")[:j]
        return PersistenceDiagram(
            degree=self.degree,
            pairs=_sort_pairs(self.pairs[order]),
            convention=self.convention,
            max_scale=self.max_scale,
            source_id=self.source_id,
        )


def _sort_pairs(pairs: np.ndarray) -> np.ndarray:
    pairs = np.asarray(pairs, np.float64).reshape(-1, 2)
    if pairs.shape[0] < 2:
        return pairs
    order = np.lexsort((pairs[:, 1], pairs[:, 0]))
    return pairs[order]


@dataclass
class Filtration:
    """Edges and triangles of a filtered 2-skeleton on n_vertices points."""

    n_vertices: int
    edges: np.ndarray            # (E, 2) vertex pairs i<j, filtration order
    edge_values: np.ndarray
    triangles: np.ndarray        # (M, 3) vertex triples i<j<k, filtration order
    triangle_values: np.ndarray
    max_scale: float
    convention: str

    def simplices(self) -> Iterator[Tuple[tuple, float]]:
        """All simplices sorted by (value, dimension, lexicographic vertices)."""
        items = [((int(v),), 0.0) for v in range(self.n_vertices)]
        items += [
            (tuple(int(x) for x in e), float(v))
            for e, v in zip(self.edges, self.edge_values)
        ]
        items += [
            (tuple(int(x) for x in t), float(v))
            for t, v in zip(self.triangles, self.triangle_values)
        ]
        items.sort(key=lambda sv: (sv[1], len(sv[0]), sv[0]))
        return iter(items)

    def check_faces(self) -> bool:
        """Every face appears no later than its cofaces."""
        if self.edge_values.size and self.edge_values.min() < 0:
            return False
        if self.triangles.shape[0] == 0:
            return True
        eidx = _edge_lookup(self.n_vertices, self.edges)
        for (i, j, k), v in zip(self.triangles, self.triangle_values):
            for a, b in ((i, j), (i, k), (j, k)):
                e = eidx[a, b]
                if e < 0 or self.edge_values[e] > v + 1e-15:
                    return False
        return True


def _as_points(data) -> np.ndarray:
    if isinstance(data, PointCloud):
        return data.points
    pts = np.asarray(data, np.float64)
    if pts.ndim != 2:
        raise DataError("point cloud must be a 2-D array")
    return pts


def _distance_matrix(pts: np.ndarray) -> np.ndarray:
    from scipy.spatial.distance import pdist, squareform

    if pts.shape[0] < 2:
        return np.zeros((pts.shape[0], pts.shape[0]))
    return squareform(pdist(pts))


def _scale_factor(convention: str) -> float:
    if convention not in _CONVENTIONS:
        raise DataError(f"unknown convention {convention!r}")
    return 0.5 if convention == "radius" else 1.0


def _sorted_edges(vmat: np.ndarray, cutoff: float):
    n = vmat.shape[0]
    iu, ju = np.triu_indices(n, 1)
    vals = vmat[iu, ju]
    keep = vals <= cutoff
    iu, ju, vals = iu[keep], ju[keep], vals[keep]
    order = np.lexsort((ju, iu, vals))
    edges = np.column_stack((iu[order], ju[order])).astype(np.int64)
    return edges, np.ascontiguousarray(vals[order])


def _edge_lookup(n: int, edges: np.ndarray) -> np.ndarray:
    eidx = np.full((n, n), -1, np.int64)
    eidx[edges[:, 0], edges[:, 1]] = np.arange(edges.shape[0])
    eidx[edges[:, 1], edges[:, 0]] = np.arange(edges.shape[0])
    return eidx


def _check_cap(n: int, n_cap: int) -> None:
    if n > n_cap:
        raise SizeCapError(
            f"degree-1 filtration capped at {n_cap} points, got {n}; "
            "subsample the cloud first (subsample_cloud / --subsample)"
        )


def rips_filtration(data, max_scale: Optional[float] = None,
                    convention: str = "radius", max_dim: int = 2,
                    n_cap: int = DEG1_POINT_CAP) -> Filtration:
    """Rips 2-skeleton; triangle value = max of its edge values."""
    if max_dim not in (1, 2):
        raise DataError("max_dim must be 1 or 2")
    pts = _as_points(data)
    n = pts.shape[0]
    if max_dim == 2:
        _check_cap(n, n_cap)
    vmat = _distance_matrix(pts) * _scale_factor(convention)
    if max_scale is None:
        max_scale = float(vmat.max()) if n > 1 else 0.0
    edges, edge_values = _sorted_edges(vmat, max_scale)
    if max_dim == 2 and n >= 3:
        tris, tvals = kernels.enumerate_triangles(vmat, max_scale)
        order = np.lexsort((tris[:, 2], tris[:, 1], tris[:, 0], tvals))
        tris, tvals = tris[order], np.ascontiguousarray(tvals[order])
    else:
        tris = np.empty((0, 3), np.int64)
        tvals = np.empty(0, np.float64)
    return Filtration(n, edges, edge_values, tris, tvals, float(max_scale), convention)


def _cech_triangle_values(pts: np.ndarray, tris: np.ndarray) -> np.ndarray:
    a = pts[tris[:, 0]]
    b = pts[tris[:, 1]]
    c = pts[tris[:, 2]]
    lab = np.linalg.norm(a - b, axis=1)
    lbc = np.linalg.norm(b - c, axis=1)
    lca = np.linalg.norm(c - a, axis=1)
    sides = np.sort(np.column_stack((lab, lbc, lca)), axis=1)
    obtuse = sides[:, 2] ** 2 >= sides[:, 0] ** 2 + sides[:, 1] ** 2
    vals = np.where(obtuse, 0.5 * sides[:, 2], 0.0)
    sharp = ~obtuse
    if np.any(sharp):
        u = b[sharp] - a[sharp]
        v = c[sharp] - a[sharp]
        area = 0.5 * np.abs(u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0])
        vals[sharp] = (lab[sharp] * lbc[sharp] * lca[sharp]) / (4.0 * area)
    return vals


def cech2d_filtration(data, max_scale: Optional[float] = None,
                      n_cap: int = DEG1_POINT_CAP) -> Filtration:
    """Cech 2-skeleton for planar clouds; triangle value = enclosing radius."""
    pts = _as_points(data)
    if pts.shape[1] != 2:
        raise DataError("cech2d requires 2-D point clouds")
    n = pts.shape[0]
    _check_cap(n, n_cap)
    vmat = _distance_matrix(pts) * 0.5
    if max_scale is None:
        # Jung's bound in the plane: enclosing radius <= diameter / sqrt(3),
        # by which scale the nerve is a cone (all balls share a point).
        max_scale = float(vmat.max() * 2.0 / np.sqrt(3.0)) if n > 1 else 0.0
    edges, edge_values = _sorted_edges(vmat, max_scale)
    if n >= 3:
        tris, _ = kernels.enumerate_triangles(vmat, max_scale)
        tvals = _cech_triangle_values(pts, tris)
        keep = tvals <= max_scale
        tris, tvals = tris[keep], tvals[keep]
        order = np.lexsort((tris[:, 2], tris[:, 1], tris[:, 0], tvals))
        tris, tvals = tris[order], np.ascontiguousarray(tvals[order])
    else:
        tris = np.empty((0, 3), np.int64)
        tvals = np.empty(0, np.float64)
    return Filtration(n, edges, edge_values, tris, tvals, float(max_scale), "radius")


def persistence_deg0(data, convention: str = "radius",
                     max_scale: Optional[float] = None,
                     cap_essential: bool = False,
                     source_id: Optional[str] = None) -> PersistenceDiagram:
    """Degree-0 diagram: births at 0, deaths at single-linkage merge heights."""
    from scipy.spatial.distance import pdist

    pts = _as_points(data)
    n = pts.shape[0]
    factor = _scale_factor(convention)
    cond = pdist(pts) * factor if n > 1 else np.empty(0)
    if max_scale is None:
        max_scale = float(cond.max()) if n > 1 else 0.0
    heights = kernels.single_linkage_heights(cond, n)
    finite = heights[(heights <= max_scale) & (heights > 0.0)]
    pairs = np.column_stack((np.zeros(finite.size), finite))
    if cap_essential:
        n_essential = 1 + int(np.sum(heights > max_scale))
        extra = np.column_stack(
            (np.zeros(n_essential), np.full(n_essential, max_scale))
        )
        pairs = np.vstack((pairs, extra)) if pairs.size else extra
    return PersistenceDiagram(
        degree=0, pairs=_sort_pairs(pairs), convention=convention,
        max_scale=float(max_scale), source_id=source_id,
    )


def _creator_edges(n: int, edges: np.ndarray) -> np.ndarray:
    """Edges (in filtration order) whose insertion closes a cycle."""
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    creator = np.zeros(edges.shape[0], bool)
    for e in range(edges.shape[0]):
        ri, rj = find(int(edges[e, 0])), find(int(edges[e, 1]))
        if ri == rj:
            creator[e] = True
        else:
            parent[ri] = rj
    return creator


def persistence_deg1(filt: Filtration, cap_essential: bool = False,
                     source_id: Optional[str] = None) -> PersistenceDiagram:
    """Degree-1 diagram from a filtered 2-skeleton via Z/2 column reduction."""
    n_edges = filt.edges.shape[0]
    if filt.triangles.shape[0]:
        eidx = _edge_lookup(filt.n_vertices, filt.edges)
        tri_cols = np.sort(
            np.column_stack(
                (
                    eidx[filt.triangles[:, 0], filt.triangles[:, 1]],
                    eidx[filt.triangles[:, 0], filt.triangles[:, 2]],
                    eidx[filt.triangles[:, 1], filt.triangles[:, 2]],
                )
            ),
            axis=1,
        )
        if np.any(tri_cols < 0):
            raise DataError("filtration has a triangle with a missing edge")
        edge_idx, tri_idx = kernels.reduce_triangle_columns(tri_cols, n_edges)
        births = filt.edge_values[edge_idx]
        deaths = filt.triangle_values[tri_idx]
        keep = deaths > births
        pairs = np.column_stack((births[keep], deaths[keep]))
    else:
        edge_idx = np.empty(0, np.int64)
        pairs = np.empty((0, 2))
    if cap_essential:
        creator = _creator_edges(filt.n_vertices, filt.edges)
        paired = np.zeros(n_edges, bool)
        paired[edge_idx] = True
        essential_births = filt.edge_values[creator & ~paired]
        if essential_births.size:
            ess = np.column_stack(
                (essential_births, np.full(essential_births.size, filt.max_scale))
            )
            ess = ess[ess[:, 1] > ess[:, 0]]
            pairs = np.vstack((pairs, ess)) if pairs.size else ess
    return PersistenceDiagram(
        degree=1, pairs=_sort_pairs(pairs), convention=filt.convention,
        max_scale=filt.max_scale, source_id=source_id,
    )


def persistence_deg1_rips(data, max_scale: Optional[float] = None,
                          convention: str = "radius",
                          n_cap: int = DEG1_POINT_CAP,
                          cap_essential: bool = False,
                          source_id: Optional[str] = None) -> PersistenceDiagram:
    filt = rips_filtration(data, max_scale, convention, max_dim=2, n_cap=n_cap)
    return persistence_deg1(filt, cap_essential, source_id)


def persistence_deg1_cech2d(data, max_scale: Optional[float] = None,
                            n_cap: int = DEG1_POINT_CAP,
                            cap_essential: bool = False,
                            source_id: Optional[str] = None) -> PersistenceDiagram:
    filt = cech2d_filtration(data, max_scale, n_cap=n_cap)
    return persistence_deg1(filt, cap_essential, source_id)


def subsample_cloud(cloud: PointCloud, n: int, seed: int = 0) -> PointCloud:
    """Seeded uniform subsample without replacement (indices kept sorted)."""
    if n >= cloud.n:
        return cloud
    rng = np.random.default_rng(seed)
    idx = np.sort(rng.choice(cloud.n, size=n, replace=False))
    return PointCloud(cloud.points[idx], cloud.dim, cloud.label)
