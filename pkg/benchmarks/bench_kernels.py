#!/usr/bin/env python3
"""Compare the jitted and pure-numpy kernel backends on realistic workloads.

Each hot kernel runs on data shaped like the shipped experiment configs:
merge heights on a dense spiral cloud, triangle enumeration plus boundary
reduction on a subsampled torus cloud, and the lattice warp search on
two-level landscape curves.  Times are best-of-``--repeat`` wall clock.

Usage:
    python3 benchmarks/bench_kernels.py [--repeat 3] [--full]
"""
from __future__ import annotations

import argparse
import os
import time

import numpy as np

from landskew import SimConfig, simulate
from landskew import kernels
from landskew.elastic import srvf
from landskew.landscape import landscape_from_diagram
from landskew.persistence import (_edge_lookup, persistence_deg1_rips,
                                  rips_filtration)


def _dist_condensed(pts: np.ndarray) -> np.ndarray:
    diff = pts[:, None, :] - pts[None, :, :]
    dm = np.sqrt((diff * diff).sum(-1))
    iu = np.triu_indices(len(pts), 1)
    return dm[iu], dm


def _best_of(fn, repeat: int) -> float:
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def build_cases(full: bool):
    """Return (name, callable) pairs over precomputed inputs."""
    cases = []

    sl_n = 2000 if full else 800
    spiral = simulate(SimConfig(design="spirals", n_clouds=1, seed=1,
                                n_points=sl_n))[0]
    cond, _ = _dist_condensed(spiral.points)
    cases.append((f"single_linkage_heights (n={sl_n})",
                  lambda: kernels.single_linkage_heights(cond, sl_n)))

    tor_n = 300 if full else 180
    torus = simulate(SimConfig(design="torus", n_clouds=1, seed=2,
                               radius_mean=2.0, radius_sd=0.3,
                               n_points=tor_n))[0]
    _, dm = _dist_condensed(torus.points)
    cutoff = 2.4  # diameter-convention cutoff matching the torus config
    cases.append((f"enumerate_triangles (n={tor_n})",
                  lambda: kernels.enumerate_triangles(dm, cutoff)))
    filt = rips_filtration(torus.points, max_scale=1.2, convention="radius",
                           max_dim=2)
    eidx = _edge_lookup(filt.n_vertices, filt.edges)
    tri_cols = np.sort(np.column_stack((
        eidx[filt.triangles[:, 0], filt.triangles[:, 1]],
        eidx[filt.triangles[:, 0], filt.triangles[:, 2]],
        eidx[filt.triangles[:, 1], filt.triangles[:, 2]])), axis=1)
    n_edges = filt.edges.shape[0]
    cases.append((f"reduce_triangle_columns ({len(tri_cols)} cols)",
                  lambda: kernels.reduce_triangle_columns(tri_cols, n_edges)))

    T = 512 if full else 256
    dg = persistence_deg1_rips(torus, convention="radius", max_scale=1.2,
                               cap_essential=True)
    ls1 = landscape_from_diagram(dg.top(2), K=2, T=T, domain_end=1.32)
    ls2 = landscape_from_diagram(dg.top(1), K=2, T=T, domain_end=1.32)
    q1 = srvf(ls1.values, ls1.scale_s)
    q2 = srvf(ls2.values, ls2.scale_s)
    steps = kernels.warp_step_set()
    h = 1.0 / (T - 1)
    cases.append((f"dp_align (T={T}, full lattice)",
                  lambda: kernels.dp_align(q1, q2, steps, h)))
    return cases


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3,
                    help="repetitions per case; best time is reported")
    ap.add_argument("--full", action="store_true",
                    help="use the full experiment sizes (slower)")
    args = ap.parse_args()

    cases = build_cases(args.full)
    os.environ["LANDSKEW_BACKEND"] = "numba"
    kernels.warm_kernels()

    rows = []
    for name, fn in cases:
        os.environ["LANDSKEW_BACKEND"] = "numba"
        fn()  # make sure this shape is compiled before timing
        t_nb = _best_of(fn, args.repeat)
        os.environ["LANDSKEW_BACKEND"] = "numpy"
        t_np = _best_of(fn, args.repeat)
        rows.append((name, t_nb, t_np))
    os.environ.pop("LANDSKEW_BACKEND", None)

    width = max(len(r[0]) for r in rows)
    print(f"{'kernel':<{width}}  {'numba':>10}  {'numpy':>10}  {'speedup':>8}")
    for name, t_nb, t_np in rows:
        print(f"{name:<{width}}  {t_nb * 1e3:>8.2f}ms  {t_np * 1e3:>8.2f}ms  "
              f"{t_np / t_nb:>7.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
