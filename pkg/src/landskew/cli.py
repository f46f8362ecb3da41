"""The ``landskew`` command line tool.

Subcommands cover every stage: ``simulate`` point clouds, ``ph`` persistence
diagrams, ``landscape`` grid landscapes, ``align`` the elastic sample mean,
``pca`` amplitude components, ``denoise`` diagram transforms, ``compare``
two-group contrasts, ``pipeline`` an end-to-end TOML-configured run, and
``plot`` deterministic SVG figures.  Exit codes: 0 success, 2 usage error,
3 invalid data, 4 numerical failure.
"""
from __future__ import annotations

import argparse
import glob
import os
import sys
import time
from typing import Optional, Sequence

import numpy as np

from . import __version__
from . import io as lio
from . import svg as lsvg
from .analysis import (
    denoise_sample,
    diagram_spread,
    group_compare,
    transform_diagram,
)
from .elastic import karcher_mean, srvf
from .errors import DataError, LandskewError, NumericalError
from .fpca import amplitude_covariance, amplitude_pca, pc_path, pc_scores
from .landscape import Landscape, common_domain, landscape_from_diagram
from .persistence import (
    persistence_deg0,
    persistence_deg1_cech2d,
    persistence_deg1_rips,
    subsample_cloud,
)
from .simgen import SimConfig, simulate

__all__ = ["main", "build_parser"]


def _ensure_dir(path: str) -> str:
    os.makedirs(path, exist_ok=True)
    return path


def _collect(spec: str, exts: Sequence[str] = (".json",)) -> list[str]:
    """Expand a file, directory, or glob into a sorted file list."""
    if os.path.isdir(spec):
        found: list[str] = []
        for ext in exts:
            found.extend(glob.glob(os.path.join(spec, f"*{ext}")))
        files = sorted(found)
    elif os.path.exists(spec):
        files = [spec]
    else:
        files = sorted(glob.glob(spec))
    if not files:
        raise DataError(f"no input files found at {spec!r}")
    return files


def _landscape_files(spec: str) -> list[str]:
    """Landscape JSONs from a directory, skipping non-landscape artefacts."""
    files = _collect(spec)
    keep = []
    for f in files:
        base = os.path.basename(f)
        if base in ("manifest.json", "meta.json", "summary.json"):
            continue
        keep.append(f)
    if not keep:
        raise DataError(f"no landscape files found at {spec!r}")
    return keep


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------

def cmd_simulate(args) -> int:
    t0 = time.perf_counter()
    out = _ensure_dir(args.out)
    cfg = SimConfig(
        design=args.design, n_clouds=args.n, seed=args.seed,
        noise_sigma_factor=args.noise,
        size_range=(args.size_min, args.size_max),
        radius_mean=args.radius_mean, radius_sd=args.radius_sd,
        label=args.label, equispaced=args.equispaced,
        fixed_ratio=args.ratio, fixed_revolutions=args.revolutions,
        n_points=args.points, split=args.split)
    clouds = simulate(cfg)
    outputs = []
    for i, pc in enumerate(clouds):
        path = os.path.join(out, f"cloud_{i:03d}.json")
        lio.save_point_cloud(path, pc)
        outputs.append(path)
    lio.write_manifest(out, "simulate", _argv_of(args), [], outputs,
                       seed=args.seed, elapsed_s=time.perf_counter() - t0)
    print(f"simulate: wrote {len(outputs)} {args.design} clouds to {out}")
    return 0


# ---------------------------------------------------------------------------
# ph
# ---------------------------------------------------------------------------

def cmd_ph(args) -> int:
    t0 = time.perf_counter()
    out = _ensure_dir(args.out)
    files = _collect(args.input)
    files = [f for f in files if os.path.basename(f) != "manifest.json"]
    if args.complex == "cech2d" and args.convention == "diameter":
        raise DataError("the 2-D ball complex uses radius values; "
                        "drop --convention diameter")
    outputs = []
    for i, f in enumerate(files):
        pc = lio.load_point_cloud(f)
        if args.subsample and pc.n > args.subsample:
            pc = subsample_cloud(pc, args.subsample, seed=args.seed + i)
        stem = os.path.splitext(os.path.basename(f))[0]
        if args.degree == 0:
            dg = persistence_deg0(pc, convention=args.convention,
                                  max_scale=args.max_scale,
                                  cap_essential=args.cap_essential,
                                  source_id=stem)
        elif args.complex == "rips":
            dg = persistence_deg1_rips(pc, max_scale=args.max_scale,
                                       convention=args.convention,
                                       cap_essential=args.cap_essential,
                                       source_id=stem)
        else:
            dg = persistence_deg1_cech2d(pc, max_scale=args.max_scale,
                                         cap_essential=args.cap_essential,
                                         source_id=stem)
        path = os.path.join(out, f"diagram_{i:03d}.json")
        lio.save_diagram(path, dg)
        outputs.append(path)
    lio.write_manifest(out, "ph", _argv_of(args), files, outputs,
                       seed=args.seed if args.subsample else None,
                       elapsed_s=time.perf_counter() - t0)
    print(f"ph: wrote {len(outputs)} degree-{args.degree} diagrams to {out}")
    return 0


# ---------------------------------------------------------------------------
# landscape
# ---------------------------------------------------------------------------

def _build_landscapes(diagrams, T, levels, domain_end, top_j, headroom=1.0):
    """Shared-domain landscapes for a sample of diagrams.

    ``headroom`` (>= 1) pads the automatic domain end beyond the largest
    death.  Warps fix the domain endpoints, so a feature that dies exactly at
    the domain end can never be moved by alignment; padding keeps every
    feature in the warpable interior.  Ignored when ``domain_end`` is given.
    """
    if top_j:
        diagrams = [dg.top(top_j) for dg in diagrams]
    if domain_end is None:
        deaths = [float(dg.pairs[:, 1].max()) for dg in diagrams
                  if dg.pairs.size]
        if not deaths:
            raise DataError("all diagrams are empty; no landscape domain")
        if headroom < 1.0:
            raise DataError("headroom must be >= 1")
        domain_end = max(deaths) * headroom
    built = [landscape_from_diagram(dg, K=levels, T=T, domain_end=domain_end)
             for dg in diagrams]
    if levels is None:
        kmax = max(ls.K for ls in built)
        built = [ls.with_levels(kmax) for ls in built]
    return built


def cmd_landscape(args) -> int:
    t0 = time.perf_counter()
    out = _ensure_dir(args.out)
    files = _collect(args.input)
    files = [f for f in files if os.path.basename(f) != "manifest.json"]
    diagrams = [lio.load_diagram(f) for f in files]
    built = _build_landscapes(diagrams, args.grid, args.levels,
                              args.domain_end, args.top_j, args.headroom)
    outputs = []
    for i, ls in enumerate(built):
        path = os.path.join(out, f"landscape_{i:03d}.json")
        lio.save_landscape(path, ls)
        outputs.append(path)
    lio.write_manifest(out, "landscape", _argv_of(args), files, outputs,
                       elapsed_s=time.perf_counter() - t0)
    print(f"landscape: wrote {len(outputs)} landscapes "
          f"(K={built[0].K}, T={built[0].T}, domain end "
          f"{built[0].scale_s:.6g}) to {out}")
    return 0


# ---------------------------------------------------------------------------
# align
# ---------------------------------------------------------------------------

def _run_align(landscapes, out, tol, max_iter, dp_grid):
    res = karcher_mean(landscapes, tol=tol, max_iter=max_iter, dp_grid=dp_grid)
    outputs = []
    path = os.path.join(out, "mean.json")
    lio.save_landscape(path, res.mean)
    outputs.append(path)
    wdir = _ensure_dir(os.path.join(out, "warps"))
    adir = _ensure_dir(os.path.join(out, "aligned"))
    for i in range(res.n):
        wpath = os.path.join(wdir, f"warp_{i:03d}.json")
        lio.save_warp(wpath, res.warps[i])
        apath = os.path.join(adir, f"aligned_{i:03d}.json")
        lio.save_landscape(apath, res.aligned[i])
        outputs.extend([wpath, apath])
    tpath = os.path.join(out, "sse_trace.csv")
    lio.write_csv_matrix(tpath, res.sse_trace.reshape(-1, 1))
    outputs.append(tpath)
    mpath = os.path.join(out, "meta.json")
    lio.write_json(mpath, {
        "n": res.n, "K": res.mean.K, "T": res.mean.T,
        "scale_s": float(res.scale_s), "degree": res.degree,
        "iterations": res.iterations, "converged": res.converged,
        "final_sse": float(res.sse_trace[-1]) if res.sse_trace.size else None,
    })
    outputs.append(mpath)
    return res, outputs


def cmd_align(args) -> int:
    t0 = time.perf_counter()
    out = _ensure_dir(args.out)
    files = _landscape_files(args.input)
    landscapes = [lio.load_landscape(f) for f in files]
    landscapes = common_domain(landscapes)
    res, outputs = _run_align(landscapes, out, args.tol, args.max_iter,
                              args.dp_grid)
    lio.write_manifest(out, "align", _argv_of(args), files, outputs,
                       elapsed_s=time.perf_counter() - t0)
    print(f"align: n={res.n}, iterations={res.iterations}, "
          f"converged={res.converged}, final error "
          f"{res.sse_trace[-1]:.6g} -> {out}")
    return 0


# ---------------------------------------------------------------------------
# pca
# ---------------------------------------------------------------------------

def _load_alignment_dir(align_dir):
    mean = lio.load_landscape(os.path.join(align_dir, "mean.json"))
    afiles = sorted(glob.glob(os.path.join(align_dir, "aligned", "*.json")))
    if not afiles:
        raise DataError(f"no aligned landscapes under {align_dir!r}")
    aligned = [lio.load_landscape(f) for f in afiles]
    wfiles = sorted(glob.glob(os.path.join(align_dir, "warps", "*.json")))
    warps = [lio.load_warp(f) for f in wfiles]
    return mean, aligned, warps, afiles + wfiles


def cmd_pca(args) -> int:
    t0 = time.perf_counter()
    out = _ensure_dir(args.out)
    mean, aligned, _, inputs = _load_alignment_dir(args.input)
    stack = np.stack([srvf(ls.values, ls.scale_s) for ls in aligned])
    cov = amplitude_covariance(stack)
    cov.scale_s = mean.scale_s
    cov.degree = mean.degree
    model = amplitude_pca(cov, n_components=args.components)
    beta = pc_scores(model, stack)
    outputs = []
    vpath = os.path.join(out, "variances.csv")
    lio.write_csv_matrix(
        vpath,
        np.column_stack((np.arange(1, model.B + 1), model.variances,
                         model.fractions)),
        header=["component", "variance", "fraction"])
    outputs.append(vpath)
    spath = os.path.join(out, "scores.csv")
    lio.write_csv_matrix(
        spath, np.column_stack((np.arange(beta.shape[0]), beta)),
        header=["sample"] + [f"score_{b + 1}" for b in range(model.B)])
    outputs.append(spath)
    for b in range(model.B):
        for tag, nu in (("minus", -args.nu), ("plus", args.nu)):
            path = os.path.join(out, f"pc{b + 1}_{tag}.json")
            lio.save_landscape(path, pc_path(model, b, nu))
            outputs.append(path)
    mpath = os.path.join(out, "mean_curve.json")
    lio.save_landscape(mpath, pc_path(model, 0, 0.0))
    outputs.append(mpath)
    lio.write_manifest(out, "pca", _argv_of(args), inputs, outputs,
                       elapsed_s=time.perf_counter() - t0)
    frac = ", ".join(f"{f:.3f}" for f in model.fractions)
    print(f"pca: {model.B} components, variance fractions [{frac}] -> {out}")
    return 0


# ---------------------------------------------------------------------------
# denoise
# ---------------------------------------------------------------------------

def cmd_denoise(args) -> int:
    t0 = time.perf_counter()
    out = _ensure_dir(args.out)
    dfiles = _collect(args.diagrams)
    dfiles = [f for f in dfiles if os.path.basename(f) != "manifest.json"]
    diagrams = [lio.load_diagram(f) for f in dfiles]
    mean, aligned, warps, align_inputs = _load_alignment_dir(args.align)
    if len(diagrams) != len(warps):
        raise DataError(f"{len(diagrams)} diagrams but {len(warps)} warps")
    transformed = [transform_diagram(dg, w, mean.scale_s)
                   for dg, w in zip(diagrams, warps)]
    outputs = []
    for i, dg in enumerate(transformed):
        path = os.path.join(out, f"denoised_{i:03d}.json")
        lio.save_diagram(path, dg)
        outputs.append(path)
    normalised = [
        lio.diagram_from_dict({**lio.diagram_to_dict(dg),
                               "pairs": (dg.pairs / mean.scale_s).tolist(),
                               "max_scale": 1.0})
        for dg in diagrams
    ]
    before = diagram_spread(normalised, rank=args.rank)
    after = diagram_spread(transformed, rank=args.rank)
    spath = os.path.join(out, "summary.json")
    lio.write_json(spath, {
        "rank": args.rank,
        "spread_before": before.value, "skipped_before": before.skipped,
        "spread_after": after.value, "skipped_after": after.skipped,
    })
    outputs.append(spath)
    lio.write_manifest(out, "denoise", _argv_of(args),
                       dfiles + align_inputs, outputs,
                       elapsed_s=time.perf_counter() - t0)
    print(f"denoise: spread {before.value:.6g} -> {after.value:.6g} "
          f"(rank {args.rank}) -> {out}")
    return 0


# ---------------------------------------------------------------------------
# compare
# ---------------------------------------------------------------------------

def _read_labels(path, n) -> list[str]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            labels = [line.strip() for line in fh if line.strip()]
    except OSError as exc:
        raise DataError(f"cannot read labels file {path}: {exc}") from exc
    if len(labels) != n:
        raise DataError(f"labels file has {len(labels)} entries "
                        f"for {n} landscapes")
    return labels


def cmd_compare(args) -> int:
    t0 = time.perf_counter()
    out = _ensure_dir(args.out)
    files = _landscape_files(args.input)
    landscapes = common_domain([lio.load_landscape(f) for f in files])
    labels = _read_labels(args.labels, len(landscapes))
    res = group_compare(landscapes, labels, tol=args.tol,
                        max_iter=args.max_iter, dp_grid=args.dp_grid)
    outputs = []
    for lab in res.labels:
        p1 = os.path.join(out, f"group_mean_{lab}.json")
        lio.save_landscape(p1, res.groups[lab].mean)
        p2 = os.path.join(out, f"aligned_mean_{lab}.json")
        lio.save_landscape(p2, res.aligned_means[lab])
        outputs.extend([p1, p2])
        wdir = _ensure_dir(os.path.join(out, f"subject_warps_{lab}"))
        for i, w in enumerate(res.subject_warps[lab]):
            wp = os.path.join(wdir, f"warp_{i:03d}.json")
            lio.save_warp(wp, w)
            outputs.append(wp)
    dpath = os.path.join(out, "difference.csv")
    lio.write_csv_matrix(dpath, res.difference)
    ppath = os.path.join(out, "pointwise_difference.csv")
    lio.write_csv_matrix(ppath, res.pointwise_difference)
    outputs.extend([dpath, ppath])
    sup_d, sup_p = res.sup_difference(), res.sup_pointwise()
    spath = os.path.join(out, "summary.json")
    lio.write_json(spath, {
        "labels": list(res.labels),
        "sup_aligned_difference": sup_d,
        "sup_pointwise_difference": sup_p,
        "ratio": sup_d / sup_p if sup_p > 0 else None,
    })
    outputs.append(spath)
    lio.write_manifest(out, "compare", _argv_of(args),
                       files + [args.labels], outputs,
                       elapsed_s=time.perf_counter() - t0)
    print(f"compare: sup aligned difference {sup_d:.6g}, "
          f"sup pointwise {sup_p:.6g} -> {out}")
    return 0


# ---------------------------------------------------------------------------
# plot
# ---------------------------------------------------------------------------

def cmd_plot(args) -> int:
    kind = args.kind
    out_dir = os.path.dirname(os.path.abspath(args.out)) or "."
    _ensure_dir(out_dir)
    if kind == "landscapes":
        files = _landscape_files(args.input)
        landscapes = [lio.load_landscape(f) for f in files]
        mean = None
        mean_path = os.path.join(args.input, "mean.json") \
            if os.path.isdir(args.input) else None
        if mean_path and os.path.exists(mean_path):
            mean = lio.load_landscape(mean_path)
            landscapes = [ls for f, ls in zip(files, landscapes)
                          if os.path.basename(f) != "mean.json"]
        lsvg.plot_landscapes(landscapes, args.out, mean=mean,
                             title=args.title)
    elif kind == "warps":
        files = _collect(args.input)
        files = [f for f in files if os.path.basename(f) != "manifest.json"]
        lsvg.plot_warps([lio.load_warp(f) for f in files], args.out,
                        title=args.title)
    elif kind == "diagram":
        files = _collect(args.input)
        files = [f for f in files if os.path.basename(f) not in
                 ("manifest.json", "summary.json")]
        lsvg.plot_diagrams([lio.load_diagram(f) for f in files], args.out,
                           title=args.title)
    elif kind == "scores":
        files = _collect(args.input, exts=(".csv",))
        table = lio.read_csv_matrix(files[0], skip_header=True)
        labels = None
        if args.labels:
            labels = _read_labels(args.labels, table.shape[0])
        lsvg.plot_scores(table[:, 1:], args.out, labels=labels,
                         title=args.title)
    elif kind == "trace":
        files = _collect(args.input, exts=(".csv",))
        lsvg.plot_trace(lio.read_csv_matrix(files[0]).ravel(), args.out,
                        title=args.title)
    else:  # cloud
        files = _collect(args.input)
        pc = lio.load_point_cloud(files[0])
        lsvg.plot_point_cloud(pc.points, args.out, title=args.title)
    print(f"plot: {kind} -> {args.out}")
    return 0


# ---------------------------------------------------------------------------
# pipeline
# ---------------------------------------------------------------------------

def _cfg_get(table: dict, key: str, default):
    val = table.get(key, default)
    return val


def cmd_pipeline(args) -> int:
    t0 = time.perf_counter()
    try:
        import tomli
    except ImportError as exc:  # pragma: no cover
        raise DataError("pipeline needs the 'tomli' package") from exc
    try:
        with open(args.config, "rb") as fh:
            cfg = tomli.load(fh)
    except OSError as exc:
        raise DataError(f"cannot read config {args.config}: {exc}") from exc
    except tomli.TOMLDecodeError as exc:
        raise DataError(f"invalid TOML in {args.config}: {exc}") from exc

    out = _ensure_dir(args.out)
    argv = _argv_of(args)

    # ---- simulate (one or more groups) ----
    groups = cfg.get("groups")
    if groups is None:
        sim = cfg.get("simulate")
        if sim is None:
            raise DataError("config needs a [simulate] table or [[groups]]")
        groups = [sim]
    clouds = []
    labels = []
    seed_used = None
    for gi, g in enumerate(groups):
        label = str(_cfg_get(g, "label", f"group{gi}"))
        seed = int(_cfg_get(g, "seed", 0))
        seed_used = seed if seed_used is None else seed_used
        sim_cfg = SimConfig(
            design=str(_cfg_get(g, "design", "circle")),
            n_clouds=int(_cfg_get(g, "n", 20)),
            seed=seed,
            noise_sigma_factor=float(_cfg_get(g, "noise", 0.0)),
            size_range=(int(_cfg_get(g, "size_min", 10)),
                        int(_cfg_get(g, "size_max", 30))),
            radius_mean=float(_cfg_get(g, "radius_mean", 1.0)),
            radius_sd=float(_cfg_get(g, "radius_sd", 0.3)),
            label=label,
            equispaced=bool(_cfg_get(g, "equispaced", False)),
            fixed_ratio=g.get("ratio"),
            fixed_revolutions=g.get("revolutions"),
            n_points=g.get("points"),
            split=str(_cfg_get(g, "split", "proportional")))
        for pc in simulate(sim_cfg):
            clouds.append(pc)
            labels.append(label)
    cdir = _ensure_dir(os.path.join(out, "clouds"))
    cloud_files = []
    for i, pc in enumerate(clouds):
        path = os.path.join(cdir, f"cloud_{i:03d}.json")
        lio.save_point_cloud(path, pc)
        cloud_files.append(path)

    # ---- diagrams ----
    ph = cfg.get("ph", {})
    degree = int(_cfg_get(ph, "degree", 1))
    complex_ = str(_cfg_get(ph, "complex", "rips"))
    convention = str(_cfg_get(ph, "convention", "radius"))
    max_scale = ph.get("max_scale")
    subsample = ph.get("subsample")
    cap_essential = bool(_cfg_get(ph, "cap_essential", False))
    ddir = _ensure_dir(os.path.join(out, "diagrams"))
    diagrams = []
    for i, pc in enumerate(clouds):
        use = pc
        if subsample and pc.n > int(subsample):
            use = subsample_cloud(pc, int(subsample), seed=seed_used + i)
        if degree == 0:
            dg = persistence_deg0(use, convention=convention,
                                  max_scale=max_scale,
                                  cap_essential=cap_essential,
                                  source_id=f"cloud_{i:03d}")
        elif complex_ == "rips":
            dg = persistence_deg1_rips(use, max_scale=max_scale,
                                       convention=convention,
                                       cap_essential=cap_essential,
                                       source_id=f"cloud_{i:03d}")
        else:
            dg = persistence_deg1_cech2d(use, max_scale=max_scale,
                                         cap_essential=cap_essential,
                                         source_id=f"cloud_{i:03d}")
        diagrams.append(dg)
        lio.save_diagram(os.path.join(ddir, f"diagram_{i:03d}.json"), dg)

    # ---- landscapes ----
    lc = cfg.get("landscape", {})
    built = _build_landscapes(diagrams, int(_cfg_get(lc, "grid", 512)),
                              lc.get("levels"), lc.get("domain_end"),
                              int(_cfg_get(lc, "top_j", 0)),
                              float(_cfg_get(lc, "headroom", 1.0)))
    ldir = _ensure_dir(os.path.join(out, "landscapes"))
    for i, ls in enumerate(built):
        lio.save_landscape(os.path.join(ldir, f"landscape_{i:03d}.json"), ls)

    # ---- align ----
    al = cfg.get("align", {})
    adir = _ensure_dir(os.path.join(out, "align"))
    res, _ = _run_align(built, adir, float(_cfg_get(al, "tol", 1e-4)),
                        int(_cfg_get(al, "max_iter", 20)),
                        al.get("dp_grid"))

    # ---- optional stages ----
    pca_cfg = cfg.get("pca")
    if pca_cfg is not None and _cfg_get(pca_cfg, "enabled", True):
        pdir = _ensure_dir(os.path.join(out, "pca"))
        stack = res.aligned_srvf
        cov = amplitude_covariance(stack)
        cov.scale_s, cov.degree = res.scale_s, res.degree
        model = amplitude_pca(cov, int(_cfg_get(pca_cfg, "components", 2)))
        beta = pc_scores(model, stack)
        lio.write_csv_matrix(
            os.path.join(pdir, "variances.csv"),
            np.column_stack((np.arange(1, model.B + 1), model.variances,
                             model.fractions)),
            header=["component", "variance", "fraction"])
        lio.write_csv_matrix(
            os.path.join(pdir, "scores.csv"),
            np.column_stack((np.arange(beta.shape[0]), beta)),
            header=["sample"] + [f"score_{b+1}" for b in range(model.B)])
        nu = float(_cfg_get(pca_cfg, "nu", 2.0))
        for b in range(model.B):
            lio.save_landscape(os.path.join(pdir, f"pc{b+1}_minus.json"),
                               pc_path(model, b, -nu))
            lio.save_landscape(os.path.join(pdir, f"pc{b+1}_plus.json"),
                               pc_path(model, b, nu))
        if len(set(labels)) > 1:
            with open(os.path.join(pdir, "labels.txt"), "w",
                      encoding="utf-8") as fh:
                fh.write("\n".join(labels) + "\n")

    dn_cfg = cfg.get("denoise")
    if dn_cfg is not None and _cfg_get(dn_cfg, "enabled", True):
        ndir = _ensure_dir(os.path.join(out, "denoise"))
        den = denoise_sample(diagrams, res)
        for i, dn in enumerate(den):
            lio.save_diagram(os.path.join(ndir, f"denoised_{i:03d}.json"),
                             dn.transformed)

    cmp_cfg = cfg.get("compare")
    comparison = None
    if cmp_cfg is not None and _cfg_get(cmp_cfg, "enabled", True):
        if len(set(labels)) != 2:
            raise DataError("compare stage needs exactly two [[groups]]")
        gdir = _ensure_dir(os.path.join(out, "compare"))
        comparison = group_compare(
            built, labels, tol=float(_cfg_get(cmp_cfg, "tol", 1e-4)),
            max_iter=int(_cfg_get(cmp_cfg, "max_iter", 20)),
            dp_grid=cmp_cfg.get("dp_grid"))
        lio.write_csv_matrix(os.path.join(gdir, "difference.csv"),
                             comparison.difference)
        lio.write_csv_matrix(os.path.join(gdir, "pointwise_difference.csv"),
                             comparison.pointwise_difference)
        sup_d = comparison.sup_difference()
        sup_p = comparison.sup_pointwise()
        lio.write_json(os.path.join(gdir, "summary.json"), {
            "labels": list(comparison.labels),
            "sup_aligned_difference": sup_d,
            "sup_pointwise_difference": sup_p,
            "ratio": sup_d / sup_p if sup_p > 0 else None,
        })

    plot_cfg = cfg.get("plot")
    if plot_cfg is not None and _cfg_get(plot_cfg, "enabled", True):
        fdir = _ensure_dir(os.path.join(out, "plots"))
        lsvg.plot_point_cloud(clouds[0].points,
                              os.path.join(fdir, "cloud_000.svg"),
                              title="first simulated cloud")
        lsvg.plot_diagrams(diagrams[: min(8, len(diagrams))],
                           os.path.join(fdir, "diagrams.svg"),
                           title="persistence diagrams")
        lsvg.plot_landscapes(built[: min(8, len(built))],
                             os.path.join(fdir, "landscapes.svg"),
                             title="landscapes")
        lsvg.plot_landscapes(res.aligned[: min(8, len(res.aligned))],
                             os.path.join(fdir, "aligned.svg"),
                             mean=res.mean, title="aligned landscapes")
        lsvg.plot_warps(res.warps, os.path.join(fdir, "warps.svg"),
                        title="alignment warps")
        lsvg.plot_trace(res.sse_trace, os.path.join(fdir, "sse_trace.svg"),
                        title="alignment error per iteration")

    # manifest over every file written under out
    outputs = sorted(
        p for p in glob.glob(os.path.join(out, "**", "*"), recursive=True)
        if os.path.isfile(p) and os.path.basename(p) != "manifest.json")
    lio.write_manifest(out, "pipeline", argv, [args.config], outputs,
                       seed=seed_used, elapsed_s=time.perf_counter() - t0)
    msg = (f"pipeline: {len(clouds)} clouds -> {len(diagrams)} diagrams -> "
           f"align ({res.iterations} iterations)")
    if comparison is not None:
        msg += (f"; compare ratio "
                f"{comparison.sup_difference() / max(comparison.sup_pointwise(), 1e-30):.3f}")
    print(msg + f" -> {out}")
    return 0


# ---------------------------------------------------------------------------
# parser / entry point
# ---------------------------------------------------------------------------

def _argv_of(args) -> list[str]:
    return list(getattr(args, "_raw_argv", []))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="landskew",
        description="Phase-amplitude analysis of persistence landscapes")
    p.add_argument("--version", action="version",
                   version=f"landskew {__version__}")
    sub = p.add_subparsers(dest="command", metavar="command")

    sim = sub.add_parser("simulate", help="generate simulated point clouds")
    sim.add_argument("--design", required=True,
                     choices=["circle", "two-circles", "spirals", "torus"])
    sim.add_argument("--n", type=int, default=20, help="number of clouds")
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--noise", type=float, default=0.0,
                     help="noise scale factor c (std per axis = sqrt(r) * c)")
    sim.add_argument("--size-min", type=int, default=10)
    sim.add_argument("--size-max", type=int, default=30)
    sim.add_argument("--radius-mean", type=float, default=1.0)
    sim.add_argument("--radius-sd", type=float, default=0.3)
    sim.add_argument("--label", default=None)
    sim.add_argument("--equispaced", action="store_true",
                     help="circle design: regular angles instead of uniform")
    sim.add_argument("--ratio", type=float, default=None,
                     help="two-circles/torus: fix the radius ratio draw")
    sim.add_argument("--revolutions", type=float, default=None,
                     help="spirals: fix the revolutions draw")
    sim.add_argument("--points", type=int, default=None,
                     help="torus: points per cloud")
    sim.add_argument("--split", default="proportional",
                     choices=["proportional", "equal", "per-circle"],
                     help="two-circles: how points divide between circles")
    sim.add_argument("--out", required=True)
    sim.set_defaults(func=cmd_simulate)

    ph = sub.add_parser("ph", help="persistence diagrams of point clouds")
    ph.add_argument("--input", required=True,
                    help="cloud JSON file, directory, or glob")
    ph.add_argument("--degree", type=int, default=1, choices=[0, 1])
    ph.add_argument("--complex", default="rips", choices=["rips", "cech2d"])
    ph.add_argument("--convention", default="radius",
                    choices=["radius", "diameter"])
    ph.add_argument("--max-scale", type=float, default=None)
    ph.add_argument("--cap-essential", action="store_true",
                    help="record never-dying classes as pairs at max scale")
    ph.add_argument("--subsample", type=int, default=None,
                    help="random subsample cap before degree-1 computation")
    ph.add_argument("--seed", type=int, default=0,
                    help="seed for --subsample")
    ph.add_argument("--out", required=True)
    ph.set_defaults(func=cmd_ph)

    lsc = sub.add_parser("landscape", help="grid landscapes of diagrams")
    lsc.add_argument("--input", required=True)
    lsc.add_argument("--grid", type=int, default=512, help="grid size T")
    lsc.add_argument("--levels", type=int, default=None,
                     help="level count K (default: automatic)")
    lsc.add_argument("--domain-end", type=float, default=None,
                     help="common domain end (default: largest death)")
    lsc.add_argument("--top-j", type=int, default=0,
                     help="keep only the j most persistent pairs")
    lsc.add_argument("--headroom", type=float, default=1.0,
                     help="pad the automatic domain end by this factor so "
                          "the largest feature stays warpable")
    lsc.add_argument("--out", required=True)
    lsc.set_defaults(func=cmd_landscape)

    al = sub.add_parser("align", help="elastic sample mean and warps")
    al.add_argument("--input", required=True)
    al.add_argument("--tol", type=float, default=1e-4)
    al.add_argument("--max-iter", type=int, default=20)
    al.add_argument("--dp-grid", type=int, default=None,
                    help="coarse lattice size for the warp search")
    al.add_argument("--out", required=True)
    al.set_defaults(func=cmd_align)

    pca = sub.add_parser("pca", help="amplitude components of an alignment")
    pca.add_argument("--input", required=True, help="align output directory")
    pca.add_argument("--components", type=int, default=2)
    pca.add_argument("--nu", type=float, default=2.0,
                     help="path offset in standard deviations")
    pca.add_argument("--out", required=True)
    pca.set_defaults(func=cmd_pca)

    dn = sub.add_parser("denoise", help="warp diagrams to the common timeline")
    dn.add_argument("--diagrams", required=True)
    dn.add_argument("--align", required=True, help="align output directory")
    dn.add_argument("--rank", type=int, default=1,
                    help="persistence rank for the spread summary")
    dn.add_argument("--out", required=True)
    dn.set_defaults(func=cmd_denoise)

    cp = sub.add_parser("compare", help="two-group aligned mean contrast")
    cp.add_argument("--input", required=True)
    cp.add_argument("--labels", required=True,
                    help="text file: one group label per landscape")
    cp.add_argument("--tol", type=float, default=1e-4)
    cp.add_argument("--max-iter", type=int, default=20)
    cp.add_argument("--dp-grid", type=int, default=None)
    cp.add_argument("--out", required=True)
    cp.set_defaults(func=cmd_compare)

    pl = sub.add_parser("pipeline", help="end-to-end run from a TOML config")
    pl.add_argument("--config", required=True)
    pl.add_argument("--out", required=True)
    pl.set_defaults(func=cmd_pipeline)

    pt = sub.add_parser("plot", help="deterministic SVG figures")
    pt.add_argument("--kind", required=True,
                    choices=["landscapes", "warps", "diagram", "scores",
                             "trace", "cloud"])
    pt.add_argument("--input", required=True)
    pt.add_argument("--labels", default=None,
                    help="labels file for score colouring")
    pt.add_argument("--title", default=None)
    pt.add_argument("--out", required=True)
    pt.set_defaults(func=cmd_plot)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    parser = build_parser()
    args = parser.parse_args(argv)
    if not getattr(args, "command", None):
        parser.print_usage(sys.stderr)
        return 2
    args._raw_argv = list(argv)
    try:
        return args.func(args)
    except NumericalError as exc:
        print(f"landskew: numerical error: {exc}", file=sys.stderr)
        return 4
    except DataError as exc:
        print(f"landskew: {exc}", file=sys.stderr)
        return 3
    except LandskewError as exc:  # pragma: no cover - catch-all
        print(f"landskew: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
