"""Serialisation: JSON schemas for the core types, CSV tables, run manifests.

JSON files use Python's shortest round-trip float repr, so dump -> load ->
dump is byte-identical.  CSV numbers are written with 17 significant digits
for the same reason.  Every CLI command drops a ``manifest.json`` in its
output directory recording the tool version, arguments, backend, elapsed
time, and SHA-256 of each input and output file.
"""
from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ._backend import backend_name
from .elastic import Warp
from .errors import DataError
from .landscape import Landscape
from .persistence import PersistenceDiagram
from .simgen import PointCloud

__all__ = [
    "write_json",
    "read_json",
    "point_cloud_to_dict", "point_cloud_from_dict",
    "diagram_to_dict", "diagram_from_dict",
    "landscape_to_dict", "landscape_from_dict",
    "warp_to_dict", "warp_from_dict",
    "save_point_cloud", "load_point_cloud",
    "save_diagram", "load_diagram",
    "save_landscape", "load_landscape",
    "save_warp", "load_warp",
    "write_csv_matrix", "read_csv_matrix",
    "sha256_file",
    "write_manifest",
]


def write_json(path, obj: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")


def read_json(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot read JSON file {path}: {exc}") from exc
    if not isinstance(obj, dict):
        raise DataError(f"{path}: expected a JSON object")
    return obj


def _need(obj: dict, key: str, where: str):
    if key not in obj:
        raise DataError(f"{where}: missing required field '{key}'")
    return obj[key]


# ---------------------------------------------------------------------------
# type <-> dict
# ---------------------------------------------------------------------------

def point_cloud_to_dict(pc: PointCloud) -> dict:
    out = {"dim": pc.dim, "label": pc.label,
           "points": [list(map(float, row)) for row in pc.points]}
    return out


def point_cloud_from_dict(obj: dict, where: str = "point cloud") -> PointCloud:
    dim = int(_need(obj, "dim", where))
    pts = np.asarray(_need(obj, "points", where), np.float64)
    if pts.ndim != 2 or pts.shape[1] != dim:
        raise DataError(f"{where}: points do not match dim={dim}")
    return PointCloud(points=pts, dim=dim, label=obj.get("label"))


def diagram_to_dict(dg: PersistenceDiagram) -> dict:
    out = {"degree": dg.degree, "convention": dg.convention,
           "max_scale": float(dg.max_scale),
           "pairs": [[float(b), float(d)] for b, d in dg.pairs]}
    if dg.source_id is not None:
        out["source_id"] = dg.source_id
    return out


def diagram_from_dict(obj: dict, where: str = "diagram") -> PersistenceDiagram:
    pairs = np.asarray(_need(obj, "pairs", where), np.float64).reshape(-1, 2)
    try:
        return PersistenceDiagram(
            degree=int(_need(obj, "degree", where)),
            pairs=pairs,
            convention=str(_need(obj, "convention", where)),
            max_scale=float(_need(obj, "max_scale", where)),
            source_id=obj.get("source_id"))
    except (TypeError, ValueError) as exc:
        raise DataError(f"{where}: {exc}") from exc


def landscape_to_dict(ls: Landscape) -> dict:
    out = {"K": ls.K, "T": ls.T, "scale_s": float(ls.scale_s),
           "degree": ls.degree,
           "values": [[float(v) for v in row] for row in ls.values]}
    if ls.source_id is not None:
        out["source_id"] = ls.source_id
    return out


def landscape_from_dict(obj: dict, where: str = "landscape") -> Landscape:
    K = int(_need(obj, "K", where))
    T = int(_need(obj, "T", where))
    vals = np.asarray(_need(obj, "values", where), np.float64)
    if vals.shape != (K, T):
        raise DataError(f"{where}: values shape {vals.shape} does not match "
                        f"K={K}, T={T}")
    return Landscape(vals, float(_need(obj, "scale_s", where)),
                     int(_need(obj, "degree", where)), obj.get("source_id"))


def warp_to_dict(warp: Warp) -> dict:
    return {"T": warp.T, "values": [float(v) for v in warp.values]}


def warp_from_dict(obj: dict, where: str = "warp") -> Warp:
    T = int(_need(obj, "T", where))
    vals = np.asarray(_need(obj, "values", where), np.float64)
    if vals.size != T:
        raise DataError(f"{where}: {vals.size} values for T={T}")
    return Warp(vals)


def save_point_cloud(path, pc: PointCloud) -> None:
    write_json(path, point_cloud_to_dict(pc))


def load_point_cloud(path) -> PointCloud:
    return point_cloud_from_dict(read_json(path), str(path))


def save_diagram(path, dg: PersistenceDiagram) -> None:
    write_json(path, diagram_to_dict(dg))


def load_diagram(path) -> PersistenceDiagram:
    return diagram_from_dict(read_json(path), str(path))


def save_landscape(path, ls: Landscape) -> None:
    write_json(path, landscape_to_dict(ls))


def load_landscape(path) -> Landscape:
    return landscape_from_dict(read_json(path), str(path))


def save_warp(path, warp: Warp) -> None:
    write_json(path, warp_to_dict(warp))


def load_warp(path) -> Warp:
    return warp_from_dict(read_json(path), str(path))


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------

def write_csv_matrix(path, arr: np.ndarray,
                     header: Optional[Sequence[str]] = None) -> None:
    arr = np.atleast_2d(np.asarray(arr, np.float64))
    with open(path, "w", encoding="utf-8") as fh:
        if header is not None:
            fh.write(",".join(header) + "\n")
        for row in arr:
            fh.write(",".join("%.17g" % v for v in row) + "\n")


def read_csv_matrix(path, skip_header: bool = False) -> np.ndarray:
    try:
        return np.loadtxt(path, delimiter=",", ndmin=2,
                          skiprows=1 if skip_header else 0)
    except (OSError, ValueError) as exc:
        raise DataError(f"cannot read CSV file {path}: {exc}") from exc


# ---------------------------------------------------------------------------
# run manifests
# ---------------------------------------------------------------------------

def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(out_dir, command: str, argv: Sequence[str],
                   inputs: Sequence[str], outputs: Sequence[str],
                   seed: Optional[int] = None,
                   elapsed_s: Optional[float] = None) -> str:
    """Record what a command did; returns the manifest path."""
    from . import __version__

    def digest(paths):
        table = {}
        for p in sorted(str(x) for x in paths):
            rel = os.path.relpath(p, out_dir) if str(p).startswith(str(out_dir)) else p
            table[rel] = sha256_file(p)
        return table

    manifest = {
        "tool": "landskew",
        "version": __version__,
        "command": command,
        "argv": list(argv),
        "seed": seed,
        "backend": backend_name(),
        "elapsed_s": None if elapsed_s is None else round(float(elapsed_s), 3),
        "inputs": digest(inputs),
        "outputs": digest(outputs),
    }
    path = os.path.join(out_dir, "manifest.json")
    write_json(path, manifest)
    return path
