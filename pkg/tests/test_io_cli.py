"""Serialization round-trips, run manifests, CLI exit codes, and figures."""
import json
import os

import numpy as np
import pytest

from landskew import cli
from landskew import io as lio
from landskew.elastic import Warp
from landskew.errors import NumericalError
from landskew.landscape import Landscape
from landskew.persistence import PersistenceDiagram
from landskew.simgen import PointCloud


def run_cli(argv):
    return cli.main([str(a) for a in argv])


@pytest.fixture()
def rng():
    return np.random.default_rng(42)


# ---------------------------------------------------------------------------
# JSON / CSV round-trips
# ---------------------------------------------------------------------------

def _roundtrip(tmp_path, obj, save, load):
    p1 = tmp_path / "one.json"
    p2 = tmp_path / "two.json"
    save(p1, obj)
    back = load(p1)
    save(p2, back)
    assert p1.read_bytes() == p2.read_bytes()
    return back


def test_point_cloud_roundtrip_bytes(tmp_path, rng):
    pc = PointCloud(rng.normal(size=(17, 3)), 3, "cloud_a")
    back = _roundtrip(tmp_path, pc, lio.save_point_cloud,
                      lio.load_point_cloud)
    assert np.array_equal(back.points, pc.points)
    assert back.label == pc.label and back.dim == 3


def test_diagram_roundtrip_bytes(tmp_path, rng):
    pairs = np.sort(rng.uniform(0.0, 1.0, size=(9, 2)), axis=1)
    dg = PersistenceDiagram(degree=1, pairs=pairs, convention="radius",
                            max_scale=1.25, source_id="dg0")
    back = _roundtrip(tmp_path, dg, lio.save_diagram, lio.load_diagram)
    assert np.array_equal(back.pairs, dg.pairs)
    assert back.degree == 1 and back.max_scale == 1.25


def test_landscape_roundtrip_bytes(tmp_path, rng):
    vals = np.maximum(rng.normal(size=(3, 33)), 0.0)
    vals = np.sort(vals, axis=0)[::-1]
    ls = Landscape(np.ascontiguousarray(vals), 1.75, degree=1)
    back = _roundtrip(tmp_path, ls, lio.save_landscape, lio.load_landscape)
    assert np.array_equal(back.values, ls.values)
    assert back.scale_s == ls.scale_s


def test_warp_roundtrip_bytes(tmp_path):
    t = np.linspace(0.0, 1.0, 65)
    w = Warp(t + 0.05 * np.sin(np.pi * t))
    back = _roundtrip(tmp_path, w, lio.save_warp, lio.load_warp)
    assert np.array_equal(back.values, w.values)


def test_csv_matrix_roundtrip_bytes(tmp_path, rng):
    arr = rng.normal(size=(5, 4)) * np.array([1e-8, 1.0, 1e8, np.pi])
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    lio.write_csv_matrix(p1, arr, header=["w", "x", "y", "z"])
    back = lio.read_csv_matrix(p1, skip_header=True)
    assert np.array_equal(back, arr)  # 17 significant digits are lossless
    lio.write_csv_matrix(p2, back, header=["w", "x", "y", "z"])
    assert p1.read_bytes() == p2.read_bytes()


def test_csv_uses_lf_endings(tmp_path):
    p = tmp_path / "m.csv"
    lio.write_csv_matrix(p, np.eye(2))
    raw = p.read_bytes()
    assert b"\r" not in raw and raw.endswith(b"\n")


def test_malformed_json_reports_data_error(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    from landskew.errors import DataError
    with pytest.raises(DataError):
        lio.load_diagram(bad)


# ---------------------------------------------------------------------------
# CLI commands and manifests
# ---------------------------------------------------------------------------

def test_simulate_writes_manifest_with_checksums(tmp_path):
    out = tmp_path / "clouds"
    assert run_cli(["simulate", "--design", "circle", "--n", "3",
                    "--seed", "5", "--out", out]) == 0
    man = json.loads((out / "manifest.json").read_text(encoding="utf-8"))
    assert man["tool"] == "landskew"
    assert man["command"] == "simulate"
    assert man["seed"] == 5
    assert len(man["outputs"]) == 3
    for rel, digest in man["outputs"].items():
        assert lio.sha256_file(out / rel) == digest


def test_simulate_is_deterministic_given_seed(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert run_cli(["simulate", "--design", "spirals", "--n", "2",
                        "--seed", "9", "--out", out]) == 0
    for name in ("cloud_000.json", "cloud_001.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_ph_landscape_align_chain(tmp_path):
    clouds = tmp_path / "clouds"
    dgs = tmp_path / "dgs"
    lss = tmp_path / "lss"
    al = tmp_path / "al"
    assert run_cli(["simulate", "--design", "circle", "--n", "4",
                    "--seed", "3", "--size-min", "8", "--size-max", "12",
                    "--out", clouds]) == 0
    assert run_cli(["ph", "--input", clouds, "--degree", "1",
                    "--complex", "cech2d", "--out", dgs]) == 0
    assert run_cli(["landscape", "--input", dgs, "--grid", "64",
                    "--out", lss]) == 0
    # every landscape shares the common domain end (the largest death)
    ends = {lio.load_landscape(lss / f"landscape_{i:03d}.json").scale_s
            for i in range(4)}
    assert len(ends) == 1
    assert run_cli(["align", "--input", lss, "--tol", "1e-3",
                    "--max-iter", "2", "--dp-grid", "33",
                    "--out", al]) == 0
    assert (al / "mean.json").exists()
    assert (al / "warps" / "warp_003.json").exists()
    trace = lio.read_csv_matrix(al / "sse_trace.csv").ravel()
    assert np.all(np.diff(trace) <= 1e-12)


def test_landscape_headroom_pads_domain(tmp_path):
    clouds = tmp_path / "clouds"
    dgs = tmp_path / "dgs"
    run_cli(["simulate", "--design", "circle", "--n", "2", "--seed", "3",
             "--size-min", "8", "--size-max", "12", "--out", clouds])
    run_cli(["ph", "--input", clouds, "--degree", "1", "--complex",
             "cech2d", "--out", dgs])
    plain, padded = tmp_path / "plain", tmp_path / "padded"
    assert run_cli(["landscape", "--input", dgs, "--grid", "32",
                    "--out", plain]) == 0
    assert run_cli(["landscape", "--input", dgs, "--grid", "32",
                    "--headroom", "1.25", "--out", padded]) == 0
    end0 = lio.load_landscape(plain / "landscape_000.json").scale_s
    end1 = lio.load_landscape(padded / "landscape_000.json").scale_s
    assert end1 == pytest.approx(1.25 * end0, rel=1e-12)


def test_exit_codes_usage_data_numerical(tmp_path, monkeypatch, capsys):
    assert run_cli([]) == 2
    with pytest.raises(SystemExit) as exc:
        run_cli(["simulate", "--design", "dodecahedron", "--out", tmp_path])
    assert exc.value.code == 2
    # data error: input directory with no point clouds
    empty = tmp_path / "empty"
    empty.mkdir()
    assert run_cli(["ph", "--input", empty, "--out", tmp_path / "x"]) == 3
    # numerical error surfacing from any stage maps to exit 4
    def boom(cfg):
        raise NumericalError("synthetic failure")
    monkeypatch.setattr(cli, "simulate", boom)
    assert run_cli(["simulate", "--design", "circle",
                    "--out", tmp_path / "y"]) == 4
    capsys.readouterr()


def test_headroom_below_one_is_a_data_error(tmp_path):
    clouds = tmp_path / "clouds"
    dgs = tmp_path / "dgs"
    run_cli(["simulate", "--design", "circle", "--n", "1", "--seed", "1",
             "--size-min", "8", "--size-max", "8", "--out", clouds])
    run_cli(["ph", "--input", clouds, "--degree", "1", "--complex",
             "cech2d", "--out", dgs])
    assert run_cli(["landscape", "--input", dgs, "--grid", "32",
                    "--headroom", "0.5", "--out", tmp_path / "l"]) == 3


def test_simulate_split_choices(tmp_path):
    for split in ("proportional", "equal", "per-circle"):
        out = tmp_path / split
        assert run_cli(["simulate", "--design", "two-circles", "--n", "2",
                        "--seed", "4", "--split", split, "--out", out]) == 0
    prop = lio.load_point_cloud(tmp_path / "proportional" / "cloud_000.json")
    per = lio.load_point_cloud(tmp_path / "per-circle" / "cloud_000.json")
    assert prop.n != per.n  # per-circle draws a second point budget


# ---------------------------------------------------------------------------
# pipeline + figures
# ---------------------------------------------------------------------------

PIPELINE_TOML = """
[simulate]
design = "circle"
n = 4
seed = 21
size_min = 8
size_max = 12

[ph]
degree = 1
complex = "cech2d"

[landscape]
grid = 64

[align]
tol = 1e-3
max_iter = 2
dp_grid = 33

[pca]
components = 2

[denoise]
enabled = true

[plot]
enabled = true
"""


def test_pipeline_smoke(tmp_path):
    cfgp = tmp_path / "run.toml"
    cfgp.write_text(PIPELINE_TOML, encoding="utf-8")
    out = tmp_path / "run"
    assert run_cli(["pipeline", "--config", cfgp, "--out", out]) == 0
    for rel in ("clouds/cloud_003.json", "diagrams/diagram_000.json",
                "landscapes/landscape_000.json", "align/mean.json",
                "align/sse_trace.csv", "pca/scores.csv",
                "denoise/denoised_000.json", "plots/landscapes.svg",
                "manifest.json"):
        assert (out / rel).exists(), rel
    man = json.loads((out / "manifest.json").read_text(encoding="utf-8"))
    assert man["command"] == "pipeline"
    # manifest digests cover every output file
    for rel, digest in man["outputs"].items():
        assert lio.sha256_file(out / rel) == digest


def test_pipeline_rejects_bad_config(tmp_path):
    cfgp = tmp_path / "bad.toml"
    cfgp.write_text("[nothing]\n", encoding="utf-8")
    assert run_cli(["pipeline", "--config", cfgp,
                    "--out", tmp_path / "o"]) == 3
    assert run_cli(["pipeline", "--config", tmp_path / "missing.toml",
                    "--out", tmp_path / "o2"]) == 3


def test_svg_outputs_are_deterministic(tmp_path):
    clouds = tmp_path / "clouds"
    run_cli(["simulate", "--design", "circle", "--n", "1", "--seed", "8",
             "--size-min", "10", "--size-max", "10", "--out", clouds])
    s1, s2 = tmp_path / "a.svg", tmp_path / "b.svg"
    assert run_cli(["plot", "--kind", "cloud", "--input", clouds,
                    "--out", s1]) == 0
    assert run_cli(["plot", "--kind", "cloud", "--input", clouds,
                    "--out", s2]) == 0
    b1 = s1.read_bytes()
    assert b1 == s2.read_bytes()
    assert b1.startswith(b"<?xml") or b1.lstrip().startswith(b"<svg")


def test_compare_cli_two_groups(tmp_path):
    ca, cb = tmp_path / "ga", tmp_path / "gb"
    run_cli(["simulate", "--design", "circle", "--n", "2", "--seed", "31",
             "--size-min", "8", "--size-max", "12", "--out", ca])
    run_cli(["simulate", "--design", "circle", "--n", "2", "--seed", "32",
             "--size-min", "8", "--size-max", "12", "--out", cb])
    merged = tmp_path / "all"
    merged.mkdir()
    idx = 0
    for src in (ca, cb):
        for i in range(2):
            data = (src / f"cloud_{i:03d}.json").read_bytes()
            (merged / f"cloud_{idx:03d}.json").write_bytes(data)
            idx += 1
    dgs, lss = tmp_path / "dgs", tmp_path / "lss"
    run_cli(["ph", "--input", merged, "--degree", "1", "--complex",
             "cech2d", "--out", dgs])
    run_cli(["landscape", "--input", dgs, "--grid", "64", "--out", lss])
    labels = tmp_path / "labels.txt"
    labels.write_text("a\na\nb\nb\n", encoding="utf-8")
    out = tmp_path / "cmp"
    assert run_cli(["compare", "--input", lss, "--labels", labels,
                    "--tol", "1e-3", "--max-iter", "2",
                    "--dp-grid", "33", "--out", out]) == 0
    summary = json.loads((out / "summary.json").read_text(encoding="utf-8"))
    assert set(summary["labels"]) == {"a", "b"}
    assert summary["ratio"] is not None
    diff = lio.read_csv_matrix(out / "difference.csv")
    assert diff.ndim == 2 and diff.shape[1] == 64
