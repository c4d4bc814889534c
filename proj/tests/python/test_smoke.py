#!/usr/bin/env python3
"""Smoke tests for the gtruth extension module (run with PYTHONPATH set to
the build's python/ directory, or after pip install)."""

import json
import math
import pathlib
import shutil
import sys
import tempfile

import gtruth


def close(a, b, tol=1e-9):
    return abs(a - b) <= tol


def test_version():
    assert gtruth.__version__ == "0.1.0"


def test_exception_hierarchy():
    for exc in (gtruth.ConfigError, gtruth.DataError, gtruth.DegeneracyError):
        assert issubclass(exc, gtruth.Error)
    assert issubclass(gtruth.Error, Exception)


def test_rigid_transform_recovery():
    src = [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0.3, 0.4, 1.2)]
    # quarter turn about z plus a shift
    dst = [(-y + 5.0, x - 2.0, z + 0.25) for x, y, z in src]
    res = gtruth.estimate_rigid_transform(src, dst)
    assert close(res["rmse"], 0.0, 1e-12)
    assert close(res["translation"][0], 5.0, 1e-12)
    assert close(res["rotation"][0][1], -1.0, 1e-12)
    assert len(res["residuals"]) == 4
    assert res["conditioning"] > 1e-3


def test_degenerate_inputs():
    line = [(float(i), 0.0, 0.0) for i in range(4)]
    try:
        gtruth.estimate_rigid_transform(line, line)
        raise AssertionError("collinear source must raise")
    except gtruth.DegeneracyError:
        pass
    try:
        gtruth.estimate_rigid_transform([(0, 0, 0)], [(0, 0, 0), (1, 1, 1)])
        raise AssertionError("length mismatch must raise")
    except gtruth.ConfigError:
        pass


def test_rts_polar_convention():
    x, y, z = gtruth.rts_to_cartesian(0.0, 0.0, 10.0)
    assert close(x, 0.0) and close(y, 10.0) and close(z, 0.0)
    x, y, z = gtruth.rts_to_cartesian(math.pi / 2, 0.0, 10.0)
    assert close(x, 10.0) and close(y, 0.0)


def test_geodetic_round_trip():
    origin = (46.78, -71.28, 98.0)
    enu = (120.5, -40.25, 3.75)
    lat, lon, h = gtruth.enu_to_geodetic(enu, *origin)
    e, n, u = gtruth.geodetic_to_enu(lat, lon, h, *origin)
    assert close(e, enu[0], 1e-6) and close(n, enu[1], 1e-6)
    assert close(u, enu[2], 1e-6)


def test_pose_identity():
    body = [(0.5, 0.0, 1.0), (-0.5, 0.3, 1.0), (-0.5, -0.3, 1.1)]
    measured = [(bx + 1.0, by + 2.0, bz + 3.0) for bx, by, bz in body]
    pose = gtruth.reconstruct_pose(7.5, *measured, "prism", *body)
    assert close(pose["t"], 7.5)
    assert close(pose["translation"][0], 1.0, 1e-12)
    assert close(pose["translation"][2], 3.0, 1e-12)
    assert close(pose["rotation"][0][0], 1.0, 1e-12)
    assert not pose["outlier"]


def test_metrics():
    s = gtruth.summarize([1.0, 2.0, 3.0, 4.0, 5.0])
    assert s["median"] == 3.0 and s["iqr"] == 2.0 and s["count"] == 5
    assert gtruth.quantile([4.0, 2.0, 1.0, 3.0], 0.5) == 2.5

    body = [(0.5, 0.0, 1.0), (-0.5, 0.3, 1.0), (-0.5, -0.3, 1.1)]
    triplets = [(0.0, body[0], body[1], body[2])]
    records = gtruth.inter_distance_errors(triplets, "prism", *body)
    assert len(records) == 1 and close(records[0][1], 0.0, 1e-12)

    matches = gtruth.nn_match([(0, 0, 0), (10, 0, 0)], [(0.5, 0, 0)], 2.0)
    assert matches == [(0, 0, 0.5)]
    disp = gtruth.inter_experiment_errors(records, records, [(0, 0, 0.0)])
    assert disp == [0.0, 0.0, 0.0]


def test_pipeline(tmp):
    spec = tmp / "exp.json"
    spec.write_text(json.dumps({
        "id": "pyexp",
        "path": {"kind": "line", "duration": 60.0},
        "noise": {"seed": 21},
    }))
    ws = str(tmp / "ws")
    gtruth.synth(str(spec), ws)
    gtruth.calibrate(ws, "pyexp")
    gtruth.reconstruct(ws, "pyexp", "rts")
    gtruth.reconstruct(ws, "pyexp", "gnss", max_gap=1.0)
    gtruth.evaluate(ws, "pyexp")
    gtruth.compare(ws, "pyexp", "pyexp", radius=2.0, match_anchor="centroid")

    report = json.loads((tmp / "ws/pyexp/reports/report.json").read_text())
    med = report["systems"]["rts"]["pooled"]["median"]
    assert 0.0 < med < 0.01
    cmp_doc = json.loads(
        (tmp / "ws/pyexp/reports/compare_pyexp_vs_pyexp.json").read_text())
    assert cmp_doc["systems"]["rts"]["summary"]["median"] == 0.0

    try:
        gtruth.evaluate(ws, "missing")
        raise AssertionError("unknown experiment must raise")
    except gtruth.ConfigError:
        pass


def main():
    tmp = pathlib.Path(tempfile.mkdtemp(prefix="gtruth_py_"))
    tests = [t for name, t in sorted(globals().items())
             if name.startswith("test_")]
    try:
        for test in tests:
            if test is test_pipeline:
                test(tmp)
            else:
                test()
            print(f"ok    {test.__name__}")
    finally:
        shutil.rmtree(tmp, ignore_errors=True)
    print(f"python smoke: {len(tests)} tests passed")


if __name__ == "__main__":
    main()
