#!/usr/bin/env python3
"""End-to-end CLI contract tests: exit codes, stderr wording, artifacts,
byte-level determinism.  Usage: cli_integration.py /path/to/gtruth"""

import json
import pathlib
import shutil
import subprocess
import sys
import tempfile

GTRUTH = sys.argv[1]
checks = 0


def run(args, cwd=None):
    return subprocess.run([GTRUTH] + args, capture_output=True, text=True,
                          cwd=cwd)


def expect(cond, label):
    global checks
    checks += 1
    if not cond:
        print(f"FAIL  {label}")
        sys.exit(1)
    print(f"ok    {label}")


def write_spec(path, exp_id, duration=60.0, seed=5):
    path.write_text(json.dumps({
        "id": exp_id,
        "path": {"kind": "line", "duration": duration},
        "noise": {"seed": seed},
    }))


def main():
    tmp = pathlib.Path(tempfile.mkdtemp(prefix="gtruth_cli_"))
    try:
        exercise(tmp)
    finally:
        shutil.rmtree(tmp, ignore_errors=True)
    print(f"cli integration: {checks} checks passed")


def exercise(tmp):
    ws = tmp / "ws"

    r = run(["--version"])
    expect(r.returncode == 0 and "0.1.0" in r.stdout, "--version exits 0")
    r = run(["--help"])
    expect(r.returncode == 0 and "synth" in r.stdout, "--help lists commands")
    r = run(["frobnicate"])
    expect(r.returncode == 2, "unknown subcommand exits 2")
    r = run(["reconstruct"])
    expect(r.returncode == 2, "missing required args exit 2")

    spec = tmp / "exp_a.json"
    write_spec(spec, "exp_a")
    r = run(["-w", str(ws), "synth", str(spec)])
    expect(r.returncode == 0, "synth exits 0")
    expect((ws / "exp_a/raw/rts_station0.csv").exists()
           and (ws / "config.json").exists(), "synth writes bundle + config")

    r = run(["-w", str(ws), "reconstruct", "exp_a", "rts"])
    expect(r.returncode == 2 and "calibrate" in r.stderr,
           "reconstruct before calibrate exits 2 and says why")

    # missing GCP file: config error naming the path
    gcp1 = ws / "exp_a/calib/gcp_station1.csv"
    hidden = gcp1.with_suffix(".hidden")
    gcp1.rename(hidden)
    r = run(["-w", str(ws), "calibrate", "exp_a"])
    expect(r.returncode == 2 and "gcp_station1" in r.stderr,
           "missing gcp file exits 2 naming the file")
    hidden.rename(gcp1)

    r = run(["-w", str(ws), "calibrate", "exp_a"])
    expect(r.returncode == 0 and "station" in r.stdout, "calibrate exits 0")
    expect((ws / "exp_a/derived/calibration.json").exists(),
           "calibration.json written")

    r = run(["-w", str(ws), "reconstruct", "exp_a", "rts"])
    expect(r.returncode == 0, "reconstruct rts exits 0")
    run_doc = json.loads((ws / "exp_a/derived/rts/run.json").read_text())
    expect(run_doc["poses"] == run_doc["triplets"] and run_doc["poses"] > 100,
           "run.json pose count matches triplets")

    # determinism at the process level: re-run leaves identical bytes
    before = {p: p.read_bytes()
              for p in sorted((ws / "exp_a/derived/rts").iterdir())}
    r = run(["-w", str(ws), "reconstruct", "exp_a", "rts"])
    expect(r.returncode == 0 and all(p.read_bytes() == blob
                                     for p, blob in before.items()),
           "reconstruct re-run is byte-identical")

    r = run(["-w", str(ws), "reconstruct", "exp_a", "rts",
             "--reference", "grid:0.5"])
    run_doc = json.loads((ws / "exp_a/derived/rts/run.json").read_text())
    expect(r.returncode == 0 and run_doc["options"]["reference"] == "grid"
           and run_doc["options"]["grid_step"] == 0.5,
           "grid reference recorded in run.json")
    r = run(["-w", str(ws), "reconstruct", "exp_a", "rts",
             "--reference", "grid:zero"])
    expect(r.returncode == 2, "malformed grid step exits 2")
    r = run(["-w", str(ws), "reconstruct", "exp_a", "rts"])
    expect(r.returncode == 0, "restore stream0 reference")

    # gnss quality gate: demote stream 0 to FLOAT fixes
    gnss0 = ws / "exp_a/raw/gnss0.csv"
    text = gnss0.read_text().replace(",FIX", ",FLOAT")
    gnss0.write_text(text)
    r = run(["-w", str(ws), "reconstruct", "exp_a", "gnss"])
    expect(r.returncode == 3, "all-FLOAT stream without flag exits 3")
    r = run(["-w", str(ws), "reconstruct", "exp_a", "gnss", "--admit-float"])
    expect(r.returncode == 0, "--admit-float accepts FLOAT fixes")

    r = run(["-w", str(ws), "evaluate", "exp_a", "--exclude-outliers"])
    expect(r.returncode == 0 and "median" in r.stdout, "evaluate exits 0")
    report = json.loads((ws / "exp_a/reports/report.json").read_text())
    expect(report["metadata"]["exclude_outliers"] is True
           and report["metadata"]["quantile_convention"] == "type7_linear",
           "evaluate metadata records options")
    expect((ws / "exp_a/reports/intra_boxplot_rts.csv").exists(),
           "evaluate writes plot csv")

    # no temporal overlap: shift every stream-1 timestamp far away
    spec_b = tmp / "exp_b.json"
    write_spec(spec_b, "exp_b", seed=6)
    run(["-w", str(ws), "synth", str(spec_b)])
    log1 = ws / "exp_b/raw/rts_station1.csv"
    lines = log1.read_text().splitlines()
    shifted = []
    for line in lines:
        if line.startswith("#") or line.startswith("t,"):
            shifted.append(line)
        else:
            fields = line.split(",")
            fields[0] = repr(float(fields[0]) + 1.0e6)
            shifted.append(",".join(fields))
    log1.write_text("\n".join(shifted) + "\n")
    run(["-w", str(ws), "calibrate", "exp_b"])
    r = run(["-w", str(ws), "reconstruct", "exp_b", "rts"])
    expect(r.returncode == 3 and "error:" in r.stderr,
           "disjoint streams exit 3 with error: prefix")

    r = run(["-w", str(ws), "compare", "exp_a", "exp_a"])
    expect(r.returncode == 0 and "matches" in r.stdout, "self compare exits 0")
    cmp_doc = json.loads(
        (ws / "exp_a/reports/compare_exp_a_vs_exp_a.json").read_text())
    rts_summary = cmp_doc["systems"]["rts"]["summary"]
    expect(rts_summary["median"] == 0.0 and rts_summary["iqr"] == 0.0,
           "self compare is exactly zero")
    r = run(["-w", str(ws), "compare", "exp_a", "exp_a", "--radius", "-1"])
    expect(r.returncode == 2, "negative radius exits 2")
    r = run(["-w", str(ws), "compare", "exp_a", "missing"])
    expect(r.returncode == 2, "unknown experiment exits 2")


if __name__ == "__main__":
    main()
