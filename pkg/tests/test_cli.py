"""CLI subcommands, exit codes, and report contents."""

import json
import os
import subprocess
import sys

import numpy as np
import pytest

from neurolasso import load_vector
from neurolasso.cli import main

SPEC = {
    "n": 8,
    "l": 16,
    "spikes": 3,
    "sigma": 0.1,
    "lambda_factor": 0.05,
    "seed": 11,
    "orthogonalize_rows": True,
}


@pytest.fixture
def spec_file(tmp_path):
    p = tmp_path / "spec.json"
    p.write_text(json.dumps(SPEC))
    return p


@pytest.fixture
def instance_dir(tmp_path, spec_file):
    out = tmp_path / "inst"
    rc = main(["generate", "--config", str(spec_file), "--output", str(out)])
    assert rc == 0
    return out


def test_generate_writes_files(instance_dir):
    for name in ("A.csv", "b.csv", "x0.csv", "meta.json"):
        assert (instance_dir / name).exists()
    meta = json.loads((instance_dir / "meta.json").read_text())
    assert meta["seed"] == 11 and meta["lam"] > 0


def test_generate_deterministic(tmp_path, spec_file):
    d1, d2 = tmp_path / "i1", tmp_path / "i2"
    main(["generate", "--config", str(spec_file), "--output", str(d1)])
    main(["generate", "--config", str(spec_file), "--output", str(d2)])
    for name in ("A.csv", "b.csv", "x0.csv"):
        assert (d1 / name).read_bytes() == (d2 / name).read_bytes()


def test_generate_binary(tmp_path, spec_file):
    out = tmp_path / "bin_inst"
    rc = main(["generate", "--config", str(spec_file), "--output", str(out), "--binary"])
    assert rc == 0
    assert (out / "A.bin").exists()
    rc = main(["solve", str(out), "--output", str(tmp_path / "r.json")])
    assert rc == 0


def test_generate_seed_override(tmp_path, spec_file):
    d1, d2 = tmp_path / "s1", tmp_path / "s2"
    main(["generate", "--config", str(spec_file), "--output", str(d1), "--seed", "99"])
    main(["generate", "--config", str(spec_file), "--output", str(d2)])
    assert (d1 / "A.csv").read_bytes() != (d2 / "A.csv").read_bytes()
    assert json.loads((d1 / "meta.json").read_text())["seed"] == 99


def test_solve_report_and_exit_code(instance_dir, tmp_path, capsys):
    report = tmp_path / "report.json"
    traj = tmp_path / "traj.csv"
    sol = tmp_path / "x.csv"
    rc = main(
        [
            "solve",
            str(instance_dir),
            "--solver",
            "neural",
            "--output",
            str(report),
            "--trajectory",
            str(traj),
            "--solution",
            str(sol),
        ]
    )
    assert rc == 0
    rep = json.loads(report.read_text())
    assert rep["certificate"]["passed"] is True
    assert rep["result"]["status"] == "converged"
    assert rep["result"]["final_residual"] <= 1e-8
    assert rep["seed"] == 11
    assert "recovery" in rep  # ground truth x0 was present
    lines = traj.read_text().splitlines()
    assert lines[0] == "step,time,residual_inf,primal_objective"
    assert len(lines) > 2
    x = load_vector(sol)
    assert x.shape == (16,)


def test_solve_all_solvers_agree(instance_dir, tmp_path):
    objs = {}
    for solver in ("neural", "ista", "fista"):
        rep = tmp_path / f"{solver}.json"
        rc = main(["solve", str(instance_dir), "--solver", solver, "--output", str(rep)])
        assert rc == 0
        objs[solver] = json.loads(rep.read_text())["result"]["objective"]
    ref = objs["neural"]
    for o in objs.values():
        assert abs(o - ref) <= 1e-6 * abs(ref)


def test_solve_not_converged_exit_2(instance_dir, tmp_path):
    rc = main(
        ["solve", str(instance_dir), "--max-steps", "3", "--output", str(tmp_path / "r.json")]
    )
    assert rc == 2
    rep = json.loads((tmp_path / "r.json").read_text())
    assert rep["result"]["status"] == "max_steps_reached"


def test_solve_zeroing_lambda(tmp_path):
    spec = dict(SPEC, lambda_factor=1.1, seed=21)
    sp = tmp_path / "s.json"
    sp.write_text(json.dumps(spec))
    inst = tmp_path / "zi"
    main(["generate", "--config", str(sp), "--output", str(inst)])
    sol = tmp_path / "x.csv"
    rc = main(["solve", str(inst), "--solution", str(sol), "--output", str(tmp_path / "r.json")])
    assert rc == 0
    assert np.abs(load_vector(sol)).max() <= 1e-8


def test_certify_command(instance_dir, tmp_path):
    sol = tmp_path / "x.csv"
    main(["solve", str(instance_dir), "--solution", str(sol), "--output", str(tmp_path / "r.json")])
    rc = main(["certify", str(instance_dir), str(sol), "--output", str(tmp_path / "c.json")])
    assert rc == 0
    cert = json.loads((tmp_path / "c.json").read_text())["certificate"]
    assert cert["passed"] is True
    # corrupt the solution: certificate must fail with exit 2
    x = load_vector(sol)
    x[0] += 0.1
    from neurolasso import save_vector

    save_vector(sol, x)
    rc = main(["certify", str(instance_dir), str(sol), "--output", str(tmp_path / "c2.json")])
    assert rc == 2


def test_compare_command(instance_dir, tmp_path):
    out = tmp_path / "cmp.json"
    rc = main(["compare", str(instance_dir), "--solvers", "neural,ista,fista", "--output", str(out)])
    assert rc == 0
    rep = json.loads(out.read_text())
    assert len(rep["table"]) == 3
    assert rep["disagreement_flags"] == []
    csv = (tmp_path / "cmp.csv").read_text().splitlines()
    assert csv[0].startswith("solver,objective,residual")
    assert len(csv) == 4


def test_compare_single_solver_usage_error(instance_dir):
    with pytest.raises(SystemExit) as ei:
        main(["compare", str(instance_dir), "--solvers", "neural"])
    assert ei.value.code == 1


def test_missing_instance_exit_1(tmp_path):
    rc = main(["solve", str(tmp_path / "nope")])
    assert rc == 1


def test_bad_json_spec_exit_1(tmp_path):
    p = tmp_path / "broken.json"
    p.write_text("{not json")
    rc = main(["generate", "--config", str(p)])
    assert rc == 1


def test_experiment_signal_recovery(tmp_path, spec_file):
    out = tmp_path / "exp.json"
    sig = tmp_path / "signals.csv"
    rc = main(
        [
            "experiment",
            "signal-recovery",
            "--config",
            str(spec_file),
            "--output",
            str(out),
            "--signals",
            str(sig),
        ]
    )
    assert rc == 0
    rep = json.loads(out.read_text())
    assert rep["certificate"]["passed"] is True
    assert "recovery" in rep and "least_norm_recovery" in rep
    lines = sig.read_text().splitlines()
    assert lines[0] == "index,x0,least_norm,recovered"
    assert len(lines) == SPEC["l"] + 1


def test_experiment_near_exact_recovery(tmp_path):
    spec = {
        "n": 16,
        "l": 16,
        "spikes": 3,
        "sigma": 0.0,
        "lambda_factor": 1e-6,
        "seed": 4,
        "orthogonalize_rows": True,
    }
    sp = tmp_path / "exact.json"
    sp.write_text(json.dumps(spec))
    out = tmp_path / "exp.json"
    rc = main(
        [
            "experiment",
            "signal-recovery",
            "--config",
            str(sp),
            "--output",
            str(out),
            "--signals",
            str(tmp_path / "sig.csv"),
        ]
    )
    assert rc == 0
    rep = json.loads(out.read_text())
    assert rep["recovery"]["relative_l2_error"] <= 1e-3


def test_console_script_and_thread_env(tmp_path, spec_file):
    out = tmp_path / "inst"
    proc = subprocess.run(
        [
            sys.executable,
            "-m",
            "neurolasso.cli",
            "generate",
            "--config",
            str(spec_file),
            "--output",
            str(out),
        ],
        capture_output=True,
        text=True,
        env={**os.environ, "NEUROLASSO_THREADS": "1"},
    )
    assert proc.returncode == 0, proc.stderr
    assert "generated instance" in proc.stdout
    proc = subprocess.run(
        [sys.executable, "-m", "neurolasso.cli", "--version"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0


def test_unknown_subcommand_exit_1():
    with pytest.raises(SystemExit) as ei:
        main(["bogus"])
    assert ei.value.code == 1


def test_bad_thread_env(monkeypatch, spec_file, tmp_path):
    monkeypatch.setenv("NEUROLASSO_THREADS", "zero")
    with pytest.raises(SystemExit) as ei:
        main(["generate", "--config", str(spec_file), "--output", str(tmp_path / "x")])
    assert ei.value.code == 1
