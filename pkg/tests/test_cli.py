import json
from pathlib import Path

import numpy as np
import pytest

from app.api import lab
from app.api.router import CommandRouter, Lab
from app.core import ParameterError, ResourceError
from app.db import read_manifest, read_snapshot_csv, read_table
from app.main import build_parser, main
from app.models import ExperimentOutcome, LabConfig, RunStatus

ZERO_DRIFT = """
[grid]
n = 64
length = 6.283185307179586

[step]
dt = 0.01
record_every = 5

[datum]
kind = "zero"

[experiment]
t_final = 0.05
"""

PLANE_WAVE = """
[grid]
n = 64
length = 6.283185307179586

[model]
sigma = 1.0
sign = -1

[step]
dt = 1e-3
record_every = 100

[datum]
kind = "plane_wave"
amplitude = 1.0
wavenumber = 2

[experiment]
t_final = 0.2
"""

SWEEP = ZERO_DRIFT + """
[sweep]
command = "conservation-drift"

[sweep.parameters]
"model.sigma" = [0.75, 1.0]
"""


CONFIGS = Path(__file__).resolve().parents[1] / "configs"

SOLITON = """
[grid]
n = 1024
length = 60.0

[model]
sigma = 1.0
b = 0.0
sign = 1

[step]
dt = 1e-3
record_every = 10

[datum]
kind = "soliton"

[experiment]
t_final = 0.05
refinements = 0
"""

SMALL_GAUSSIAN = """
[grid]
n = 128
length = 20.0

[model]
sigma = 1.0
sign = -1

[step]
dt = 1e-3
record_every = 10

[datum]
kind = "gaussian"
amplitude = 0.5
width = 2.0
decay = 2.0

[experiment]
t_final = 0.2
"""


def run_directory(root, command):
    runs = list((root / command).iterdir())
    assert len(runs) == 1
    return runs[0]


def test_every_command_is_registered():
    assert set(lab.commands) == {
        "soliton-propagation",
        "conservation-drift",
        "regularization-convergence",
        "picard",
        "scaling-symmetry",
        "gauge-check",
        "lipschitz-probe",
        "envelope-report",
        "modulation-report",
        "energy-bound",
        "energy-estimate",
        "envelope-propagation",
        "continuity",
        "lp-audit",
        "sweep",
    }


def test_help_lists_config_keys():
    epilog = build_parser().epilog
    assert "[model]" in epilog
    assert "sigma = 1.0" in epilog
    assert "[sweep]" in epilog


def test_zero_field_drift_passes(tmp_path, write_config):
    out = tmp_path / "runs"
    assert main(["conservation-drift", "--config", str(write_config(ZERO_DRIFT)), "--out", str(out)]) == 0
    run = run_directory(out, "conservation-drift")
    manifest = read_manifest(run / "manifest.json")
    assert manifest.status == RunStatus.PASSED
    assert manifest.schema_version == 1
    assert manifest.finished_at is not None
    assert json.loads((run / "manifest.json").read_text())["schema"] == 1
    for name in ("drift.csv", "ledger.csv", "orders.csv", "summary.csv"):
        assert (run / name).exists()


def test_reruns_are_byte_identical(tmp_path, write_config):
    config = str(write_config(PLANE_WAVE))
    first, second = tmp_path / "a", tmp_path / "b"
    assert main(["conservation-drift", "--config", config, "--out", str(first)]) == 0
    assert main(["conservation-drift", "--config", config, "--out", str(second)]) == 0
    left = run_directory(first, "conservation-drift")
    right = run_directory(second, "conservation-drift")
    assert left.name == right.name
    for name in ("drift.csv", "ledger.csv", "orders.csv", "summary.csv"):
        assert (left / name).read_bytes() == (right / name).read_bytes()


def test_seed_override_changes_the_run_directory(tmp_path, write_config):
    config = str(write_config(ZERO_DRIFT))
    out = tmp_path / "runs"
    assert main(["conservation-drift", "--config", config, "--out", str(out), "--seed", "4"]) == 0
    manifest = read_manifest(run_directory(out, "conservation-drift") / "manifest.json")
    assert manifest.config["datum"]["seed"] == 4
    assert manifest.config["experiment"]["seed"] == 4


def test_config_errors_exit_with_one(tmp_path, write_config, caplog):
    bad = write_config(ZERO_DRIFT + "\n[extra]\nvalue = 1\n", "bad.toml")
    assert main(["conservation-drift", "--config", str(bad), "--out", str(tmp_path)]) == 1
    assert main(["conservation-drift", "--config", str(tmp_path / "missing.toml"), "--out", str(tmp_path)]) == 1
    negative = write_config(ZERO_DRIFT.replace("dt = 0.01", "dt = -0.01"), "negative.toml")
    with caplog.at_level("ERROR"):
        assert main(["conservation-drift", "--config", str(negative), "--out", str(tmp_path)]) == 1
    assert "step.dt" in caplog.text


def test_jobs_above_the_cap_are_refused(tmp_path, write_config):
    config = str(write_config(ZERO_DRIFT))
    assert main(["sweep", "--config", config, "--out", str(tmp_path), "--jobs", "99"]) == 1
    with pytest.raises(ResourceError):
        lab.execute("conservation-drift", LabConfig(), tmp_path, jobs=0)


def test_lab_errors_are_recorded_in_the_manifest(tmp_path, write_config):
    dnlsb = write_config(ZERO_DRIFT.replace("[datum]", "[model]\nsign = 1\n\n[datum]"), "dnlsb.toml")
    assert main(["gauge-check", "--config", str(dnlsb), "--out", str(tmp_path)]) == 1
    manifest = read_manifest(run_directory(tmp_path, "gauge-check") / "manifest.json")
    assert manifest.status == RunStatus.ERROR
    assert "sign = -1" in manifest.error


def test_sweep_runs_every_point(tmp_path, write_config):
    config = str(write_config(SWEEP))
    assert main(["sweep", "--config", config, "--out", str(tmp_path)]) == 0
    run = run_directory(tmp_path, "sweep")
    header, rows = read_table(run / "sweep.csv")
    assert header == ["model.sigma", "status", "detail"]
    assert [row[:2] for row in rows] == [["0.75", "passed"], ["1", "passed"]]
    assert len(list((run / "points" / "conservation-drift").iterdir())) == 2


def test_parallel_sweep_matches_serial(tmp_path, write_config):
    config = str(write_config(SWEEP))
    serial, parallel = tmp_path / "serial", tmp_path / "parallel"
    assert main(["sweep", "--config", config, "--out", str(serial)]) == 0
    assert main(["sweep", "--config", config, "--out", str(parallel), "--jobs", "2"]) == 0
    left = run_directory(serial, "sweep") / "sweep.csv"
    right = run_directory(parallel, "sweep") / "sweep.csv"
    assert left.read_bytes() == right.read_bytes()


def test_unexpected_failures_finalize_the_manifest(tmp_path):
    router = CommandRouter(prefix="broken", tags=["Test"])

    @router.command("run")
    def broken(config, ctx) -> ExperimentOutcome:
        """Always fails"""
        raise RuntimeError("boom")

    harness = Lab()
    harness.include_router(router)
    with pytest.raises(RuntimeError):
        harness.execute("broken-run", LabConfig(), tmp_path)
    manifest = read_manifest(run_directory(tmp_path, "broken-run") / "manifest.json")
    assert manifest.status == RunStatus.ERROR
    assert "boom" in manifest.error
    with pytest.raises(ParameterError):
        harness.include_router(router)
    with pytest.raises(ParameterError):
        harness.get("missing")


def run_and_read(tmp_path, command, config):
    out = tmp_path / "runs"
    code = main([command, "--config", str(config), "--out", str(out)])
    run = run_directory(out, command)
    return code, run, read_manifest(run / "manifest.json")


def criteria_of(manifest):
    return {criterion.name: criterion for criterion in manifest.criteria}


def test_conservation_run_writes_endpoint_snapshots(tmp_path, write_config):
    code, run, _ = run_and_read(tmp_path, "conservation-drift", write_config(PLANE_WAVE))
    assert code == 0
    u0 = read_snapshot_csv(run / "u0.csv")
    np.testing.assert_allclose(u0.values, np.exp(2j * u0.grid.points), atol=1e-14)
    assert read_snapshot_csv(run / "u_final.csv").grid.n == 64


def test_conservation_of_a_gaussian_reaches_fourth_order(tmp_path):
    code, run, manifest = run_and_read(tmp_path, "conservation-drift", CONFIGS / "conservation_gaussian.toml")
    assert code == 0
    assert manifest.status == RunStatus.PASSED
    assert len(read_table(run / "orders.csv")[1]) == 2


def test_soliton_run_checks_the_residual(tmp_path, write_config):
    code, run, manifest = run_and_read(tmp_path, "soliton-propagation", write_config(SOLITON))
    assert code == 0
    header, rows = read_table(run / "residual.csv")
    assert header == ["n", "residual_l2"]
    assert [row[0] for row in rows] == ["1024", "512"]
    assert criteria_of(manifest)["soliton_residual"].passed
    assert (run / "u0.csv").exists() and (run / "u_final.csv").exists()


def test_lp_audit_passes_with_the_ramp_bound(tmp_path, write_config):
    text = (CONFIGS / "lp_audit.toml").read_text(encoding="utf-8")
    text = text.replace("samples = 50", "samples = 10").replace("commutator_max = 10.0", "commutator_max = 18.8")
    code, run, manifest = run_and_read(tmp_path, "lp-audit", write_config(text))
    assert code == 0
    found = criteria_of(manifest)
    assert found["block_overlap"].value == 0.0
    assert found["commutator_constant"].value <= 18.8
    assert "bernstein_min_s_0.5" in found
    for name in ("partition.csv", "bernstein.csv", "commutator.csv"):
        assert (run / name).exists()


def test_modulation_of_the_free_flow_checks_local_smoothing(tmp_path):
    code, run, manifest = run_and_read(tmp_path, "modulation-report", CONFIGS / "modulation.toml")
    assert code == 0
    assert criteria_of(manifest)["local_smoothing_ratio"].passed
    assert (run / "smoothing.csv").exists()


def test_picard_scale_shrinks_the_first_iterate(tmp_path, write_config):
    text = (CONFIGS / "picard.toml").read_text(encoding="utf-8").replace("n_iter = 6", "n_iter = 4")
    full = run_and_read(tmp_path / "full", "picard", write_config(text, "full.toml"))
    half = run_and_read(tmp_path / "half", "picard", write_config(text + "scale = 0.5\n", "half.toml"))
    assert full[0] == 0 and half[0] == 0
    d_full = float(read_table(full[1] / "picard.csv")[1][0][1])
    d_half = float(read_table(half[1] / "picard.csv")[1][0][1])
    assert d_half == pytest.approx(0.5 * d_full, rel=1e-10)
    assert (half[1] / "cross_check.csv").exists()


def test_lipschitz_ratios_stay_close(tmp_path, write_config):
    text = SMALL_GAUSSIAN + "seed = 7\nepsilons = [1e-2, 1e-3, 1e-4]\nlipschitz_factor = 2.0\n"
    code, run, _ = run_and_read(tmp_path, "lipschitz-probe", write_config(text))
    assert code == 0
    ratios = [float(row[3]) for row in read_table(run / "lipschitz.csv")[1]]
    assert min(ratios) >= 1 - 1e-12
    assert max(ratios) / min(ratios) <= 2.0


@pytest.mark.parametrize(
    "command, extra, table",
    [
        ("envelope-propagation", 'norm = "hs:1"\nenvelope_growth_max = 4.0\n', "propagation.csv"),
        ("continuity", "seed = 7\nepsilons = [1e-2, 1e-3]\ncontinuity_s = [0.0, 1.0]\n", "continuity.csv"),
        ("energy-estimate", "estimate_s = 1.0\n", "estimate.csv"),
    ],
)
def test_flow_estimates_pass_on_a_small_gaussian(tmp_path, write_config, command, extra, table):
    code, run, manifest = run_and_read(tmp_path, command, write_config(SMALL_GAUSSIAN + extra))
    assert code == 0
    assert manifest.status == RunStatus.PASSED
    assert read_table(run / table)[1]
