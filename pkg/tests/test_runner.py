"""Run harness: manifests, artifact determinism, plot data, error paths."""

import dataclasses
import datetime
import hashlib
import json
import os

import pytest

from mcced.errors import (
    ConvergenceError,
    HorizonError,
    MccedError,
    NumericalLimitError,
    ParseError,
    SingularityError,
)
from mcced.runner import emit_plotdata, error_code_of, run_document
from mcced.scenario_io import load_builtin, parse_scenario_text

# A cheap isolated two-body document that records every output quantity:
# 21 time nodes, two particles, measurement-color coupling on the retarded
# branch.
FULL = """
[scenario]
name = "probe"

[[particles]]
charge = 1.0
mass = 1.0
position = [0.0, 0.0, 0.0]
velocity = [0.0, 0.0, 0.0]

[[particles]]
charge = -1.0
mass = 1.0
position = [20.0, 0.0, 0.0]
velocity = [0.0, 0.0, 0.0]

[topology]
mode = "mc-ced"
p = 1.0

[integrator]
method = "nbody-retarded"
dt = 0.5
t_end = 10.0

[output]
quantities = ["trajectory", "ledger", "larmor", "separation", "accel", "asymptotic"]
"""

# A single particle in a uniform magnetic field, asking for a pair
# quantity: parses fine, fails at artifact-writing time.
SOLO_SEPARATION = """
[scenario]
name = "solo"

[[particles]]
charge = 1.0
mass = 1.0
position = [0.0, 0.0, 0.0]
velocity = [0.0, 0.0, 0.0]

[topology]
mode = "ced"
p = 1.0

[external]
kind = "uniform-magnetic"
amplitude = 0.05
direction = [0.0, 0.0, 1.0]

[integrator]
method = "landau-lifshitz"
dt = 0.5
t_end = 5.0

[output]
quantities = ["separation"]
"""


@pytest.fixture(scope="module")
def full_run(tmp_path_factory):
    doc = parse_scenario_text(FULL, path="mem.toml")
    out = tmp_path_factory.mktemp("full")
    return run_document(doc, str(out), seed=7)


def _parse_stamp(stamp):
    assert stamp.endswith("Z")
    return datetime.datetime.fromisoformat(stamp.replace("Z", "+00:00"))


class TestManifest:
    def test_identity_block(self, full_run):
        man = full_run.manifest
        assert man["artifact_format"] == 1
        assert man["status"] == "ok"
        assert man["seed"] == 7
        scn = man["scenario"]
        assert scn["name"] == "probe"
        assert scn["kind"] == "dynamics"
        assert scn["source"] == "mem.toml"
        want = hashlib.sha256(FULL.encode("utf-8")).hexdigest()
        assert scn["content_sha256"] == want

    def test_resolved_config(self, full_run):
        cfg = full_run.manifest["config"]
        assert cfg["scenario_name"] == "probe"
        assert cfg["topology"]["mode"] == "mc-ced"
        assert cfg["topology"]["p"] == 1.0
        assert cfg["topology"]["free_field"] == {"kind": "none"}
        assert cfg["external"] == {"kind": "none"}
        assert len(cfg["particles"]) == 2
        assert cfg["particles"][1]["charge"] == -1.0
        assert cfg["particles"][1]["position"] == [20.0, 0.0, 0.0]
        integ = cfg["integrator"]
        assert integ["method"] == "nbody-retarded"
        assert integ["dt"] == 0.5
        assert integ["t_end"] == 10.0

    def test_file_entries_match_disk(self, full_run):
        entries = {f["name"]: f for f in full_run.manifest["files"]}
        assert set(entries) == {
            "trajectory.csv",
            "ledger.json",
            "larmor.dat",
            "separation.dat",
            "accel.dat",
            "asymptotic.dat",
        }
        for name, entry in entries.items():
            path = os.path.join(full_run.out_dir, name)
            blob = open(path, "rb").read()
            assert entry["bytes"] == len(blob)
            assert entry["sha256"] == hashlib.sha256(blob).hexdigest()

    def test_row_counts(self, full_run):
        rows = {f["name"]: f["rows"] for f in full_run.manifest["files"]}
        # 21 time nodes, 2 particles.
        assert rows["trajectory.csv"] == 42
        assert rows["accel.dat"] == 42
        assert rows["larmor.dat"] == 21
        assert rows["separation.dat"] == 21
        assert rows["ledger.json"] == 1
        # trailing-quarter window of a t_end = 10 run on a 0.5 grid
        assert rows["asymptotic.dat"] == 6

    def test_checks_for_isolated_run(self, full_run):
        checks = full_run.manifest["checks"]
        assert checks["finite-state"]["passed"] is True
        closure = checks["energy-closure"]
        assert closure["passed"] is True
        assert abs(closure["residual"]) <= closure["bound"]

    def test_timestamps(self, full_run):
        man = full_run.manifest
        started = _parse_stamp(man["started_at"])
        ended = _parse_stamp(man["ended_at"])
        assert ended >= started
        assert man["wall_time_s"] >= 0.0

    def test_manifest_file_round_trips(self, full_run):
        loaded = json.load(open(full_run.manifest_path))
        assert loaded == json.loads(
            json.dumps(full_run.manifest, default=str)
        )


class TestDeterminism:
    def test_identical_rerun_reproduces_bytes(self, full_run, tmp_path):
        doc = parse_scenario_text(FULL, path="mem.toml")
        again = run_document(doc, str(tmp_path / "again"), seed=7)
        for entry in full_run.manifest["files"]:
            a = open(os.path.join(full_run.out_dir, entry["name"]), "rb").read()
            b = open(os.path.join(again.out_dir, entry["name"]), "rb").read()
            assert a == b, entry["name"]
        volatile = ("started_at", "ended_at", "wall_time_s")
        first = {k: v for k, v in full_run.manifest.items() if k not in volatile}
        second = {k: v for k, v in again.manifest.items() if k not in volatile}
        assert json.dumps(first, sort_keys=True, default=str) == json.dumps(
            second, sort_keys=True, default=str
        )


class TestPlotdata:
    def test_trajectory_route(self, full_run):
        text = emit_plotdata(full_run.manifest_path, "trajectory")
        lines = text.splitlines()
        assert lines[0] == "# t particle x y z"
        assert len(lines) == 1 + 42
        first = lines[1].split()
        assert first[1] == "0"  # particle column is 0-based
        assert float(first[0]) == 0.0

    def test_directory_path_accepted(self, full_run):
        via_dir = emit_plotdata(full_run.out_dir, "trajectory")
        via_file = emit_plotdata(full_run.manifest_path, "trajectory")
        assert via_dir == via_file

    def test_ledger_route_closes(self, full_run):
        text = emit_plotdata(full_run.manifest_path, "ledger")
        lines = text.splitlines()
        assert lines[0] == "# t kinetic potential radiated closure"
        assert len(lines) == 1 + 21
        led = full_run.record.ledger
        first = [float(v) for v in lines[1].split()]
        last = [float(v) for v in lines[-1].split()]
        assert first[1] == pytest.approx(led.initial_kinetic, abs=1e-12)
        assert first[2] == pytest.approx(led.potential_initial, rel=1e-9)
        assert last[1] == pytest.approx(led.final_kinetic, rel=1e-9)
        assert last[2] == pytest.approx(led.potential_final, rel=1e-9)
        # The derived series must close like the ledger does.
        scale = max(
            abs(led.final_kinetic - led.initial_kinetic),
            abs(led.potential_final - led.potential_initial),
            led.radiated,
        )
        assert abs(last[4]) <= 0.05 * scale

    def test_series_routes_stream_files(self, full_run):
        for quantity in ("larmor", "separation", "accel", "asymptotic"):
            text = emit_plotdata(full_run.manifest_path, quantity)
            disk = open(
                os.path.join(full_run.out_dir, f"{quantity}.dat")
            ).read()
            assert text == disk

    def test_asymptotic_is_trailing_window(self, full_run):
        text = emit_plotdata(full_run.manifest_path, "asymptotic")
        times = [float(line.split()[0]) for line in text.splitlines()[1:]]
        assert times[0] == pytest.approx(7.5)
        assert times[-1] == pytest.approx(10.0)
        assert all(t >= 7.5 for t in times)

    def test_unknown_quantity_lists_available(self, full_run):
        with pytest.raises(ValueError) as err:
            emit_plotdata(full_run.manifest_path, "wavefunction")
        message = str(err.value)
        assert "wavefunction" in message
        assert "trajectory" in message

    def test_unrecorded_quantity_rejected(self, tmp_path):
        text = FULL.replace(
            '["trajectory", "ledger", "larmor", "separation", "accel", "asymptotic"]',
            '["larmor"]',
        )
        doc = parse_scenario_text(text, path="mem.toml")
        res = run_document(doc, str(tmp_path / "larmor-only"))
        assert emit_plotdata(res.manifest_path, "larmor")
        with pytest.raises(ValueError):
            emit_plotdata(res.manifest_path, "trajectory")
        # the derived energy series needs the trajectory table
        with pytest.raises(ValueError):
            emit_plotdata(res.manifest_path, "ledger")


class TestRunChecks:
    def test_runaway_rate_check(self, tmp_path):
        res = run_document(load_builtin("runaway-demo"), str(tmp_path / "run"))
        check = res.manifest["checks"]["runaway-rate"]
        assert check["passed"] is True
        assert check["relative_error"] <= 0.01
        assert check["fitted_rate"] > 0.0
        # a detected runaway suppresses the energy-closure check
        assert "energy-closure" not in res.manifest["checks"]

    def test_worked_on_run_has_no_closure_check(self, tmp_path):
        res = run_document(load_builtin("step-force"), str(tmp_path / "run"))
        checks = res.manifest["checks"]
        assert checks["finite-state"]["passed"] is True
        assert "energy-closure" not in checks


class TestErrorManifest:
    def test_write_time_failure(self, tmp_path):
        doc = parse_scenario_text(SOLO_SEPARATION, path="mem.toml")
        out = tmp_path / "bad"
        with pytest.raises(ValueError, match="two particles"):
            run_document(doc, str(out))
        man = json.load(open(out / "manifest.json"))
        assert man["status"] == "error"
        assert man["error"]["code"] == "usage"
        assert man["error"]["type"] == "ValueError"
        assert "two particles" in man["error"]["message"]
        assert man["files"] == []
        _parse_stamp(man["started_at"])

    def test_unknown_report_kind(self, tmp_path):
        doc = dataclasses.replace(
            load_builtin("algebra-suite"), name="uncharted-suite"
        )
        out = tmp_path / "bad"
        with pytest.raises(KeyError):
            run_document(doc, str(out))
        man = json.load(open(out / "manifest.json"))
        assert man["status"] == "error"
        assert man["error"]["code"] == "usage"

    def test_error_code_mapping(self):
        cases = [
            (ParseError("x"), "parse"),
            (ConvergenceError("x"), "convergence"),
            (HorizonError("x"), "horizon"),
            (SingularityError("x"), "singularity"),
            (NumericalLimitError("x"), "numerical-limit"),
            (MccedError("x"), "failure"),
            (ValueError("x"), "usage"),
            (TypeError("x"), "usage"),
            (KeyError("x"), "usage"),
            (RuntimeError("x"), "failure"),
        ]
        for exc, want in cases:
            assert error_code_of(exc) == want


class TestReportRun:
    def test_algebra_report(self, tmp_path):
        res = run_document(load_builtin("algebra-suite"), str(tmp_path / "rep"))
        man = res.manifest
        assert man["status"] == "ok"
        assert man["scenario"]["kind"] == "report"
        assert res.record is None
        entries = {f["name"] for f in man["files"]}
        assert entries == {"report.txt"}
        text = open(os.path.join(res.out_dir, "report.txt")).read()
        assert "identities checked, all hold" in text
        check = man["checks"]["photon-algebra"]
        assert check["passed"] is True
        assert check["failures"] == []
        assert check["identities"] > 0
        (entry,) = man["files"]
        assert entry["rows"] == len(text.splitlines())

    def test_report_config_has_no_dynamics_tables(self, tmp_path):
        res = run_document(load_builtin("algebra-suite"), str(tmp_path / "rep"))
        cfg = res.manifest["config"]
        assert set(cfg) == {"scenario_name", "kind", "quantities"}
        assert cfg["quantities"] == []
