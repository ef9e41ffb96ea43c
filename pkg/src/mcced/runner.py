"""Run harness: execute a scenario document and write its artifacts.

A run produces a directory of plain-text artifacts and one
``manifest.json`` describing them:

``trajectory.csv``
    One row per (time node, particle), columns
    ``t, particle, x, y, z, ux, uy, uz, ax, ay, az, larmor`` — particle
    indices are 0-based, ``ux..az`` are coordinate velocity and
    acceleration, ``larmor`` is the instantaneous radiated power.  Floats
    are written with their shortest round-trip representation.
``ledger.json``
    The energy ledger of the run (initial/final kinetic and potential
    energy, radiated energy, arrow sign, closure residual).
``larmor.dat`` / ``separation.dat`` / ``accel.dat`` / ``asymptotic.dat``
    Optional whitespace-delimited series selected by the scenario's
    ``output.quantities``: total radiated power, minimum pairwise
    separation, per-particle proper acceleration, and the trailing-window
    proper-acceleration series.
``report.txt``
    For report documents (the symmetry and algebra suites) instead of
    trajectory data.

The manifest records the scenario name and content hash, the fully
resolved configuration, wall-clock interval, every artifact with size,
row count and SHA-256, the unused-but-recorded seed, run diagnostics,
and the named validation checks this run performed.  All files are
written atomically (temp file + rename), and re-running an identical
configuration reproduces identical artifact bytes — only the wall-clock
fields of the manifest differ.

On failure an error manifest with a machine-readable code is written
before the exception propagates.
"""

from __future__ import annotations

import csv
import dataclasses
import datetime
import hashlib
import io
import json
import math
import os
import tempfile
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import __version__
from .dynamics import TrajectoryRecord, asymptotic_check, integrate
from .errors import (
    ConvergenceError,
    HorizonError,
    MccedError,
    NumericalLimitError,
    ParseError,
    SingularityError,
)
from .scenario_io import OUTPUT_QUANTITIES, ScenarioDocument
from .worldline import gamma_of

__all__ = ["RunResult", "run_document", "emit_plotdata", "error_code_of"]


ARTIFACT_FORMAT = 1

MANIFEST_NAME = "manifest.json"


def error_code_of(exc: BaseException) -> str:
    """Stable machine-readable code for an exception."""
    if isinstance(exc, ParseError):
        return "parse"
    if isinstance(exc, ConvergenceError):
        return "convergence"
    if isinstance(exc, HorizonError):
        return "horizon"
    if isinstance(exc, SingularityError):
        return "singularity"
    if isinstance(exc, NumericalLimitError):
        return "numerical-limit"
    if isinstance(exc, MccedError):
        return "failure"
    if isinstance(exc, (ValueError, TypeError, KeyError)):
        return "usage"
    return "failure"


@dataclass(frozen=True)
class RunResult:
    """Outcome of one run: output directory, manifest, optional record."""

    out_dir: str
    manifest: dict
    manifest_path: str
    record: TrajectoryRecord | None


# --------------------------------------------------------------------------
# serialization helpers


def _json_safe(value):
    """Recursively convert a value into JSON-serializable builtins."""
    if value is None or isinstance(value, (bool, int, str)):
        return value
    if isinstance(value, float):
        return value
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, np.ndarray):
        return [_json_safe(v) for v in value.tolist()]
    if isinstance(value, dict):
        return {str(k): _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    if hasattr(value, "as_dict"):
        return _json_safe(value.as_dict())
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return _json_safe(dataclasses.asdict(value))
    return repr(value)


def _write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _file_entry(out_dir: str, name: str, rows: int) -> dict:
    path = os.path.join(out_dir, name)
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return {
        "name": name,
        "bytes": os.path.getsize(path),
        "rows": rows,
        "sha256": digest.hexdigest(),
    }


def _field_config(field) -> dict:
    cfg = {"kind": field.kind}
    if field.kind == "none":
        return cfg
    if field.kind == "coulomb-center":
        cfg["source_charge"] = field.source_charge
        cfg["center"] = list(field.center)
        return cfg
    cfg["amplitude"] = field.amplitude
    cfg["direction"] = list(field.direction)
    if field.kind == "plane-wave":
        cfg["polarization"] = list(field.polarization)
        cfg["omega"] = field.omega
        cfg["phase"] = field.phase
        return cfg
    if field.t_on is not None:
        cfg["t_on"] = field.t_on
    if field.t_off is not None:
        cfg["t_off"] = field.t_off
    if field.ramp:
        cfg["ramp"] = field.ramp
    return cfg


def _resolved_config(doc: ScenarioDocument) -> dict:
    scn = doc.scenario
    config = {
        "scenario_name": doc.name,
        "kind": doc.kind,
        "quantities": list(doc.quantities),
    }
    if scn is None:
        return config
    config["topology"] = {
        "mode": scn.topology.mode,
        "p": scn.topology.p,
        "free_field": _field_config(scn.topology.free_field),
    }
    config["external"] = _field_config(scn.external)
    config["particles"] = [
        {
            "charge": part.charge,
            "mass": part.mass,
            "position": part.position.tolist(),
            "velocity": part.velocity.tolist(),
            "initial_acceleration": part.initial_acceleration.tolist(),
        }
        for part in scn.particles
    ]
    cfg = doc.integrator
    if cfg is not None:
        config["integrator"] = {
            "method": cfg.method,
            "dt": cfg.dt,
            "t_end": cfg.t_end,
            "future_horizon": cfg.future_horizon,
            "waveform_iterations": cfg.waveform_iterations,
            "tolerance": cfg.tolerance,
        }
    return config


# --------------------------------------------------------------------------
# artifact writers


def _shared_times(record: TrajectoryRecord) -> np.ndarray:
    times = record.traces[0].times
    for trace in record.traces[1:]:
        if trace.times.shape != times.shape or not np.array_equal(
            trace.times, times
        ):
            raise ValueError("traces do not share a common time grid")
    return times


def _write_trajectory(record: TrajectoryRecord, out_dir: str) -> dict:
    times = _shared_times(record)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(
        ["t", "particle", "x", "y", "z", "ux", "uy", "uz", "ax", "ay", "az", "larmor"]
    )
    rows = 0
    for i, t in enumerate(times):
        for k, trace in enumerate(record.traces):
            pos = trace.positions[i]
            vel = trace.velocities[i]
            acc = trace.accelerations[i]
            writer.writerow(
                [
                    repr(float(t)),
                    k,
                    repr(float(pos[0])),
                    repr(float(pos[1])),
                    repr(float(pos[2])),
                    repr(float(vel[0])),
                    repr(float(vel[1])),
                    repr(float(vel[2])),
                    repr(float(acc[0])),
                    repr(float(acc[1])),
                    repr(float(acc[2])),
                    repr(float(trace.larmor[i])),
                ]
            )
            rows += 1
    _write_atomic(os.path.join(out_dir, "trajectory.csv"), buffer.getvalue())
    return _file_entry(out_dir, "trajectory.csv", rows)


def _write_ledger(record: TrajectoryRecord, out_dir: str) -> dict:
    payload = _json_safe(record.ledger.as_dict())
    payload["method"] = record.method
    payload["dt"] = record.dt
    text = json.dumps(payload, indent=2) + "\n"
    _write_atomic(os.path.join(out_dir, "ledger.json"), text)
    return _file_entry(out_dir, "ledger.json", 1)


def _series_text(columns, rows) -> str:
    lines = ["# " + " ".join(columns)]
    for row in rows:
        lines.append(
            " ".join(
                str(v) if isinstance(v, int) else repr(float(v)) for v in row
            )
        )
    return "\n".join(lines) + "\n"


def _larmor_rows(record: TrajectoryRecord):
    times = _shared_times(record)
    total = np.zeros_like(times)
    for trace in record.traces:
        total = total + trace.larmor
    return [(t, p) for t, p in zip(times, total)]


def _separation_rows(record: TrajectoryRecord):
    if len(record.traces) < 2:
        raise ValueError("separation needs at least two particles")
    times = _shared_times(record)
    rows = []
    for i, t in enumerate(times):
        best = math.inf
        for a in range(len(record.traces)):
            for b in range(a + 1, len(record.traces)):
                d = record.traces[a].positions[i] - record.traces[b].positions[i]
                best = min(best, math.sqrt(float(d @ d)))
        rows.append((t, best))
    return rows


def _accel_rows(record: TrajectoryRecord):
    times = _shared_times(record)
    proper = [trace.proper_acceleration() for trace in record.traces]
    rows = []
    for i, t in enumerate(times):
        for k in range(len(record.traces)):
            rows.append((t, k, proper[k][i]))
    return rows


def _asymptotic_rows(record: TrajectoryRecord):
    """Trailing-window series: max proper acceleration across particles
    over the last quarter of the run."""
    times = _shared_times(record)
    span = record.t_final - record.t_start
    cutoff = record.t_final - 0.25 * span
    proper = [trace.proper_acceleration() for trace in record.traces]
    rows = []
    for i, t in enumerate(times):
        if t >= cutoff:
            rows.append((t, max(float(p[i]) for p in proper)))
    return rows


_SERIES_WRITERS = {
    "larmor": (("t", "larmor_total"), _larmor_rows),
    "separation": (("t", "separation_min"), _separation_rows),
    "accel": (("t", "particle", "proper_acceleration"), _accel_rows),
    "asymptotic": (("t", "max_proper_acceleration"), _asymptotic_rows),
}


def _write_series(record: TrajectoryRecord, out_dir: str, quantity: str) -> dict:
    columns, builder = _SERIES_WRITERS[quantity]
    rows = builder(record)
    name = f"{quantity}.dat"
    _write_atomic(os.path.join(out_dir, name), _series_text(columns, rows))
    return _file_entry(out_dir, name, len(rows))


# --------------------------------------------------------------------------
# per-run validation checks


def _run_checks(record: TrajectoryRecord) -> dict:
    checks = {}
    finite = all(
        np.all(np.isfinite(trace.positions))
        and np.all(np.isfinite(trace.velocities))
        and np.all(np.isfinite(trace.accelerations))
        and np.all(np.isfinite(trace.larmor))
        for trace in record.traces
    )
    checks["finite-state"] = {"passed": bool(finite)}
    diag = record.diagnostics
    runaway = diag.get("runaway")
    if runaway is not None:
        passed = bool(runaway.detected and runaway.relative_error <= 0.01)
        checks["runaway-rate"] = {
            "passed": passed,
            "fitted_rate": runaway.fitted_rate,
            "expected_rate": runaway.expected_rate,
            "relative_error": runaway.relative_error,
        }
    # The ledger covers particle energy only, so closure is a valid check
    # only when nothing external does work on the charges and the motion
    # stays regular (a detected runaway has unbounded bookkeeping).
    scn = record.scenario
    isolated = (
        scn.external.kind in ("none", "uniform-magnetic")
        and scn.topology.free_field.kind == "none"
    )
    regular = runaway is None or not runaway.detected
    if isolated and regular:
        led = record.ledger
        scale = max(
            abs(led.final_kinetic - led.initial_kinetic),
            abs(led.potential_final - led.potential_initial),
            led.radiated,
            1e-300,
        )
        bound = 0.05 * scale
        checks["energy-closure"] = {
            "passed": bool(abs(led.closure_residual) <= bound),
            "residual": led.closure_residual,
            "bound": bound,
        }
    return checks


# --------------------------------------------------------------------------
# report documents


def _symmetry_report_text() -> tuple[str, dict]:
    from .checks import ced_probe_scenario, parity_probe_events, parity_probe_scenario
    from .symmetry import (
        PARITY_FUNCTIONALS,
        SYMMETRY_OPS,
        ced_parity_contrast,
        parity_table,
    )

    scn = parity_probe_scenario()
    events = parity_probe_events()
    table = parity_table(scn, events)
    contrast = ced_parity_contrast(ced_probe_scenario(), events)

    lines = []
    lines.append("symmetry report")
    lines.append("")
    lines.append(
        "probe: two opposite unit charges on mirrored circular orbits"
        " (radius 6, speed 0.35), measurement-color coupling, p = +1"
    )
    lines.append(f"events: {len(events)} off-worldline probe events")
    lines.append("")
    lines.append("parity table (functional under operation; 'none' = not an")
    lines.append("eigenstate of that operation):")
    lines.append("")
    header = f"{'functional':<12s}" + "".join(f"{op:>6s}" for op in SYMMETRY_OPS)
    lines.append(header)
    for functional in PARITY_FUNCTIONALS:
        cells = []
        for op in SYMMETRY_OPS:
            value = table[(functional, op)]
            cells.append(f"{value:+d}" if value != "none" else "none")
        lines.append(
            f"{functional:<12s}" + "".join(f"{cell:>6s}" for cell in cells)
        )
    lines.append("")
    pinned = {
        ("tcrf", "Tt"): -1,
        ("rad_part", "Tp"): -1,
        ("rad_part", "T"): +1,
        ("total", "C"): -1,
    }
    rows_ok = all(table[key] == value for key, value in pinned.items())
    lines.append("pinned structure:")
    for (functional, op), want in pinned.items():
        got = table[(functional, op)]
        verdict = "ok" if got == want else "MISMATCH"
        lines.append(f"  {functional} under {op}: expected {want:+d}, got {got} [{verdict}]")
    lines.append("")
    lines.append("standard-topology contrast (same orbits, ced, plane-wave free field):")
    lines.append(
        f"  radiative part under naive time reversal: parity {contrast.strict_parity!r}"
        " (not an eigenstate)"
    )
    lines.append(
        "  branch-flip family map (p -> -p with the mapped free field): "
        f"deviation {contrast.family_deviation!r}, covariant = {contrast.family_covariant}"
    )
    lines.append("")
    contrast_ok = (
        not contrast.degenerate
        and contrast.strict_parity == "none"
        and contrast.family_covariant
    )
    checks = {
        "parity-rows": {"passed": bool(rows_ok)},
        "ced-family-covariance": {
            "passed": bool(contrast_ok),
            "family_deviation": contrast.family_deviation,
        },
    }
    return "\n".join(lines) + "\n", checks


def _algebra_report_text() -> tuple[str, dict]:
    from .checks import algebra_audit

    entries = algebra_audit()
    lines = ["photon-algebra report", ""]
    lines.append(
        "exact rational identities of the measurement-color single-mode"
        " operator algebra:"
    )
    lines.append("")
    for name, ok, detail in entries:
        verdict = "ok " if ok else "FAIL"
        lines.append(f"  [{verdict}] {name:<22s} {detail}")
    lines.append("")
    failures = [name for name, ok, _ in entries if not ok]
    lines.append(
        f"{len(entries)} identities checked, "
        + ("all hold" if not failures else f"failed: {', '.join(failures)}")
    )
    checks = {
        "photon-algebra": {
            "passed": not failures,
            "identities": len(entries),
            "failures": failures,
        }
    }
    return "\n".join(lines) + "\n", checks


_REPORT_BUILDERS = {
    "symmetry-suite": _symmetry_report_text,
    "algebra-suite": _algebra_report_text,
}


# --------------------------------------------------------------------------
# the run entry point


def _utc_stamp(moment: float) -> str:
    return (
        datetime.datetime.fromtimestamp(moment, tz=datetime.timezone.utc)
        .isoformat(timespec="microseconds")
        .replace("+00:00", "Z")
    )


def run_document(doc: ScenarioDocument, out_dir: str, seed=None) -> RunResult:
    """Execute a scenario document and write its artifacts into out_dir."""
    os.makedirs(out_dir, exist_ok=True)
    started = time.time()
    manifest = {
        "artifact_format": ARTIFACT_FORMAT,
        "package_version": __version__,
        "scenario": {
            "name": doc.name,
            "kind": doc.kind,
            "source": doc.path,
            "content_sha256": hashlib.sha256(doc.text.encode("utf-8")).hexdigest(),
        },
        "config": _resolved_config(doc),
        "seed": seed,
    }
    try:
        record = None
        files = []
        checks = {}
        diagnostics = {}
        if doc.kind == "report":
            builder = _REPORT_BUILDERS[doc.name]
            text, checks = builder()
            _write_atomic(os.path.join(out_dir, "report.txt"), text)
            files.append(
                _file_entry(out_dir, "report.txt", len(text.splitlines()))
            )
        else:
            record = integrate(doc.scenario, doc.integrator)
            diagnostics = record.diagnostics
            for quantity in doc.quantities:
                if quantity == "trajectory":
                    files.append(_write_trajectory(record, out_dir))
                elif quantity == "ledger":
                    files.append(_write_ledger(record, out_dir))
                else:
                    files.append(_write_series(record, out_dir, quantity))
            checks = _run_checks(record)
    except BaseException as exc:
        ended = time.time()
        manifest.update(
            {
                "status": "error",
                "error": {
                    "code": error_code_of(exc),
                    "type": type(exc).__name__,
                    "message": str(exc),
                },
                "started_at": _utc_stamp(started),
                "ended_at": _utc_stamp(ended),
                "wall_time_s": ended - started,
                "files": [],
            }
        )
        path = os.path.join(out_dir, MANIFEST_NAME)
        _write_atomic(path, json.dumps(_json_safe(manifest), indent=2) + "\n")
        raise
    ended = time.time()
    manifest.update(
        {
            "status": "ok",
            "files": files,
            "checks": _json_safe(checks),
            "diagnostics": _json_safe(diagnostics),
            "started_at": _utc_stamp(started),
            "ended_at": _utc_stamp(ended),
            "wall_time_s": ended - started,
        }
    )
    path = os.path.join(out_dir, MANIFEST_NAME)
    _write_atomic(path, json.dumps(_json_safe(manifest), indent=2) + "\n")
    return RunResult(
        out_dir=out_dir, manifest=manifest, manifest_path=path, record=record
    )


# --------------------------------------------------------------------------
# plot data


def _load_manifest(manifest_path: str) -> tuple[str, dict]:
    path = manifest_path
    if os.path.isdir(path):
        path = os.path.join(path, MANIFEST_NAME)
    with open(path, "r", encoding="utf-8") as fh:
        return os.path.dirname(os.path.abspath(path)), json.load(fh)


def _read_rows(path: str):
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        return list(reader)


def emit_plotdata(manifest_path: str, quantity: str) -> str:
    """Whitespace-delimited plot data for one recorded quantity.

    ``trajectory`` emits ``t particle x y z``; the series quantities
    stream their recorded two- or three-column files; ``ledger`` derives
    the energy time series ``t kinetic potential radiated closure`` from
    the trajectory table.  Unknown or unrecorded quantities raise a
    ValueError that lists what this run can emit.
    """
    out_dir, manifest = _load_manifest(manifest_path)
    recorded = {entry["name"] for entry in manifest.get("files", ())}
    available = []
    for q in OUTPUT_QUANTITIES:
        if q in ("trajectory", "ledger"):
            wanted = "trajectory.csv"
        else:
            wanted = f"{q}.dat"
        if wanted in recorded:
            available.append(q)
    if quantity not in OUTPUT_QUANTITIES or quantity not in available:
        raise ValueError(
            f"cannot emit {quantity!r}; this run provides: "
            + (", ".join(available) if available else "nothing plottable")
        )
    if quantity == "trajectory":
        rows = _read_rows(os.path.join(out_dir, "trajectory.csv"))
        lines = ["# t particle x y z"]
        for row in rows:
            lines.append(
                f"{row['t']} {row['particle']} {row['x']} {row['y']} {row['z']}"
            )
        return "\n".join(lines) + "\n"
    if quantity == "ledger":
        return _ledger_series(out_dir, manifest)
    with open(os.path.join(out_dir, f"{quantity}.dat"), "r", encoding="utf-8") as fh:
        return fh.read()


def _ledger_series(out_dir: str, manifest: dict) -> str:
    particles = manifest["config"]["particles"]
    charges = [p["charge"] for p in particles]
    masses = [p["mass"] for p in particles]
    arrow = 1.0 if manifest["config"]["topology"]["p"] > 0 else -1.0
    rows = _read_rows(os.path.join(out_dir, "trajectory.csv"))
    n = len(particles)
    if n == 0 or len(rows) % n != 0:
        raise ValueError("trajectory table does not match the particle count")
    lines = ["# t kinetic potential radiated closure"]
    radiated = 0.0
    previous_t = None
    previous_power = None
    first_total = None
    for i in range(0, len(rows), n):
        group = rows[i : i + n]
        t = float(group[0]["t"])
        kinetic = 0.0
        power = 0.0
        positions = []
        for k, row in enumerate(group):
            v = np.array([float(row["ux"]), float(row["uy"]), float(row["uz"])])
            kinetic += masses[k] * (gamma_of(v) - 1.0)
            power += float(row["larmor"])
            positions.append(
                np.array([float(row["x"]), float(row["y"]), float(row["z"])])
            )
        potential = 0.0
        for a in range(n):
            for b in range(a + 1, n):
                d = positions[a] - positions[b]
                potential += charges[a] * charges[b] / (
                    4.0 * math.pi * math.sqrt(float(d @ d))
                )
        if previous_t is not None:
            radiated += 0.5 * (power + previous_power) * (t - previous_t)
        previous_t, previous_power = t, power
        total = kinetic + potential
        if first_total is None:
            first_total = total
        closure = total + arrow * radiated - first_total
        lines.append(
            f"{t!r} {kinetic!r} {potential!r} {radiated!r} {closure!r}"
        )
    return "\n".join(lines) + "\n"
