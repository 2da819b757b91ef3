"""Command-line front end: validate, simulate, certify, emit examples.

Exit codes: 0 pass, 1 check/validation failure, 2 usage or parse error,
3 solver (Newton) failure.  Output is deterministic for fixed inputs; the
environment variable PHS_KIT_THREADS caps internal data-parallel verification.
"""

import json
import re
import sys as _sys

import click
import numpy as np

from .catalog import EXAMPLE_NAMES, make_example
from .dirac import validate_kernel
from .energy import Modulated, resistive_check
from .errors import NewtonError, StructureError
from .fileio import (
    FileFormatError,
    load_trajectory,
    parse_system_dict,
    save_trajectory,
    system_to_dict,
    trajectory_to_csv,
)
from .integrate import SchemeConfig, simulate
from .system import PortSignal, assemble
from .verify import energy_report, strong_trajectory_audit, weak_residual

_STEP_RE = re.compile(r"^step\(\s*([^,\s]+)\s*,\s*([^)\s]+)\s*\)$")


def _echo_json(doc):
    click.echo(json.dumps(doc, indent=2, sort_keys=True))


def _load_doc(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise FileFormatError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"invalid JSON in {path}: {exc}") from exc


def _parse_signal(expr):
    """Input expression: a float constant, step(t0,v), or csv:<path>."""
    expr = expr.strip()
    match = _STEP_RE.match(expr)
    if match:
        t0, v = float(match.group(1)), float(match.group(2))
        return lambda t: v if t >= t0 else 0.0
    if expr.startswith("csv:") or expr.endswith(".csv"):
        path = expr[4:] if expr.startswith("csv:") else expr
        table = np.loadtxt(path, delimiter=",", ndmin=2)
        times, values = table[:, 0], table[:, 1]
        order = np.argsort(times)
        times, values = times[order], values[order]

        def hold(t):
            idx = int(np.searchsorted(times, t, side="right")) - 1
            return float(values[max(idx, 0)])

        return hold
    return float(expr)


def _parse_x0(text, n_s):
    if text is None:
        return np.zeros(n_s)
    values = [float(v) for v in text.replace(";", ",").split(",") if v.strip()]
    if len(values) != n_s:
        raise click.UsageError(f"--x0 needs {n_s} comma-separated values, got {len(values)}")
    return np.array(values)


@click.group()
def main():
    """Port-Hamiltonian DAE toolkit: model, simulate, certify."""


@main.command("validate")
@click.argument("system_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--tol", default=1e-10, show_default=True, help="Skew-defect tolerance.")
def cmd_validate(system_file, tol):
    """Validate a system file; exit 0 iff all structure checks pass."""
    try:
        parts = parse_system_dict(_load_doc(system_file))
    except FileFormatError as exc:
        click.echo(f"parse error: {exc}", err=True)
        _sys.exit(2)
    dirac_report = validate_kernel(parts["dirac"], tol=tol)
    res = parts["res"]
    states = [np.zeros(parts["dirac"].n_s)] if isinstance(res, Modulated) else None
    res_report = resistive_check(res, tol=max(tol, 1e-12), states=states)
    causality_ok = len(parts["causality"]) == parts["dirac"].n_p and all(
        c in ("effort", "flow") for c in parts["causality"]
    )
    ham_ok = parts["ham"].dim == parts["dirac"].n_s
    passed = dirac_report.passed and res_report.passed and causality_ok and ham_ok
    _echo_json({
        "passed": passed,
        "dirac": dirac_report.as_dict(),
        "resistive": res_report.as_dict(),
        "causality_ok": causality_ok,
        "hamiltonian_dim_ok": ham_ok,
    })
    _sys.exit(0 if passed else 1)


@main.command("simulate")
@click.argument("system_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--x0", default=None, help="Comma-separated initial state (default zeros).")
@click.option("--t0", default=0.0, show_default=True)
@click.option("--t1", default=1.0, show_default=True)
@click.option("--dt", default=1e-3, show_default=True)
@click.option("--scheme", type=click.Choice(["implicit_midpoint", "discrete_gradient"]),
              default="implicit_midpoint", show_default=True)
@click.option("--newton-tol", default=1e-12, show_default=True)
@click.option("--input", "inputs", multiple=True, metavar="CH=EXPR",
              help="Prescribed input for port channel CH: float, step(t0,v), or csv:<path>.")
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Write the trajectory CSV here instead of stdout.")
def cmd_simulate(system_file, x0, t0, t1, dt, scheme, newton_tol, inputs, out):
    """Integrate a system and emit the trajectory CSV."""
    if dt <= 0:
        raise click.UsageError("--dt must be positive")
    if t1 <= t0:
        raise click.UsageError("--t1 must exceed --t0")
    try:
        parts = parse_system_dict(_load_doc(system_file))
    except FileFormatError as exc:
        click.echo(f"parse error: {exc}", err=True)
        _sys.exit(2)
    try:
        sys_obj = assemble(parts["dirac"], parts["ham"], parts["res"], parts["causality"])
    except StructureError as exc:
        click.echo(f"validation error: {exc}", err=True)
        _sys.exit(1)
    signals = {}
    for item in inputs:
        if "=" not in item:
            raise click.UsageError(f"--input must look like CH=EXPR, got {item!r}")
        channel, expr = item.split("=", 1)
        try:
            signals[int(channel)] = _parse_signal(expr)
        except (ValueError, OSError) as exc:
            raise click.UsageError(f"bad input expression {expr!r}: {exc}") from exc
    try:
        x0_vec = _parse_x0(x0, sys_obj.n_s)
        traj = simulate(
            sys_obj, x0_vec, PortSignal(signals), (t0, t1),
            SchemeConfig(scheme=scheme, dt=dt, newton_tol=newton_tol),
        )
    except NewtonError as exc:
        click.echo(f"solver failure: {exc}", err=True)
        _sys.exit(3)
    except StructureError as exc:
        click.echo(f"error: {exc}", err=True)
        _sys.exit(2)
    if out:
        save_trajectory(traj, out)
    else:
        click.echo(trajectory_to_csv(traj), nl=False)


@main.command("check")
@click.argument("system_file", type=click.Path(exists=True, dir_okay=False))
@click.argument("trajectory_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--mode", type=click.Choice(["weak", "strong", "energy", "all"]),
              default="all", show_default=True)
@click.option("--tol", default=1e-6, show_default=True,
              help="Normalized tolerance for the weak residual and the energy gap.")
@click.option("--strong-tol", default=2e-2, show_default=True,
              help="Normalized tolerance for the pointwise (classical) audit; "
                   "piecewise-constant channel data sits at O(dt), kinks at O(jump).")
def cmd_check(system_file, trajectory_file, mode, tol, strong_tol):
    """Certify a trajectory against a system; exit 0 iff all requested checks pass."""
    try:
        parts = parse_system_dict(_load_doc(system_file))
        traj = load_trajectory(trajectory_file)
    except FileFormatError as exc:
        click.echo(f"parse error: {exc}", err=True)
        _sys.exit(2)
    try:
        sys_obj = assemble(parts["dirac"], parts["ham"], parts["res"], parts["causality"])
        traj.check_shapes(sys_obj)
    except StructureError as exc:
        click.echo(f"shape mismatch: {exc}", err=True)
        _sys.exit(2)
    report = {"mode": mode, "tol": tol, "strong_tol": strong_tol}
    passed = True
    if mode in ("weak", "all"):
        weak = weak_residual(sys_obj, traj)
        report["weak"] = weak.as_dict()
        report["weak"]["passed"] = weak.max_residual <= tol
        passed &= report["weak"]["passed"]
    if mode in ("energy", "all"):
        energy = energy_report(sys_obj, traj)
        doc = energy.as_dict()
        scale = 1.0 + traj.channel_magnitude()
        doc["max_abs_gap_normalized"] = energy.max_abs_gap / scale
        doc["passed"] = doc["max_abs_gap_normalized"] <= tol
        report["energy"] = doc
        passed &= doc["passed"]
    if mode in ("strong", "all"):
        audit = strong_trajectory_audit(sys_obj, traj)
        doc = audit.as_dict()
        doc["passed"] = audit.max_normalized <= strong_tol
        report["strong"] = doc
        passed &= doc["passed"]
    report["passed"] = bool(passed)
    _echo_json(report)
    _sys.exit(0 if passed else 1)


@main.command("example")
@click.argument("name", type=click.Choice(list(EXAMPLE_NAMES)))
@click.option("--n", "--N", "n_cells", default=8, show_default=True,
              help="Cell count for string/diffusion.")
@click.option("--force", default="linear", show_default=True,
              help="Restoring-force kind for the string: linear or tanh.")
@click.option("--scale", default=1.0, show_default=True, help="Force scale for the string.")
@click.option("--damping", default=1.0, show_default=True, help="Damped-oscillator coefficient.")
@click.option("--a-coeff", default=1.0, show_default=True, help="Diffusion coefficient.")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def cmd_example(name, n_cells, force, scale, damping, a_coeff, out):
    """Emit a built-in example as a system file (stdout or --out)."""
    try:
        sys_obj, info = make_example(
            name, N=n_cells, force=force, scale=scale, damping=damping, a_coeff=a_coeff,
        )
    except StructureError as exc:
        click.echo(f"error: {exc}", err=True)
        _sys.exit(2)
    doc = system_to_dict(sys_obj, metadata={"example": name, **info})
    text = json.dumps(doc, indent=2, sort_keys=True)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        click.echo(text)


if __name__ == "__main__":
    main()
