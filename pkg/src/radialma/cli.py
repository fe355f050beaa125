"""Batch front-end: scenario files in, CSV out.

Scenario files are plain `key = value` lines with `#` comments, one scenario
per file.  Commands: classify, energy, capacity, solve, bound, verify.
`radialma run FILE` executes one scenario; `radialma sweep FILE` expects
exactly one ranged value `start:stop:step` and emits one CSV row per value.

Exit codes: 0 success, 2 validation error, 3 numerical error, 4 failed
verification (a report file names the violated check).

Floats are serialized with repr (shortest round-trip decimal), so identical
scenarios produce byte-identical output.
"""

from __future__ import annotations

import argparse
import math
import os
import re
import sys

import numpy as np

from . import capacity as capmod
from . import energy as energymod
from . import measures as measmod
from . import profiles as profmod
from . import solver as solvermod

_KNOWN_KEYS = {
    "command", "profile", "profile2", "weight", "eps", "n", "p_list",
    "mu_profile", "mu_csv", "mu_scale", "mu_total",
    "s_min", "s_max", "s_count", "r_count", "tol", "out", "name",
}

_COMMANDS = {"classify", "energy", "capacity", "solve", "bound", "verify"}

_RANGE_RE = re.compile(r"^[^:\s]+:[^:\s]+:[^:\s]+$")


class ScenarioError(Exception):
    """Validation failure (exit 2)."""


class VerificationFailure(Exception):
    """A check did not pass (exit 4)."""

    def __init__(self, module: str, invariant: str):
        super().__init__(f"{module}: {invariant}")
        self.module = module
        self.invariant = invariant


def _parse_scenario(path: str) -> dict:
    if not os.path.exists(path):
        raise ScenarioError(f"scenario file not found: {path}")
    scenario: dict[str, str] = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ScenarioError(f"line {lineno}: expected 'key = value'")
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if key not in _KNOWN_KEYS:
                raise ScenarioError(f"line {lineno}: unknown key {key!r}")
            scenario[key] = value
    if "command" not in scenario:
        raise ScenarioError("missing 'command'")
    if scenario["command"] not in _COMMANDS:
        raise ScenarioError(f"unknown command {scenario['command']!r}")
    return scenario


def _find_ranges(scenario: dict) -> list[tuple[str, str]]:
    found = []
    for key, value in scenario.items():
        for token in value.split():
            if _RANGE_RE.match(token):
                found.append((key, token))
    return found


def _range_values(token: str) -> list[float]:
    try:
        start, stop, step = (float(t) for t in token.split(":"))
    except ValueError as exc:
        raise ScenarioError(f"bad range {token!r}") from exc
    if step <= 0 or stop < start:
        raise ScenarioError(f"empty range {token!r}")
    values = []
    v = start
    while v <= stop + 1e-12 * max(1.0, abs(stop)):
        values.append(round(v, 12))
        v += step
    if not values:
        raise ScenarioError(f"empty range {token!r}")
    return values


def _need(scenario: dict, key: str) -> str:
    if key not in scenario:
        raise ScenarioError(f"command {scenario['command']!r} needs key {key!r}")
    return scenario[key]


def _get_n(scenario: dict) -> int:
    raw = _need(scenario, "n")
    try:
        n = int(raw)
    except ValueError as exc:
        raise ScenarioError("n must be an integer") from exc
    if n < 1:
        raise ScenarioError("n must be >= 1")
    return n


def _get_profile(scenario: dict, key: str = "profile") -> profmod.RadialProfile:
    try:
        return profmod.parse_profile(_need(scenario, key))
    except (ValueError, OSError) as exc:
        raise ScenarioError(str(exc)) from exc


def _get_measure(scenario: dict, n: int) -> measmod.RadialMeasure:
    if "mu_csv" in scenario:
        path = scenario["mu_csv"]
        if not os.path.exists(path):
            raise ScenarioError(f"measure CSV not found: {path}")
        mu = measmod.RadialMeasure.from_csv(path)
    elif "mu_profile" in scenario:
        try:
            profile = profmod.parse_profile(scenario["mu_profile"])
        except ValueError as exc:
            raise ScenarioError(str(exc)) from exc
        mu = measmod.ma_measure(profile, n)
    else:
        raise ScenarioError("measure commands need mu_profile or mu_csv")
    if "mu_scale" in scenario:
        mu = mu.scaled(float(scenario["mu_scale"]))
    return mu


def _get_s_grid(scenario: dict) -> np.ndarray:
    s_min = float(scenario.get("s_min", "1e-3"))
    s_max = float(scenario.get("s_max", "1e3"))
    count = int(scenario.get("s_count", "96"))
    if not (0 < s_min < s_max) or count < 2:
        raise ScenarioError("level grid must be positive and increasing")
    return np.geomspace(s_min, s_max, count)


def _out_path(scenario: dict, out_dir: str, suffix: str) -> str:
    base = scenario.get("name", scenario["command"])
    os.makedirs(out_dir, exist_ok=True)
    return os.path.join(out_dir, f"{base}{suffix}")


def _fmt(x: float) -> str:
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(float(x))


def _run_classify(scenario: dict, out_dir: str) -> list[str]:
    n = _get_n(scenario)
    profile = _get_profile(scenario)
    p_list = [float(t) for t in scenario.get("p_list", "1,2,3").split(",")]
    report = energymod.classify(profile, n, p_list)
    path = _out_path(scenario, out_dir, ".csv")
    with open(path, "w") as fh:
        fh.write(report.csv_header() + "\n")
        fh.write(report.csv_row() + "\n")
    return [path]


def _run_energy(scenario: dict, out_dir: str) -> list[str]:
    n = _get_n(scenario)
    profile = _get_profile(scenario)
    try:
        weight = energymod.parse_weight(_need(scenario, "weight"))
    except ValueError as exc:
        raise ScenarioError(str(exc)) from exc
    direct = energymod.weighted_energy(profile, weight, n)
    cake = energymod.weighted_energy_layercake(profile, weight, n)
    path = _out_path(scenario, out_dir, ".csv")
    with open(path, "w") as fh:
        fh.write("profile,weight,n,energy,status,layercake,layercake_status\n")
        fh.write(f"{profile.tag},{weight.tag},{n},{_fmt(direct.value)},{direct.status},"
                 f"{_fmt(cake.value)},{cake.status}\n")
    return [path]


def _run_capacity(scenario: dict, out_dir: str) -> list[str]:
    n = _get_n(scenario)
    profile = _get_profile(scenario)
    curve = capmod.capacity_curve(profile, n, _get_s_grid(scenario))
    path = _out_path(scenario, out_dir, ".csv")
    curve.to_csv(path)
    return [path]


def _run_solve(scenario: dict, out_dir: str) -> list[str]:
    n = _get_n(scenario)
    mu = _get_measure(scenario, n)
    profile = solvermod.solve_radial(mu)
    xs = -np.geomspace(1e-6, 50.0, 256)[::-1]
    sol_path = _out_path(scenario, out_dir, "_solution.csv")
    with open(sol_path, "w") as fh:
        fh.write("x,gamma\n")
        for x in xs:
            fh.write(f"{_fmt(float(x))},{_fmt(float(profile.value(float(x))))}\n")
    mu_path = _out_path(scenario, out_dir, "_measure.csv")
    measmod.ma_measure(profile, n).to_csv(mu_path)
    # round-trip check: the reconstruction must reproduce the input masses
    probe = np.log(np.geomspace(1e-6, 1.0, 128))
    m_in = np.asarray(mu.ball_mass_x(probe), dtype=float)
    m_out = np.asarray(measmod.ma_measure(profile, n).ball_mass_x(probe), dtype=float)
    gap = np.max(np.abs(m_in - m_out) / np.maximum(np.abs(m_in), 1e-12))
    if gap > 1e-8:
        raise VerificationFailure("solver", "round-trip mass reconstruction")
    return [sol_path, mu_path]


def _run_bound(scenario: dict, out_dir: str) -> list[str]:
    n = _get_n(scenario)
    try:
        modulus = solvermod.parse_modulus(_need(scenario, "eps"))
    except ValueError as exc:
        raise ScenarioError(str(exc)) from exc
    mu_total = float(_need(scenario, "mu_total"))
    s_grid = _get_s_grid(scenario)
    path = _out_path(scenario, out_dir, ".csv")
    with open(path, "w") as fh:
        fh.write("s,bound\n")
        for s in s_grid:
            fh.write(f"{_fmt(float(s))},{_fmt(solvermod.capacity_bound(modulus, mu_total, n, float(s)))}\n")
    return [path]


def _run_verify(scenario: dict, out_dir: str) -> list[str]:
    n = _get_n(scenario)
    mu = _get_measure(scenario, n)
    try:
        modulus = solvermod.parse_modulus(_need(scenario, "eps"))
    except ValueError as exc:
        raise ScenarioError(str(exc)) from exc
    try:
        report = solvermod.verify_capacity_decay(mu, modulus)
    except ValueError as exc:
        raise VerificationFailure("solver", str(exc)) from exc
    bound_path = _out_path(scenario, out_dir, "_bound.csv")
    steps_path = _out_path(scenario, out_dir, "_steps.csv")
    report.to_csv(bound_path)
    report.levels_to_csv(steps_path)
    if not report.passed:
        raise VerificationFailure("solver", "capacity-decay bound violated")
    return [bound_path, steps_path]


_RUNNERS = {
    "classify": _run_classify,
    "energy": _run_energy,
    "capacity": _run_capacity,
    "solve": _run_solve,
    "bound": _run_bound,
    "verify": _run_verify,
}


def _sweep_row(scenario: dict, out_dir: str) -> tuple[str, str]:
    """Run one sweep instance, returning (csv_header, csv_row)."""
    command = scenario["command"]
    if command == "classify":
        n = _get_n(scenario)
        profile = _get_profile(scenario)
        p_list = [float(t) for t in scenario.get("p_list", "1,2,3").split(",")]
        report = energymod.classify(profile, n, p_list)
        return report.csv_header(), report.csv_row()
    if command == "bound":
        n = _get_n(scenario)
        modulus = solvermod.parse_modulus(_need(scenario, "eps"))
        mu_total = float(_need(scenario, "mu_total"))
        ub = solvermod.uniform_bound(modulus, mu_total, n)
        h0 = float(solvermod.step_envelope(modulus, mu_total, n)(np.asarray(0.0)))
        return "eps,n,h0,uniform_bound", f"{modulus.tag},{n},{_fmt(h0)},{_fmt(ub)}"
    raise ScenarioError(f"sweep does not support command {command!r}")


def _apply_overrides(scenario: dict, args) -> str:
    if args.tol is not None:
        scenario["tol"] = repr(args.tol)
    if args.grid is not None:
        scenario["s_count"] = str(args.grid)
    out_dir = args.out or scenario.get("out", ".")
    return out_dir


def _write_failure_report(out_dir: str, failure: VerificationFailure) -> str:
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, "violation_report.txt")
    with open(path, "w") as fh:
        fh.write(f"module: {failure.module}\ninvariant: {failure.invariant}\n")
    return path


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="radialma",
                                     description="radial Monge-Ampere batch runner")
    sub = parser.add_subparsers(dest="mode", required=True)
    for mode in ("run", "sweep"):
        sp = sub.add_parser(mode)
        sp.add_argument("scenario")
        sp.add_argument("--tol", type=float, default=None)
        sp.add_argument("--out", default=None)
        sp.add_argument("--grid", type=int, default=None)
    args = parser.parse_args(argv)

    try:
        scenario = _parse_scenario(args.scenario)
        ranges = _find_ranges(scenario)
        out_dir = _apply_overrides(scenario, args)
        if args.mode == "run":
            if ranges:
                raise ScenarioError("ranged values need the sweep mode")
            paths = _RUNNERS[scenario["command"]](scenario, out_dir)
            print(f"{scenario['command']}: wrote {', '.join(paths)} [ok]")
            return 0
        # sweep
        if len(ranges) != 1:
            raise ScenarioError("sweep needs exactly one ranged value")
        key, token = ranges[0]
        values = _range_values(token)
        rows = []
        header = None
        for v in values:
            inst = dict(scenario)
            inst[key] = inst[key].replace(token, repr(v))
            h, row = _sweep_row(inst, out_dir)
            header = h
            rows.append(f"{v!r},{row}")
        path = _out_path(scenario, out_dir, "_sweep.csv")
        with open(path, "w") as fh:
            fh.write(f"value,{header}\n")
            for row in rows:
                fh.write(row + "\n")
        print(f"sweep: wrote {path} [{len(rows)} rows]")
        return 0
    except ScenarioError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 2
    except VerificationFailure as exc:
        path = _write_failure_report(out_dir, exc)
        print(f"verification failed: {exc} (report: {path})", file=sys.stderr)
        return 4
    except (ValueError, ArithmeticError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
