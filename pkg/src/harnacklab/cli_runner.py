"""Scenario files, batch runs and reports.

A scenario is a flat text file of ``key = value`` lines with dotted sections::

    name = sphere_thm11
    geometry.kind = round_sphere
    geometry.T = 1.0
    equation.c = -2
    checks.presets = THM_1_1 TYPE1_2R

Lists are whitespace separated.  Path pairs are written as
``x1... t1 | x2... t2`` and separated by ``;``.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path

import numpy as np

from .entropy import eval_entropy, monotonicity_report
from .errors import ConfigError, HarnackLabError
from .geometry import ManifoldSpec, integrate, rm_norm_constant
from .harnack import (PRESET_NAMES, TYPE1_PRESETS, check_nonpositivity, choose_type1_d,
                      preset, residual_study)
from .heat_family import (init_near_delta, pairing_series, solve_backward, solve_forward_heat,
                          total_mass)
from .oracles import li_yau_check
from .path_action import verify_integrated
from .ricci_flow import evolve

SCHEMA = 1
PASSING = ("pass", "informational")

_GEOMETRY_KEYS = {"kind", "n", "grid", "length", "r0", "phi0", "amplitude", "T", "tau0",
                  "steps"}
_EQUATION_KEYS = {"c", "initial", "value", "center", "sigma", "tau_end", "store_every"}
_CHECK_KEYS = {"presets", "entropy", "conservation", "pairs", "tolerance", "refine",
               "li_yau", "random_paths", "segments"}
_OUTPUT_KEYS = {"csv", "json", "plots"}
_SECTIONS = {"geometry": _GEOMETRY_KEYS, "equation": _EQUATION_KEYS,
             "checks": _CHECK_KEYS, "output": _OUTPUT_KEYS}
_PHI_PROFILES = ("zero", "sinsin", "p2")
_INITIAL_PROFILES = ("constant", "normalized", "delta", "smooth", "below_one")


# --- parsing -------------------------------------------------------------------

def parse_config(text, source="<string>"):
    """``key = value`` lines into a flat dict; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        where = f"{source}:{lineno}"
        if not sep or not key:
            raise ConfigError(f"{where}: expected 'key = value'")
        if key in out:
            raise ConfigError(f"{where}: duplicate key {key!r}")
        section, dot, leaf = key.partition(".")
        if dot:
            if section not in _SECTIONS or leaf not in _SECTIONS[section]:
                raise ConfigError(f"{where}: unknown key {key!r}")
        elif key not in ("name", "seed"):
            raise ConfigError(f"{where}: unknown key {key!r}")
        out[key] = value
    return out


@dataclass
class Scenario:
    name: str
    seed: int = 42
    geometry: dict = field(default_factory=dict)
    equation: dict | None = None
    checks: dict = field(default_factory=dict)
    output: dict = field(default_factory=dict)

    def as_dict(self):
        return {"name": self.name, "seed": self.seed, "geometry": self.geometry,
                "equation": self.equation, "checks": self.checks, "output": self.output}


def _num(raw, key, kind=float):
    try:
        value = kind(raw)
    except ValueError:
        raise ConfigError(f"{key}: expected {kind.__name__}, got {raw!r}") from None
    if kind is float and not math.isfinite(value):
        raise ConfigError(f"{key}: value must be finite")
    return value


def _floats(raw, key):
    return [_num(tok, key) for tok in raw.replace(",", " ").split()]


def _bool(raw, key):
    low = raw.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{key}: expected a boolean, got {raw!r}")


def _pairs(raw, dim):
    pairs = []
    for chunk in filter(None, (c.strip() for c in raw.split(";"))):
        ends = chunk.split("|")
        if len(ends) != 2:
            raise ConfigError(f"checks.pairs: expected 'x t | x t', got {chunk!r}")
        pts = []
        for end in ends:
            vals = _floats(end, "checks.pairs")
            if len(vals) != dim + 1:
                raise ConfigError(f"checks.pairs: need {dim} coordinates and a time per point")
            pts.append((tuple(vals[:-1]), vals[-1]))
        if not pts[0][1] < pts[1][1]:
            raise ConfigError("checks.pairs: the first point must come earlier")
        pairs.append(tuple(pts))
    return pairs


def build_scenario(cfg, default_name="scenario"):
    """Typed :class:`Scenario` from a parsed config dict."""
    name = cfg.get("name", default_name)
    seed = _num(cfg.get("seed", "42"), "seed", int)

    kind = cfg.get("geometry.kind")
    if kind is None:
        raise ConfigError("geometry.kind is required")
    if kind not in ("round_sphere", "torus", "rotsym_sphere", "circle"):
        raise ConfigError(f"geometry.kind: unknown kind {kind!r}")
    n_default = 1 if kind == "circle" else 2
    geo = {
        "kind": kind,
        "n": _num(cfg.get("geometry.n", str(n_default)), "geometry.n", int),
        "grid": _num(cfg.get("geometry.grid", "64"), "geometry.grid", int),
        "T": _num(cfg.get("geometry.T", "1.0"), "geometry.T"),
        "phi0": cfg.get("geometry.phi0", "zero"),
        "amplitude": _num(cfg.get("geometry.amplitude", "0.1"), "geometry.amplitude"),
    }
    geo["tau0"] = _num(cfg.get("geometry.tau0", str(0.01 * geo["T"])), "geometry.tau0")
    length = str(2 * math.pi) if kind == "circle" else "1.0"
    geo["length"] = _num(cfg.get("geometry.length", length),
                         "geometry.length")
    steps = cfg.get("geometry.steps")
    geo["steps"] = None if steps is None else _num(steps, "geometry.steps", int)
    r0 = cfg.get("geometry.r0", "blowup")
    if r0 == "blowup":
        geo["r0"] = math.sqrt(2 * (geo["n"] - 1) * geo["T"]) if kind == "round_sphere" else 1.0
    else:
        geo["r0"] = _num(r0, "geometry.r0")
    if geo["phi0"] not in _PHI_PROFILES:
        raise ConfigError(f"geometry.phi0: expected one of {_PHI_PROFILES}")
    if not geo["T"] > geo["tau0"] > 0:
        raise ConfigError("need geometry.T > geometry.tau0 > 0")

    eq = None
    if "equation.c" in cfg:
        eq = {
            "c": _num(cfg["equation.c"], "equation.c"),
            "initial": cfg.get("equation.initial", "constant"),
            "value": _num(cfg.get("equation.value", "1.0"), "equation.value"),
            "center": _floats(cfg.get("equation.center", "0"), "equation.center"),
            "sigma": _num(cfg.get("equation.sigma", "0.1"), "equation.sigma"),
            "tau_end": _num(cfg.get("equation.tau_end", str(geo["T"])), "equation.tau_end"),
            "store_every": _num(cfg.get("equation.store_every", "1"), "equation.store_every",
                                int),
        }
        if eq["initial"] not in _INITIAL_PROFILES:
            raise ConfigError(f"equation.initial: expected one of {_INITIAL_PROFILES}")
        if eq["store_every"] < 1:
            raise ConfigError("equation.store_every must be positive")
    elif any(k.startswith("equation.") for k in cfg):
        raise ConfigError("equation block needs equation.c")

    presets = cfg.get("checks.presets", "").split()
    for p in presets:
        if p not in PRESET_NAMES:
            raise ConfigError(f"checks.presets: unknown preset {p!r}")
    entropy = cfg.get("checks.entropy", "").split()
    if set(entropy) - {"F", "W"}:
        raise ConfigError("checks.entropy accepts F and W")
    conservation = cfg.get("checks.conservation", "").split()
    if set(conservation) - {"mass", "pairing"}:
        raise ConfigError("checks.conservation accepts mass and pairing")
    dim = 2 if kind == "torus" else 1
    checks = {
        "presets": presets,
        "entropy": entropy,
        "conservation": conservation,
        "pairs": _pairs(cfg.get("checks.pairs", ""), dim),
        "tolerance": None,
        "refine": [_num(t, "checks.refine", int) for t in cfg.get("checks.refine", "").split()],
        "li_yau": None,
        "random_paths": _num(cfg.get("checks.random_paths", "100"), "checks.random_paths", int),
        "segments": _num(cfg.get("checks.segments", "64"), "checks.segments", int),
    }
    if "checks.tolerance" in cfg:
        tol = _num(cfg["checks.tolerance"], "checks.tolerance")
        if not tol > 0:
            raise ConfigError("checks.tolerance must be positive")
        checks["tolerance"] = tol
    if "checks.li_yau" in cfg:
        vals = _floats(cfg["checks.li_yau"], "checks.li_yau")
        if len(vals) != 3 or not 0 < vals[0] < vals[1] or vals[2] < 2:
            raise ConfigError("checks.li_yau expects 't_start t_stop count'")
        checks["li_yau"] = [vals[0], vals[1], int(vals[2])]
    needs_eq = presets or entropy or conservation or checks["pairs"] or checks["refine"]
    if needs_eq and eq is None:
        raise ConfigError("checks other than li_yau need an equation block")
    if eq is not None and conservation and eq["c"] != -1:
        raise ConfigError("mass and pairing are conserved for equation.c = -1 only")

    output = {"csv": _bool(cfg.get("output.csv", "true"), "output.csv"),
              "json": _bool(cfg.get("output.json", "true"), "output.json"),
              "plots": _bool(cfg.get("output.plots", "false"), "output.plots")}
    return Scenario(name, seed, geo, eq, checks, output)


def load_scenario(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    return build_scenario(parse_config(text, str(path)), default_name=path.stem)


# --- profiles ------------------------------------------------------------------

def _spec(geo, grid=None):
    kind = geo["kind"]
    grid = geo["grid"] if grid is None else grid
    try:
        if kind == "round_sphere":
            return ManifoldSpec.round_sphere(geo["n"], geo["r0"])
        if kind == "torus":
            return ManifoldSpec.torus(grid, geo["length"])
        if kind == "circle":
            return ManifoldSpec.circle(grid, geo["length"])
        return ManifoldSpec.rotsym_sphere(grid)
    except ValueError as exc:
        raise ConfigError(f"geometry: {exc}") from None


def _phi0(geo, spec):
    amp = geo["amplitude"]
    if spec.kind == "round_sphere" or geo["phi0"] == "zero":
        return None
    if geo["phi0"] == "sinsin" and spec.kind == "torus":
        X, Y = spec.coordinates()
        k = 2 * np.pi / spec.length
        return amp * np.sin(k * X) * np.sin(k * Y)
    if geo["phi0"] == "p2" and spec.kind == "rotsym_sphere":
        c = np.cos(spec.coordinates())
        return amp * 0.5 * (3 * c * c - 1)
    raise ConfigError(f"geometry.phi0 = {geo['phi0']} is not available on {spec.kind}")


def _smooth(spec):
    if spec.kind == "round_sphere":
        return spec.constant(1.0)
    if spec.kind == "torus":
        X, Y = spec.coordinates()
        k = 2 * np.pi / spec.length
        return np.exp(0.3 * np.cos(k * X) * np.cos(k * (Y + 0.1 * spec.length))
                      + 0.2 * np.sin(k * X))
    x = spec.coordinates()
    if spec.kind == "rotsym_sphere":
        return np.exp(0.3 * np.cos(x))
    return np.exp(0.3 * np.cos(2 * np.pi * x / spec.length))


def _initial(eq, spec, m0):
    kind = eq["initial"]
    if kind == "constant":
        return spec.constant(eq["value"])
    if kind == "normalized":
        one = spec.constant(1.0)
        return one / integrate(one, m0)
    if kind == "delta":
        center = eq["center"]
        center = center[0] if spec.kind != "torus" else np.broadcast_to(center, (2,))
        return init_near_delta(spec, center, eq["sigma"], m0)
    f = _smooth(spec)
    if kind == "below_one":
        f = 0.9 * f / np.max(f)
    return f


# --- running -------------------------------------------------------------------

@dataclass
class CheckResult:
    name: str
    status: str
    worst_value: float = float("nan")
    worst_location: tuple = ()
    tolerance: float = float("nan")
    details: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.status in PASSING


@dataclass
class Report:
    scenario: Scenario
    checks: list = field(default_factory=list)
    columns: dict = field(default_factory=dict)   # CSV columns keyed by header
    csv_header: list = field(default_factory=list)
    timestamp: str = ""

    @property
    def exit_code(self):
        return 0 if all(c.passed for c in self.checks) else 2

    @property
    def status(self):
        return "pass" if self.exit_code == 0 else "fail"

    def payload(self):
        """JSON-ready dict without the timestamp."""
        geo = self.scenario.geometry
        return _clean({
            "scenario": self.scenario.name,
            "config": self.scenario.as_dict(),
            "status": self.status,
            "exit_code": self.exit_code,
            "rm_norm_constant": rm_norm_constant(geo["n"]),
            "checks": [{"name": c.name, "pass": c.passed, "status": c.status,
                        "worst_value": c.worst_value,
                        "worst_location": list(c.worst_location),
                        "tolerance": c.tolerance, "details": c.details}
                       for c in self.checks],
        })


def _clean(obj):
    """Plain JSON types; non-finite floats become None."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj) if math.isfinite(obj) else None
    return obj


def _error(name, exc):
    return CheckResult(name, "error", details={"error": f"{type(exc).__name__}: {exc}"})


def _harnack_check(name, rep, extra=None):
    details = {"hypotheses": rep.hypotheses}
    if rep.notes:
        details["notes"] = rep.notes
    details.update(extra or {})
    return CheckResult(name, rep.status, rep.worst_value, rep.worst_location, rep.tolerance,
                       details)


def _drift_check(name, values, tol):
    ref = values[0]
    rel = np.abs(values - ref) / max(abs(ref), np.finfo(float).tiny)
    k = int(np.argmax(rel))
    return CheckResult(name, "pass" if rel[k] <= tol else "fail", float(rel[k]), (k,), tol,
                       {"initial": float(ref)})


def _solve(s, grid=None):
    geo, eq = s.geometry, s.equation
    spec = _spec(geo, grid)
    traj = evolve(spec, _phi0(geo, spec), T=geo["T"], tau0=geo["tau0"], steps=geo["steps"])
    if eq is None:
        return traj, None
    f0 = _initial(eq, spec, traj.state(len(traj) - 1))
    sol = solve_backward(traj, eq["c"], f0, eq["tau_end"], store_every=eq["store_every"])
    return traj, sol


def run_scenario(s, refine=None):
    """Run the flow, the solver and every requested check of scenario ``s``.

    Failures inside a check are reported as that check's ``error`` status;
    the remaining checks still run.
    """
    checks_cfg = s.checks
    report = Report(s)
    presets = checks_cfg["presets"]
    header = ["tau", "t"] + [f"max_H_{p}" for p in presets] + ["F", "W", "mass", "pairing"]
    report.csv_header = header
    tol = checks_cfg["tolerance"]
    try:
        traj, sol = _solve(s)
    except (HarnackLabError, ValueError) as exc:
        report.checks.append(_error("setup", exc))
        return report

    if sol is not None:
        report.columns["tau"] = sol.taus
        report.columns["t"] = sol.times

    for name in presets:
        try:
            extra = {}
            d = None
            if name in TYPE1_PRESETS:
                d = choose_type1_d(sol, traj)
                extra["d"] = d
                extra["d_source"] = "chosen empirically from the initial slice"
            rep = check_nonpositivity(preset(name, d), sol, traj, tol)
            report.columns[f"max_H_{name}"] = rep.max_by_tau
            report.checks.append(_harnack_check(f"nonpositivity:{name}", rep, extra))
        except (HarnackLabError, ValueError) as exc:
            report.checks.append(_error(f"nonpositivity:{name}", exc))

    for kind in checks_cfg["entropy"]:
        try:
            e = eval_entropy(kind, sol, traj)
            mono = monotonicity_report(e, tol)
            report.columns[kind] = e.values
            status = "pass" if mono.passed else "fail"
            if e.min_R < -1e-12:
                status = "hypotheses-unmet"
            report.checks.append(CheckResult(
                f"entropy:{kind}", status, mono.min_slope, (mono.worst_step,), mono.tolerance,
                {"min_R": e.min_R, "max_value": float(np.max(e.values))}))
        except (HarnackLabError, ValueError) as exc:
            report.checks.append(_error(f"entropy:{kind}", exc))

    cons_tol = 1e-6 if tol is None else tol
    if "mass" in checks_cfg["conservation"]:
        mass = total_mass(sol, traj)
        report.columns["mass"] = mass
        report.checks.append(_drift_check("conservation:mass", mass, cons_tol))
    if "pairing" in checks_cfg["conservation"]:
        try:
            nodes = sol.node_index[sol.node_index >= 0]
            heat = solve_forward_heat(traj, 1.0 + 0.5 * (_smooth(traj.spec) - 1.0),
                                      traj.times[int(np.max(nodes))], nodes=nodes)
            times, values = pairing_series(sol, heat, traj)
            column = np.full(len(sol), np.nan)
            lookup = dict(zip(np.round(times, 14), values))
            for k, t in enumerate(sol.times):
                column[k] = lookup.get(round(float(t), 14), np.nan)
            report.columns["pairing"] = column
            report.checks.append(_drift_check("conservation:pairing", values, cons_tol))
        except (HarnackLabError, ValueError) as exc:
            report.checks.append(_error("conservation:pairing", exc))

    if checks_cfg["pairs"]:
        try:
            res = verify_integrated(sol, traj, checks_cfg["pairs"],
                                    n_random=checks_cfg["random_paths"], seed=s.seed,
                                    segments=checks_cfg["segments"],
                                    tolerance=1e-6 if tol is None else tol)
            for i, pr in enumerate(res.pairs):
                worst = min(pr.endpoint_margin, pr.path_min_margin)
                report.checks.append(CheckResult(
                    f"integrated:{i}", "pass" if pr.passed else "fail", worst, pr.p1 + pr.p2,
                    res.tolerance,
                    {"weight": res.weight, "gamma_hat": pr.gamma_hat,
                     "converged": pr.converged, "endpoint_margin": pr.endpoint_margin,
                     "path_min_margin": pr.path_min_margin}))
        except (HarnackLabError, ValueError) as exc:
            report.checks.append(_error("integrated", exc))

    levels = checks_cfg["refine"]
    if refine:
        levels = [s.geometry["grid"] * 2 ** i for i in range(refine)]
    if levels and presets:
        try:
            runs = [_solve(s, grid)[::-1] for grid in levels]
            for name in presets:
                rep = residual_study(preset(name), runs)
                report.checks.append(CheckResult(
                    f"residual:{name}", rep.status, rep.order, (), rep.tolerance,
                    {"spacings": rep.spacings, "residuals": rep.residuals}))
        except (HarnackLabError, ValueError) as exc:
            report.checks.append(_error("residual", exc))

    if checks_cfg["li_yau"] is not None:
        t0, t1, count = checks_cfg["li_yau"]
        try:
            ly = li_yau_check(traj.spec, np.linspace(t0, t1, count),
                              tolerance=1e-6 if tol is None else tol, traj=traj)
            report.checks.append(CheckResult("li_yau", "pass" if ly.passed else "fail",
                                             ly.min_value, (ly.worst_time,), ly.tolerance))
        except (HarnackLabError, ValueError) as exc:
            report.checks.append(_error("li_yau", exc))
    return report


# --- output --------------------------------------------------------------------

def _fmt(x):
    x = float(x)
    return repr(x) if math.isfinite(x) else ""


def csv_text(report):
    """RFC 4180 CSV with the fixed header; no rows when no check ran."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(report.csv_header)
    cols = report.columns
    if report.checks and "tau" in cols:
        for k in range(len(cols["tau"])):
            writer.writerow([_fmt(cols[h][k]) if h in cols else "" for h in report.csv_header])
    return buf.getvalue()


def json_text(payload, timestamp):
    doc = {"schema": SCHEMA, "timestamp": timestamp, **payload}
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _plots(report, directory):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    cols = report.columns
    name = report.scenario.name
    series = [(h, "tau") for h in report.csv_header if h.startswith("max_H_") and h in cols]
    series += [(h, "t") for h in ("F", "W") if h in cols]
    written = []
    for key, axis in series:
        fig, ax = plt.subplots(figsize=(5, 3.5))
        ax.plot(cols[axis], cols[key])
        ax.set_xlabel(axis)
        ax.set_ylabel(key)
        ax.set_title(name)
        fig.tight_layout()
        path = Path(directory) / f"{name}_{key}.svg"
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
        written.append(path)
    return written


def emit_report(report, csv_dir=None, json_path=None, plot_dir=None):
    """Write the requested report files and return their paths."""
    written = []
    out = report.scenario.output
    try:
        if csv_dir is not None and out.get("csv", True):
            Path(csv_dir).mkdir(parents=True, exist_ok=True)
            path = Path(csv_dir) / f"{report.scenario.name}.csv"
            path.write_text(csv_text(report), newline="")
            written.append(path)
        if json_path is not None and out.get("json", True):
            text = json_text(report.payload(), report.timestamp)
            if str(json_path) == "-":
                sys.stdout.write(text)
            else:
                Path(json_path).parent.mkdir(parents=True, exist_ok=True)
                Path(json_path).write_text(text)
                written.append(Path(json_path))
        if plot_dir is not None:
            Path(plot_dir).mkdir(parents=True, exist_ok=True)
            written.extend(_plots(report, plot_dir))
    except OSError as exc:
        raise ConfigError(f"cannot write report: {exc}") from None
    return written


def bundled_suite():
    """Directory holding the shipped scenario files."""
    return Path(str(resources.files("harnacklab") / "scenarios"))


def _now():
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def run_suite(directory=None, seed=None, refine=None):
    """Run every ``*.cfg`` file of ``directory`` (sorted by name).

    ``HARNACKLAB_THREADS`` caps the number of scenarios run concurrently.
    Config errors raise before anything runs.
    """
    directory = bundled_suite() if directory is None else Path(directory)
    files = sorted(directory.glob("*.cfg"))
    if not files:
        raise ConfigError(f"no scenario files in {directory}")
    scenarios = [load_scenario(p) for p in files]
    if seed is not None:
        for s in scenarios:
            s.seed = seed
    threads = max(1, int(os.environ.get("HARNACKLAB_THREADS", "1") or 1))
    with ThreadPoolExecutor(max_workers=threads) as pool:
        reports = list(pool.map(lambda s: run_scenario(s, refine), scenarios))
    stamp = _now()
    for r in reports:
        r.timestamp = stamp
    return reports


def _summary(report, stream):
    print(f"[{report.status}] {report.scenario.name}", file=stream)
    for c in report.checks:
        print(f"    {c.status:<17} {c.name}  worst={c.worst_value:.6g}", file=stream)


def main(argv=None):
    parser = argparse.ArgumentParser(prog="harnacklab",
                                     description="Run Harnack verification scenarios.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, target in (("run", "scenario file"), ("suite", "directory of *.cfg files")):
        p = sub.add_parser(name, help=f"run a {target}")
        p.add_argument("target", nargs="?" if name == "suite" else None,
                       help=f"{target} (suite defaults to the bundled scenarios)")
        p.add_argument("--csv-dir", help="write one CSV per scenario here")
        p.add_argument("--json", help="write the JSON report to this path ('-' for stdout)")
        p.add_argument("--plots", help="write SVG plots to this directory")
        p.add_argument("--seed", type=int, help="override the scenario seed")
        p.add_argument("--refine", type=int, metavar="LEVELS",
                       help="add a residual study on LEVELS grids (grid, 2 grid, ...)")
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    if args.refine is not None and args.refine < 2:
        print("error: --refine needs at least 2 levels", file=sys.stderr)
        return 1

    try:
        if args.command == "run":
            s = load_scenario(args.target)
            if args.seed is not None:
                s.seed = args.seed
            reports = [run_scenario(s, args.refine)]
            reports[0].timestamp = _now()
        else:
            reports = run_suite(args.target, args.seed, args.refine)
        for r in reports:
            emit_report(r, args.csv_dir, None, args.plots)
            _summary(r, sys.stderr if args.json == "-" else sys.stdout)
        if args.json:
            if args.command == "run":
                text = json_text(reports[0].payload(), reports[0].timestamp)
            else:
                text = json_text({"reports": [r.payload() for r in reports],
                                  "exit_code": max(r.exit_code for r in reports)},
                                 reports[0].timestamp)
            if args.json == "-":
                sys.stdout.write(text)
            else:
                Path(args.json).parent.mkdir(parents=True, exist_ok=True)
                Path(args.json).write_text(text)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return max(r.exit_code for r in reports)


if __name__ == "__main__":
    sys.exit(main())
