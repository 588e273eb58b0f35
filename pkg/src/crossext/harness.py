"""
Scenario runner: validated JSON configs in, CSV/JSON artifacts and a
pass/fail report out.
"""

from __future__ import annotations

import csv
import json
import math
import platform
from dataclasses import dataclass, field
from importlib import metadata
from pathlib import Path

import jsonschema
import numpy as np

from . import acceptance
from .carleman import BoundaryTrace, carleman1d_sweep
from .catalog import CATALOG, get_function
from .cross import CrossSpec, gc_extend, wedge_grid, wedge_omega
from .dob import CondenserSpec, dob_basis, dob_extend, gamma_closed_form, gram_pair
from .geometry import arc_set_normalize
from .harmonic import HarmonicMeasureField
from .montecarlo import WalkDomain, mc_omega

MODULES = ("harmonic", "carleman1d", "extend", "dob")


class ConfigError(ValueError):
    """Invalid scenario configuration; ``pointer`` is a JSON pointer to the offending field."""

    def __init__(self, pointer: str, message: str):
        super().__init__(f"{pointer or '/'}: {message}")
        self.pointer = pointer


# --- schemas --------------------------------------------------------------

_ARCS = {"type": "array", "minItems": 1,
         "items": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}}
_COMPLEX = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}
_FUNCTION = {
    "type": "object", "required": ["name"], "additionalProperties": False,
    "properties": {"name": {"type": "string"}, "params": {"type": "object"}},
}
_COMMON = {
    "module": {"enum": list(MODULES)},
    "name": {"type": "string"},
    "seed": {"type": "integer", "minimum": 0},
    "threads": {"type": "integer", "minimum": 1},
}

SCHEMAS = {
    "harmonic": {
        "type": "object", "required": ["A"], "additionalProperties": False,
        "properties": {
            **_COMMON,
            "domain": {
                "type": "object", "additionalProperties": False,
                "properties": {"kind": {"enum": ["disc", "slit_square", "half_disc", "level_set"]},
                               "eps_abs": {"type": "number", "exclusiveMinimum": 0}},
            },
            "A": _ARCS,
            "eps": {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
            "grid": {"type": "object", "additionalProperties": False,
                     "properties": {"nx": {"type": "integer", "minimum": 1}, "ny": {"type": "integer", "minimum": 1}}},
            "points": {"type": "array", "items": _COMPLEX},
            "walks": {"type": "integer", "minimum": 0},
        },
    },
    "carleman1d": {
        "type": "object", "required": ["A", "function", "z"], "additionalProperties": False,
        "properties": {
            **_COMMON, "A": _ARCS, "function": _FUNCTION, "z": _COMPLEX, "w": _COMPLEX,
            "N_max": {"type": "number", "minimum": 0}, "step": {"type": "number", "exclusiveMinimum": 0},
            "tol": {"type": "number", "exclusiveMinimum": 0}, "nodes": {"type": "integer", "minimum": 16},
            "max_abs_err": {"type": "number", "exclusiveMinimum": 0},
        },
    },
    "extend": {
        "type": "object", "required": ["A", "B", "function"], "additionalProperties": False,
        "properties": {
            **_COMMON, "A": _ARCS, "B": _ARCS, "function": _FUNCTION,
            "grid": {"type": "object", "additionalProperties": False,
                     "properties": {"n_per_axis": {"type": "integer", "minimum": 1},
                                    "omega_cap": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                                    "max_points": {"type": "integer", "minimum": 1}}},
            "points": {"type": "array", "items": {"type": "array", "items": {"type": "number"}, "minItems": 4, "maxItems": 4}},
            "N_max": {"type": "number", "minimum": 0}, "step": {"type": "number", "exclusiveMinimum": 0},
            "tol": {"type": "number", "exclusiveMinimum": 0},
            "nodes": {"type": "array", "items": {"type": "integer", "minimum": 16}, "minItems": 2, "maxItems": 2},
            "max_abs_err": {"type": "number", "exclusiveMinimum": 0},
        },
    },
    "dob": {
        "type": "object", "required": ["function"], "additionalProperties": False,
        "properties": {
            **_COMMON, "function": _FUNCTION, "B": _ARCS,
            "r": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
            "J": {"type": "integer", "minimum": 1, "maximum": 64},
            "points": {"type": "array", "items": {"type": "array", "items": {"type": "number"}, "minItems": 4, "maxItems": 4}},
            "tail_tol": {"type": "number", "exclusiveMinimum": 0},
            "max_abs_err": {"type": "number", "exclusiveMinimum": 0},
        },
    },
}

REPORT_SCHEMA = {
    "type": "object",
    "required": ["scenario", "checks", "passed", "environment", "artifacts"],
    "properties": {
        "scenario": {"type": "object"},
        "passed": {"type": "boolean"},
        "artifacts": {"type": "array", "items": {"type": "string"}},
        "environment": {"type": "object", "required": ["version", "seed", "threads"]},
        "checks": {"type": "array", "items": {
            "type": "object", "required": ["name", "value", "tolerance", "passed"],
            "properties": {"name": {"type": "string"}, "passed": {"type": "boolean"}, "note": {"type": "string"}},
        }},
        "details": {"type": "object"},
    },
}


def _pointer(err: jsonschema.ValidationError) -> str:
    parts = [str(p) for p in err.absolute_path]
    if err.validator == "required":
        missing = [p for p in err.validator_value if p not in err.instance]
        if missing:
            parts.append(missing[0])
    return "/" + "/".join(parts)


def validate_config(config: dict, module: str) -> None:
    if module not in SCHEMAS:
        raise ConfigError("/module", f"unknown module {module!r}; choose from {', '.join(MODULES)}")
    validator = jsonschema.Draft202012Validator(SCHEMAS[module])
    errors = sorted(validator.iter_errors(config), key=lambda e: (len(list(e.absolute_path)), e.path))
    if errors:
        raise ConfigError(_pointer(errors[0]), errors[0].message)


# --- reports --------------------------------------------------------------


@dataclass
class Check:
    name: str
    value: object
    tolerance: object
    passed: bool
    note: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "value": _jsonable(self.value), "tolerance": _jsonable(self.tolerance),
                "passed": bool(self.passed), "note": self.note}


@dataclass
class Report:
    scenario: dict
    checks: list[Check]
    environment: dict
    artifacts: list[str] = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {"scenario": self.scenario, "checks": [c.to_dict() for c in self.checks], "passed": self.passed,
                "environment": self.environment, "artifacts": self.artifacts, "details": _jsonable(self.details)}

    def write(self, path: Path) -> None:
        d = self.to_dict()
        jsonschema.validate(d, REPORT_SCHEMA)
        Path(path).write_text(json.dumps(d, indent=2, default=_jsonable))


def _jsonable(v):
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.floating, np.integer, np.bool_)):
        v = v.item()
    if isinstance(v, complex):
        return [_jsonable(v.real), _jsonable(v.imag)]
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    return v


def environment(seed, threads) -> dict:
    try:
        version = metadata.version("artifact")
    except metadata.PackageNotFoundError:
        version = "unknown"
    return {"version": version, "seed": seed, "threads": threads, "python": platform.python_version(),
            "numpy": np.__version__}


def _g(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.17g}"


def write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(header)
        for row in rows:
            out.writerow([_g(x) for x in row])


# --- scenario runners -----------------------------------------------------


def _function(cfg: dict):
    spec = cfg["function"]
    try:
        return get_function(spec["name"], **spec.get("params", {}))
    except KeyError as exc:
        raise ConfigError("/function/name", exc.args[0]) from None
    except TypeError as exc:
        raise ConfigError("/function/params", str(exc)) from None


def _arcs(cfg: dict, key: str):
    try:
        return arc_set_normalize(cfg[key])
    except ValueError as exc:
        raise ConfigError(f"/{key}", str(exc)) from None


def _run_harmonic(cfg, out: Path, seed, threads, paths):
    A = _arcs(cfg, "A")
    dcfg = cfg.get("domain", {})
    kind = dcfg.get("kind", "disc")
    eps = cfg.get("eps", 0.0)
    eps_abs = dcfg.get("eps_abs", 1e-3)
    walks = cfg.get("walks", 0)
    try:
        dom = {
            "disc": lambda: WalkDomain.disc(A, eps_abs),
            "slit_square": lambda: WalkDomain.slit_square(eps_abs),
            "half_disc": lambda: WalkDomain.half_disc(A, eps_abs),
            "level_set": lambda: WalkDomain.level_set(A, eps, eps_abs),
        }[kind]()
    except ValueError as exc:
        raise ConfigError("/domain", str(exc)) from None
    if kind != "disc" and walks == 0:
        raise ConfigError("/walks", f"domain {kind!r} needs Monte Carlo walks")
    if "points" in cfg:
        pts = np.array([complex(*p) for p in cfg["points"]])
    else:
        g = cfg.get("grid", {})
        nx, ny = g.get("nx", 21), g.get("ny", 21)
        xs = -1 + (np.arange(nx) + 0.5) * 2 / nx
        ys = -1 + (np.arange(ny) + 0.5) * 2 / ny
        pts = (xs[None, :] + 1j * ys[:, None]).ravel()
    keep = dom.contains(pts)
    if walks:
        keep &= dom.distance(pts)[0] >= eps_abs
    pts = pts[keep]
    field_ = HarmonicMeasureField(A)
    rows = []
    for z in pts:
        if walks:
            om, se = mc_omega(dom, z, walks, seed, threads)
        else:
            om, se = float(field_(z)), None
        rows.append((z.real, z.imag, om, om / (1 - eps), se))
    path = paths.get("out") or out / "omega.csv"
    write_csv(path, ["re_z", "im_z", "omega", "omega_eps", "stderr"], rows)
    vals = [r[2] for r in rows]
    checks = [
        Check("rows", len(rows), ">= 1", len(rows) >= 1),
        Check("omega_range", [min(vals, default=0.0), max(vals, default=0.0)], [0.0, 1.0],
              all(0.0 <= v <= 1.0 for v in vals)),
    ]
    return checks, [str(path)], {"domain": kind, "points": len(rows)}


def _run_carleman1d(cfg, out: Path, seed, threads, paths):
    A = _arcs(cfg, "A")
    f = _function(cfg)
    w = complex(*cfg.get("w", [0.0, 0.0]))
    z = complex(*cfg["z"])
    trace = BoundaryTrace.on_arcs(f.slice_z(w), A, nodes=cfg.get("nodes", 4096))
    ref = complex(f(np.asarray(z), np.asarray(w)))
    try:
        tr = carleman1d_sweep(trace, A, z, cfg.get("N_max", 30), cfg.get("tol", 1e-10), cfg.get("step", 1.0), ref)
    except ValueError as exc:
        raise ConfigError("/z", str(exc)) from None
    path = paths.get("out") or out / "trace.csv"
    write_csv(path, ["N", "re_v", "im_v", "abs_err", "diff"],
              [(n, v.real, v.imag, e, None if np.isnan(d) else d)
               for n, v, e, d in zip(tr.N, tr.values, tr.errors, tr.diffs)])
    best = float(np.min(tr.errors))
    tol = cfg.get("max_abs_err", 1e-5)
    checks = [
        Check("best_abs_err", best, tol, best < tol),
        Check("slope", tr.slope, "< 0", tr.slope < 0),
    ]
    details = {"plateau_N": tr.plateau_N, "slope": tr.slope, "suggested_N": tr.suggested_N, "value": tr.value}
    return checks, [str(path)], details


def _run_extend(cfg, out: Path, seed, threads, paths):
    spec = CrossSpec(_arcs(cfg, "A"), _arcs(cfg, "B"), _function(cfg), cfg.get("name", ""))
    if "points" in cfg:
        try:
            pts = [wedge_omega(spec, complex(p[0], p[1]), complex(p[2], p[3])) for p in cfg["points"]]
        except ValueError as exc:
            raise ConfigError("/points", str(exc)) from None
        bad = [i for i, s in enumerate(pts) if not s.in_wedge]
        if bad:
            raise ConfigError(f"/points/{bad[0]}", "outside wedge")
    else:
        g = cfg.get("grid", {})
        try:
            pts = wedge_grid(spec, g.get("n_per_axis", 8), g.get("omega_cap", 0.6), max_points=g.get("max_points", 25))
        except ValueError as exc:
            raise ConfigError("/grid", str(exc)) from None
    Ns = np.arange(0.0, cfg.get("N_max", 40) + 1e-9, cfg.get("step", 1.0))
    rep = gc_extend(spec, pts, Ns, cfg.get("tol", 1e-5), tuple(cfg.get("nodes", (1024, 1024))), workers=threads)
    csv_path = paths.get("csv") or out / "grid.csv"
    write_csv(csv_path, ["re_z", "im_z", "re_w", "im_w", "omega_z", "omega_w", "omega_sum", "re_K", "im_K",
                         "abs_err", "bound", "margin", "converged"],
              [(p.sample.z.real, p.sample.z.imag, p.sample.w.real, p.sample.w.imag, p.sample.omega_z,
                p.sample.omega_w, p.sample.omega_sum, p.K.real, p.K.imag, p.abs_err, p.bound, p.margin, p.converged)
               for p in rep.points])
    tol = cfg.get("max_abs_err", 1e-3)
    checks = [Check("all_converged", rep.all_converged, True, rep.all_converged)]
    if rep.max_abs_err is not None:
        err = rep.max_abs_err
        checks.append(Check("max_abs_err", err, tol, err < tol))
    if rep.bound_checked:
        floor = -1e-6 * rep.sup_W
        checks.append(Check("min_margin", rep.min_margin, floor, rep.min_margin >= floor))
    else:
        checks.append(Check("two_constant_bound", "skipped", None, True, rep.skip_reason))
    details = {"max_abs_err": rep.max_abs_err, "sup_W": rep.sup_W, "sup_AB": rep.sup_AB,
               "bound_checked": rep.bound_checked, "skip_reason": rep.skip_reason, "extension": rep.to_dict()}
    return checks, [str(csv_path)], details


def _run_dob(cfg, out: Path, seed, threads, paths):
    B = _arcs(cfg, "B") if "B" in cfg else acceptance.FIX_A
    try:
        spec = CondenserSpec(cfg.get("r", 0.5), cfg.get("J", 40), B=B)
    except ValueError as exc:
        raise ConfigError("/J", str(exc)) from None
    f = _function(cfg)
    G0, G1 = gram_pair(spec)
    basis = dob_basis(G0, G1)
    path = paths.get("out") or out / "dob.csv"
    write_csv(path, ["j", "gamma_j"], [(j, g) for j, g in enumerate(basis.gamma)])
    pts = [(complex(p[0], p[1]), complex(p[2], p[3])) for p in cfg.get("points", [[0.7, 0, 0.5, 0]])]
    vals = dob_extend(spec, basis, f, pts, cfg.get("tail_tol", 1e-6), reference=f)
    pts_path = Path(path).with_name(Path(path).stem + "_points.csv")
    write_csv(pts_path, ["re_z", "im_z", "re_w", "im_w", "re_value", "im_value", "abs_err", "tail_bound",
                         "omega_sum", "in_wedge"],
              [(v.z.real, v.z.imag, v.w.real, v.w.imag, v.value.real, v.value.imag, v.abs_err, v.tail_bound,
                v.omega_sum, v.in_wedge) for v in vals])
    r0, r1 = basis.orthogonality_residuals()
    rel = float(np.abs(basis.gamma / gamma_closed_form(spec.r, spec.J) - 1).max())
    err = max(v.abs_err for v in vals)
    tol = cfg.get("max_abs_err", 1e-3)
    checks = [
        Check("orthogonality", max(r0, r1), 1e-10, max(r0, r1) < 1e-10),
        Check("gamma_closed_form_rel", rel, 1e-8, rel < 1e-8),
        Check("max_abs_err", err, tol, err < tol),
    ]
    flagged = [i for i, v in enumerate(vals) if not v.in_wedge]
    if flagged:
        checks.append(Check("in_mixed_wedge", flagged, [], False, "points outside the mixed wedge"))
    return checks, [str(path), str(pts_path)], {"J": spec.J, "r": spec.r}


RUNNERS = {"harmonic": _run_harmonic, "carleman1d": _run_carleman1d, "extend": _run_extend, "dob": _run_dob}


def load_config(path) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError("", f"invalid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("", "config must be a JSON object")
    return data


def run_scenario(config: dict, out_dir, module: str | None = None, seed: int | None = None,
                 threads: int | None = None, out: str | None = None, csv_path: str | None = None) -> Report:
    """Validate ``config``, run the selected module and write artifacts plus ``report.json`` to ``out_dir``."""
    module = module or config.get("module")
    if module is None:
        raise ConfigError("/module", "no module selected")
    validate_config(config, module)
    seed = config.get("seed", 0) if seed is None else seed
    threads = config.get("threads", 1) if threads is None else threads
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {"out": Path(out) if out else None, "csv": Path(csv_path) if csv_path else None}
    checks, artifacts, details = RUNNERS[module](config, out_dir, seed, threads, paths)
    report = Report({"module": module, **config}, checks, environment(seed, threads), artifacts, details)
    report_path = paths["out"] if module == "extend" and paths["out"] else out_dir / "report.json"
    report.artifacts.append(str(report_path))
    report.write(report_path)
    return report


def verify(suite: str = "fast", overrides: dict | None = None, out_dir=None, seed: int | None = None,
           threads: int = 1) -> Report:
    """Run the acceptance criteria and collect them as report checks."""
    ov = dict(overrides or {})
    if seed is not None:
        ov["seed"] = seed
    ov.setdefault("threads", threads)
    results = acceptance.run_suite(suite, ov)
    checks = [Check(f"criterion_{r.number:02d}_{r.name.replace(' ', '_')}", r.to_dict()["measured"], r.tolerance,
                    r.passed, r.note) for r in results]
    report = Report({"suite": suite, "overrides": ov}, checks, environment(ov.get("seed", 0), ov["threads"]),
                    details={"lines": [r.line() for r in results]})
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        path = out_dir / "verify.json"
        report.artifacts.append(str(path))
        report.write(path)
    return report


def catalog_names() -> list[str]:
    return sorted(CATALOG)
