"""Run configurations, surface grids, mesh/report writers and task drivers.

A run is described by one TOML file (sections below) plus command-line
overrides; the CLI in cli.py is a thin wrapper over run().  Outputs are
deterministic for a fixed config: meshes and reports are byte-identical
across repeated runs.

Config layout (all sections optional except the task's own):

    [run]      task, out, format ("obj"|"csv"), grid ("41x41" or [41,41]),
               tol, seed
    [curve]    components = [expr, expr, expr], params, interval, s0
    [conormal] components = [...]  OR  metric = "expr"
    [window]   s = [lo, hi], t = [lo, hi]
    [cauchy]   a, b, params, interval, x0, window_x, window_y
    [catalog]  name, params
    [verify]   mode = "bjorling"|"affine-map"|"catalog", fd_step
    [sweep]    count, group, ranges {a,c,m}
    [gates]    per-residual thresholds overriding the defaults
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np

try:
    import tomllib
except ImportError:  # Python 3.10
    import tomli as tomllib

from . import curve_lang as cl
from .bjorling_core import (
    AffineSurface,
    build_affine_map,
    build_surface,
    check_admissible,
    conormal_from_metric,
    singular_scan,
)
from .curve_lang import AnalyticCurve3
from .diagnostics import full_residual_report
from .errors import AffineSphereError, ConfigError
from .hessian_cauchy import CauchyData, hessian_residual, solve_cauchy
from .quadrature import DEFAULT_TOL
from .surface_catalog import (
    CatalogSurface,
    HelicoidalSpec,
    RuledGraph,
    by_name,
    classify,
    density_min,
)

SCHEMA_VERSION = 1

FLAG_OK = 0
FLAG_SINGULAR = 1
FLAG_INVALID = 2
FLAG_NAMES = {FLAG_OK: "ok", FLAG_SINGULAR: "singular", FLAG_INVALID: "invalid"}

DEFAULT_GATES = {
    "containment": 1e-8,
    "conormal_reproduction": 1e-10,
    "metric_identity": 1e-9,
    "rho_on_curve": 1e-9,
    "hessian": 1e-4,
    "initial_value": 1e-8,
    "initial_slope": 1e-6,
    "catalog_agreement": 1e-8,
    "structure": 1e-5,
}

TASKS = ("bjorling", "cauchy", "catalog", "affine-map", "verify", "classify", "sweep")


# ---------------------------------------------------------------------------
# config handling
# ---------------------------------------------------------------------------


@dataclass
class RunConfig:
    task: str
    out: Path = Path("out")
    fmt: str = "obj"
    grid: Tuple[int, int] = (41, 41)
    tol: float = DEFAULT_TOL
    seed: int = 0
    sections: Dict = field(default_factory=dict)

    def __post_init__(self):
        if self.task not in TASKS:
            raise ConfigError(f"unknown task {self.task!r}; expected one of {TASKS}")
        if self.fmt not in ("obj", "csv"):
            raise ConfigError(f"format must be obj or csv, got {self.fmt!r}")
        ns, nt = self.grid
        if ns < 2 or nt < 2:
            raise ConfigError(f"grid must be at least 2x2, got {self.grid}")
        if not self.tol > 0.0:
            raise ConfigError(f"tol must be positive, got {self.tol}")
        self.out = Path(self.out)

    def gates(self) -> Dict[str, float]:
        gates = dict(DEFAULT_GATES)
        for k, v in self.sections.get("gates", {}).items():
            gates[k] = float(v)
        return gates


def parse_grid(text) -> Tuple[int, int]:
    if isinstance(text, (list, tuple)) and len(text) == 2:
        return int(text[0]), int(text[1])
    if isinstance(text, str):
        parts = text.lower().split("x")
        if len(parts) == 2:
            try:
                return int(parts[0]), int(parts[1])
            except ValueError:
                pass
    raise ConfigError(f"cannot parse grid {text!r}; expected NSxNT")


def load_config(path, task: Optional[str] = None, overrides: Optional[Dict] = None) -> RunConfig:
    """Load a TOML run config; CLI overrides win over the [run] section."""
    sections: Dict = {}
    if path is not None:
        p = Path(path)
        if not p.exists():
            raise ConfigError(f"config file not found: {p}")
        try:
            sections = tomllib.loads(p.read_text())
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"invalid TOML in {p}: {exc}") from exc
    run = dict(sections.get("run", {}))
    for k, v in (overrides or {}).items():
        if v is not None:
            run[k] = v
    task = run.pop("task", task) or task
    if task is None:
        raise ConfigError("no task given (subcommand or [run].task)")
    grid = run.pop("grid", (41, 41))
    return RunConfig(
        task=str(task),
        out=Path(run.pop("out", "out")),
        fmt=str(run.pop("format", "obj")),
        grid=parse_grid(grid),
        tol=float(run.pop("tol", DEFAULT_TOL)),
        seed=int(run.pop("seed", 0)),
        sections=sections,
    )


# ---------------------------------------------------------------------------
# surface grids and mesh export
# ---------------------------------------------------------------------------


@dataclass
class SurfaceGrid:
    """Rectangular sample of a surface; every cell carries an explicit flag."""

    s: np.ndarray
    t: np.ndarray
    psi: np.ndarray  # (ns, nt, 3)
    normal: np.ndarray  # (ns, nt, 3)
    rho: np.ndarray  # (ns, nt)
    flags: np.ndarray  # (ns, nt) int8

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.s.size, self.t.size)


def sample_surface(surface: AffineSurface, s_vals, t_vals) -> SurfaceGrid:
    psi, normal, rho = surface.evaluate_grid(s_vals, t_vals, strict=False)
    finite = (
        np.isfinite(psi).all(axis=-1) & np.isfinite(normal).all(axis=-1) & np.isfinite(rho)
    )
    flags = np.where(finite, np.where(rho > 0.0, FLAG_OK, FLAG_SINGULAR), FLAG_INVALID)
    return SurfaceGrid(
        np.asarray(s_vals, dtype=float),
        np.asarray(t_vals, dtype=float),
        psi,
        normal,
        rho,
        flags.astype(np.int8),
    )


def _g17(x: float) -> str:
    return format(float(x), ".17g")


def export_csv(grid: SurfaceGrid, path: Path):
    """CSV rows in row-major (s outer, t inner) order; .17g round-trips bits."""
    lines = ["s,t,x,y,z,nx,ny,nz,rho,flag"]
    ns, nt = grid.shape
    for i in range(ns):
        for j in range(nt):
            p = grid.psi[i, j]
            n = grid.normal[i, j]
            lines.append(
                ",".join(
                    [_g17(grid.s[i]), _g17(grid.t[j])]
                    + [_g17(v) for v in (p[0], p[1], p[2], n[0], n[1], n[2])]
                    + [_g17(grid.rho[i, j]), FLAG_NAMES[int(grid.flags[i, j])]]
                )
            )
    path.write_text("\n".join(lines) + "\n")


def export_obj(grid: SurfaceGrid, path: Path):
    """OBJ mesh: vertices in grid order, quads split into triangles.

    Faces touching any non-ok cell are omitted so singular/invalid regions
    leave holes instead of spikes.
    """
    ns, nt = grid.shape
    lines = []
    for i in range(ns):
        for j in range(nt):
            p = grid.psi[i, j]
            vals = [0.0 if not math.isfinite(v) else float(v) for v in p]
            lines.append("v " + " ".join(_g17(v) for v in vals))
    ok = grid.flags == FLAG_OK
    for i in range(ns - 1):
        for j in range(nt - 1):
            if ok[i, j] and ok[i + 1, j] and ok[i, j + 1] and ok[i + 1, j + 1]:
                a = i * nt + j + 1
                b = (i + 1) * nt + j + 1
                c = (i + 1) * nt + j + 2
                d = i * nt + j + 2
                lines.append(f"f {a} {b} {c}")
                lines.append(f"f {a} {c} {d}")
    path.write_text("\n".join(lines) + "\n")


def export_mesh(grid: SurfaceGrid, path: Path, fmt: str):
    if fmt == "obj":
        export_obj(grid, path)
    elif fmt == "csv":
        export_csv(grid, path)
    else:
        raise ConfigError(f"unknown mesh format {fmt!r}")


def write_report(path: Path, payload: Dict):
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# shared section parsing
# ---------------------------------------------------------------------------


def _require(sections: Dict, name: str) -> Dict:
    if name not in sections:
        raise ConfigError(f"config section [{name}] is required for this task")
    return sections[name]


def _curve_from_section(sec: Dict, what: str) -> AnalyticCurve3:
    comps = sec.get("components")
    if not comps or len(comps) != 3:
        raise ConfigError(f"[{what}] needs components = [expr, expr, expr]")
    params = {k: float(v) for k, v in sec.get("params", {}).items()}
    interval = sec.get("interval", [0.0, 2.0 * math.pi])
    if len(interval) != 2:
        raise ConfigError(f"[{what}] interval must be [lo, hi]")
    try:
        return AnalyticCurve3.from_strings(comps, params, tuple(float(x) for x in interval))
    except AffineSphereError as exc:
        raise ConfigError(f"[{what}]: {exc}") from exc


def _window_from_sections(cfg: RunConfig, curve: AnalyticCurve3):
    sec = cfg.sections.get("window", {})
    s_win = sec.get("s", list(curve.domain))
    t_win = sec.get("t", [-0.5, 0.5])
    return (float(s_win[0]), float(s_win[1])), (float(t_win[0]), float(t_win[1]))


def _singular_set_payload(points) -> List[Dict]:
    return [
        {
            "s": p.s,
            "t": p.t,
            "rho": p.rho,
            "isolated_candidate": p.isolated_candidate,
        }
        for p in points
    ]


def _grid_vals(window, grid):
    (s_lo, s_hi), (t_lo, t_hi) = window
    return np.linspace(s_lo, s_hi, grid[0]), np.linspace(t_lo, t_hi, grid[1])


def _finish(cfg: RunConfig, payload: Dict, failed: List[str]) -> int:
    payload["schema"] = SCHEMA_VERSION
    payload["failed_gates"] = sorted(failed)
    write_report(cfg.out / "report.json", payload)
    return 3 if failed else 0


def _gate_check(residuals: Dict[str, float], gates: Dict[str, float], pairs) -> List[str]:
    failed = []
    for res_name, gate_name in pairs:
        if res_name in residuals and residuals[res_name] > gates[gate_name]:
            failed.append(res_name)
    return failed


# ---------------------------------------------------------------------------
# tasks
# ---------------------------------------------------------------------------


def _build_from_config(cfg: RunConfig):
    """Shared by bjorling and verify: surface + pair from [curve]/[conormal]."""
    curve_sec = _require(cfg.sections, "curve")
    alpha = _curve_from_section(curve_sec, "curve")
    con_sec = _require(cfg.sections, "conormal")
    extra = {k: float(v) for k, v in con_sec.get("params", {}).items()}
    if "components" in con_sec:
        merged = dict(alpha.params)
        merged.update(extra)
        conormal = AnalyticCurve3.from_strings(con_sec["components"], merged, alpha.domain)
    elif "metric" in con_sec:
        conormal = conormal_from_metric(alpha, con_sec["metric"], extra)
    else:
        raise ConfigError("[conormal] needs components or metric")
    pair = check_admissible(alpha, conormal)
    s0 = float(curve_sec.get("s0", 0.5 * (alpha.domain[0] + alpha.domain[1])))
    surface = build_surface(pair, s0=s0, quad_tol=cfg.tol)
    return pair, surface


def _task_bjorling(cfg: RunConfig) -> int:
    pair, surface = _build_from_config(cfg)
    window = _window_from_sections(cfg, pair.alpha)
    s_vals, t_vals = _grid_vals(window, cfg.grid)
    grid = sample_surface(surface, s_vals, t_vals)
    export_mesh(grid, cfg.out / f"mesh.{cfg.fmt}", cfg.fmt)

    n_check = max(101, cfg.grid[0])
    s = pair.alpha.sample(n_check)
    lam = pair.lambda_values(s)
    rho_curve = surface.rho_points(s, np.zeros_like(s))
    residuals = {
        "containment": surface.containment_error(n_check),
        "conormal_reproduction": surface.conormal_error(pair.conormal, n_check),
        "metric_identity": float(np.max(np.abs(2.0 * rho_curve - lam))),
        "admissibility": pair.report.max_residual(),
    }
    points = singular_scan(surface, window, grid=cfg.grid)
    payload = {
        "task": "bjorling",
        "params": {
            "alpha": [str(c) for c in pair.alpha.components],
            "conormal": [str(c) for c in pair.conormal.components],
            "bindings": pair.params,
            "s0": surface.s0,
            "grid": list(cfg.grid),
            "tol": cfg.tol,
            "window": {"s": list(window[0]), "t": list(window[1])},
        },
        "residuals": residuals,
    }
    if points:
        payload["singular_set"] = _singular_set_payload(points)
    gates = cfg.gates()
    failed = _gate_check(
        residuals,
        gates,
        [
            ("containment", "containment"),
            ("conormal_reproduction", "conormal_reproduction"),
            ("metric_identity", "metric_identity"),
        ],
    )
    return _finish(cfg, payload, failed)


def _task_affine_map(cfg: RunConfig) -> int:
    curve_sec = _require(cfg.sections, "curve")
    alpha = _curve_from_section(curve_sec, "curve")
    s0 = float(curve_sec.get("s0", 0.5 * (alpha.domain[0] + alpha.domain[1])))
    surface = build_affine_map(alpha, s0=s0, quad_tol=cfg.tol)
    window = _window_from_sections(cfg, alpha)
    s_vals, t_vals = _grid_vals(window, cfg.grid)
    grid = sample_surface(surface, s_vals, t_vals)
    export_mesh(grid, cfg.out / f"mesh.{cfg.fmt}", cfg.fmt)

    s = alpha.sample(max(101, cfg.grid[0]))
    residuals = {
        "containment": surface.containment_error(),
        "rho_on_curve": float(np.max(np.abs(surface.rho_points(s, np.zeros_like(s))))),
    }
    points = singular_scan(surface, window, grid=cfg.grid)
    payload = {
        "task": "affine-map",
        "params": {
            "alpha": [str(c) for c in alpha.components],
            "bindings": alpha.params,
            "s0": surface.s0,
            "grid": list(cfg.grid),
            "tol": cfg.tol,
        },
        "residuals": residuals,
    }
    if points:
        payload["singular_set"] = _singular_set_payload(points)
    failed = _gate_check(
        residuals,
        cfg.gates(),
        [("containment", "containment"), ("rho_on_curve", "rho_on_curve")],
    )
    return _finish(cfg, payload, failed)


def _task_cauchy(cfg: RunConfig) -> int:
    sec = _require(cfg.sections, "cauchy")
    if "a" not in sec or "b" not in sec:
        raise ConfigError("[cauchy] needs a and b expressions")
    params = {k: float(v) for k, v in sec.get("params", {}).items()}
    interval = tuple(float(x) for x in sec.get("interval", [-1.0, 1.0]))
    try:
        data = CauchyData(sec["a"], sec["b"], params, interval, float(sec.get("x0", 0.0)))
    except (AffineSphereError, ValueError) as exc:
        raise ConfigError(f"[cauchy]: {exc}") from exc
    sol = solve_cauchy(data, quad_tol=cfg.tol)
    wx = sec.get("window_x", list(interval))
    wy = sec.get("window_y", [-0.5, 0.5])
    window = ((float(wx[0]), float(wx[1])), (float(wy[0]), float(wy[1])))
    nx, ny = cfg.grid

    xs = np.linspace(window[0][0], window[0][1], nx)
    ys = np.linspace(window[1][0], window[1][1], ny)
    xx, yy = np.meshgrid(xs, ys, indexing="ij")
    f = sol.f_points(xx.ravel(), yy.ravel()).reshape(nx, ny)
    lines = ["x,y,f"]
    for i in range(nx):
        for j in range(ny):
            lines.append(f"{_g17(xx[i, j])},{_g17(yy[i, j])},{_g17(f[i, j])}")
    (cfg.out / "graph.csv").write_text("\n".join(lines) + "\n")

    res_field = hessian_residual(sol, window, grid=(min(nx, 21), min(ny, 21)))
    x_check = np.linspace(interval[0], interval[1], 101)
    f_line = sol.f_points(x_check, np.zeros_like(x_check))
    from . import kernels, tape

    a_line = kernels.eval_values(tape.compile_expr(data.a, data.params), x_check)
    b_line = kernels.eval_values(tape.compile_expr(data.b, data.params), x_check)
    hfd = 1e-5
    fy_line = (sol.f_points(x_check, np.full_like(x_check, hfd)) - sol.f_points(
        x_check, np.full_like(x_check, -hfd)
    )) / (2.0 * hfd)
    residuals = {
        "hessian": float(np.max(np.abs(res_field))),
        "initial_value": float(np.max(np.abs(f_line - a_line))),
        "initial_slope": float(np.max(np.abs(fy_line - b_line))),
    }
    print(f"max |f_xx f_yy - f_xy^2 + 1| = {residuals['hessian']:.3e}")
    payload = {
        "task": "cauchy",
        "params": {
            "a": str(data.a),
            "b": str(data.b),
            "bindings": data.params,
            "interval": list(interval),
            "x0": data.x0,
            "grid": list(cfg.grid),
            "tol": cfg.tol,
            "window": {"x": list(window[0]), "y": list(window[1])},
        },
        "residuals": residuals,
    }
    failed = _gate_check(
        residuals,
        cfg.gates(),
        [
            ("hessian", "hessian"),
            ("initial_value", "initial_value"),
            ("initial_slope", "initial_slope"),
        ],
    )
    return _finish(cfg, payload, failed)


def _catalog_entry(cfg: RunConfig):
    sec = _require(cfg.sections, "catalog")
    name = sec.get("name")
    if not name:
        raise ConfigError("[catalog] needs name")
    params = {k: float(v) if not isinstance(v, str) else v for k, v in sec.get("params", {}).items()}
    try:
        entry = by_name(name, params)
    except AffineSphereError as exc:
        raise ConfigError(str(exc)) from exc
    return name, params, entry


def _classification_payload(name: str, params: Dict) -> Optional[Dict]:
    spec = _spec_for(name, params)
    if spec is None:
        return None
    c = classify(spec)
    out = {"kind": c.kind}
    if c.locus:
        out["locus"] = c.locus
    return out


def _spec_for(name: str, params: Dict) -> Optional[HelicoidalSpec]:
    p = {k: float(v) for k, v in params.items() if not isinstance(v, str)}
    if name in ("helicoidal-g1", "helicoidal-g2", "helicoidal-g3"):
        return HelicoidalSpec(
            name[-2:], p.get("a", 0.0), p.get("m", 1.0), p.get("c", 1.0), p.get("b", 0.0)
        )
    if name == "cayley":
        return HelicoidalSpec("g1", 1.0, p.get("m", 1.0), p.get("c", 0.0), p.get("b", 0.0))
    if name == "revolution":
        return HelicoidalSpec("g2", 0.0, p.get("m", 1.0), p.get("c", 1.0))
    return None


def _task_catalog(cfg: RunConfig) -> int:
    name, params, entry = _catalog_entry(cfg)
    gates = cfg.gates()
    payload: Dict = {"task": "catalog", "params": {"name": name, "bindings": params}}
    residuals: Dict[str, float] = {}
    failed: List[str] = []

    if isinstance(entry, RuledGraph):
        sec = cfg.sections.get("window", {})
        wx = sec.get("s", [-1.0, 1.0])
        wy = sec.get("t", [-1.0, 1.0])
        xs = np.linspace(float(wx[0]), float(wx[1]), cfg.grid[0])
        ys = np.linspace(float(wy[0]), float(wy[1]), cfg.grid[1])
        xx, yy = np.meshgrid(xs, ys, indexing="ij")
        f = entry.f(xx, yy)
        dg = cl.diff(entry.g)
        from . import kernels, tape

        gp = kernels.eval_values(tape.compile_expr(dg, entry.params), xs)
        nx_ = -(yy + gp[:, None])
        ny_ = -xx
        psi = np.stack([xx, yy, f], axis=-1)
        normal = np.stack([nx_, ny_, np.ones_like(f)], axis=-1)
        # the (x,y) chart is not conformal; report the h-volume element
        rho = np.ones_like(f)
        grid = SurfaceGrid(xs, ys, psi, normal, rho, np.zeros(f.shape, dtype=np.int8))
        export_mesh(grid, cfg.out / f"mesh.{cfg.fmt}", cfg.fmt)
        residuals["hessian_det_plus_one"] = float(
            np.max(np.abs(entry.hessian_det(xx, yy) + 1.0))
        )
        payload["residuals"] = residuals
        return _finish(cfg, payload, failed)

    entry_t: CatalogSurface = entry
    window = _window_from_sections(cfg, entry_t.alpha)
    s_vals, t_vals = _grid_vals(window, cfg.grid)
    surface = entry_t.bjorling_surface(quad_tol=cfg.tol)
    grid = sample_surface(surface, s_vals, t_vals)
    export_mesh(grid, cfg.out / f"mesh.{cfg.fmt}", cfg.fmt)
    psi_closed, rho_closed = entry_t.grid(s_vals, t_vals)
    residuals["catalog_agreement"] = float(np.max(np.abs(psi_closed - grid.psi)))
    residuals["density_agreement"] = float(np.max(np.abs(rho_closed - grid.rho)))
    payload["residuals"] = residuals
    classification = _classification_payload(name, params)
    if classification:
        payload["classification"] = classification
    points = singular_scan(surface, window, grid=cfg.grid)
    if points:
        payload["singular_set"] = _singular_set_payload(points)
    failed = _gate_check(
        residuals,
        gates,
        [("catalog_agreement", "catalog_agreement"), ("density_agreement", "catalog_agreement")],
    )
    return _finish(cfg, payload, failed)


def _task_classify(cfg: RunConfig) -> int:
    sec = _require(cfg.sections, "catalog")
    name = sec.get("name")
    params = sec.get("params", {})
    spec = _spec_for(name, params)
    if spec is None:
        raise ConfigError(f"classification needs a helicoidal catalog name, got {name!r}")
    c = classify(spec)
    dmin = density_min(spec)
    payload = {
        "task": "classify",
        "params": {"name": name, "bindings": {k: float(v) for k, v in params.items()}},
        "classification": {"kind": c.kind, **({"locus": c.locus} if c.locus else {})},
        "residuals": {"density_min_[-10,10]": dmin},
    }
    print(f"{name}: {c.kind}" + (f" at {c.locus}" if c.locus else ""))
    return _finish(cfg, payload, [])


def _task_verify(cfg: RunConfig) -> int:
    sec = cfg.sections.get("verify", {})
    mode = sec.get("mode", "bjorling")
    if mode == "bjorling":
        _, surface = _build_from_config(cfg)
        curve = surface.alpha
    elif mode == "affine-map":
        curve_sec = _require(cfg.sections, "curve")
        curve = _curve_from_section(curve_sec, "curve")
        s0 = float(curve_sec.get("s0", 0.5 * (curve.domain[0] + curve.domain[1])))
        surface = build_affine_map(curve, s0=s0, quad_tol=cfg.tol)
    elif mode == "catalog":
        name, params, entry = _catalog_entry(cfg)
        if isinstance(entry, RuledGraph):
            raise ConfigError("verify mode=catalog needs a parametric entry, not ruled")
        surface = entry.bjorling_surface(quad_tol=cfg.tol)
        curve = entry.alpha
    else:
        raise ConfigError(f"unknown verify mode {mode!r}")
    window = _window_from_sections(cfg, curve)
    report = full_residual_report(
        surface, window, grid=cfg.grid, h=float(sec.get("fd_step", 1e-4))
    )
    payload = {
        "task": "verify",
        "params": {"mode": mode, "grid": list(cfg.grid), "tol": cfg.tol},
        "residuals": report.residuals,
        "rho_range": list(report.rho_range),
    }
    baseline = sec.get("baseline")
    if baseline:
        base = json.loads(Path(baseline).read_text())
        payload["baseline_delta"] = {
            k: report.residuals[k] - float(v)
            for k, v in base.get("residuals", {}).items()
            if k in report.residuals
        }
    gate = cfg.gates()["structure"]
    failed = [k for k, v in report.residuals.items() if k != "monge_ampere" and v > gate]
    if report.residuals.get("monge_ampere", 0.0) > 10 * gate:
        failed.append("monge_ampere")
    return _finish(cfg, payload, failed)


def _task_sweep(cfg: RunConfig) -> int:
    sec = cfg.sections.get("sweep", {})
    count = int(sec.get("count", 200))
    group = sec.get("group", "g3")
    ranges = sec.get("ranges", {})
    a_rng = ranges.get("a", [-3.0, 3.0])
    c_rng = ranges.get("c", [0.2, 3.0])
    m_rng = ranges.get("m", [0.2, 4.0])
    rng = np.random.default_rng(cfg.seed)
    disagreements = []
    kinds: Dict[str, int] = {}
    for _ in range(count):
        spec = HelicoidalSpec(
            group,
            float(rng.uniform(*a_rng)),
            float(rng.uniform(*m_rng)),
            float(rng.uniform(*c_rng)),
        )
        c = classify(spec)
        kinds[c.kind] = kinds.get(c.kind, 0) + 1
        if group == "g3":
            positive = density_min(spec) > 0.0
            strict = 4.0 * spec.c * spec.m > abs(
                4.0 * spec.c**2 + spec.m**2 - spec.a**2
            )
            verdict = positive and strict
            if verdict != (c.kind == "CompleteNonFlat"):
                disagreements.append(
                    {"a": spec.a, "c": spec.c, "m": spec.m, "kind": c.kind}
                )
    payload = {
        "task": "sweep",
        "params": {"count": count, "group": group, "seed": cfg.seed},
        "residuals": {"disagreements": float(len(disagreements))},
        "kinds": kinds,
    }
    if disagreements:
        payload["disagreement_specs"] = disagreements
    print(f"sweep: {count} specs, {len(disagreements)} classification disagreements")
    return _finish(cfg, payload, ["classification_scan"] if disagreements else [])


_TASK_FN = {
    "bjorling": _task_bjorling,
    "cauchy": _task_cauchy,
    "catalog": _task_catalog,
    "affine-map": _task_affine_map,
    "verify": _task_verify,
    "classify": _task_classify,
    "sweep": _task_sweep,
}


def run(cfg: RunConfig) -> int:
    """Execute a run config; returns the process exit code (0/3)."""
    cfg.out.mkdir(parents=True, exist_ok=True)
    return _TASK_FN[cfg.task](cfg)
