"""``minkrot`` command line.

Exit codes: 0 success, 2 invalid surface, 3 parse or config error,
4 numerical failure, 5 I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np

from . import catalog, mesh, meridian, weighted
from .config import JobConfig, apply_override, load_config
from .curvature import curvature_sample
from .errors import (AllInvalid, ConfigError, DegenerateSurface, DomainError, InvalidCombination,
                     InvalidInitialData, InvalidSurface, IoError, NoRealSolution, ParseError,
                     StencilOutOfDomain)
from .surface import build_surface, scan_validity, validity_at

EXIT_OK = 0
EXIT_INVALID_SURFACE = 2
EXIT_CONFIG = 3
EXIT_NUMERICAL = 4
EXIT_IO = 5


class CommandFailed(Exception):
    """Carries an exit code and a report that should still be printed."""

    def __init__(self, code: int, report: Dict[str, Any]):
        self.code = code
        self.report = report
        super().__init__(report.get("error", ""))


# --------------------------------------------------------------------------
# Output
# --------------------------------------------------------------------------

def to_json(obj) -> str:
    """Deterministic JSON: sorted keys, floats with 17 significant digits, NaN as null."""
    if isinstance(obj, dict):
        items = (f"{json.dumps(str(k))}: {to_json(obj[k])}" for k in sorted(obj))
        return "{" + ", ".join(items) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(to_json(x) for x in obj) + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return "null"
        text = format(x, ".17g")
        if "e" not in text and "." not in text and "n" not in text:
            text += ".0"
        return text
    return json.dumps(str(obj))


def _fmt6(x) -> str:
    if isinstance(x, bool):
        return "yes" if x else "no"
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".6g")
    return str(x)


def _table(rows: List[List[Any]], header: List[str]) -> str:
    cells = [header] + [[_fmt6(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


def _kv_table(pairs: Dict[str, Any]) -> str:
    return _table([[k, v] for k, v in pairs.items()], ["quantity", "value"])


# --------------------------------------------------------------------------
# Config helpers
# --------------------------------------------------------------------------

def _load(args) -> JobConfig:
    if not args.config:
        raise ConfigError("this command needs --config")
    cfg = load_config(args.config)
    for assignment in args.set or []:
        cfg = apply_override(cfg, assignment)
    return cfg


def _surface(cfg: JobConfig, check: bool = True):
    kind, alpha, beta, f, g, ur = cfg.surface_args()
    return build_surface(kind, alpha, beta, f, g, ur, check=check)


def _out_path(args, cfg: JobConfig, default_suffix: str) -> Path:
    if getattr(args, "out", None):
        return Path(args.out)
    _, _, path = cfg.output()
    if path:
        return Path(path)
    raise ConfigError(f"no output path: pass --out or set output.path ({default_suffix})")


# --------------------------------------------------------------------------
# Commands
# --------------------------------------------------------------------------

def cmd_validate(args) -> Dict[str, Any]:
    cfg = _load(args)
    s = _surface(cfg, check=False)
    rep = scan_validity(s, n=args.samples)
    report = {"command": "validate", "surface": s.describe(), "samples": args.samples,
              "valid": rep is None}
    if rep is not None:
        report["first_violation"] = {"u": rep.u, "inequality": rep.violated,
                                     "first": rep.first, "second": rep.second}
        report["error"] = f"validity fails near u={rep.u:.6g}: {rep.violated}"
        raise CommandFailed(EXIT_INVALID_SURFACE, report)
    return report


def cmd_curvature(args) -> Dict[str, Any]:
    cfg = _load(args)
    s = _surface(cfg)
    d = cfg.density()
    u, v = args.u, args.v
    rep = validity_at(s, u)
    if not rep.passed:
        raise InvalidSurface(f"surface invalid at u={u!r}: {rep.violated}", rep.violated, u)
    cs = curvature_sample(s, u, v)
    h1p, h2p = weighted.weighted_mean_components(s, d, u, v)
    values = {"E": cs.E, "F": cs.F, "G": cs.G, "H1": cs.H1, "H2": cs.H2, "K": cs.K,
              "H1_phi": h1p, "H2_phi": h2p,
              "H_phi": weighted.weighted_mean_curvature(s, d, u, v),
              "K_phi": weighted.weighted_gaussian_curvature(s, d, u)}
    return {"command": "curvature", "surface": s.describe(), "u": u, "v": v,
            "density": list(d.general().as_tuple()), "values": values}


def _grid_for(cfg, s, args):
    d = cfg.density()
    nu, nv, vr = cfg.grid()
    return mesh.sample_grid(s, d, s.u_domain, vr, nu, nv, backend=args.backend)


def _grid_summary(grid) -> Dict[str, Any]:
    ok = grid.valid
    return {"nu": grid.nu, "nv": grid.nv, "valid_vertices": int(ok.sum()),
            "max_H_phi": float(np.nanmax(grid.H_phi)),
            "max_abs_K_phi": float(np.nanmax(np.abs(grid.K_phi)))}


def cmd_field(args) -> Dict[str, Any]:
    cfg = _load(args)
    s = _surface(cfg)
    grid = _grid_for(cfg, s, args)
    path = _out_path(args, cfg, "csv")
    mesh.write_mesh(None, grid, "csv", path)
    return {"command": "field", "surface": s.describe(), "path": str(path),
            "grid": _grid_summary(grid)}


def cmd_export(args) -> Dict[str, Any]:
    cfg = _load(args)
    s = _surface(cfg)
    grid = _grid_for(cfg, s, args)
    fmt, axes, _ = cfg.output()
    if args.format:
        fmt = args.format
    path = _out_path(args, cfg, fmt)
    m = mesh.project(grid, axes)
    written = [str(path)]
    mesh.write_mesh(m, grid, fmt, path)
    if fmt == "obj":
        # OBJ has no per-vertex scalars; the fields go next to it
        sibling = path.with_suffix(".csv")
        mesh.write_mesh(m, grid, "csv", sibling)
        written.append(str(sibling))
    return {"command": "export", "surface": s.describe(), "axes": list(m.axes),
            "faces": int(len(m.faces)), "vertices": int(len(m.vertices)),
            "files": written, "grid": _grid_summary(grid)}


def _solve(args, which: str) -> Dict[str, Any]:
    cfg = _load(args)
    kind, alpha, beta, _, _, _ = cfg.surface_args()
    d = cfg.density()
    if which == "minimal" and not isinstance(d, weighted.SpecialDensity):
        raise ConfigError("solve-minimal needs density.special {lambda, mu}")
    sv = cfg.solver()
    try:
        prob = meridian.OdeProblem(kind, alpha, beta, d, sv["axis"], sv["u0"], sv["y0"],
                                   sv["yp0"], sv["u_end"], sv["step"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    solve = meridian.solve_minimal_meridian if which == "minimal" else meridian.solve_flat_meridian
    sol = solve(prob, backend=args.backend)
    report = {"command": f"solve-{which}", "termination": sol.termination,
              "samples": int(len(sol.u)),
              "final": {"u": float(sol.u[-1]), "y": float(sol.y[-1]), "yp": float(sol.yp[-1])},
              "residual": "H_phi" if which == "minimal" else "K_phi",
              "max_abs_residual": float(np.nanmax(np.abs(sol.residuals)))
              if len(sol.u) >= 3 else None}
    if args.out or cfg.block("output", required=False).get("path"):
        path = _out_path(args, cfg, "csv")
        try:
            sol.to_csv(path)
        except OSError as exc:
            raise IoError(f"cannot write {path}: {exc}") from exc
        report["path"] = str(path)
    return report


def cmd_solve_minimal(args):
    return _solve(args, "minimal")


def cmd_solve_flat(args):
    return _solve(args, "flat")


def cmd_verify_examples(args) -> Dict[str, Any]:
    reports = catalog.verify_examples()
    rows = [r.as_dict() for r in reports]
    report = {"command": "verify-examples", "examples": rows,
              "passed": all(r.passed for r in reports)}
    if not report["passed"]:
        report["error"] = "at least one example exceeded its threshold"
        raise CommandFailed(EXIT_NUMERICAL, report)
    return report


# --------------------------------------------------------------------------
# Human-readable rendering
# --------------------------------------------------------------------------

def render(report: Dict[str, Any]) -> str:
    cmd = report.get("command")
    if cmd == "verify-examples":
        rows = []
        for r in report["examples"]:
            worst = max(r["checks"], key=lambda c: c["deviation"] / c["threshold"])
            rows.append([r["example"], r["title"], r["max_deviation"], worst["name"],
                         "pass" if r["passed"] else "FAIL"])
        return _table(rows, ["example", "surface", "max deviation", "worst check", "status"])
    if cmd == "curvature":
        return _kv_table(report["values"])
    if cmd == "validate":
        if report["valid"]:
            return f"valid on {report['surface']['u_range']} ({report['samples']} samples)"
        fv = report["first_violation"]
        return (f"INVALID: {fv['inequality']} fails near u = {_fmt6(fv['u'])}\n"
                + _kv_table({"first": fv["first"], "second": fv["second"]}))
    flat = {}
    for k, v in report.items():
        if k in ("command", "surface"):
            continue
        if isinstance(v, dict):
            for kk, vv in v.items():
                flat[f"{k}.{kk}"] = vv
        elif isinstance(v, list):
            flat[k] = ", ".join(_fmt6(x) for x in v)
        else:
            flat[k] = v
    return _kv_table(flat)


# --------------------------------------------------------------------------
# Entry point
# --------------------------------------------------------------------------

COMMANDS = {
    "validate": cmd_validate,
    "curvature": cmd_curvature,
    "field": cmd_field,
    "solve-minimal": cmd_solve_minimal,
    "solve-flat": cmd_solve_flat,
    "export": cmd_export,
    "verify-examples": cmd_verify_examples,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="minkrot",
                                description="Weighted curvatures of timelike rotational "
                                            "surfaces in Minkowski 4-space.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", "-c", help="YAML job configuration")
    common.add_argument("--set", action="append", metavar="BLOCK.KEY=VALUE",
                        help="override a config value (repeatable)")
    common.add_argument("--json", action="store_true", help="machine-readable report")
    common.add_argument("--backend", choices=("numba", "numpy"), default=None,
                        help="kernel backend (default from MINKROT_BACKEND)")
    sub = p.add_subparsers(dest="command", required=True)
    v = sub.add_parser("validate", parents=[common], help="dense validity scan")
    v.add_argument("--samples", type=int, default=2001)
    c = sub.add_parser("curvature", parents=[common], help="all curvatures at one point")
    c.add_argument("--u", type=float, required=True)
    c.add_argument("--v", type=float, default=0.0)
    for name in ("field", "solve-minimal", "solve-flat"):
        sp = sub.add_parser(name, parents=[common])
        sp.add_argument("--out", help="output CSV path")
    e = sub.add_parser("export", parents=[common], help="projected mesh")
    e.add_argument("--out", help="output path")
    e.add_argument("--format", choices=("obj", "csv"))
    sub.add_parser("verify-examples", parents=[common], help="golden example suite")
    return p


def _error_code(exc: BaseException) -> Optional[int]:
    if isinstance(exc, InvalidSurface):
        return EXIT_INVALID_SURFACE
    if isinstance(exc, InvalidInitialData):
        return EXIT_INVALID_SURFACE if exc.validity else EXIT_NUMERICAL
    if isinstance(exc, (ParseError, ConfigError, InvalidCombination)):
        return EXIT_CONFIG
    if isinstance(exc, (DegenerateSurface, NoRealSolution, DomainError, AllInvalid,
                        StencilOutOfDomain, ArithmeticError)):
        return EXIT_NUMERICAL
    if isinstance(exc, (IoError, OSError)):
        return EXIT_IO
    return None


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    code = EXIT_OK
    try:
        report = COMMANDS[args.command](args)
    except CommandFailed as exc:
        code, report = exc.code, exc.report
    except Exception as exc:  # noqa: BLE001 - mapped to exit codes below
        code = _error_code(exc)
        if code is None:
            raise
        report = {"command": args.command, "error": str(exc), "error_type": type(exc).__name__}
    report["exit_code"] = code
    if args.json:
        stdout.write(to_json(report) + "\n")
    elif "error" in report and "first_violation" not in report and "examples" not in report:
        stderr.write(f"minkrot {args.command}: {report['error']}\n")
    else:
        stdout.write(render({k: v for k, v in report.items() if k not in ("exit_code", "error")})
                     + "\n")
        if "error" in report:
            stderr.write(f"minkrot {args.command}: {report['error']}\n")
    return code


def main(argv=None) -> int:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
