"""Job configuration documents (YAML).

Schema (every block except ``surface`` is optional for commands that do not
need it)::

    surface:
      kind: type1            # or type2
      alpha: 1.0
      beta: 1.0
      f: "sin(u)"
      g: "cos(u)"
      u_range: [-0.7, 0.7]
    density:                 # exactly one of general / special
      special: {lambda: 1.0, mu: 1.0}
      # general: [l1, l2, l3, l4]
    grid:
      nu: 50
      nv: 50
      v_range: null          # null means [0, 2 pi) without the endpoint
    solver:
      axis: f_is_u           # or g_is_u
      u0: 0.0
      y0: 1.0
      yp0: 0.0
      u_end: 0.5
      step: 0.001
    output:
      format: obj            # obj or csv
      axes: [x1, x2, x3]
      path: out.obj
"""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass
from typing import Any, Dict, Optional

import yaml

from .errors import ConfigError, IoError
from .surface import SurfaceKind
from .weighted import AnyDensity, Density, SpecialDensity

_TOP_KEYS = {"surface", "density", "grid", "solver", "output"}


@dataclass
class JobConfig:
    raw: Dict[str, Any]

    def block(self, name: str, required: bool = True) -> Dict[str, Any]:
        val = self.raw.get(name)
        if val is None:
            if required:
                raise ConfigError(f"config is missing the '{name}' block")
            return {}
        if not isinstance(val, dict):
            raise ConfigError(f"'{name}' must be a mapping")
        return val

    # typed views -----------------------------------------------------------

    def surface_args(self):
        s = self.block("surface")
        for key in ("kind", "alpha", "beta", "f", "g", "u_range"):
            if key not in s:
                raise ConfigError(f"surface.{key} is required")
        try:
            kind = SurfaceKind.parse(s["kind"])
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        ur = s["u_range"]
        if not (isinstance(ur, (list, tuple)) and len(ur) == 2):
            raise ConfigError("surface.u_range must be a two-element list")
        for key in ("f", "g"):
            if not isinstance(s[key], str):
                raise ConfigError(f"surface.{key} must be a string expression")
        return (kind, _num(s["alpha"], "surface.alpha"), _num(s["beta"], "surface.beta"),
                s["f"], s["g"], (_num(ur[0], "surface.u_range"), _num(ur[1], "surface.u_range")))

    def density(self, required: bool = True) -> Optional[AnyDensity]:
        d = self.block("density", required)
        if not d and not required:
            return None
        has_g, has_s = "general" in d, "special" in d
        if has_g == has_s:
            raise ConfigError("density needs exactly one of 'general' or 'special'")
        try:
            if has_g:
                vals = d["general"]
                if not (isinstance(vals, (list, tuple)) and len(vals) == 4):
                    raise ConfigError("density.general must be a list of four numbers")
                return Density(*(_num(x, "density.general") for x in vals))
            sp = d["special"]
            if not isinstance(sp, dict) or set(sp) - {"lambda", "mu"}:
                raise ConfigError("density.special must be a mapping with 'lambda' and 'mu'")
            return SpecialDensity(_num(sp.get("lambda", 0.0), "density.special.lambda"),
                                  _num(sp.get("mu", 0.0), "density.special.mu"))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def grid(self):
        g = self.block("grid", required=False)
        nu = _int(g.get("nu", 50), "grid.nu")
        nv = _int(g.get("nv", 50), "grid.nv")
        vr = g.get("v_range")
        if vr is not None:
            if not (isinstance(vr, (list, tuple)) and len(vr) == 2):
                raise ConfigError("grid.v_range must be null or a two-element list")
            vr = (_num(vr[0], "grid.v_range"), _num(vr[1], "grid.v_range"))
        return nu, nv, vr

    def solver(self):
        s = self.block("solver")
        out = {}
        for key in ("u0", "y0", "yp0", "u_end"):
            if key not in s:
                raise ConfigError(f"solver.{key} is required")
            out[key] = _num(s[key], f"solver.{key}")
        out["step"] = _num(s.get("step", 1e-3), "solver.step")
        out["axis"] = str(s.get("axis", "f_is_u"))
        if out["axis"] not in ("f_is_u", "g_is_u"):
            raise ConfigError("solver.axis must be 'f_is_u' or 'g_is_u'")
        return out

    def output(self):
        o = self.block("output", required=False)
        fmt = str(o.get("format", "obj")).lower()
        if fmt not in ("obj", "csv"):
            raise ConfigError("output.format must be 'obj' or 'csv'")
        axes = o.get("axes", ["x1", "x2", "x3"])
        if not (isinstance(axes, (list, tuple)) and len(axes) == 3):
            raise ConfigError("output.axes must list three axes")
        return fmt, [str(a) for a in axes], o.get("path")


def _num(x, where) -> float:
    # YAML 1.1 reads exponent literals without a dot (1e-4) as strings
    if isinstance(x, str):
        try:
            x = float(x)
        except ValueError:
            pass
    if isinstance(x, bool) or not isinstance(x, (int, float)) or not math.isfinite(x):
        raise ConfigError(f"{where} must be a finite number, got {x!r}")
    return float(x)


def _int(x, where) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise ConfigError(f"{where} must be an integer, got {x!r}")
    return x


def parse_config(text: str) -> JobConfig:
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError("config must be a mapping at the top level")
    unknown = set(raw) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown config block(s): {', '.join(sorted(unknown))}")
    return JobConfig(raw)


def load_config(path) -> JobConfig:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise IoError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text)


def apply_override(cfg: JobConfig, assignment: str) -> JobConfig:
    """Return a copy with ``block.key=value`` applied; the value is parsed as YAML."""
    if "=" not in assignment:
        raise ConfigError(f"override {assignment!r} must look like block.key=value")
    path, _, text = assignment.partition("=")
    keys = [k for k in path.strip().split(".") if k]
    if len(keys) < 2 or keys[0] not in _TOP_KEYS:
        raise ConfigError(f"override path {path!r} must start with one of {sorted(_TOP_KEYS)}")
    try:
        value = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse override value {text!r}") from exc
    raw = copy.deepcopy(cfg.raw)
    node = raw
    for k in keys[:-1]:
        nxt = node.get(k)
        if nxt is None:
            nxt = node[k] = {}
        if not isinstance(nxt, dict):
            raise ConfigError(f"cannot descend into non-mapping {k!r}")
        node = nxt
    node[keys[-1]] = value
    return JobConfig(raw)
