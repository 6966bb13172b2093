from pathlib import Path

import pytest

from minkrot.config import apply_override, load_config, parse_config
from minkrot.errors import ConfigError, IoError
from minkrot.surface import SurfaceKind
from minkrot.weighted import Density, SpecialDensity

DOCS = Path(__file__).resolve().parents[1] / "docs"

BASE = """
surface:
  kind: type1
  alpha: 1.0
  beta: 1
  f: "sin(u)"
  g: "cos(u)"
  u_range: [-0.7, 0.7]
density:
  special: {lambda: 1.0, mu: 1.0}
"""


def test_surface_block():
    kind, a, b, f, g, ur = parse_config(BASE).surface_args()
    assert kind is SurfaceKind.TYPE1
    assert (a, b, f, g, ur) == (1.0, 1.0, "sin(u)", "cos(u)", (-0.7, 0.7))
    assert isinstance(b, float)


def test_density_blocks():
    assert parse_config(BASE).density() == SpecialDensity(1.0, 1.0)
    cfg = parse_config(BASE.replace("special: {lambda: 1.0, mu: 1.0}",
                                    "general: [1, -1, 1, 1]"))
    assert cfg.density() == Density(1.0, -1.0, 1.0, 1.0)


def test_defaults():
    cfg = parse_config(BASE)
    assert cfg.grid() == (50, 50, None)
    assert cfg.output() == ("obj", ["x1", "x2", "x3"], None)
    with pytest.raises(ConfigError):
        cfg.solver()
    assert parse_config("").block("surface", required=False) == {}


@pytest.mark.parametrize("text", [
    "- a\n- b\n",
    "surface: [1, 2\n",
    "bogus: {}\n",
    "surface: 3\n",
])
def test_bad_documents(text):
    with pytest.raises(ConfigError):
        parse_config(text).surface_args()


@pytest.mark.parametrize("edit", [
    ("kind: type1", "kind: type3"),
    ("alpha: 1.0", "alpha: one"),
    ("alpha: 1.0", "alpha: true"),
    ("u_range: [-0.7, 0.7]", "u_range: [0.1]"),
    ('f: "sin(u)"', "f: 3"),
    ('g: "cos(u)"', ""),
])
def test_bad_surface(edit):
    with pytest.raises(ConfigError):
        parse_config(BASE.replace(*edit)).surface_args()


@pytest.mark.parametrize("block", [
    "density:\n  special: {lambda: 0, mu: 0}\n",
    "density:\n  general: [0, 0, 0, 0]\n",
    "density:\n  general: [1, 2, 3]\n",
    "density:\n  special: {lambda: 1, nu: 2}\n",
    "density:\n  special: {lambda: 1, mu: 1}\n  general: [1, 1, 1, 1]\n",
    "density: {}\n",
])
def test_bad_density(block):
    with pytest.raises(ConfigError):
        parse_config(block).density()


def test_bad_grid_solver_output():
    with pytest.raises(ConfigError):
        parse_config("grid: {nu: 2.5}").grid()
    with pytest.raises(ConfigError):
        parse_config("grid: {v_range: 1}").grid()
    with pytest.raises(ConfigError):
        parse_config("solver: {u0: 0, y0: 1, yp0: 0, u_end: 1, axis: h_is_u}").solver()
    with pytest.raises(ConfigError):
        parse_config("output: {format: ply}").output()
    with pytest.raises(ConfigError):
        parse_config("output: {axes: [x1, x2]}").output()


def test_exponent_literals():
    cfg = parse_config("solver: {u0: 0, y0: 1, yp0: 0, u_end: 1, step: 1e-4}")
    assert cfg.solver()["step"] == 1e-4
    with pytest.raises(ConfigError):
        parse_config("solver: {u0: .nan, y0: 1, yp0: 0, u_end: 1}").solver()


def test_override():
    cfg = parse_config(BASE)
    new = apply_override(cfg, "density.special.lambda=2.5")
    assert new.density() == SpecialDensity(2.5, 1.0)
    assert cfg.density() == SpecialDensity(1.0, 1.0)
    new = apply_override(new, "grid.nu=7")
    assert new.grid()[0] == 7
    new = apply_override(new, "surface.u_range=[0, 0.5]")
    assert new.surface_args()[-1] == (0.0, 0.5)
    new = apply_override(new, "surface.f=tan(u)")
    assert new.surface_args()[3] == "tan(u)"


@pytest.mark.parametrize("bad", ["grid.nu", "nu=3", "bogus.x=1", "surface.f.x=1",
                                 "grid.v_range=[1"])
def test_bad_override(bad):
    with pytest.raises(ConfigError):
        apply_override(parse_config(BASE), bad)


def test_missing_file(tmp_path):
    with pytest.raises(IoError):
        load_config(tmp_path / "absent.yaml")


@pytest.mark.parametrize("path", sorted((DOCS / "configs").glob("*.yaml"))
                         + [DOCS / "config.example.yaml"], ids=lambda p: p.name)
def test_shipped_configs_load(path):
    cfg = load_config(path)
    cfg.surface_args()
    assert cfg.density() is not None
    cfg.grid()
    cfg.output()
