"""Sampled (u, v) grids with weighted curvature fields, projections and OBJ/CSV output."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from . import weighted
from .errors import AllInvalid, IoError
from .surface import Surface, position_array, validity_mask
from .weighted import AnyDensity

AXIS_NAMES = ("x1", "x2", "x3", "x4")
CSV_HEADER = ("u", "v", "x1", "x2", "x3", "x4", "H_phi", "K_phi", "valid")


@dataclass
class SampledGrid:
    """Row index runs over u, column index over v.

    ``positions`` has shape (nu, nv, 4). Invalid vertices keep their position
    but carry NaN curvatures.
    """

    surface: Surface
    density: AnyDensity
    u: np.ndarray
    v: np.ndarray
    positions: np.ndarray
    H_phi: np.ndarray
    K_phi: np.ndarray
    valid: np.ndarray

    @property
    def nu(self) -> int:
        return len(self.u)

    @property
    def nv(self) -> int:
        return len(self.v)


@dataclass
class Mesh3:
    vertices: np.ndarray  # (nu*nv, 3), row-major
    faces: np.ndarray  # (m, 3) zero-based vertex indices
    axes: Tuple[str, str, str]


def default_v(nv: int) -> np.ndarray:
    return np.linspace(0.0, 2.0 * math.pi, nv, endpoint=False)


def sample_grid(s: Surface, d: AnyDensity, u_range=None, v_range=None, nu: int = 50,
                nv: int = 50, backend=None) -> SampledGrid:
    """Uniform grid; ``v_range=None`` samples ``[0, 2 pi)`` without the endpoint."""
    if nu < 2 or nv < 2:
        raise ValueError("nu and nv must be at least 2")
    lo, hi = u_range if u_range is not None else s.u_domain
    u = np.linspace(float(lo), float(hi), nu)
    v = default_v(nv) if v_range is None else np.linspace(float(v_range[0]), float(v_range[1]), nv)
    ok_u = validity_mask(s, u)
    if not ok_u.any():
        raise AllInvalid(f"no valid vertex for u in [{lo}, {hi}]")
    _, _, h_phi, k_phi = weighted.weighted_fields(s, d, u, v, backend=backend)
    fj, gj = s.jets(u, strict=False)
    with np.errstate(invalid="ignore"):
        pos = position_array(s.kind, s.alpha, s.beta, np.asarray(fj.v)[:, None],
                             np.asarray(gj.v)[:, None], v[None, :])
    valid = np.broadcast_to(ok_u[:, None], (nu, nv)).copy()
    valid &= np.isfinite(h_phi) & np.isfinite(k_phi) & np.isfinite(pos).all(axis=-1)
    if not valid.any():
        raise AllInvalid("no vertex has finite curvature values")
    h_phi = np.where(valid, h_phi, np.nan)
    k_phi = np.where(valid, k_phi, np.nan)
    return SampledGrid(s, d, u, v, pos, h_phi, k_phi, valid)


def _axis_indices(axes: Sequence) -> Tuple[int, int, int]:
    idx = []
    for a in axes:
        if isinstance(a, str):
            key = a.strip().lower()
            if key not in AXIS_NAMES:
                raise ValueError(f"unknown axis {a!r}")
            idx.append(AXIS_NAMES.index(key))
        else:
            idx.append(int(a) - 1)
    if len(idx) != 3 or len(set(idx)) != 3 or not all(0 <= i < 4 for i in idx):
        raise ValueError(f"axes must be three distinct names out of {AXIS_NAMES}")
    return tuple(idx)


def project(grid: SampledGrid, axes=("x1", "x2", "x3")) -> Mesh3:
    """Drop one coordinate; two triangles per cell whose four corners are valid."""
    idx = _axis_indices(axes)
    verts = grid.positions[..., list(idx)].reshape(-1, 3)
    nv = grid.nv
    ok = grid.valid
    cell = ok[:-1, :-1] & ok[1:, :-1] & ok[:-1, 1:] & ok[1:, 1:]
    i, j = np.nonzero(cell)
    a = i * nv + j
    b = (i + 1) * nv + j
    c = (i + 1) * nv + j + 1
    d = i * nv + j + 1
    # (cells, 2, 3) keeps each cell's two triangles adjacent
    faces = np.stack([np.stack([a, b, c], axis=1), np.stack([a, c, d], axis=1)], axis=1)
    return Mesh3(verts, faces.reshape(-1, 3).astype(int), tuple(AXIS_NAMES[k] for k in idx))


def _header_lines(grid: SampledGrid, mesh: Optional[Mesh3]):
    s = grid.surface
    d = grid.density
    lines = [
        f"surface kind={s.kind.value} alpha={s.alpha!r} beta={s.beta!r} f={s.f} g={s.g}",
        f"density {type(d).__name__} {d.general().as_tuple()!r} delta={d.general().delta!r}",
        f"grid nu={grid.nu} nv={grid.nv} u=[{_fmt(grid.u[0])}, {_fmt(grid.u[-1])}] "
        f"v=[{_fmt(grid.v[0])}, {_fmt(grid.v[-1])}]",
    ]
    if mesh is not None:
        lines.append("axes " + " ".join(mesh.axes))
    return lines


def _fmt(x) -> str:
    return f"{x:.17g}"


def write_mesh(mesh: Optional[Mesh3], grid: SampledGrid, fmt: str, path) -> None:
    """Write ``obj`` (positions and faces only) or ``csv`` (every vertex with fields)."""
    fmt = fmt.lower()
    try:
        if fmt == "obj":
            if mesh is None:
                raise ValueError("OBJ output needs a projected mesh")
            with open(path, "w") as fh:
                for line in _header_lines(grid, mesh):
                    fh.write(f"# {line}\n")
                for x, y, z in mesh.vertices:
                    fh.write(f"v {_fmt(x)} {_fmt(y)} {_fmt(z)}\n")
                for a, b, c in mesh.faces:
                    fh.write(f"f {a + 1} {b + 1} {c + 1}\n")
        elif fmt == "csv":
            with open(path, "w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(CSV_HEADER)
                for i in range(grid.nu):
                    for j in range(grid.nv):
                        p = grid.positions[i, j]
                        w.writerow([_fmt(grid.u[i]), _fmt(grid.v[j]), *(_fmt(x) for x in p),
                                    _fmt(grid.H_phi[i, j]), _fmt(grid.K_phi[i, j]),
                                    int(grid.valid[i, j])])
        else:
            raise ValueError(f"unknown mesh format {fmt!r}")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def read_csv(path):
    """Parse a CSV written by :func:`write_mesh`; returns a dict of column arrays."""
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    header, body = rows[0], rows[1:]
    cols = {name: np.array([float(r[k]) for r in body]) for k, name in enumerate(header)}
    cols["valid"] = cols["valid"].astype(bool)
    return cols
