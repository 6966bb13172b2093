"""The two families of timelike general rotational surfaces in E^4_1.

First family (``Type1``, eps = -1)::

    X(u, v) = (f cos(av), f sin(av), g cosh(bv), g sinh(bv))

valid where ``a^2 f^2 - b^2 g^2 < 0`` and ``f'^2 + g'^2 > 0``.

Second family (``Type2``, eps = +1)::

    X(u, v) = (f cos(av), f sin(av), g sinh(bv), g cosh(bv))

valid where ``f'^2 - g'^2 < 0`` and ``a^2 f^2 + b^2 g^2 > 0``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .errors import DegenerateSurface, InvalidSurface
from .lorentz import Vec4
from .profile import Jet2, ProfileExpr, parse_profile

#: Radicands of frame normalizers must exceed this.
FRAME_TOL = 1e-9
#: Strict validity inequalities need this much slack, so quantities that are
#: analytically zero but round to +-1e-16 count as violations.
VALIDITY_TOL = 1e-12
#: Magnitude below which a passing bound is flagged as near-degenerate.
NEAR_DEGENERATE = 1e-9


class SurfaceKind(enum.Enum):
    TYPE1 = "type1"
    TYPE2 = "type2"

    @property
    def epsilon(self) -> int:
        return -1 if self is SurfaceKind.TYPE1 else 1

    @classmethod
    def parse(cls, tag) -> SurfaceKind:
        if isinstance(tag, SurfaceKind):
            return tag
        key = str(tag).strip().lower().replace("_", "").replace(" ", "")
        if key in ("type1", "1", "s1", "first"):
            return cls.TYPE1
        if key in ("type2", "2", "s2", "second"):
            return cls.TYPE2
        raise ValueError(f"unknown surface kind {tag!r}")


@dataclass(frozen=True)
class ValidityReport:
    u: float
    first: float  # a^2f^2 - b^2g^2 (Type1) or f'^2 - g'^2 (Type2); must be < 0
    second: float  # f'^2 + g'^2 (Type1) or a^2f^2 + b^2g^2 (Type2); must be > 0
    passed: bool
    near_degenerate: bool
    violated: Optional[str]  # failing inequalities, "; "-joined


@dataclass(frozen=True)
class Frame:
    t1: Vec4
    t2: Vec4
    n1: Vec4
    n2: Vec4


@dataclass(frozen=True)
class Surface:
    """Immutable surface description; ``f`` and ``g`` expose ``jet(u)``."""

    kind: SurfaceKind
    alpha: float
    beta: float
    f: ProfileExpr
    g: ProfileExpr
    u_domain: Tuple[float, float]

    @property
    def epsilon(self) -> int:
        return self.kind.epsilon

    def jets(self, u, strict=True) -> Tuple[Jet2, Jet2]:
        return self.f.jet(u, strict=strict), self.g.jet(u, strict=strict)

    def describe(self) -> dict:
        return {
            "kind": self.kind.value,
            "alpha": self.alpha,
            "beta": self.beta,
            "f": str(self.f),
            "g": str(self.g),
            "u_range": list(self.u_domain),
        }


_INEQ_TEXT = {
    (SurfaceKind.TYPE1, "first"): "alpha^2 f^2 - beta^2 g^2 < 0",
    (SurfaceKind.TYPE1, "second"): "f'^2 + g'^2 > 0",
    (SurfaceKind.TYPE2, "first"): "f'^2 - g'^2 < 0",
    (SurfaceKind.TYPE2, "second"): "alpha^2 f^2 + beta^2 g^2 > 0",
}


def validity_values(kind: SurfaceKind, alpha, beta, fj: Jet2, gj: Jet2):
    """The two inequality left-hand sides (``first < 0``, ``second > 0``)."""
    if kind is SurfaceKind.TYPE1:
        first = (alpha * fj.v) ** 2 - (beta * gj.v) ** 2
        second = fj.d1 ** 2 + gj.d1 ** 2
    else:
        first = fj.d1 ** 2 - gj.d1 ** 2
        second = (alpha * fj.v) ** 2 + (beta * gj.v) ** 2
    return first, second


def validity_mask(s: Surface, u):
    """Vectorized validity over an array of ``u``; out-of-domain entries are False."""
    u = np.asarray(u, dtype=float)
    fj, gj = s.jets(u, strict=False)
    with np.errstate(invalid="ignore"):
        first, second = validity_values(s.kind, s.alpha, s.beta, fj, gj)
        ok = (first < -VALIDITY_TOL) & (second > VALIDITY_TOL)
    return ok & np.isfinite(first) & np.isfinite(second)


def validity_at(s: Surface, u: float) -> ValidityReport:
    """Check the kind's two strict inequalities at ``u``.

    Raises DomainError if the profiles cannot be evaluated there.
    """
    fj, gj = s.jets(u)
    first, second = validity_values(s.kind, s.alpha, s.beta, fj, gj)
    failed = []
    if not first < -VALIDITY_TOL:
        failed.append(_INEQ_TEXT[(s.kind, "first")])
    if not second > VALIDITY_TOL:
        failed.append(_INEQ_TEXT[(s.kind, "second")])
    near = abs(first) < NEAR_DEGENERATE or abs(second) < NEAR_DEGENERATE
    violated = "; ".join(failed) if failed else None
    return ValidityReport(float(u), float(first), float(second), not failed, near, violated)


def build_surface(tag, alpha, beta, f_text, g_text, u_domain, check: bool = True) -> Surface:
    """Parse the profiles and spot-check validity at the domain ends and midpoint.

    ``check=False`` skips the spot check (for callers running their own scan).
    """
    kind = SurfaceKind.parse(tag)
    alpha = float(alpha)
    beta = float(beta)
    if not (alpha > 0 and beta > 0):
        raise InvalidSurface(f"alpha and beta must be positive (got {alpha}, {beta})",
                             "alpha > 0, beta > 0")
    lo, hi = (float(x) for x in u_domain)
    if not lo <= hi:
        raise InvalidSurface(f"empty u-domain [{lo}, {hi}]", "u_min <= u_max")
    f = f_text if hasattr(f_text, "jet") else parse_profile(f_text)
    g = g_text if hasattr(g_text, "jet") else parse_profile(g_text)
    s = Surface(kind, alpha, beta, f, g, (lo, hi))
    if not check:
        return s
    for u in (lo, 0.5 * (lo + hi), hi):
        rep = validity_at(s, u)
        if not rep.passed:
            value = rep.first if rep.violated.startswith(_INEQ_TEXT[(kind, "first")]) else rep.second
            raise InvalidSurface(
                f"{kind.value} surface invalid at u={u:.6g}: {rep.violated} fails "
                f"(value {value:.6g})", rep.violated, u)
    return s


def position(s: Surface, u: float, v: float) -> Vec4:
    fj, gj = s.jets(u)
    return Vec4.from_array(position_array(s.kind, s.alpha, s.beta, fj.v, gj.v, v))


def position_array(kind: SurfaceKind, alpha, beta, f, g, v):
    """Broadcasting position; returns an array with a trailing axis of length 4."""
    av = alpha * np.asarray(v, dtype=float)
    bv = beta * np.asarray(v, dtype=float)
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    if kind is SurfaceKind.TYPE1:
        comps = (f * np.cos(av), f * np.sin(av), g * np.cosh(bv), g * np.sinh(bv))
    else:
        comps = (f * np.cos(av), f * np.sin(av), g * np.sinh(bv), g * np.cosh(bv))
    comps = np.broadcast_arrays(*comps)
    return np.stack(comps, axis=-1)


def _radicands(kind, alpha, beta, fj, gj):
    """(meridian radicand, rotation radicand) of the frame normalizers."""
    af2 = (alpha * fj.v) ** 2
    bg2 = (beta * gj.v) ** 2
    if kind is SurfaceKind.TYPE1:
        return fj.d1 ** 2 + gj.d1 ** 2, bg2 - af2
    return gj.d1 ** 2 - fj.d1 ** 2, af2 + bg2


def _norms(s, fj, gj, u):
    r_mer, r_rot = _radicands(s.kind, s.alpha, s.beta, fj, gj)
    if r_mer <= FRAME_TOL or r_rot <= FRAME_TOL:
        raise DegenerateSurface(
            f"frame normalizer radicand below {FRAME_TOL:g} at u={u!r} "
            f"(meridian {r_mer:.3e}, rotation {r_rot:.3e})")
    return math.sqrt(r_mer), math.sqrt(r_rot)


def frame(s: Surface, u: float, v: float) -> Frame:
    """Unit tangents ``t1 ~ X_u``, ``t2 ~ X_v`` and the chosen unit normals."""
    fj, gj = s.jets(u)
    m, r = _norms(s, fj, gj, u)
    f, fp, g, gp = fj.v, fj.d1, gj.v, gj.d1
    a, b = s.alpha, s.beta
    ca, sa = math.cos(a * v), math.sin(a * v)
    chb, shb = math.cosh(b * v), math.sinh(b * v)
    if s.kind is SurfaceKind.TYPE1:
        t1 = Vec4(fp * ca, fp * sa, gp * chb, gp * shb) / m
        t2 = Vec4(-a * f * sa, a * f * ca, b * g * shb, b * g * chb) / r
        n1 = Vec4(gp * ca, gp * sa, -fp * chb, -fp * shb) / m
        n2 = Vec4(-b * g * sa, b * g * ca, a * f * shb, a * f * chb) / r
    else:
        t1 = Vec4(fp * ca, fp * sa, gp * shb, gp * chb) / m
        t2 = Vec4(-a * f * sa, a * f * ca, b * g * chb, b * g * shb) / r
        n1 = Vec4(b * g * sa, -b * g * ca, a * f * chb, a * f * shb) / r
        n2 = Vec4(gp * ca, gp * sa, fp * shb, fp * chb) / m
    return Frame(t1, t2, n1, n2)


def tangent_frame(s: Surface, u: float, v: float) -> Tuple[Vec4, Vec4]:
    fr = frame(s, u, v)
    return fr.t1, fr.t2


def normal_frame(s: Surface, u: float, v: float) -> Tuple[Vec4, Vec4]:
    fr = frame(s, u, v)
    return fr.n1, fr.n2


def normal_frame_array(s: Surface, u, v):
    """Vectorized ``(n1, n2)`` for broadcastable ``u``, ``v``; each ``(..., 4)``."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    fj, gj = s.jets(u)
    r_mer, r_rot = _radicands(s.kind, s.alpha, s.beta, fj, gj)
    if np.any(r_mer <= FRAME_TOL) or np.any(r_rot <= FRAME_TOL):
        raise DegenerateSurface(f"frame normalizer radicand below {FRAME_TOL:g}")
    m = np.sqrt(r_mer)
    r = np.sqrt(r_rot)
    f, fp, g, gp = fj.v, fj.d1, gj.v, gj.d1
    a, b = s.alpha, s.beta
    ca, sa = np.cos(a * v), np.sin(a * v)
    chb, shb = np.cosh(b * v), np.sinh(b * v)
    if s.kind is SurfaceKind.TYPE1:
        n1 = (gp * ca / m, gp * sa / m, -fp * chb / m, -fp * shb / m)
        n2 = (-b * g * sa / r, b * g * ca / r, a * f * shb / r, a * f * chb / r)
    else:
        n1 = (b * g * sa / r, -b * g * ca / r, a * f * chb / r, a * f * shb / r)
        n2 = (gp * ca / m, gp * sa / m, fp * shb / m, fp * chb / m)
    return (np.stack(np.broadcast_arrays(*n1), axis=-1),
            np.stack(np.broadcast_arrays(*n2), axis=-1))


def fundamental_form_I(s: Surface, u: float) -> Tuple[float, float, float]:
    """``(E, F, G)``; ``F`` is identically zero for both families."""
    fj, gj = s.jets(u)
    if s.kind is SurfaceKind.TYPE1:
        E = fj.d1 ** 2 + gj.d1 ** 2
        G = (s.alpha * fj.v) ** 2 - (s.beta * gj.v) ** 2
    else:
        E = fj.d1 ** 2 - gj.d1 ** 2
        G = (s.alpha * fj.v) ** 2 + (s.beta * gj.v) ** 2
    return float(E), 0.0, float(G)


def scan_validity(s: Surface, u_range=None, n: int = 2001, refine: bool = True):
    """Dense validity scan; returns ``None`` or the first failing report.

    With ``refine`` the boundary between the last passing and first failing
    sample is bisected, so the reported ``u`` locates where validity is lost.
    """
    lo, hi = u_range if u_range is not None else s.u_domain
    us = np.linspace(lo, hi, n)
    ok = validity_mask(s, us)
    if ok.all():
        return None
    k = int(np.argmin(ok))
    if refine and k > 0:
        a, b = us[k - 1], us[k]
        for _ in range(60):
            mid = 0.5 * (a + b)
            if validity_mask(s, np.array([mid]))[0]:
                a = mid
            else:
                b = mid
        u_fail = b
    else:
        u_fail = us[k]
    try:
        return validity_at(s, u_fail)
    except Exception as exc:  # domain failure: report it as a violation
        return ValidityReport(float(u_fail), float("nan"), float("nan"), False, True, str(exc))
