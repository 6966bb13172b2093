"""Meridians of weighted-minimal and weighted-flat surfaces.

Two kinds of problem live here:

* constant-profile inversions: with ``f = k`` (or ``g = l``) fixed, find the
  other profile value producing a prescribed ``H_phi`` or ``K_phi``;
* the meridian ODEs ``y'' = (y'^2 - eps) A(u, y, y')``, integrated with fixed
  step RK4 (see :func:`minkrot.kernels.rk4_meridian`).

One profile is the parameter itself (``axis="f_is_u"`` means ``f(u) = u`` and
``y = g``; ``axis="g_is_u"`` means ``g(u) = u`` and ``y = f``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Tuple, Union

import numpy as np

from . import kernels, weighted
from .errors import InvalidCombination, InvalidInitialData, NoRealSolution
from .profile import Jet2
from .surface import Surface, SurfaceKind
from .weighted import Density, SpecialDensity

#: Relative tolerance for accepting a branch's round trip.
ROUND_TRIP_TOL = 1e-9

AXES = ("f_is_u", "g_is_u")


# --------------------------------------------------------------------------
# Constant-profile inversions
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Candidate:
    """One real branch of a constant-profile inversion."""

    value: float  # the free profile value (g when f is fixed, f when g is fixed)
    label: str  # e.g. "N>0,-" : sign case of the numerator and outer sign
    timelike: bool  # whether the resulting surface satisfies the validity inequalities
    check: float  # the target recomputed from the forward formula


def _parse_fixed(kind, fixed):
    kind = SurfaceKind.parse(kind)
    fixed = str(fixed).strip().lower()
    if fixed in ("f", "f=k", "k"):
        fixed = "f"
    elif fixed in ("g", "g=l", "l"):
        fixed = "g"
    else:
        raise ValueError(f"fixed must be 'f' or 'g', got {fixed!r}")
    if kind is SurfaceKind.TYPE2 and fixed == "g":
        raise InvalidCombination("g cannot be constant on a second-family timelike surface")
    return kind, fixed


def mean_from_constant(kind, fixed, c, alpha, beta, lam_or_mu, other):
    """Forward formula: ``H_phi`` of a constant-profile surface.

    ``c`` is the constant profile value, ``other`` the free profile value and
    ``lam_or_mu`` is ``lambda`` when ``f`` is fixed, ``mu`` when ``g`` is.
    """
    kind, fixed = _parse_fixed(kind, fixed)
    eps = kind.epsilon
    a2, b2 = alpha * alpha, beta * beta
    if fixed == "f":
        k, g, lam = c, other, lam_or_mu
        num = k * (a2 * (1 + 2 * eps * k * k * lam) + 2 * b2 * lam * g * g)
        return eps * abs(num) / (2 * (a2 * k * k + eps * b2 * g * g))
    l, f, mu = c, other, lam_or_mu
    num = l * (2 * a2 * mu * f * f + b2 * (1 - 2 * l * l * mu))
    return abs(num) / (2 * (-a2 * f * f + b2 * l * l))


def flat_from_constant(kind, fixed, c, alpha, beta, delta, other):
    """Forward formula: ``K_phi`` of a constant-profile surface."""
    kind, fixed = _parse_fixed(kind, fixed)
    eps = kind.epsilon
    a2, b2 = alpha * alpha, beta * beta
    if fixed == "f":
        P = a2 * c * c + eps * b2 * other * other
    else:
        P = b2 * c * c - a2 * other * other
    return (a2 * b2 * c * c - 2 * delta * P * P) / (P * P)


def _timelike(kind, fixed, c, alpha, beta, other):
    a2, b2 = alpha * alpha, beta * beta
    f, g = (c, other) if fixed == "f" else (other, c)
    if kind is SurfaceKind.TYPE1:
        return a2 * f * f - b2 * g * g < -kernels.VALIDITY_TOL
    return a2 * f * f + b2 * g * g > kernels.VALIDITY_TOL


def _close(a, b):
    return abs(a - b) <= ROUND_TRIP_TOL * max(1.0, abs(a), abs(b))


def _emit(out, kind, fixed, c, alpha, beta, sq, case, forward, target):
    for sign, tag in ((-1.0, "-"), (1.0, "+")):
        val = sign * math.sqrt(sq)
        if sq == 0.0 and sign > 0:
            continue
        back = forward(val)
        if not _close(back, target):
            continue
        out.append(Candidate(val, f"{case},{tag}", _timelike(kind, fixed, c, alpha, beta, val), back))


def const_profile_from_mean(kind, fixed, c, alpha, beta, lam_or_mu, H_target) -> List[Candidate]:
    """Free profile values giving weighted mean curvature ``H_target``.

    The forward formula is linear in the squared free value once the sign of
    the absolute-value argument is fixed, so each sign case is solved directly
    and kept only when it is self-consistent and round-trips.
    """
    kind, fixed = _parse_fixed(kind, fixed)
    if c == 0:
        raise ValueError("the constant profile value must be nonzero")
    if not H_target >= 0:
        raise ValueError("H_target must be nonnegative")
    eps = kind.epsilon
    a2, b2 = alpha * alpha, beta * beta
    H = float(H_target)
    out: List[Candidate] = []
    for sigma, case in ((1.0, "N>0"), (-1.0, "N<0")):
        if fixed == "f":
            # sigma eps N(G) = 2 H P(G), with G = g^2
            k, lam = c, lam_or_mu
            num = 2 * H * a2 * k * k - sigma * eps * k * a2 * (1 + 2 * eps * k * k * lam)
            den = sigma * eps * 2 * k * b2 * lam - 2 * H * eps * b2
        else:
            # sigma N(F) = 2 H (b^2 l^2 - a^2 F), with F = f^2
            l, mu = c, lam_or_mu
            num = 2 * H * b2 * l * l - sigma * l * b2 * (1 - 2 * l * l * mu)
            den = sigma * 2 * l * a2 * mu + 2 * H * a2
        if den == 0.0:
            continue
        sq = num / den
        if sq < 0:
            continue
        if fixed == "f":
            n_val = c * (a2 * (1 + 2 * eps * c * c * lam_or_mu) + 2 * b2 * lam_or_mu * sq)
        else:
            n_val = c * (2 * a2 * lam_or_mu * sq + b2 * (1 - 2 * c * c * lam_or_mu))
        if n_val * sigma <= 0:
            continue
        _emit(out, kind, fixed, c, alpha, beta, sq, case,
              lambda x: mean_from_constant(kind, fixed, c, alpha, beta, lam_or_mu, x), H)
    if not out:
        raise NoRealSolution(f"no real profile value gives H_phi={H!r}")
    return out


def const_profile_from_flat(kind, fixed, c, alpha, beta, delta, K_target) -> List[Candidate]:
    """Free profile values giving weighted Gaussian curvature ``K_target``."""
    kind, fixed = _parse_fixed(kind, fixed)
    if c == 0:
        raise ValueError("the constant profile value must be nonzero")
    rad = K_target + 2.0 * delta
    if not rad > 0:
        raise NoRealSolution(f"K_phi + 2 delta = {rad!r} must be positive")
    eps = kind.epsilon
    a2, b2 = alpha * alpha, beta * beta
    out: List[Candidate] = []
    for sign, case in ((-1.0, "P<0"), (1.0, "P>0")):
        P = sign * alpha * beta * abs(c) / math.sqrt(rad)
        if fixed == "f":
            sq = (P - a2 * c * c) / (eps * b2)
        else:
            sq = (b2 * c * c - P) / a2
        if sq < 0:
            continue
        _emit(out, kind, fixed, c, alpha, beta, sq, case,
              lambda x: flat_from_constant(kind, fixed, c, alpha, beta, delta, x), K_target)
    if not out:
        raise NoRealSolution(f"no real profile value gives K_phi={K_target!r}")
    return out


# --------------------------------------------------------------------------
# Meridian ODEs
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class OdeProblem:
    kind: SurfaceKind
    alpha: float
    beta: float
    density: Union[Density, SpecialDensity]
    axis: str
    u0: float
    y0: float
    yp0: float
    u_end: float
    step: float = 1e-3

    def __post_init__(self):
        object.__setattr__(self, "kind", SurfaceKind.parse(self.kind))
        if self.axis not in AXES:
            raise ValueError(f"axis must be one of {AXES}, got {self.axis!r}")
        if not (self.alpha > 0 and self.beta > 0):
            raise ValueError("alpha and beta must be positive")
        if not self.step > 0:
            raise ValueError("step must be positive")
        if self.u0 == self.u_end:
            raise ValueError("u0 and u_end must differ")

    def profile_pair(self, u, y, yp, ypp) -> Tuple[Jet2, Jet2]:
        ujet = Jet2(u, np.ones_like(u), np.zeros_like(u))
        yjet = Jet2(y, yp, ypp)
        return (ujet, yjet) if self.axis == "f_is_u" else (yjet, ujet)


class HermiteProfile:
    """Quintic through three meridian samples matching values and slopes.

    Stands in for a profile expression when a sampled meridian is rewrapped
    as a :class:`Surface`.
    """

    def __init__(self, us, ys, yps):
        us = np.asarray(us, dtype=float)
        self.center = float(us[1])
        self.scale = float(max(abs(us[2] - us[0]) / 2.0, 1e-300))
        t = (us - self.center) / self.scale
        A = np.zeros((6, 6))
        rhs = np.zeros(6)
        for i in range(3):
            A[2 * i] = t[i] ** np.arange(6)
            A[2 * i + 1, 1:] = np.arange(1, 6) * t[i] ** np.arange(5)
            rhs[2 * i] = ys[i]
            rhs[2 * i + 1] = yps[i] * self.scale
        self.coef = np.linalg.solve(A, rhs)
        self.text = "hermite5"

    def jet(self, u, strict=True) -> Jet2:
        t = (np.asarray(u, dtype=float) - self.center) / self.scale
        c = self.coef
        v = np.polynomial.polynomial.polyval(t, c)
        d1 = np.polynomial.polynomial.polyval(t, c[1:] * np.arange(1, 6)) / self.scale
        d2 = np.polynomial.polynomial.polyval(t, c[2:] * np.arange(2, 6) * np.arange(1, 5)) / self.scale ** 2
        if np.ndim(v) == 0:
            return Jet2(float(v), float(d1), float(d2))
        return Jet2(v, d1, d2)

    def __str__(self):
        return self.text


class _LinearProfile:
    text = "u"

    def jet(self, u, strict=True):
        if np.ndim(u) == 0:
            return Jet2(float(u), 1.0, 0.0)
        u = np.asarray(u, dtype=float)
        return Jet2(u, np.ones_like(u), np.zeros_like(u))

    def __str__(self):
        return self.text


def _hermite_second_derivatives(u, y, yp):
    """``y''`` at every sample from the quintic through it and its two neighbours."""
    n = len(u)
    if n < 3:
        raise ValueError("need at least three samples")
    centers = np.clip(np.arange(n), 1, n - 2)
    out = np.empty(n)
    for i in range(n):
        c = centers[i]
        hp = HermiteProfile(u[c - 1:c + 2], y[c - 1:c + 2], yp[c - 1:c + 2])
        out[i] = hp.jet(u[i]).d2
    return out


@dataclass
class MeridianSolution:
    problem: OdeProblem
    u: np.ndarray
    y: np.ndarray
    yp: np.ndarray
    residuals: np.ndarray
    termination: str
    ypp: np.ndarray = field(repr=False, default=None)
    mode: str = "minimal"  # or "flat": which residual the column holds

    @property
    def samples(self) -> List[Tuple[float, float, float]]:
        return list(zip(self.u.tolist(), self.y.tolist(), self.yp.tolist()))

    def local_surface(self, i: int) -> Surface:
        """Surface whose free profile is the Hermite quintic around sample ``i``."""
        n = len(self.u)
        c = min(max(i, 1), n - 2)
        sl = slice(c - 1, c + 2)
        herm = HermiteProfile(self.u[sl], self.y[sl], self.yp[sl])
        lin = _LinearProfile()
        f, g = (lin, herm) if self.problem.axis == "f_is_u" else (herm, lin)
        lo, hi = sorted((float(self.u[c - 1]), float(self.u[c + 1])))
        p = self.problem
        return Surface(p.kind, float(p.alpha), float(p.beta), f, g, (lo, hi))

    def to_csv(self, path):
        import csv

        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["u", "y", "yp", "residual"])
            for row in zip(self.u, self.y, self.yp, self.residuals):
                w.writerow([f"{x:.17g}" for x in row])


_CODES = {("minimal", "f_is_u"): kernels.MINIMAL_F_IS_U,
          ("minimal", "g_is_u"): kernels.MINIMAL_G_IS_U,
          ("flat", "f_is_u"): kernels.FLAT_F_IS_U,
          ("flat", "g_is_u"): kernels.FLAT_G_IS_U}


def _solve(p: OdeProblem, which: str, backend=None) -> MeridianSolution:
    code = _CODES[(which, p.axis)]
    eps = p.kind.epsilon
    if which == "minimal":
        if not isinstance(p.density, SpecialDensity):
            raise TypeError("the minimal meridian ODE needs a SpecialDensity")
        p1, p2 = p.density.lam, p.density.mu
    else:
        p1, p2 = p.density.general().delta, 0.0
    status = kernels.meridian_state_status(code, eps, p.alpha, p.beta, p.u0, p.y0, p.yp0)
    if status != 0:
        raise InvalidInitialData(
            f"initial data (u0={p.u0}, y0={p.y0}, y'0={p.yp0}) violates the validity "
            f"inequalities of a {p.kind.value} surface")
    if not np.isfinite(kernels.meridian_rhs(code, eps, p.alpha, p.beta, p1, p2,
                                            p.u0, p.y0, p.yp0)):
        raise InvalidInitialData(f"ODE denominator vanishes at u0={p.u0}", validity=False)
    u, y, yp, term = kernels.rk4_meridian(code, eps, p.alpha, p.beta, p1, p2,
                                          p.u0, p.y0, p.yp0, p.u_end, p.step,
                                          backend=backend)
    if len(u) < 3:
        nan = np.full(len(u), np.nan)
        return MeridianSolution(p, u, y, yp, nan, term, nan.copy(), which)
    ypp = _hermite_second_derivatives(u, y, yp)
    residuals = _residuals(p, which, u, y, yp, ypp)
    return MeridianSolution(p, u, y, yp, residuals, term, ypp, which)


def _residuals(p: OdeProblem, which, u, y, yp, ypp):
    """``H_phi`` (minimal) or ``K_phi`` (flat) along the sampled meridian."""
    fj, gj = p.profile_pair(u, y, yp, ypp)
    vals = (fj.v, fj.d1, fj.d2, gj.v, gj.d1, gj.d2)
    d = p.density.general()
    _, _, h_phi, k_phi = kernels.weighted_point(*vals, 0.0, p.alpha, p.beta, p.kind.epsilon,
                                                *d.as_tuple())
    return np.asarray(h_phi if which == "minimal" else k_phi, dtype=float)


def solve_minimal_meridian(p: OdeProblem, backend=None) -> MeridianSolution:
    """Integrate the weighted-minimal meridian ODE; residual column is ``H_phi``."""
    return _solve(p, "minimal", backend)


def solve_flat_meridian(p: OdeProblem, backend=None) -> MeridianSolution:
    """Integrate the weighted-flat meridian ODE; residual column is ``K_phi``."""
    return _solve(p, "flat", backend)


def residual_at(sol: MeridianSolution, i: int) -> float:
    """Residual of sample ``i`` recomputed through :mod:`minkrot.weighted`."""
    s = sol.local_surface(i)
    u = float(sol.u[i])
    if sol.mode == "minimal":
        return weighted.weighted_mean_curvature(s, sol.problem.density, u, 0.0)
    return weighted.weighted_gaussian_curvature(s, sol.problem.density, u)
