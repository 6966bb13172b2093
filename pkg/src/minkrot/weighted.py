"""Weighted curvatures for the quadratic density ``exp(l1 x^2 + l2 y^2 + l3 z^2 + l4 t^2)``.

Sign conventions worth knowing before touching anything here:

* ``dphi/dn`` pairs the coordinate gradient of phi with ``n`` component-wise,
  with no Lorentzian sign on the ``t`` slot.
* The Laplacian of phi carries the Lorentzian sign, giving ``2 * delta`` with
  ``delta = l1 + l2 + l3 - l4``; hence ``K_phi = K - 2 delta``.
* ``H_phi`` is a nonnegative norm. Both normals are spacelike, so it is the
  Euclidean length of the component pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from . import curvature, kernels
from .curvature import DENOM_TOL
from .errors import DegenerateSurface
from .lorentz import Vec4
from .surface import Surface, SurfaceKind, normal_frame, position


@dataclass(frozen=True)
class Density:
    l1: float
    l2: float
    l3: float
    l4: float

    def __post_init__(self):
        vals = [float(x) for x in (self.l1, self.l2, self.l3, self.l4)]
        if not all(math.isfinite(x) for x in vals):
            raise ValueError("density coefficients must be finite")
        if all(x == 0.0 for x in vals):
            raise ValueError("density coefficients must not all be zero")
        for name, x in zip(("l1", "l2", "l3", "l4"), vals):
            object.__setattr__(self, name, x)

    @property
    def delta(self) -> float:
        return self.l1 + self.l2 + self.l3 - self.l4

    def as_tuple(self):
        return (self.l1, self.l2, self.l3, self.l4)

    def general(self) -> Density:
        return self

    def phi(self, p: Vec4) -> float:
        return self.l1 * p.x1 ** 2 + self.l2 * p.x2 ** 2 + self.l3 * p.x3 ** 2 + self.l4 * p.x4 ** 2


@dataclass(frozen=True)
class SpecialDensity:
    """``exp(lam (x^2 + y^2) + mu (z^2 - t^2))``."""

    lam: float
    mu: float

    def __post_init__(self):
        lam, mu = float(self.lam), float(self.mu)
        if not (math.isfinite(lam) and math.isfinite(mu)):
            raise ValueError("density coefficients must be finite")
        if lam == 0.0 and mu == 0.0:
            raise ValueError("lambda and mu must not both be zero")
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "mu", mu)

    def general(self) -> Density:
        return Density(self.lam, self.lam, self.mu, -self.mu)

    @property
    def delta(self) -> float:
        return 2.0 * self.lam + 2.0 * self.mu


AnyDensity = Union[Density, SpecialDensity]


def phi_directional_derivative(d: AnyDensity, p: Vec4, n: Vec4) -> float:
    """``2 (l1 p1 n1 + l2 p2 n2 + l3 p3 n3 + l4 p4 n4)``."""
    d = d.general()
    return 2.0 * (d.l1 * p.x1 * n.x1 + d.l2 * p.x2 * n.x2 + d.l3 * p.x3 * n.x3 + d.l4 * p.x4 * n.x4)


def weighted_mean_components(s: Surface, d: AnyDensity, u: float, v: float) -> Tuple[float, float]:
    """``((H1)_phi, (H2)_phi)`` from the definition ``H_j - dphi/dn_j / 2``.

    The pairing is taken at ``(u, 0)`` against the density conjugated by the
    isometry ``B(v)``; evaluating at ``(u, v)`` directly cancels terms of
    size ``cosh(beta v)^2``.
    """
    h1, h2 = curvature.mean_curvatures(s, u)
    p = position(s, u, 0.0).as_array()
    n1, n2 = normal_frame(s, u, 0.0)
    C = curvature.conjugated_density(s, d.general().as_tuple(), v)
    return (h1 - float(p @ C @ n1.as_array()), h2 - float(p @ C @ n2.as_array()))


def _vals(s: Surface, u):
    vals = curvature._profile_values(s, u)
    curvature._check_denominators(s, vals, u)
    return vals


def weighted_mean_components_closed(s: Surface, d: AnyDensity, u, v):
    """Same components from the expanded closed form (no frames involved)."""
    g = d.general()
    same, off, _, _ = kernels.weighted_point(*_vals(s, u), v, s.alpha, s.beta, s.epsilon,
                                             *g.as_tuple())
    same, off = _as_float(same), _as_float(off)
    return (same, off) if s.kind is SurfaceKind.TYPE1 else (off, same)


def _as_float(x):
    return float(x) if np.ndim(x) == 0 else x


def weighted_mean_curvature(s: Surface, d: AnyDensity, u: float, v: float) -> float:
    h1, h2 = weighted_mean_components(s, d, u, v)
    return math.hypot(h1, h2)


def weighted_mean_curvature_closed(s: Surface, d: AnyDensity, u, v):
    """``H_phi`` from the single closed expression for a general quadratic density."""
    l1, l2, l3, l4 = d.general().as_tuple()
    f, fp, fpp, g, gp, gpp = _vals(s, u)
    a, b, eps = s.alpha, s.beta, s.epsilon
    P, Q, W, R = kernels.shared_blocks(f, fp, fpp, g, gp, gpp, a, b, eps)
    M = fp * fp - eps * gp * gp
    rot = l1 + l2 + (l1 - l2) * np.cos(2 * a * v)
    boost = eps * (l4 - l3) + (l3 + l4) * np.cosh(2 * b * v)
    A = P * (eps * rot * f * gp * M + W) + (boost * P * fp * g + R) * M
    twist = eps * b * (l1 - l2) * np.sin(2 * a * v) + a * (l3 + l4) * np.sinh(2 * b * v)
    B = f * f * g * g * eps * P * twist * twist * Q ** 3
    return _as_float(np.sqrt((A * A + B) / (4.0 * P * P * Q ** 3)))


def weighted_mean_curvature_special(s: Surface, sd: SpecialDensity, u):
    """``H_phi`` specialized to ``exp(lam (x^2 + y^2) + mu (z^2 - t^2))``; v-free."""
    f, fp, fpp, g, gp, gpp = _vals(s, u)
    a, b, eps = s.alpha, s.beta, s.epsilon
    P, Q, W, R = kernels.shared_blocks(f, fp, fpp, g, gp, gpp, a, b, eps)
    M = fp * fp - eps * gp * gp
    num = (R - 2 * eps * sd.mu * P * fp * g) * M + P * (2 * eps * sd.lam * M * f * gp + W)
    return _as_float(np.abs(num) / (2.0 * eps * P * Q * np.sqrt(Q)))


def weighted_gaussian_curvature(s: Surface, d: AnyDensity, u):
    """``K_phi = K - 2 delta``."""
    return curvature.gaussian_curvature(s, u) - 2.0 * d.general().delta


def weighted_gaussian_curvature_closed(s: Surface, d: AnyDensity, u):
    """``K_phi`` from its single closed expression."""
    g = d.general()
    _, _, _, k_phi = kernels.weighted_point(*_vals(s, u), 0.0, s.alpha, s.beta, s.epsilon,
                                            *g.as_tuple())
    return _as_float(k_phi)


def minimal_residual(s: Surface, sd: SpecialDensity, u):
    """Polynomial residual vanishing exactly where the surface is weighted minimal.

    Equals ``2 P Q^(3/2) (H_i)_phi``; the other component is zero for this density.
    """
    fj, gj = s.jets(u)
    f, fp, fpp, g, gp, gpp = fj.v, fj.d1, fj.d2, gj.v, gj.d1, gj.d2
    a, b, eps = s.alpha, s.beta, s.epsilon
    lam, mu = sd.lam, sd.mu
    P = (a * f) ** 2 + eps * (b * g) ** 2
    Q = -eps * fp * fp + gp * gp
    M = fp * fp - eps * gp * gp
    res = (((-2 * eps * mu * a * a * f * f + b * b) * fp * g + a * a * f * gp
            - 2 * b * b * mu * g ** 3 * fp) * M
           + P * ((-2 * lam * f * Q - fpp) * gp + fp * gpp))
    return _as_float(res)


def flat_residual(s: Surface, d: AnyDensity, u, scaled: bool = False):
    """Polynomial residual vanishing exactly where the surface is weighted flat.

    With ``scaled`` the residual is divided by ``P^2 Q^2``, which turns it into
    ``K_phi`` itself.
    """
    fj, gj = s.jets(u)
    f, fp, fpp, g, gp, gpp = fj.v, fj.d1, fj.d2, gj.v, gj.d1, gj.d2
    a, b, eps = s.alpha, s.beta, s.epsilon
    P, Q, W, R = kernels.shared_blocks(f, fp, fpp, g, gp, gpp, a, b, eps)
    delta = d.general().delta
    cross = g * fp - f * gp
    res = -2 * delta * P * P * Q * Q + a * a * b * b * cross * cross * Q - eps * P * R * W
    if scaled:
        den = P * P * Q * Q
        if np.any(np.abs(den) <= DENOM_TOL ** 2):
            raise DegenerateSurface(f"flat residual scale is (near) zero at u={u!r}")
        res = res / den
    return _as_float(res)


def weighted_fields(s: Surface, d: AnyDensity, u, v, backend=None):
    """``(H1_phi, H2_phi, H_phi, K_phi)`` on the tensor grid ``u x v``.

    No validity filtering; callers mask invalid rows themselves.
    """
    u = np.atleast_1d(np.asarray(u, dtype=float))
    v = np.atleast_1d(np.asarray(v, dtype=float))
    fj, gj = s.jets(u, strict=False)
    vals = [np.broadcast_to(np.asarray(x, dtype=float), u.shape)
            for x in (fj.v, fj.d1, fj.d2, gj.v, gj.d1, gj.d2)]
    g = d.general()
    with np.errstate(all="ignore"):
        same, off, h_phi, k_phi = kernels.weighted_fields(*vals, v, s.alpha, s.beta,
                                                          float(s.epsilon), *g.as_tuple(),
                                                          backend=backend)
    if s.kind is SurfaceKind.TYPE1:
        return same, off, h_phi, k_phi
    return off, same, h_phi, k_phi


def weighted_mean_oracle(s: Surface, d: AnyDensity, u, v, h: float = 1e-4):
    """``H_phi`` from the finite-difference second fundamental form.

    The oracle's trace coefficients ``h_j`` differ from the closed-form mean
    curvatures by the family sign, so the weighted components are
    ``eps * h_j - dphi/dn_j / 2``. Vectorized over ``u``, ``v``.
    """
    from .surface import normal_frame_array, position_array

    res = curvature.second_form_oracle_array(s, u, v, h)
    u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
    fj, gj = s.jets(u)
    zero = np.zeros_like(v)
    p0 = position_array(s.kind, s.alpha, s.beta, fj.v, gj.v, zero)
    n1, n2 = normal_frame_array(s, u, zero)
    C = curvature.conjugated_density(s, d.general().as_tuple(), v)
    dphi1 = 2.0 * np.einsum("...k,...kl,...l->...", p0, C, n1)
    dphi2 = 2.0 * np.einsum("...k,...kl,...l->...", p0, C, n2)
    eps = s.epsilon
    c1 = eps * res.h1 - 0.5 * dphi1
    c2 = eps * res.h2 - 0.5 * dphi2
    return _as_float(np.hypot(c1, c2))
