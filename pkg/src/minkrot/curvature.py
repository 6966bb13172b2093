"""Unweighted curvatures of the two surface families and a finite-difference oracle.

The closed forms work only with the profile jets. The oracle differentiates
sampled positions numerically and never touches the closed-form formulas, so
agreement between the two is a meaningful check.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Tuple

import numpy as np

from . import kernels
from .errors import DegenerateSurface, StencilOutOfDomain
from .lorentz import Vec4
from .surface import (Surface, SurfaceKind, fundamental_form_I, normal_frame,
                      normal_frame_array, position_array, validity_mask)

#: Guard on |(af)^2 + eps (bg)^2| and |-eps f'^2 + g'^2|.
DENOM_TOL = kernels.DENOM_TOL

# fourth-order central difference weights on offsets -2..2
_D1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
_D2 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0
_OFFSETS = np.arange(-2, 3, dtype=float)


def _profile_values(s: Surface, u):
    fj, gj = s.jets(u)
    return fj.v, fj.d1, fj.d2, gj.v, gj.d1, gj.d2


def _check_denominators(s: Surface, vals, u):
    f, fp, _, g, gp, _ = vals
    P, Q, _, _ = kernels.shared_blocks(f, fp, 0.0, g, gp, 0.0, s.alpha, s.beta, s.epsilon)
    if np.any(np.abs(P) <= DENOM_TOL) or np.any(np.abs(Q) <= DENOM_TOL):
        raise DegenerateSurface(
            f"curvature denominator below {DENOM_TOL:g} at u={u!r}")
    if np.any(Q < 0):
        raise DegenerateSurface(f"-eps f'^2 + g'^2 is negative at u={u!r}")


def _closed(s: Surface, u):
    vals = _profile_values(s, u)
    _check_denominators(s, vals, u)
    return kernels.curvature_point(*vals, s.alpha, s.beta, s.epsilon)


def gaussian_curvature(s: Surface, u):
    """Gaussian curvature ``K``; depends on ``u`` only. Accepts arrays."""
    _, k = _closed(s, u)
    return float(k) if np.ndim(k) == 0 else k


def mean_curvatures(s: Surface, u) -> Tuple[float, float]:
    """``(H1, H2)``; the component along the other family's normal is zero."""
    h, _ = _closed(s, u)
    h = float(h) if np.ndim(h) == 0 else h
    zero = 0.0 if np.ndim(h) == 0 else np.zeros_like(h)
    if s.kind is SurfaceKind.TYPE1:
        return h, zero
    return zero, h


def own_normal_index(s: Surface) -> int:
    """0 when the nonzero mean curvature is along ``n1`` (Type1), 1 for ``n2``."""
    return 0 if s.kind is SurfaceKind.TYPE1 else 1


def mean_curvature_vector(s: Surface, u: float, v: float) -> Vec4:
    h1, h2 = mean_curvatures(s, u)
    n1, n2 = normal_frame(s, u, v)
    return n1 * h1 if s.kind is SurfaceKind.TYPE1 else n2 * h2


@dataclass(frozen=True)
class CurvatureSample:
    u: float
    v: float
    E: float
    F: float
    G: float
    H1: float
    H2: float
    K: float
    H_vector: Vec4


def curvature_sample(s: Surface, u: float, v: float) -> CurvatureSample:
    E, F, G = fundamental_form_I(s, u)
    h1, h2 = mean_curvatures(s, u)
    return CurvatureSample(float(u), float(v), E, F, G, h1, h2,
                           gaussian_curvature(s, u), mean_curvature_vector(s, u, v))


class OracleResult(NamedTuple):
    L1: float
    M1: float
    N1: float
    L2: float
    M2: float
    N2: float
    K_oracle: float
    H_oracle: float
    h1: float  # signed trace coefficient along n1
    h2: float  # signed trace coefficient along n2


def _mdot(a, b):
    return a[..., 0] * b[..., 0] + a[..., 1] * b[..., 1] + a[..., 2] * b[..., 2] - a[..., 3] * b[..., 3]


def generator(s: Surface, v):
    """Isometry ``B(v)`` with ``X(u, v + t) = B(v) X(u, t)``; shape ``(..., 4, 4)``.

    A rotation by ``alpha v`` in the x1x2-plane combined with a boost by
    ``beta v`` in the x3x4-plane, for both families.
    """
    v = np.asarray(v, dtype=float)
    B = np.zeros(v.shape + (4, 4))
    ca, sa = np.cos(s.alpha * v), np.sin(s.alpha * v)
    ch, sh = np.cosh(s.beta * v), np.sinh(s.beta * v)
    B[..., 0, 0], B[..., 0, 1], B[..., 1, 0], B[..., 1, 1] = ca, -sa, sa, ca
    B[..., 2, 2], B[..., 2, 3], B[..., 3, 2], B[..., 3, 3] = ch, sh, sh, ch
    return B


def second_form_oracle_array(s: Surface, u, v, h: float = 1e-4) -> OracleResult:
    """Vectorized oracle over broadcastable ``u``, ``v``; fields are arrays.

    Positions are sampled on a 5x5 stencil of half-width ``2h``; first and
    second partials use fourth-order central differences.

    ``B(v)`` (see :func:`generator`) is an isometry carrying the point
    ``(u, 0)`` with its stencil and normals to ``(u, v)``, and every quantity
    formed here is a Minkowski inner product. The stencil is therefore taken
    around ``(u, 0)``, which keeps coordinates small where ``cosh(beta v)``
    would otherwise swamp the differences in rounding error.
    """
    if not h > 0:
        raise ValueError("oracle step h must be positive")
    u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
    us = u[..., None] + h * _OFFSETS  # (..., 5)
    ok = validity_mask(s, us.ravel())
    if not ok.all():
        bad = us.ravel()[~ok][0]
        raise StencilOutOfDomain(f"oracle stencil leaves the valid region at u={bad!r}")
    fj, gj = s.jets(us, strict=False)
    # Y[..., i, j, :] is the position at (u + i h, j h)
    Y = position_array(s.kind, s.alpha, s.beta, fj.v[..., :, None], gj.v[..., :, None],
                       h * _OFFSETS[None, :])
    Xu = np.einsum("i,...ik->...k", _D1, Y[..., :, 2, :]) / h
    Xv = np.einsum("j,...jk->...k", _D1, Y[..., 2, :, :]) / h
    Xuu = np.einsum("i,...ik->...k", _D2, Y[..., :, 2, :]) / h ** 2
    Xvv = np.einsum("j,...jk->...k", _D2, Y[..., 2, :, :]) / h ** 2
    Xuv = np.einsum("i,j,...ijk->...k", _D1, _D1, Y) / h ** 2
    E = _mdot(Xu, Xu)
    F = _mdot(Xu, Xv)
    G = _mdot(Xv, Xv)
    D = E * G - F * F
    if np.any(np.abs(D) <= kernels.DENOM_TOL):
        raise DegenerateSurface("EG - F^2 is (near) zero on the oracle stencil")
    n1, n2 = normal_frame_array(s, u, np.zeros_like(v))
    out = []
    K = 0.0
    coefs = []
    for n in (n1, n2):
        L, M, N = _mdot(Xuu, n), _mdot(Xuv, n), _mdot(Xvv, n)
        e = _mdot(n, n)
        K = K + e * (L * N - M * M) / D
        coefs.append(e * (E * N - 2.0 * F * M + G * L) / (2.0 * D))
        out.extend((L, M, N))
    # both normals are spacelike, so the Minkowski norm is Euclidean in the coefficients
    H = np.sqrt(coefs[0] ** 2 + coefs[1] ** 2)
    return OracleResult(*out, K, H, coefs[0], coefs[1])


def conjugated_density(s: Surface, lambdas, v):
    """``B(v)^T diag(lambdas) B(v)`` with double-angle entries; shape ``(..., 4, 4)``.

    Pairing ``p0^T C n0`` for ``p0, n0`` taken at ``(u, 0)`` equals
    ``p^T diag(lambdas) n`` at ``(u, v)`` without the cancellation of the
    large hyperbolic terms.
    """
    l1, l2, l3, l4 = lambdas
    v = np.asarray(v, dtype=float)
    C = np.zeros(v.shape + (4, 4))
    c2, s2 = np.cos(2 * s.alpha * v), np.sin(2 * s.alpha * v)
    ch2, sh2 = np.cosh(2 * s.beta * v), np.sinh(2 * s.beta * v)
    C[..., 0, 0] = 0.5 * (l1 + l2) + 0.5 * (l1 - l2) * c2
    C[..., 1, 1] = 0.5 * (l1 + l2) - 0.5 * (l1 - l2) * c2
    C[..., 0, 1] = C[..., 1, 0] = -0.5 * (l1 - l2) * s2
    C[..., 2, 2] = 0.5 * (l3 + l4) * ch2 + 0.5 * (l3 - l4)
    C[..., 3, 3] = 0.5 * (l3 + l4) * ch2 - 0.5 * (l3 - l4)
    C[..., 2, 3] = C[..., 3, 2] = 0.5 * (l3 + l4) * sh2
    return C


def second_form_oracle(s: Surface, u: float, v: float, h: float = 1e-4) -> OracleResult:
    """Scalar wrapper around :func:`second_form_oracle_array`."""
    res = second_form_oracle_array(s, u, v, h)
    return OracleResult(*(float(x) for x in res))
