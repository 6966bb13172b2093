"""Numeric hot paths: closed-form curvature blocks, grid sweeps, RK4 meridians.

Every point formula is plain arithmetic so the same source broadcasts over
numpy arrays (numpy backend) and compiles under numba (loops in the numba
backend). ``BACKEND`` picks the default; both variants stay importable as
``*_numpy`` / ``*_numba`` for cross-checks and benchmarking.

Inputs ``f, fp, fpp, g, gp, gpp`` are profile values and u-derivatives,
``eps`` is -1 for the first surface family and +1 for the second.
"""

import numpy as np

from ._jit import BACKEND, HAVE_NUMBA, njit

#: Guard on |P| = |(af)^2 + eps (bg)^2| and |Q| = |-eps f'^2 + g'^2|.
DENOM_TOL = 1e-9
#: Strictness margin for validity inequalities inside the ODE loop.
VALIDITY_TOL = 1e-12
#: Slope guard for second-family meridians (|y'| must stay away from 1).
SLOPE_TOL = 1e-9

TERMINATIONS = ("reached_end", "degenerate_denominator", "validity_lost", "step_underflow")

# meridian ODE selector codes
MINIMAL_F_IS_U = 0
MINIMAL_G_IS_U = 1
FLAT_F_IS_U = 2
FLAT_G_IS_U = 3


# --------------------------------------------------------------------------
# Point formulas
# --------------------------------------------------------------------------

def shared_blocks(f, fp, fpp, g, gp, gpp, alpha, beta, eps):
    """Recurring sub-expressions ``P, Q, W, R``.

    ``P = (af)^2 + eps (bg)^2``, ``Q = -eps f'^2 + g'^2``,
    ``W = f'g'' - f''g'``, ``R = a^2 f g' + b^2 g f'``.
    """
    P = (alpha * f) ** 2 + eps * (beta * g) ** 2
    Q = -eps * fp * fp + gp * gp
    W = fp * gpp - fpp * gp
    R = alpha * alpha * f * gp + beta * beta * g * fp
    return P, Q, W, R


def curvature_point(f, fp, fpp, g, gp, gpp, alpha, beta, eps):
    """Nonzero mean-curvature component ``H_i`` and Gaussian curvature ``K``."""
    P, Q, W, R = shared_blocks(f, fp, fpp, g, gp, gpp, alpha, beta, eps)
    q32 = Q * np.sqrt(Q)
    h_i = -eps * (R * Q - eps * P * W) / (2.0 * P * q32)
    cross = g * fp - f * gp
    k = (alpha * alpha * beta * beta * cross * cross * Q - eps * P * R * W) / (P * P * Q * Q)
    return h_i, k


def _build_weighted_point(shared_blocks):
    def weighted_point(f, fp, fpp, g, gp, gpp, v, alpha, beta, eps, l1, l2, l3, l4):
        """Expanded weighted curvatures at one ``(u, v)``.

        Returns ``(same, off, h_phi, k_phi)`` where ``same`` is the weighted
        component along the surface's own normal ``n_i``, ``off`` the component
        along the other normal, ``h_phi`` their Euclidean norm (both normals are
        spacelike) and ``k_phi`` the weighted Gaussian curvature.
        """
        P, Q, W, R = shared_blocks(f, fp, fpp, g, gp, gpp, alpha, beta, eps)
        M = fp * fp - eps * gp * gp
        rot = l1 + l2 + (l1 - l2) * np.cos(2.0 * alpha * v)
        boost = eps * (l4 - l3) + (l3 + l4) * np.cosh(2.0 * beta * v)
        off = -f * g * (eps * beta * (l1 - l2) * np.sin(2.0 * alpha * v)
                        + alpha * (l3 + l4) * np.sinh(2.0 * beta * v)) / (2.0 * np.sqrt(eps * P))
        inner = boost * M * g * fp + eps * rot * M * f * gp + W
        same = (inner * P + R * M) / (2.0 * P * Q * np.sqrt(Q))
        h_phi = np.sqrt(same * same + off * off)
        delta = l1 + l2 + l3 - l4
        cross = g * fp - f * gp
        k_phi = (-2.0 * delta * P * P * Q * Q + alpha * alpha * beta * beta * cross * cross * Q
                 - eps * P * R * W) / (P * P * Q * Q)
        return same, off, h_phi, k_phi

    return weighted_point


weighted_point = _build_weighted_point(shared_blocks)


# --------------------------------------------------------------------------
# Grid sweep
# --------------------------------------------------------------------------

def weighted_fields_numpy(f, fp, fpp, g, gp, gpp, v, alpha, beta, eps, l1, l2, l3, l4):
    """Weighted fields on the tensor grid ``u-samples x v``; arrays of shape (nu, nv).

    Returns ``same, off, h_phi, k_phi`` as in :func:`weighted_point`.
    """
    col = [np.asarray(a, dtype=float)[:, None] for a in (f, fp, fpp, g, gp, gpp)]
    row = np.asarray(v, dtype=float)[None, :]
    out = weighted_point(*col, row, alpha, beta, eps, l1, l2, l3, l4)
    shape = (col[0].shape[0], row.shape[1])
    return tuple(np.broadcast_to(o, shape).copy() for o in out)


_weighted_point_jit = njit(_build_weighted_point(njit(shared_blocks)))


@njit
def _weighted_fields_loop(f, fp, fpp, g, gp, gpp, v, alpha, beta, eps, l1, l2, l3, l4):
    nu = f.shape[0]
    nv = v.shape[0]
    same = np.empty((nu, nv))
    off = np.empty((nu, nv))
    h_phi = np.empty((nu, nv))
    k_phi = np.empty((nu, nv))
    for i in range(nu):
        for j in range(nv):
            a, b, c, d = _weighted_point_jit(f[i], fp[i], fpp[i], g[i], gp[i], gpp[i], v[j],
                                             alpha, beta, eps, l1, l2, l3, l4)
            same[i, j] = a
            off[i, j] = b
            h_phi[i, j] = c
            k_phi[i, j] = d
    return same, off, h_phi, k_phi


def weighted_fields_numba(f, fp, fpp, g, gp, gpp, v, alpha, beta, eps, l1, l2, l3, l4):
    if not HAVE_NUMBA:  # pragma: no cover
        return weighted_fields_numpy(f, fp, fpp, g, gp, gpp, v, alpha, beta, eps, l1, l2, l3, l4)
    arrs = [np.ascontiguousarray(a, dtype=np.float64) for a in (f, fp, fpp, g, gp, gpp, v)]
    return _weighted_fields_loop(*arrs, float(alpha), float(beta), float(eps),
                                 float(l1), float(l2), float(l3), float(l4))


def weighted_fields(*args, backend=None):
    """Dispatch to the configured backend (see ``MINKROT_BACKEND``)."""
    b = backend or BACKEND
    if b == "numba":
        return weighted_fields_numba(*args)
    return weighted_fields_numpy(*args)


# --------------------------------------------------------------------------
# Meridian ODEs
# --------------------------------------------------------------------------

def meridian_rhs(code, eps, alpha, beta, p1, p2, u, y, yp):
    """``y''`` for the selected meridian ODE, NaN at a degenerate denominator.

    Minimal codes read ``p1, p2 = lambda, mu``; flat codes read ``p1 = delta``.
    The ODE is the second-order form ``y'' = (y'^2 - eps) A``.
    """
    a2 = alpha * alpha
    b2 = beta * beta
    if code == 0:
        den = a2 * u * u + eps * b2 * y * y
        if abs(den) <= DENOM_TOL:
            return np.nan
        A = (2.0 * (p1 * u * yp - p2 * y) * den + eps * (b2 * y + a2 * u * yp)) / den
    elif code == 1:
        den = b2 * u * u + eps * a2 * y * y
        if abs(den) <= DENOM_TOL:
            return np.nan
        A = (y * (a2 * eps + 2.0 * (a2 * p1 * y * y + b2 * eps * p1 * u * u))
             + u * (eps * b2 * (1.0 - 2.0 * p2 * u * u) - 2.0 * a2 * p2 * y * y) * yp) / den
    elif code == 2:
        d1 = eps * a2 * u * u + b2 * y * y
        d2 = b2 * y + a2 * u * yp
        if abs(d1) <= DENOM_TOL or abs(d2) <= DENOM_TOL:
            return np.nan
        P = a2 * u * u + eps * b2 * y * y
        c = y - u * yp
        A = (-2.0 * p1 * P * P * (yp * yp - eps) + a2 * b2 * c * c) / (d1 * d2)
    else:
        d1 = b2 * u * u + eps * a2 * y * y
        d2 = a2 * y + u * b2 * yp
        if abs(d1) <= DENOM_TOL or abs(d2) <= DENOM_TOL:
            return np.nan
        c = y - u * yp
        A = -(-2.0 * p1 * d1 * d1 * (yp * yp - eps) - eps * a2 * b2 * c * c) / (d1 * d2)
    return (yp * yp - eps) * A


def meridian_state_status(code, eps, alpha, beta, u, y, yp):
    """0 valid, 1 degenerate denominator / non-finite, 2 validity lost."""
    if not (np.isfinite(u) and np.isfinite(y) and np.isfinite(yp)):
        return 1
    a2 = alpha * alpha
    b2 = beta * beta
    f_is_u = code == 0 or code == 2
    if f_is_u:
        f, g = u, y
    else:
        f, g = y, u
    if eps < 0:
        if not (a2 * f * f - b2 * g * g < -VALIDITY_TOL):
            return 2
    else:
        if f_is_u:
            if not (abs(yp) > 1.0 + SLOPE_TOL):
                return 2
        else:
            if not (abs(yp) < 1.0 - SLOPE_TOL):
                return 2
        if not (a2 * f * f + b2 * g * g > VALIDITY_TOL):
            return 2
    return 0


def _build_rk4_loop(rhs, state_status):
    def rk4_meridian_loop(code, eps, alpha, beta, p1, p2, u0, y0, yp0, u_end, step,
                          max_halvings, out_u, out_y, out_yp):
        direction = 1.0 if u_end > u0 else -1.0
        h = abs(step)
        u = u0
        y = y0
        yp = yp0
        # Kahan compensation for the state; u is rebuilt as seg_u + k*h to avoid drift
        cy = 0.0
        cyp = 0.0
        seg_u = u0
        k = 0
        out_u[0] = u
        out_y[0] = y
        out_yp[0] = yp
        n = 1
        halvings = 0
        cap = out_u.shape[0]
        min_step = 1e-14 * max(1.0, abs(u0), abs(u_end))
        while True:
            remaining = (u_end - u) * direction
            if remaining <= 1e-15 * max(1.0, abs(u_end)):
                return n, 0
            last = h >= remaining
            hh = remaining if last else h
            dh = hh * direction
            k1y = yp
            k1p = rhs(code, eps, alpha, beta, p1, p2, u, y, yp)
            k2y = yp + 0.5 * dh * k1p
            k2p = rhs(code, eps, alpha, beta, p1, p2, u + 0.5 * dh, y + 0.5 * dh * k1y, k2y)
            k3y = yp + 0.5 * dh * k2p
            k3p = rhs(code, eps, alpha, beta, p1, p2, u + 0.5 * dh, y + 0.5 * dh * k2y, k3y)
            k4y = yp + dh * k3p
            k4p = rhs(code, eps, alpha, beta, p1, p2, u + dh, y + dh * k3y, k4y)
            dy = dh * (k1y + 2.0 * k2y + 2.0 * k3y + k4y) / 6.0 - cy
            dyp = dh * (k1p + 2.0 * k2p + 2.0 * k3p + k4p) / 6.0 - cyp
            y_new = y + dy
            yp_new = yp + dyp
            u_new = u_end if last else seg_u + (k + 1) * dh
            status = state_status(code, eps, alpha, beta, u_new, y_new, yp_new)
            if status == 0 and not np.isfinite(rhs(code, eps, alpha, beta, p1, p2,
                                                   u_new, y_new, yp_new)):
                status = 1
            if status != 0:
                if halvings >= max_halvings:
                    return n, status
                h = 0.5 * hh
                halvings += 1
                seg_u = u
                k = 0
                if h < min_step:
                    return n, 3
                continue
            if n >= cap:
                return n, 3
            cy = (y_new - y) - dy
            cyp = (yp_new - yp) - dyp
            u = u_new
            y = y_new
            yp = yp_new
            k += 1
            out_u[n] = u
            out_y[n] = y
            out_yp[n] = yp
            n += 1

    return rk4_meridian_loop


#: Interpreted RK4 loop. A step whose stages or endpoint are invalid is retried
#: at half size (at most ``max_halvings`` times per solve; the reduced step is
#: kept). Returns ``(n_samples, termination_code)`` indexing TERMINATIONS.
rk4_meridian_loop = _build_rk4_loop(meridian_rhs, meridian_state_status)
_rk4_jit = None


def _compiled_rk4():
    global _rk4_jit
    if _rk4_jit is None:
        import numba

        loop = _build_rk4_loop(numba.njit(meridian_rhs), numba.njit(meridian_state_status))
        _rk4_jit = numba.njit(loop)
    return _rk4_jit


def rk4_meridian(code, eps, alpha, beta, p1, p2, u0, y0, yp0, u_end, step,
                 max_halvings=20, backend=None):
    """Integrate a meridian ODE; returns ``(u, y, yp, termination)`` arrays + name."""
    b = backend or BACKEND
    n_cap = int(np.ceil(abs(u_end - u0) / abs(step))) + 2 * max_halvings + 8
    out_u = np.empty(n_cap)
    out_y = np.empty(n_cap)
    out_yp = np.empty(n_cap)
    args = (int(code), float(eps), float(alpha), float(beta), float(p1), float(p2),
            float(u0), float(y0), float(yp0), float(u_end), float(step), int(max_halvings),
            out_u, out_y, out_yp)
    if b == "numba" and HAVE_NUMBA:
        n, status = _compiled_rk4()(*args)
    else:
        n, status = rk4_meridian_loop(*args)
    return out_u[:n].copy(), out_y[:n].copy(), out_yp[:n].copy(), TERMINATIONS[status]
