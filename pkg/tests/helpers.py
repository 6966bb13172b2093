"""Shared fixtures-by-import: random valid configurations from the example profile families."""

import math

import numpy as np

from minkrot import kernels
from minkrot.surface import build_surface, validity_at

# (kind, f template, g template, u interval); {a} and {c} are filled per draw
FAMILIES = [
    ("type1", "{a}*sin(u)", "{a}*cos(u)", (-0.6, 0.6)),
    ("type1", "{a}*tan(u)", "{a}*sec(u)", (-1.1, 1.1)),
    ("type1", "{a}*u^3", "{c}*{a}*u^3", (0.25, 1.5)),
    ("type2", "{a}*cosh(u)", "{a}*sinh(u)", (-1.0, 1.0)),
    ("type2", "{a}*sec(u)", "{a}*tan(u)", (-1.1, 1.1)),
    ("type2", "{a}*exp(2*u)", "{c}*{a}*exp(2*u)", (-1.0, 1.0)),
]

MARGIN = 0.05


def _well_conditioned(s, u):
    rep = validity_at(s, u)
    if not rep.passed or abs(rep.first) < MARGIN or abs(rep.second) < MARGIN:
        return False
    fj, gj = s.jets(u)
    P, Q, _, _ = kernels.shared_blocks(fj.v, fj.d1, fj.d2, gj.v, gj.d1, gj.d2,
                                       s.alpha, s.beta, s.epsilon)
    return abs(P) > MARGIN and Q > MARGIN


def random_configs(n, seed=0, v_max=1.5):
    """``n`` tuples ``(surface, u, v)`` with comfortable validity margins."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        kind, ft, gt, (lo, hi) = FAMILIES[rng.integers(len(FAMILIES))]
        alpha = float(rng.uniform(0.5, 3.0))
        beta = float(rng.uniform(0.5, 3.0))
        a = float(rng.uniform(0.5, 2.0))
        c = float(rng.uniform(1.2, 3.0))
        # linear-dependent Type1 profiles need beta*c > alpha
        if kind == "type1" and "u^3" in ft and beta * c <= alpha * 1.05:
            continue
        ft_, gt_ = ft.format(a=repr(a), c=repr(c)), gt.format(a=repr(a), c=repr(c))
        u = float(rng.uniform(lo, hi))
        try:
            s = build_surface(kind, alpha, beta, ft_, gt_, (u - 0.01, u + 0.01))
        except Exception:
            continue
        if not _well_conditioned(s, u):
            continue
        out.append((s, u, float(rng.uniform(0.0, v_max))))
    return out


def random_density(rng):
    while True:
        lam = rng.uniform(-2.0, 2.0, 4)
        if np.any(lam != 0):
            return tuple(float(x) for x in lam)


def rel(a, b):
    return abs(a - b) / max(1.0, abs(b))


PI = math.pi
