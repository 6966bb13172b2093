"""The eight reference surfaces and their closed-form curvature answers.

:func:`verify_examples` evaluates each closed form against the library on a
fixed grid and reports the worst deviation. Deviations are absolute errors
divided by ``max(1, |expected|)``. Library functions are reached through
their modules so that tests can spy on which ones were exercised.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Tuple

import numpy as np

from . import curvature, weighted
from .lorentz import minkowski_dot
from .surface import Surface, build_surface, normal_frame, position
from .weighted import Density, SpecialDensity

# fixed parameter sets keep the report deterministic
SPECIAL = [(1.0, 1.0), (0.3, -0.2), (-1.5, 0.7), (2.0, -1.25), (-0.8, -1.9)]
GENERAL = [(0.3, -0.7, 1.1, 0.4), (1.0, 1.0, 1.0, 3.0), (-0.5, 0.25, 1.5, -0.8),
           (2.0, 1.0, 1.0, 4.0), (-1.2, 0.6, -0.3, 0.9)]
FORMULA_TOL = 1e-9
ORACLE_TOL = 1e-5
FLAT_TOL = 1e-8


@dataclass(frozen=True)
class ExampleSurface:
    number: int
    title: str
    kind: str
    alpha: float
    beta: float
    f: str
    g: str
    u_range: Tuple[float, float]

    def build(self) -> Surface:
        return build_surface(self.kind, self.alpha, self.beta, self.f, self.g, self.u_range)


@dataclass
class Check:
    name: str
    deviation: float
    threshold: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.deviation) and self.deviation <= self.threshold)


@dataclass
class ExampleReport:
    number: int
    title: str
    checks: List[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def max_deviation(self) -> float:
        return max(c.deviation for c in self.checks)

    @property
    def worst(self) -> Check:
        return max(self.checks, key=lambda c: c.deviation / c.threshold)

    def as_dict(self) -> dict:
        return {
            "example": self.number,
            "title": self.title,
            "passed": self.passed,
            "max_deviation": self.max_deviation,
            "checks": [{"name": c.name, "deviation": c.deviation, "threshold": c.threshold,
                        "passed": c.passed} for c in self.checks],
        }


EXAMPLES = [
    ExampleSurface(1, "first family, sin/cos, minimal for lambda=mu=1", "type1", 1.0, 1.0,
                   "sin(u)", "cos(u)", (-0.7, 0.7)),
    ExampleSurface(2, "second family, cosh/sinh, minimal for (-1,-1,-1,1)", "type2", 3.0, 2.0,
                   "cosh(u)", "sinh(u)", (-1.0, 1.0)),
    ExampleSurface(3, "second family, sec/tan, general speeds", "type2", 2.5, 1.5,
                   "sec(u)", "tan(u)", (-1.0, 1.0)),
    ExampleSurface(4, "first family, tan/sec, equal speeds", "type1", 3.0, 3.0,
                   "tan(u)", "sec(u)", (-1.2, 1.2)),
    ExampleSurface(5, "first family, u^3 / 2u^3, flat when delta=0", "type1", 1.0, 2.0,
                   "u^3", "2*u^3", (0.2, 1.5)),
    ExampleSurface(6, "second family, exp(2u) / 3exp(2u), flat when delta=0", "type2", 3.0, 2.0,
                   "exp(2*u)", "3*exp(2*u)", (-1.0, 1.0)),
    ExampleSurface(7, "first family, tan/sec, unequal speeds", "type1", 3.0, 2.0,
                   "tan(u)", "sec(u)", (-0.7, 0.7)),
    ExampleSurface(8, "second family, sec/tan, equal speeds", "type2", 3.0, 3.0,
                   "sec(u)", "tan(u)", (-1.2, 1.2)),
]


# --------------------------------------------------------------------------
# Closed-form answers
# --------------------------------------------------------------------------

def h_ex1_special(u, lam, mu):
    return abs(-1 + lam * math.sin(u) ** 2 + mu * math.cos(u) ** 2)


def h_ex1_general(u, v, d):
    l1, l2, l3, l4 = d
    c2 = math.cos(2 * u)
    a = ((l1 + l2 + (l1 - l2) * math.cos(2 * v)) * math.sin(u) ** 2 - 2
         + (l3 - l4 + (l3 + l4) * math.cosh(2 * v)) * math.cos(u) ** 2) ** 2 * c2 ** 2
    b = (math.sin(2 * u) * math.sin(4 * u) / 8
         * ((l1 - l2) * math.sin(2 * v) - (l3 + l4) * math.sinh(2 * v)) ** 2)
    return 0.5 * math.sqrt((a + b) / c2 ** 2)


def h_ex2_special(u, lam, mu):
    return abs(1 + lam * math.cosh(u) ** 2 - mu * math.sinh(u) ** 2)


def h_ex2_general(u, v, d):
    # the sinh(u)^2 factor multiplies the whole (l4 - l3 + (l3 + l4) cosh 4v) group
    l1, l2, l3, l4 = d
    ch, sh = math.cosh(u), math.sinh(u)
    a = (2 + (l1 + l2 + (l1 - l2) * math.cos(6 * v)) * ch ** 2
         + (-l3 + l4 + (l3 + l4) * math.cosh(4 * v)) * sh ** 2) ** 2
    b = ((2 * (l1 - l2) * math.sin(6 * v) + 3 * (l3 + l4) * math.sinh(4 * v)) ** 2
         * ch ** 2 * sh ** 2 / (9 * ch ** 2 + 4 * sh ** 2))
    return 0.5 * math.sqrt(a + b)


def h_sec_tan(u, v, d, al, be):
    l1, l2, l3, l4 = d
    t, se = math.tan(u), 1 / math.cos(u)
    twist = be * (l1 - l2) * math.sin(2 * al * v) + al * (l3 + l4) * math.sinh(2 * be * v)
    a = twist ** 2 * math.sin(u) ** 2 / (math.cos(u) ** 4 * (al ** 2 * se ** 2 + be ** 2 * t ** 2))
    b = ((-l3 + l4) * t ** 2 + (l1 + l2 + (l1 - l2) * math.cos(2 * al * v)) * se ** 2
         + (l3 + l4) * t ** 2 * math.cosh(2 * be * v) + 2) ** 2
    return 0.5 * math.sqrt(a + b)


def k_sec_tan(u, delta, al, be):
    w = 2 * al ** 2 + be ** 2 * (1 - math.cos(2 * u))
    return (4 * (al ** 2 + be ** 2) * (al ** 2 + be ** 2 * math.sin(u) ** 4) - 2 * delta * w ** 2) / w ** 2


def h_tan_sec_equal(u, lam, mu):
    c = math.cos
    num = 7 * lam - 12 * mu + 4 * (mu - 2 * (lam + 1)) * c(2 * u) + lam * c(4 * u) + 8
    return abs(num / c(u)) / (2 * math.sqrt(2 * (3 - c(2 * u)) ** 3))


def k_tan_sec(u, delta, al, be):
    t, se = math.tan(u), 1 / math.cos(u)
    return ((al ** 2 - be ** 2) * (al ** 2 * t ** 4 + be ** 2 * se ** 4)
            / ((t * t + se * se) ** 2 * (be ** 2 * se ** 2 - al ** 2 * t ** 2) ** 2) - 2 * delta)


def h_sec_tan_equal(u, lam, mu):
    return abs((mu + 1) * math.cos(2 * u) + 2 * lam - mu + 1) / (2 * math.cos(u) ** 2)


def k_sec_tan_equal(u, lam, mu):
    s = lam + mu
    c2, c4 = math.cos(2 * u), math.cos(4 * u)
    return (4 * (6 * s - 1) * c2 + (1 - 2 * s) * c4 - 38 * s + 11) / (c2 - 3) ** 2


# --------------------------------------------------------------------------
# Check helpers
# --------------------------------------------------------------------------

def _dev(got, want) -> float:
    return abs(got - want) / max(1.0, abs(want))


def _grid(ex: ExampleSurface, nu=21):
    lo, hi = ex.u_range
    return np.linspace(lo, hi, nu)


V_SPECIAL = np.linspace(0.0, 2 * math.pi, 5, endpoint=False)
V_GENERAL = np.linspace(0.0, 1.0, 5)


def _max(items) -> float:
    return float(max(items))


def _special_mean_check(s, ex, formula, name) -> Check:
    worst = []
    for lam, mu in SPECIAL:
        sd = SpecialDensity(lam, mu)
        for u in _grid(ex):
            want = formula(u, lam, mu)
            worst.append(_dev(weighted.weighted_mean_curvature_special(s, sd, u), want))
            for v in V_GENERAL[:2]:
                worst.append(_dev(weighted.weighted_mean_curvature(s, sd, u, v), want))
    return Check(name, _max(worst), FORMULA_TOL)


def _general_mean_check(s, ex, formula, name) -> Check:
    worst = []
    for d in GENERAL:
        dens = Density(*d)
        for u in _grid(ex, 11):
            for v in V_GENERAL:
                want = formula(u, v, d)
                worst.append(_dev(weighted.weighted_mean_curvature_closed(s, dens, u, v), want))
                worst.append(_dev(weighted.weighted_mean_curvature(s, dens, u, v), want))
    return Check(name, _max(worst), FORMULA_TOL)


def _gauss_check(s, ex, formula, name) -> Check:
    """``formula(u, dens)`` gives the expected ``K_phi`` for a general density."""
    worst = []
    for d in GENERAL:
        dens = Density(*d)
        for u in _grid(ex):
            want = formula(u, dens)
            worst.append(_dev(weighted.weighted_gaussian_curvature(s, dens, u), want))
            worst.append(_dev(weighted.weighted_gaussian_curvature_closed(s, dens, u), want))
    return Check(name, _max(worst), FORMULA_TOL)


def _minimal_checks(s, ex, dens, sd) -> List[Check]:
    us = _grid(ex, 41)
    h_closed = weighted.weighted_mean_curvature_closed(s, dens, us[:, None], V_SPECIAL[None, :])
    resid = [abs(weighted.minimal_residual(s, sd, u)) for u in us]
    # the definition path pairs coordinates growing like cosh(beta v); keep v moderate
    comps = [weighted.weighted_mean_curvature(s, dens, u, v) for u in us[::4] for v in V_GENERAL]
    uo = us[2:-2:4]
    h_oracle = weighted.weighted_mean_oracle(s, dens, uo[:, None], V_SPECIAL[None, :])
    return [Check("H_phi=0 (closed form)", float(np.max(h_closed)), FORMULA_TOL),
            Check("H_phi=0 (components)", _max(comps), FORMULA_TOL),
            Check("minimal residual", _max(resid), FORMULA_TOL),
            Check("H_phi=0 (finite-difference oracle)", float(np.max(h_oracle)), ORACLE_TOL)]


def _oracle_checks(s, ex) -> List[Check]:
    us = _grid(ex, 9)[1:-1]
    kd, hd = [], []
    for u in us:
        k = curvature.gaussian_curvature(s, u)
        h = max(abs(x) for x in curvature.mean_curvatures(s, u))
        for v in (0.1, 0.4):
            o = curvature.second_form_oracle(s, u, v, 1e-4)
            kd.append(abs(o.K_oracle - k) / (1 + abs(k)))
            hd.append(abs(o.H_oracle - h) / (1 + abs(h)))
    return [Check("K vs oracle", _max(kd), ORACLE_TOL),
            Check("|H| vs oracle", _max(hd), ORACLE_TOL)]


def _unit_mean_check(s, ex) -> Check:
    worst = []
    for u in _grid(ex):
        h1, h2 = curvature.mean_curvatures(s, u)
        worst.append(abs(math.hypot(h1, h2) - 1.0))
        for v in (0.0, 0.7):
            hv = curvature.mean_curvature_vector(s, u, v)
            worst.append(abs(math.sqrt(abs(minkowski_dot(hv, hv))) - 1.0))
    return Check("unweighted |H| = 1", _max(worst), FORMULA_TOL)


def _flat_checks(s, ex) -> List[Check]:
    worst = []
    for d in GENERAL:
        dens = Density(*d)
        for u in _grid(ex):
            worst.append(_dev(weighted.weighted_gaussian_curvature(s, dens, u), -2 * dens.delta))
            worst.append(_dev(weighted.flat_residual(s, dens, u, scaled=True), -2 * dens.delta))
    flat = [abs(weighted.weighted_gaussian_curvature(s, Density(*d), u))
            for d in GENERAL if Density(*d).delta == 0 for u in _grid(ex, 41)]
    return [Check("K_phi = -2 delta", _max(worst), FORMULA_TOL),
            Check("K_phi = 0 when delta=0", _max(flat), FLAT_TOL)]


def _phi_check(s, ex, dens) -> Check:
    # frame-based derivative term against the expanded closed components
    worst = []
    for u in _grid(ex, 7):
        for v in V_GENERAL:
            a = weighted.weighted_mean_components(s, dens, u, v)
            b = weighted.weighted_mean_components_closed(s, dens, u, v)
            worst.extend(abs(x - y) / max(1.0, abs(y)) for x, y in zip(a, b))
    return Check("components: definition vs expanded", _max(worst), FORMULA_TOL)


def _phi_derivative_check(s, ex, dens) -> Check:
    # a central difference is exact for the quadratic phi, for any step
    worst = []
    for u in _grid(ex, 7):
        for v in V_GENERAL:
            p = position(s, u, v)
            for n in normal_frame(s, u, v):
                want = (dens.phi(p + n) - dens.phi(p - n)) / 2.0
                got = weighted.phi_directional_derivative(dens, p, n)
                size = np.linalg.norm(p.as_array()) + np.linalg.norm(n.as_array())
                worst.append(abs(got - want) / max(1.0, size * size))
    return Check("dphi/dn vs central difference", _max(worst), FORMULA_TOL)


# --------------------------------------------------------------------------
# Per-example drivers
# --------------------------------------------------------------------------

def _ex1(ex, s):
    return ([_special_mean_check(s, ex, h_ex1_special, "H_phi vs special closed form"),
             _general_mean_check(s, ex, h_ex1_general, "H_phi vs general closed form"),
             _unit_mean_check(s, ex)]
            + _minimal_checks(s, ex, SpecialDensity(1.0, 1.0), SpecialDensity(1.0, 1.0))
            + _oracle_checks(s, ex))


def _ex2(ex, s):
    return ([_special_mean_check(s, ex, h_ex2_special, "H_phi vs special closed form"),
             _general_mean_check(s, ex, h_ex2_general, "H_phi vs general closed form"),
             _unit_mean_check(s, ex),
             _phi_check(s, ex, Density(*GENERAL[0])),
             _phi_derivative_check(s, ex, Density(*GENERAL[0]))]
            + _minimal_checks(s, ex, Density(-1.0, -1.0, -1.0, 1.0), SpecialDensity(-1.0, -1.0))
            + _oracle_checks(s, ex))


def _ex3(ex, s):
    a, b = ex.alpha, ex.beta
    return [_general_mean_check(s, ex, lambda u, v, d: h_sec_tan(u, v, d, a, b),
                                "H_phi vs general closed form"),
            _gauss_check(s, ex, lambda u, dens: k_sec_tan(u, dens.delta, a, b),
                         "K_phi vs closed form")] + _oracle_checks(s, ex)


def _ex4(ex, s):
    worst = [_dev(weighted.weighted_gaussian_curvature(s, SpecialDensity(lam, mu), u),
                  -4 * (lam + mu)) for lam, mu in SPECIAL for u in _grid(ex)]
    return [_special_mean_check(s, ex, h_tan_sec_equal, "H_phi vs closed form"),
            Check("K_phi = -4(lambda+mu)", _max(worst), FORMULA_TOL),
            _phi_check(s, ex, Density(*GENERAL[2]))] + _oracle_checks(s, ex)


def _ex5(ex, s):
    return _flat_checks(s, ex) + _oracle_checks(s, ex)


def _ex6(ex, s):
    return _flat_checks(s, ex) + _oracle_checks(s, ex)


def _ex7(ex, s):
    a, b = ex.alpha, ex.beta
    return [_gauss_check(s, ex, lambda u, dens: k_tan_sec(u, dens.delta, a, b),
                         "K_phi vs closed form")] + _oracle_checks(s, ex)


def _ex8(ex, s):
    worst = [_dev(weighted.weighted_gaussian_curvature(s, SpecialDensity(lam, mu), u),
                  k_sec_tan_equal(u, lam, mu)) for lam, mu in SPECIAL for u in _grid(ex)]
    return [_special_mean_check(s, ex, h_sec_tan_equal, "H_phi vs closed form"),
            Check("K_phi vs closed form", _max(worst), FORMULA_TOL)] + _oracle_checks(s, ex)


_DRIVERS: Dict[int, Callable] = {1: _ex1, 2: _ex2, 3: _ex3, 4: _ex4,
                                 5: _ex5, 6: _ex6, 7: _ex7, 8: _ex8}


def example(number: int) -> ExampleSurface:
    return EXAMPLES[number - 1]


def verify_example(number: int) -> ExampleReport:
    ex = example(number)
    s = ex.build()
    return ExampleReport(ex.number, ex.title, _DRIVERS[number](ex, s))


def verify_examples() -> List[ExampleReport]:
    return [verify_example(ex.number) for ex in EXAMPLES]
