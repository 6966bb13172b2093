import math

import numpy as np
import pytest

from minkrot import kernels
from minkrot._jit import HAVE_NUMBA
from minkrot.errors import InvalidCombination, InvalidInitialData, NoRealSolution
from minkrot.meridian import (HermiteProfile, OdeProblem, const_profile_from_flat,
                              const_profile_from_mean, flat_from_constant, mean_from_constant,
                              residual_at, solve_flat_meridian, solve_minimal_meridian)
from minkrot.surface import build_surface, validity_at
from minkrot.weighted import Density, SpecialDensity, weighted_gaussian_curvature, weighted_mean_curvature


def minimal_problem(step=1e-3, **kw):
    args = dict(kind="type1", alpha=1.0, beta=1.0, density=SpecialDensity(1, 1), axis="f_is_u",
                u0=0.0, y0=1.0, yp0=0.0, u_end=0.5, step=step)
    args.update(kw)
    return OdeProblem(**args)


def flat_problem(**kw):
    args = dict(kind="type1", alpha=1.0, beta=2.0, density=Density(1, -1, 1, 1), axis="f_is_u",
                u0=1.0, y0=2.0, yp0=2.0, u_end=2.0, step=1e-3)
    args.update(kw)
    return OdeProblem(**args)


# --------------------------------------------------------------------------
# constant profiles
# --------------------------------------------------------------------------

@pytest.mark.parametrize("kind,fixed,f,g", [
    ("type1", "f", "1.5", "3 + u^2"),
    ("type2", "f", "1.5", "sinh(u) + 3*u"),
    ("type1", "g", "cos(u)", "2"),
])
def test_forward_formulas_match_pipeline(kind, fixed, f, g):
    alpha, beta = 1.3, 0.9
    s = build_surface(kind, alpha, beta, f, g, (0.1, 0.5))
    c = float(f) if fixed == "f" else float(g)
    for lam, mu in ((1.0, 0.5), (-0.7, 2.0)):
        sd = SpecialDensity(lam, mu)
        for u in np.linspace(0.1, 0.5, 5):
            other = (s.g if fixed == "f" else s.f).jet(u).v
            lm = lam if fixed == "f" else mu
            assert abs(mean_from_constant(kind, fixed, c, alpha, beta, lm, other)) == pytest.approx(
                weighted_mean_curvature(s, sd, u, 0.0), rel=1e-12, abs=1e-12)
            assert flat_from_constant(kind, fixed, c, alpha, beta, sd.delta, other) == pytest.approx(
                weighted_gaussian_curvature(s, sd, u), rel=1e-12, abs=1e-12)


def test_mean_inversion_example():
    cands = const_profile_from_mean("type1", "f", 1.0, 1.0, 1.0, 1.0, 2.0)
    assert cands
    for c in cands:
        assert abs(abs(mean_from_constant("type1", "f", 1.0, 1.0, 1.0, 1.0, c.value)) - 2.0) <= 1e-9
    assert sorted(c.value for c in cands) == pytest.approx([-math.sqrt(1.5), math.sqrt(1.5)])
    assert all(c.timelike for c in cands)


def test_mean_inversion_through_pipeline():
    # a surface with f = k and g passing through the returned value has H_phi = H_target there
    for kind, fixed, c, lm, other in (("type1", "f", 1.0, 1.0, 2.0), ("type1", "g", 2.0, 0.3, 0.7),
                                      ("type2", "f", 0.8, -0.4, 0.5)):
        # target taken from a known timelike configuration so a real branch exists
        H = abs(mean_from_constant(kind, fixed, c, 1.2, 0.8, lm, other))
        cands = const_profile_from_mean(kind, fixed, c, 1.2, 0.8, lm, H)
        assert any(abs(abs(x.value) - other) <= 1e-9 for x in cands)
        for cand in const_profile_from_mean(kind, fixed, c, 1.2, 0.8, lm, H):
            if not cand.timelike:
                continue
            sd = SpecialDensity(lm, 0.0) if fixed == "f" else SpecialDensity(0.0, lm)
            if fixed == "f":
                slope = "3*u" if kind == "type2" else "u"
                s = build_surface(kind, 1.2, 0.8, repr(c), f"{cand.value!r} + {slope}", (0.0, 1e-3),
                                  check=False)
            else:
                s = build_surface(kind, 1.2, 0.8, f"{cand.value!r} + u", repr(c), (0.0, 1e-3),
                                  check=False)
            if validity_at(s, 0.0).passed:
                assert weighted_mean_curvature(s, sd, 0.0, 0.0) == pytest.approx(H, abs=1e-9)


def test_inversion_errors():
    with pytest.raises(InvalidCombination):
        const_profile_from_mean("type2", "g", 1.0, 1.0, 1.0, 1.0, 1.0)
    with pytest.raises(InvalidCombination):
        const_profile_from_flat("type2", "g", 1.0, 1.0, 1.0, 1.0, 1.0)
    with pytest.raises(NoRealSolution):
        const_profile_from_flat("type1", "f", 1.0, 1.0, 2.0, 1.0, -2.0)
    with pytest.raises(ValueError):
        const_profile_from_mean("type1", "f", 0.0, 1.0, 1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        const_profile_from_mean("type1", "f", 1.0, 1.0, 1.0, 1.0, -1.0)


def test_flat_inversion_example():
    cands = const_profile_from_flat("type1", "f", 1.0, 1.0, 2.0, 1.0, 2.0)
    for c in cands:
        assert flat_from_constant("type1", "f", 1.0, 1.0, 2.0, 1.0, c.value) == pytest.approx(2.0, abs=1e-9)
    timelike = sorted(c.value for c in cands if c.timelike)
    assert timelike == pytest.approx([-math.sqrt(0.5), math.sqrt(0.5)])
    assert [c.value for c in cands if not c.timelike] == [0.0]
    assert len({c.label for c in cands}) == len(cands)


def test_constant_target_gives_constant_profile():
    # the inversion depends on the target only, so constant H_phi (or K_phi) forces
    # a constant free profile; conversely a nonconstant profile makes them vary
    vals = {round(c.value, 12) for u in np.linspace(0, 1, 5)
            for c in const_profile_from_mean("type1", "f", 1.0, 1.0, 1.0, 1.0, 2.0)}
    assert len(vals) == 2
    s = build_surface("type1", 1.0, 1.0, "1", "2 + u", (0.0, 1.0))
    hs = [weighted_mean_curvature(s, SpecialDensity(1, 1), u, 0.0) for u in np.linspace(0, 1, 5)]
    ks = [weighted_gaussian_curvature(s, Density(1, 1, 1, 1), u) for u in np.linspace(0, 1, 5)]
    assert np.ptp(hs) > 1e-3 and np.ptp(ks) > 1e-3


# --------------------------------------------------------------------------
# ODEs
# --------------------------------------------------------------------------

def test_minimal_meridian_example():
    sol = solve_minimal_meridian(minimal_problem())
    assert sol.termination == "reached_end"
    assert abs(sol.y[-1] - math.sqrt(0.75)) <= 1e-6
    assert np.max(np.abs(sol.residuals)) <= 1e-6
    assert np.all(np.diff(sol.u) > 0) and np.all(np.isfinite(sol.residuals))
    assert np.max(np.abs(sol.y - np.sqrt(1 - sol.u ** 2))) <= 1e-9


def test_flat_meridian_example():
    sol = solve_flat_meridian(flat_problem())
    assert sol.termination == "reached_end"
    assert np.max(np.abs(sol.y - 2 * sol.u)) <= 1e-9
    assert np.max(np.abs(sol.residuals)) <= 1e-6


def test_initial_data_errors():
    with pytest.raises(InvalidInitialData) as info:
        solve_minimal_meridian(minimal_problem(kind="type2", yp0=0.0, density=SpecialDensity(1, 1)))
    assert info.value.validity
    with pytest.raises(InvalidInitialData) as info:
        # beta^2 y + alpha^2 u y' = 0 while the validity inequalities hold
        solve_flat_meridian(flat_problem(alpha=1.0, beta=1.0, yp0=-2.0))
    assert not info.value.validity
    with pytest.raises(TypeError):
        solve_minimal_meridian(minimal_problem(density=Density(1, 1, 1, 1)))


@pytest.mark.parametrize("kw", [dict(step=0.0), dict(u_end=0.0), dict(axis="x_is_u"),
                                dict(alpha=-1.0)])
def test_problem_validation(kw):
    with pytest.raises(ValueError):
        minimal_problem(**kw)


def test_rk4_order():
    exact = math.sqrt(0.75)
    ends = [solve_minimal_meridian(minimal_problem(step=h)).y[-1] for h in (1e-2, 5e-3, 2.5e-3)]
    err = [abs(e - exact) for e in ends]
    assert err[0] / err[1] >= 14
    assert err[1] / err[2] >= 14
    # successive changes shrink by about 16 as well
    assert abs(ends[0] - ends[1]) / abs(ends[1] - ends[2]) >= 14


def test_terminates_when_validity_is_lost():
    # the circle meridian hits alpha^2 u^2 = beta^2 y^2 at u = 1/sqrt(2)
    sol = solve_minimal_meridian(minimal_problem(u_end=1.0))
    # the A denominator is the same expression, so either guard may fire first
    assert sol.termination in ("validity_lost", "degenerate_denominator")
    assert sol.u[-1] < 1 / math.sqrt(2)
    assert np.all(np.isfinite(sol.residuals))


def test_backward_integration():
    sol = solve_minimal_meridian(minimal_problem(u_end=-0.5))
    assert np.all(np.diff(sol.u) < 0)
    assert abs(sol.y[-1] - math.sqrt(0.75)) <= 1e-6


@pytest.mark.skipif(not HAVE_NUMBA, reason="numba not installed")
def test_backends_agree():
    a = solve_minimal_meridian(minimal_problem(), backend="numpy")
    b = solve_minimal_meridian(minimal_problem(), backend="numba")
    assert np.array_equal(a.u, b.u)
    assert np.allclose(a.y, b.y, rtol=0, atol=1e-14)
    assert a.termination == b.termination


def test_samples_rebuild_into_valid_surfaces():
    sol = solve_minimal_meridian(minimal_problem())
    for i in range(0, len(sol.u), 50):
        s = sol.local_surface(i)
        assert validity_at(s, float(sol.u[i])).passed
        assert residual_at(sol, i) == pytest.approx(sol.residuals[i], abs=1e-12)
    sol = solve_flat_meridian(flat_problem())
    for i in (0, 500, len(sol.u) - 1):
        assert validity_at(sol.local_surface(i), float(sol.u[i])).passed
        assert abs(residual_at(sol, i)) <= 1e-6


def test_g_is_u_axis():
    # Type1 circle meridian with the roles of f and g swapped: f = sqrt(u^2 - 1)... use the
    # Example-2 family instead: g = u, f = sqrt(1 + u^2) is cosh/sinh reparametrized
    p = OdeProblem("type2", 3.0, 2.0, SpecialDensity(-1, -1), "g_is_u", 0.0, 1.0, 0.0, 0.8, 1e-3)
    sol = solve_minimal_meridian(p)
    assert sol.termination == "reached_end"
    assert np.max(np.abs(sol.y - np.sqrt(1 + sol.u ** 2))) <= 1e-8
    assert np.max(np.abs(sol.residuals)) <= 1e-6


def test_csv_output(tmp_path):
    sol = solve_flat_meridian(flat_problem(u_end=1.01))
    path = tmp_path / "sol.csv"
    sol.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "u,y,yp,residual"
    assert len(lines) == len(sol.u) + 1
    u, y, yp, r = (float(x) for x in lines[-1].split(","))
    assert (u, y, yp) == (sol.u[-1], sol.y[-1], sol.yp[-1])
    assert len(sol.samples) == len(sol.u)


def test_hermite_profile_reproduces_quintic():
    c = np.array([0.3, -1.0, 0.5, 2.0, -0.7, 0.25])
    poly = np.polynomial.Polynomial(c)
    us = np.array([0.1, 0.3, 0.5])
    hp = HermiteProfile(us, poly(us), poly.deriv()(us))
    for u in (0.15, 0.3, 0.42):
        j = hp.jet(u)
        assert (j.v, j.d1, j.d2) == pytest.approx((poly(u), poly.deriv()(u), poly.deriv(2)(u)), abs=1e-11)


# --------------------------------------------------------------------------
# right-hand sides
# --------------------------------------------------------------------------

CODES = [(kernels.MINIMAL_F_IS_U, "f_is_u", "minimal"), (kernels.MINIMAL_G_IS_U, "g_is_u", "minimal"),
         (kernels.FLAT_F_IS_U, "f_is_u", "flat"), (kernels.FLAT_G_IS_U, "g_is_u", "flat")]


def _random_states(rng, code, eps, n):
    out = []
    while len(out) < n:
        alpha, beta = rng.uniform(0.5, 2.5, 2)
        u, y = rng.uniform(0.2, 2.0), rng.uniform(0.2, 2.0)
        f_is_u = code in (kernels.MINIMAL_F_IS_U, kernels.FLAT_F_IS_U)
        if eps > 0:
            yp = rng.uniform(1.2, 3.0) * rng.choice([-1, 1]) if f_is_u else rng.uniform(-0.8, 0.8)
        else:
            yp = rng.uniform(-2, 2)
        if kernels.meridian_state_status(code, eps, alpha, beta, u, y, yp) != 0:
            continue
        p1, p2 = rng.uniform(-2, 2, 2)
        ypp = kernels.meridian_rhs(code, eps, alpha, beta, p1, p2, u, y, yp)
        # stay away from near-singular states where the arcs are stiff
        if not np.isfinite(ypp) or abs(ypp) > 50:
            continue
        out.append((alpha, beta, p1, p2, u, y, yp, ypp))
    return out


@pytest.mark.parametrize("code,axis,which", CODES)
@pytest.mark.parametrize("eps", [-1.0, 1.0])
def test_rhs_zeroes_the_residual(code, axis, which, eps):
    """y'' from the right-hand side makes H_phi (or K_phi) vanish identically."""
    rng = np.random.default_rng(100 + code)
    for alpha, beta, p1, p2, u, y, yp, ypp in _random_states(rng, code, eps, 25):
        ujet = (u, 1.0, 0.0)
        yjet = (y, yp, ypp)
        f, g = (ujet, yjet) if axis == "f_is_u" else (yjet, ujet)
        dens = (p1, p1, p2, -p2) if which == "minimal" else (p1, 0.0, 0.0, 0.0)
        same, _, _, k_phi = kernels.weighted_point(*f, *g, 0.0, alpha, beta, eps, *dens)
        if which == "minimal":
            fp_, gp_ = f[1], g[1]
            Q = -eps * fp_ ** 2 + gp_ ** 2
            P = (alpha * f[0]) ** 2 + eps * (beta * g[0]) ** 2
            assert abs(same * 2 * P * Q ** 1.5) <= 1e-9 * max(1.0, abs(ypp))
        else:
            assert abs(k_phi) <= 1e-9 * max(1.0, abs(ypp))


@pytest.mark.parametrize("code,axis,which", CODES)
@pytest.mark.parametrize("eps", [-1.0, 1.0])
def test_second_order_form_matches_first_integral_form(code, axis, which, eps):
    """(arctan y')' = A for eps = -1 and (log|(1 - y')/(1 + y')|)' = 2A for eps = +1."""
    rng = np.random.default_rng(200 + code)
    for alpha, beta, p1, p2, u, y, yp, ypp in _random_states(rng, code, eps, 10):
        A = ypp / (yp * yp - eps)
        # A varies quickly near its singular set; 1e-5 keeps the h^4 term below 1e-9
        h = 1e-5
        ends = {}
        for k in (-2, -1, 1, 2):
            # short accurately integrated arcs on both sides
            r = kernels.rk4_meridian(code, eps, alpha, beta, p1, p2, u, y, yp, u + k * h, h / 20,
                                     backend="numpy")
            if r[3] != "reached_end":
                break
            ends[k] = r[2][-1]
        if len(ends) < 4:
            continue
        if eps < 0:
            F = math.atan
            target = A
        else:
            F = lambda q: math.log(abs((1 - q) / (1 + q)))
            target = 2 * A
        deriv = (-F(ends[2]) + 8 * F(ends[1]) - 8 * F(ends[-1]) + F(ends[-2])) / (12 * h)
        assert abs(deriv - target) <= 1e-7 * max(1.0, abs(target))
