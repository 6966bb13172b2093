import math

import numpy as np
import pytest

from helpers import random_configs, random_density, rel
from minkrot import curvature, kernels
from minkrot._jit import HAVE_NUMBA
from minkrot.lorentz import Vec4
from minkrot.surface import build_surface, normal_frame, position
from minkrot.weighted import (Density, SpecialDensity, flat_residual, minimal_residual,
                              phi_directional_derivative, weighted_fields,
                              weighted_gaussian_curvature, weighted_gaussian_curvature_closed,
                              weighted_mean_components, weighted_mean_components_closed,
                              weighted_mean_curvature, weighted_mean_curvature_closed,
                              weighted_mean_curvature_special, weighted_mean_oracle)

V = np.linspace(0, 2 * math.pi, 7, endpoint=False)


@pytest.fixture
def ex1():
    return build_surface("type1", 1, 1, "sin(u)", "cos(u)", (-0.7, 0.7))


@pytest.fixture
def ex2():
    return build_surface("type2", 3, 2, "cosh(u)", "sinh(u)", (-1, 1))


def test_density_validation():
    with pytest.raises(ValueError):
        Density(0, 0, 0, 0)
    with pytest.raises(ValueError):
        Density(1, math.nan, 0, 0)
    with pytest.raises(ValueError):
        SpecialDensity(0, 0)
    d = Density(1, 2, 3, 4)
    assert d.delta == 2.0 and d.general() is d
    sd = SpecialDensity(0.5, -2)
    assert sd.general().as_tuple() == (0.5, 0.5, -2.0, 2.0)
    assert sd.delta == sd.general().delta == -3.0
    assert d.phi(Vec4(1, 1, 1, 1)) == 10.0


def test_phi_derivative_examples(ex1):
    assert phi_directional_derivative(Density(1, 1, 1, 1), Vec4(1, 0, 0, 0), Vec4(1, 0, 0, 0)) == 2
    assert phi_directional_derivative(Density(0, 0, 0, 1), Vec4(0, 0, 0, 2), Vec4(0, 0, 0, 1)) == 4
    for u in (-0.5, 0.0, 0.3):
        p = position(ex1, u, 0.0)
        _, n2 = normal_frame(ex1, u, 0.0)
        assert phi_directional_derivative(Density(0.3, -1, 2, 0.7), p, n2) == 0.0


def test_weighted_mean_examples(ex1, ex2):
    s19 = build_surface("type2", 2, 2, "sec(u)", "tan(u)", (-1, 1))
    for v in V:
        assert weighted_mean_curvature(ex1, SpecialDensity(2, 3), 0.0, v) == pytest.approx(2.0, abs=1e-12)
    assert weighted_mean_curvature(ex2, SpecialDensity(1, 2), 0.0, 0.0) == pytest.approx(2.0, abs=1e-12)
    for lam, mu in ((0.3, -0.2), (-2.5, 1.0), (1.0, 4.0)):
        got = weighted_mean_curvature(s19, SpecialDensity(lam, mu), 0.0, 0.4)
        assert got == pytest.approx(abs(lam + 1), abs=1e-12)


def test_minimal_densities(ex1, ex2):
    for u in np.linspace(-0.65, 0.65, 9):
        for v in V:
            assert weighted_mean_curvature_closed(ex1, SpecialDensity(1, 1), u, v) <= 1e-12
        assert weighted_mean_curvature(ex1, SpecialDensity(1, 1), u, 0.8) <= 1e-12
    for u in np.linspace(-0.9, 0.9, 9):
        for v in V:
            assert weighted_mean_curvature_closed(ex2, Density(-1, -1, -1, 1), u, v) <= 1e-12
        h1, h2 = weighted_mean_components(ex2, Density(-1, -1, -1, 1), u, 0.6)
        assert abs(h1) <= 1e-12 and abs(h2) <= 1e-12


def test_off_component_zero_at_v0(ex1):
    d = Density(0.3, -0.7, 1.1, 0.4)
    for u in (-0.4, 0.2):
        assert weighted_mean_components(ex1, d, u, 0.0)[1] == 0.0
        assert abs(weighted_mean_components_closed(ex1, d, u, 0.0)[1]) == 0.0


def test_weighted_gaussian_examples(ex1):
    s7 = build_surface("type1", 1, 2, "u^3", "2*u^3", (0.2, 1.5))
    s10 = build_surface("type2", 3, 2, "exp(2*u)", "3*exp(2*u)", (-1, 1))
    s13 = build_surface("type1", 2, 2, "tan(u)", "sec(u)", (-1.2, 1.2))
    for u in np.linspace(0.2, 1.5, 6):
        assert abs(weighted_gaussian_curvature(s7, Density(1, 1, 1, 3), u)) <= 1e-10
    for u in np.linspace(-1, 1, 6):
        assert abs(weighted_gaussian_curvature(s10, Density(2, 1, 1, 4), u)) <= 1e-10
        assert weighted_gaussian_curvature(s13, SpecialDensity(0.3, -0.2), u) == pytest.approx(-0.4, abs=1e-10)
    assert weighted_gaussian_curvature(ex1, Density(1, 1, 1, 1), 0.0) == pytest.approx(-2.0)


def test_residual_examples(ex1, ex2):
    s7 = build_surface("type1", 1, 2, "u^3", "2*u^3", (0.2, 1.5))
    s10 = build_surface("type2", 3, 2, "exp(2*u)", "3*exp(2*u)", (-1, 1))
    assert abs(minimal_residual(ex1, SpecialDensity(1, 1), 0.3)) <= 1e-12
    assert abs(minimal_residual(ex1, SpecialDensity(2, 3), 0.0)) > 0.1
    assert abs(minimal_residual(ex2, SpecialDensity(-1, -1), 0.5)) <= 1e-12
    assert abs(flat_residual(s7, Density(1, 1, 1, 3), 0.8, scaled=True)) <= 1e-9
    assert abs(flat_residual(s10, Density(2, 1, 1, 4), 0.3, scaled=True)) <= 1e-9
    assert abs(flat_residual(ex1, Density(1, 1, 1, 1), 0.0)) > 0.1


def test_minimal_residual_is_scaled_component(ex1, ex2):
    # residual = 2 P Q^(3/2) (H_i)_phi, so zeros coincide
    rng = np.random.default_rng(5)
    for s, lo, hi in ((ex1, -0.65, 0.65), (ex2, -0.95, 0.95)):
        for _ in range(20):
            sd = SpecialDensity(*rng.uniform(-2, 2, 2))
            u = float(rng.uniform(lo, hi))
            fj, gj = s.jets(u)
            P, Q, _, _ = kernels.shared_blocks(fj.v, fj.d1, fj.d2, gj.v, gj.d1, gj.d2,
                                               s.alpha, s.beta, s.epsilon)
            comp = weighted_mean_components(s, sd, u, 0.0)[curvature.own_normal_index(s)]
            assert rel(minimal_residual(s, sd, u), 2 * P * Q ** 1.5 * comp) <= 1e-10


def test_minimal_iff_zero_mean(ex1, ex2):
    us1, us2 = np.linspace(-0.65, 0.65, 15), np.linspace(-0.95, 0.95, 15)
    for s, us, sd, d in ((ex1, us1, SpecialDensity(1, 1), SpecialDensity(1, 1)),
                         (ex2, us2, SpecialDensity(-1, -1), Density(-1, -1, -1, 1))):
        assert all(abs(minimal_residual(s, sd, u)) <= 1e-12 for u in us)
        assert all(weighted_mean_curvature(s, d, u, v) <= 1e-9 for u in us for v in V[:3])
    # and a non-minimal density fails both at the same time
    sd = SpecialDensity(2, 3)
    assert max(abs(minimal_residual(ex1, sd, u)) for u in us1) > 1e-3
    assert max(weighted_mean_curvature(ex1, sd, u, 0.2) for u in us1) > 1e-3


def test_identity_suite_random():
    rng = np.random.default_rng(11)
    for s, u, v in random_configs(100, seed=12):
        d = Density(*random_density(rng))
        K = curvature.gaussian_curvature(s, u)
        k_def = weighted_gaussian_curvature(s, d, u)
        assert rel(weighted_gaussian_curvature_closed(s, d, u), k_def) <= 1e-10
        assert rel(flat_residual(s, d, u, scaled=True), K - 2 * d.delta) <= 1e-10
        # definition (H_j - dphi/dn_j / 2) vs expanded components
        a = weighted_mean_components(s, d, u, v)
        b = weighted_mean_components_closed(s, d, u, v)
        scale = math.cosh(s.beta * v) ** 2
        assert all(abs(x - y) <= 1e-12 * scale * max(1, abs(y)) for x, y in zip(a, b))
        # general closed norm vs components
        assert rel(weighted_mean_curvature_closed(s, d, u, v), math.hypot(*b)) <= 1e-10
        # specialization
        sd = SpecialDensity(*rng.uniform(-2, 2, 2))
        assert rel(weighted_mean_curvature_closed(s, sd, u, v),
                   weighted_mean_curvature_special(s, sd, u)) <= 1e-10


def test_linear_dependence_flat():
    rng = np.random.default_rng(21)
    for _ in range(20):
        c = float(rng.uniform(2.2, 4.0))
        s7 = build_surface("type1", 1, 2, "u^3", f"{c!r}*u^3", (0.2, 1.5))
        c2 = float(rng.uniform(1.2, 4.0))
        s10 = build_surface("type2", 3, 2, "exp(2*u)", f"{c2!r}*exp(2*u)", (-1, 1))
        d = Density(1.0, 2.0, 0.5, 3.5)
        for u in np.linspace(0.2, 1.5, 5):
            assert abs(flat_residual(s7, d, u, scaled=True)) <= 1e-9
        for u in np.linspace(-1, 1, 5):
            assert abs(flat_residual(s10, d, u, scaled=True)) <= 1e-9


@pytest.mark.parametrize("backend", ["numpy", "numba"])
def test_fields_match_pointwise(ex2, backend):
    if backend == "numba" and not HAVE_NUMBA:
        pytest.skip("numba not installed")
    d = Density(0.3, -0.7, 1.1, 0.4)
    u = np.linspace(-0.9, 0.9, 6)
    v = np.linspace(0, 1.2, 5)
    h1, h2, h, k = weighted_fields(ex2, d, u, v, backend=backend)
    for i, uu in enumerate(u):
        for j, vv in enumerate(v):
            c1, c2 = weighted_mean_components_closed(ex2, d, uu, vv)
            assert h1[i, j] == pytest.approx(c1, rel=1e-12, abs=1e-12)
            assert h2[i, j] == pytest.approx(c2, rel=1e-12, abs=1e-12)
            assert h[i, j] == pytest.approx(math.hypot(c1, c2), rel=1e-12, abs=1e-12)
            assert k[i, j] == pytest.approx(weighted_gaussian_curvature(ex2, d, uu), rel=1e-12)


@pytest.mark.skipif(not HAVE_NUMBA, reason="numba not installed")
def test_backends_agree_on_grid():
    s = build_surface("type1", 3, 2, "tan(u)", "sec(u)", (-0.7, 0.7))
    d = Density(-0.5, 0.25, 1.5, -0.8)
    u = np.linspace(-0.7, 0.7, 31)
    v = np.linspace(0, 2 * math.pi, 29)
    a = weighted_fields(s, d, u, v, backend="numpy")
    b = weighted_fields(s, d, u, v, backend="numba")
    for x, y in zip(a, b):
        assert np.allclose(x, y, rtol=1e-13, atol=1e-13)


def test_weighted_oracle_random():
    rng = np.random.default_rng(31)
    for s, u, v in random_configs(30, seed=32):
        d = Density(*random_density(rng))
        want = weighted_mean_curvature_closed(s, d, u, v)
        got = weighted_mean_oracle(s, d, u, v)
        assert abs(got - want) <= 1e-5 * (1 + want)


def test_special_density_is_v_free_at_large_v():
    s = build_surface("type1", 3, 3, "tan(u)", "sec(u)", (-1.2, 1.2))
    sd = SpecialDensity(1.0, 1.0)
    for u in (-1.2, 0.0, 0.9):
        want = weighted_mean_curvature_special(s, sd, u)
        for v in (0.0, 2.5, 6.0):
            assert rel(weighted_mean_curvature(s, sd, u, v), want) <= 1e-12
