"""Core geometry: curvature formulas, masses, metric validation."""

import numpy as np
import pytest

from ahext import spectral
from ahext.errors import InvalidMetricError, InvalidProfileError
from ahext.geometry import (ProfileCurve, AxisymmetricSurfaceMetric,
                            BartnikData, CollarMetric,
                            scalar_curvature_warped, omega_functional,
                            profile_margin, profile_hawking_mass,
                            hyperbolic_hawking_mass, gauss_curvature,
                            mean_curvature_level, hawking_mass_level,
                            collar_scalar_curvature)
from ahext.metric_path import constant_path


def _sinh_profile(s0=0.7, num=501):
    s = np.linspace(0.0, 2.0, num)
    return ProfileCurve(s, np.sinh(s + s0), np.cosh(s + s0),
                        np.sinh(s + s0), n=2)


def test_hyperbolic_space_profile_has_R_minus_6():
    # ds^2 + sinh^2(s) g_* is hyperbolic space: R = -6 exactly
    p = _sinh_profile()
    assert np.max(np.abs(scalar_curvature_warped(p) + 6.0)) < 1e-12


def test_omega_margin_matches_curvature(rng):
    # R - tau = (2n/f)(Omega[f] - f'') pointwise
    s = np.linspace(0.1, 1.1, 257)
    f = 1.0 + 0.3 * np.sin(2.0 * s) + 0.1 * s
    fp = 0.6 * np.cos(2.0 * s) + 0.1
    fpp = -1.2 * np.sin(2.0 * s)
    p = ProfileCurve(s, f, fp, fpp, n=2)
    for tau in (-6.0, 0.0, -2.5):
        lhs = scalar_curvature_warped(p) - tau
        rhs = (4.0 / f) * profile_margin(p, tau)
        assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_profile_hawking_mass_closed_form_consistency():
    # (f/2)(1 + f^2 - f'^2) equals the area / int H^2 definition
    p = _sinh_profile()
    f, fp = p.f[100], p.f_prime[100]
    area = 4.0 * np.pi * f ** 2
    h2 = (2.0 * fp / f) ** 2 * area
    direct = hyperbolic_hawking_mass(area, h2)
    assert abs(direct - profile_hawking_mass(f, fp)) < 1e-13
    # hyperbolic space has vanishing mass
    assert np.max(np.abs(profile_hawking_mass(p.f, p.f_prime))) < 1e-12


def test_profile_validation():
    s = np.linspace(0.0, 1.0, 11)
    with pytest.raises(InvalidProfileError):
        ProfileCurve(s, np.linspace(-0.1, 1.0, 11), np.ones(11), np.zeros(11))
    with pytest.raises(InvalidProfileError):
        ProfileCurve(s[::-1], np.ones(11), np.ones(11), np.zeros(11))
    with pytest.raises(InvalidProfileError):
        ProfileCurve(s, np.ones(11), np.ones(11), np.zeros(11), n=1)


def test_round_sphere_metric():
    g = AxisymmetricSurfaceMetric.round_sphere(1.5)
    assert abs(g.area() - 4.0 * np.pi * 1.5 ** 2) < 1e-12
    assert abs(g.area_radius() - 1.5) < 1e-13
    assert np.max(np.abs(gauss_curvature(g) - 1.0 / 1.5 ** 2)) < 1e-9


def test_gauss_bonnet_perturbed(perturbed_metric):
    g = perturbed_metric
    total = g.integrate(gauss_curvature(g))
    assert abs(total - 4.0 * np.pi) < 1e-10


def test_pole_singular_metric_rejected():
    x, w = spectral.gauss_legendre(48)
    with pytest.raises(InvalidMetricError):
        AxisymmetricSurfaceMetric(x, w, np.abs(x))


def test_bartnik_data():
    g = AxisymmetricSurfaceMetric.round_sphere(1.0)
    with pytest.raises(InvalidMetricError):
        BartnikData(g, -0.5)
    d = BartnikData(g, 1.0)
    # round data closed form: m_H = r0/2 (1 + r0^2 - H0^2 r0^2 / 4)
    assert abs(d.hawking_mass() - 0.875) < 1e-13
    assert abs(BartnikData(g, 0.0).hawking_mass() - 1.0) < 1e-13


def _cosh_collar(r0=1.0, n_t=65):
    g = AxisymmetricSurfaceMetric.round_sphere(r0)
    path = constant_path(g, n_t=n_t)
    v = np.ones((n_t, len(path.x)))
    E_fn = lambda t: np.cosh(t)
    Ep_fn = lambda t: np.sinh(t)
    Epp_fn = lambda t: np.cosh(t)
    return path, CollarMetric(path, v, E_fn, Ep_fn, Epp_fn)


def test_collar_mean_curvature_and_mass_closed_forms():
    r0 = 1.3
    path, c = _cosh_collar(r0=r0)
    i = 20
    t = c.t_grid[i]
    H = mean_curvature_level(c, i)
    assert np.max(np.abs(H - 2.0 * np.tanh(t))) < 1e-13
    m = hawking_mass_level(c, i, method="closed_form")
    expect = 0.5 * np.cosh(t) * r0 * (1.0 - (r0 * np.sinh(t)) ** 2
                                      + (r0 * np.cosh(t)) ** 2)
    assert abs(m - expect) < 1e-12


def test_collar_mass_fallback_matches_direct_integral():
    path, c0 = _cosh_collar()
    # nonconstant lapse forces the area / int H^2 route
    v = 1.0 + 0.05 * np.outer(np.ones(len(c0.t_grid)), path.x)
    c = CollarMetric(path, v, c0.E_fn, c0.Ep_fn, c0.Epp_fn)
    i = 12
    t = c.t_grid[i]
    E, Ep = np.cosh(t), np.sinh(t)
    area = E ** 2 * path.area(i)
    h2 = E ** 2 * path.integrate(i, (2.0 * Ep / (v[i] * E)) ** 2)
    expect = hyperbolic_hawking_mass(area, h2)
    assert abs(hawking_mass_level(c, i) - expect) < 1e-12
    with pytest.raises(ValueError):
        hawking_mass_level(c, i, method="closed_form")


def test_collar_scalar_reduces_to_warped_product():
    # v = 1, round g: the collar is ds^2 + (r0 E)^2 g_* and the collar
    # curvature sweep must match the warped-product formula
    r0 = 1.3
    path, c = _cosh_collar(r0=r0)
    R = collar_scalar_curvature(c)
    t = c.t_grid
    f, fp, fpp = r0 * np.cosh(t), r0 * np.sinh(t), r0 * np.cosh(t)
    expect = (2.0 / f ** 2) * (1.0 - fp ** 2) - 4.0 * fpp / f
    assert np.max(np.abs(R - expect[:, None])) < 1e-8
