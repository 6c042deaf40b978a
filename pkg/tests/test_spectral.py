"""Spectral and smoothing utilities against closed-form oracles."""

import numpy as np
import numpy.polynomial.legendre as npleg

from ahext import spectral


def test_gauss_legendre_quadrature_exactness():
    x, w = spectral.gauss_legendre(16)
    # exact for polynomials up to degree 31
    for k in (0, 5, 17, 31):
        exact = 2.0 / (k + 1) if k % 2 == 0 else 0.0
        assert abs(np.sum(w * x ** k) - exact) < 1e-14


def test_legendre_round_trip():
    x, w = spectral.gauss_legendre(32)
    vals = np.exp(0.3 * x) * np.cos(x)
    c = spectral.to_legendre(vals, x, w)
    assert np.max(np.abs(spectral.from_legendre(c, x) - vals)) < 1e-13


def test_sphere_laplacian_eigenfunctions():
    # Delta_{g_*} P_l = -l(l+1) P_l on the unit sphere
    x, _ = spectral.gauss_legendre(24)
    for l in (1, 2, 5):
        c = np.zeros(l + 1)
        c[l] = 1.0
        lap = spectral.from_legendre(spectral.sphere_laplacian_coeffs(c), x)
        expect = -l * (l + 1.0) * npleg.legval(x, c)
        assert np.max(np.abs(lap - expect)) < 1e-11


def test_uniform_derivatives_fourth_order():
    def err(n):
        s = np.linspace(0.0, 1.0, n)
        y = np.sin(3.0 * s)
        h = s[1] - s[0]
        e1 = np.max(np.abs(spectral.deriv_uniform(y, h) - 3.0 * np.cos(3.0 * s)))
        e2 = np.max(np.abs(spectral.deriv2_uniform(y, h) + 9.0 * np.sin(3.0 * s)))
        return e1, e2

    e1a, e2a = err(101)
    e1b, e2b = err(201)
    assert e1a / e1b > 10.0 and e2a / e2b > 6.0
    assert e1b < 1e-7 and e2b < 1e-6


def test_smoothstep_cinf_properties():
    y = np.linspace(-0.5, 1.5, 301)
    s = spectral.smoothstep_cinf(y)
    sp = spectral.smoothstep_cinf_prime(y)
    assert np.all(s[y <= 0.0] == 0.0)
    assert np.all(s[y >= 1.0] == 1.0)
    assert np.all(np.diff(s) >= 0.0)
    assert np.all(sp >= 0.0)
    # derivative consistency against central differences
    h = 1e-6
    mid = (y > 0.01) & (y < 0.99)
    fd = (spectral.smoothstep_cinf(y[mid] + h)
          - spectral.smoothstep_cinf(y[mid] - h)) / (2.0 * h)
    assert np.max(np.abs(fd - sp[mid])) < 1e-8


def test_mollifier_quadrature_moments():
    t, c = spectral.mollifier_quadrature(64)
    assert abs(np.sum(c) - 1.0) < 1e-13
    assert np.all(np.abs(t) < 1.0)
    # even weight: odd moments vanish
    assert abs(np.sum(c * t)) < 1e-13
    assert abs(np.sum(c * t ** 3)) < 1e-13
