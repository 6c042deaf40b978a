"""Spectral and finite-difference utilities.

Angular discretization uses Gauss-Legendre nodes in x = cos(theta) with
Legendre-series differentiation; time/arclength grids are uniform with
4th-order centered differences (one-sided at the ends).
"""

import numpy as np
from numpy.polynomial import legendre as npleg


def gauss_legendre(n):
    """Nodes (ascending in x = cos theta) and weights on [-1, 1]."""
    x, w = npleg.leggauss(n)
    return x, w


def to_legendre(values, x, w):
    """Legendre coefficients c_l of samples at Gauss-Legendre nodes.

    c_l = (2l+1)/2 * sum_i w_i * values_i * P_l(x_i); exact for
    polynomial degree <= 2*len(x) - 1 - l.
    """
    n = len(x)
    V = npleg.legvander(x, n - 1)
    ell = np.arange(n)
    return (ell + 0.5) * (V.T @ (w * values))


def from_legendre(coeffs, x):
    """Evaluate a Legendre series at points x."""
    return npleg.legval(x, coeffs)


def legendre_deriv_x(coeffs, x):
    """d/dx of a Legendre series at points x."""
    return npleg.legval(x, npleg.legder(coeffs))


def sphere_laplacian_coeffs(coeffs):
    """Coefficients of the unit-sphere Laplacian of an axisymmetric series.

    Delta_{g_*} P_l = -l(l+1) P_l in x = cos theta.
    """
    ell = np.arange(len(coeffs))
    return -ell * (ell + 1.0) * coeffs


def deriv_uniform(y, h, axis=0):
    """4th-order first derivative on a uniform grid (one-sided at ends)."""
    y = np.asarray(y, dtype=float)
    y = np.moveaxis(y, axis, 0)
    n = y.shape[0]
    if n < 6:
        raise ValueError("need at least 6 samples for 4th-order stencils")
    d = np.empty_like(y)
    d[2:-2] = (-y[4:] + 8.0 * y[3:-1] - 8.0 * y[1:-3] + y[:-4]) / (12.0 * h)
    fwd = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / 12.0
    for i in (0, 1):
        d[i] = sum(c * y[i + k] for k, c in enumerate(fwd)) / h
        d[-1 - i] = -sum(c * y[-1 - i - k] for k, c in enumerate(fwd)) / h
    return np.moveaxis(d, 0, axis)


def deriv2_uniform(y, h, axis=0):
    """4th-order second derivative on a uniform grid (one-sided at ends)."""
    y = np.asarray(y, dtype=float)
    y = np.moveaxis(y, axis, 0)
    n = y.shape[0]
    if n < 8:
        raise ValueError("need at least 8 samples for 4th-order stencils")
    d = np.empty_like(y)
    d[2:-2] = (-y[4:] + 16.0 * y[3:-1] - 30.0 * y[2:-2]
               + 16.0 * y[1:-3] - y[:-4]) / (12.0 * h * h)
    fwd = np.array([15.0 / 4, -77.0 / 6, 107.0 / 6, -13.0, 61.0 / 12, -5.0 / 6])
    for i in (0, 1):
        d[i] = sum(c * y[i + k] for k, c in enumerate(fwd)) / (h * h)
        d[-1 - i] = sum(c * y[-1 - i - k] for k, c in enumerate(fwd)) / (h * h)
    return np.moveaxis(d, 0, axis)


def _sigma(y):
    """exp(-1/y) for y > 0, exactly 0 for y <= 0."""
    y = np.asarray(y, dtype=float)
    out = np.zeros_like(y)
    pos = y > 0
    out[pos] = np.exp(-1.0 / y[pos])
    return out


def _sigma_prime(y):
    y = np.asarray(y, dtype=float)
    out = np.zeros_like(y)
    pos = y > 0
    out[pos] = np.exp(-1.0 / y[pos]) / y[pos] ** 2
    return out


def smoothstep_cinf(y):
    """C-infinity step: 0 for y <= 0, 1 for y >= 1, strictly monotone between."""
    a = _sigma(y)
    b = _sigma(1.0 - np.asarray(y, dtype=float))
    return a / (a + b + (a + b == 0.0))


def smoothstep_cinf_prime(y):
    """Derivative of smoothstep_cinf (exactly 0 outside (0,1))."""
    y = np.asarray(y, dtype=float)
    a = _sigma(y)
    b = _sigma(1.0 - y)
    ap = _sigma_prime(y)
    bp = _sigma_prime(1.0 - y)
    s = a + b
    s = s + (s == 0.0)
    return (ap * b + a * bp) / s ** 2


def mollifier_quadrature(n_nodes=96):
    """Nodes and normalized weights for the bump c*exp(-1/(1-t^2)) on (-1,1).

    Returns (t_k, c_k) with sum c_k = 1, approximating integration against
    the standard normalized mollifier.
    """
    t, w = npleg.leggauss(n_nodes)
    phi = np.exp(-1.0 / (1.0 - t ** 2))
    c = w * phi
    return t, c / c.sum()


def thread_count():
    """Parallelism cap from AHEXT_THREADS (default 1)."""
    import os

    try:
        return max(1, int(os.environ.get("AHEXT_THREADS", "1")))
    except ValueError:
        return 1
