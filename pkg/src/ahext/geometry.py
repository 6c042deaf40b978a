"""Core geometric objects and curvature/mass functionals.

Profile curves f(s) define warped metrics ds^2 + f(s)^2 g_* over an
n-sphere; axisymmetric surface metrics e^{2 phi(theta)} g_* represent
boundary 2-metrics; collar metrics v^2 dt^2 + E^2 g(t) interpolate from
boundary data to a round sphere.
"""

import numpy as np

from . import spectral
from .errors import InvalidMetricError, InvalidProfileError

FOUR_PI = 4.0 * np.pi


# ---------------------------------------------------------------------------
# profile curves


class ProfileCurve:
    """Sampled positive warping function f(s) on a uniform grid.

    Optional analytic closures (f_fn, fp_fn, fpp_fn) allow evaluation off
    the grid; curvature_margin_fn, when present, returns Omega[f] - f''
    computed in a cancellation-free form (used by bent profiles whose
    margin is a tiny difference of O(1) quantities).
    """

    def __init__(self, s_grid, f, f_prime, f_double_prime, n=2,
                 f_fn=None, fp_fn=None, fpp_fn=None,
                 curvature_margin_fn=None, margin_tau=None):
        self.s_grid = np.asarray(s_grid, dtype=float)
        self.f = np.asarray(f, dtype=float)
        self.f_prime = np.asarray(f_prime, dtype=float)
        self.f_double_prime = np.asarray(f_double_prime, dtype=float)
        self.n = int(n)
        self.f_fn = f_fn
        self.fp_fn = fp_fn
        self.fpp_fn = fpp_fn
        self.curvature_margin_fn = curvature_margin_fn
        self.margin_tau = margin_tau
        self.validate()

    @classmethod
    def from_samples(cls, s_grid, f, n=2):
        s_grid = np.asarray(s_grid, dtype=float)
        h = s_grid[1] - s_grid[0]
        fp = spectral.deriv_uniform(f, h)
        fpp = spectral.deriv2_uniform(f, h)
        return cls(s_grid, f, fp, fpp, n=n)

    @classmethod
    def from_callables(cls, f_fn, fp_fn, fpp_fn, a, b, num, n=2,
                       curvature_margin_fn=None, margin_tau=None):
        s = np.linspace(a, b, num)
        return cls(s, f_fn(s), fp_fn(s), fpp_fn(s), n=n,
                   f_fn=f_fn, fp_fn=fp_fn, fpp_fn=fpp_fn,
                   curvature_margin_fn=curvature_margin_fn,
                   margin_tau=margin_tau)

    def validate(self):
        if self.s_grid.ndim != 1 or len(self.s_grid) < 2:
            raise InvalidProfileError("need at least 2 samples")
        steps = np.diff(self.s_grid)
        h = steps[0]
        if h <= 0 or np.any(np.abs(steps - h) > 1e-12 * max(1.0, abs(h))):
            raise InvalidProfileError("s_grid must be uniform and increasing")
        if np.any(self.f <= 0):
            raise InvalidProfileError("f must be positive everywhere")
        if self.n < 2:
            raise InvalidProfileError("cross-section dimension n must be >= 2")

    @property
    def h(self):
        return self.s_grid[1] - self.s_grid[0]

    @property
    def a(self):
        return self.s_grid[0]

    @property
    def b(self):
        return self.s_grid[-1]

    def __len__(self):
        return len(self.s_grid)


def scalar_curvature_warped(p, i=None):
    """Scalar curvature of ds^2 + f^2 g_*: R = (n/f^2)((n-1)(1-f'^2) - 2ff'')."""
    if i is None:
        f, fp, fpp = p.f, p.f_prime, p.f_double_prime
    else:
        f, fp, fpp = p.f[i], p.f_prime[i], p.f_double_prime[i]
        if f <= 0:
            raise InvalidProfileError("f <= 0 at requested sample")
    n = p.n
    return (n / f ** 2) * ((n - 1.0) * (1.0 - fp ** 2) - 2.0 * f * fpp)


def omega_functional(f_val, fp_val, n, tau):
    """Omega[f] = ((n-1)/2f)(1 - f'^2 - tau f^2 / (n(n-1))).

    The pointwise inequality f'' < Omega is equivalent to R > tau.
    """
    f_val = np.asarray(f_val, dtype=float)
    if np.any(f_val <= 0):
        raise InvalidProfileError("omega_functional requires f > 0")
    return ((n - 1.0) / (2.0 * f_val)) * (
        1.0 - np.asarray(fp_val, dtype=float) ** 2
        - tau * f_val ** 2 / (n * (n - 1.0)))


def profile_margin(p, tau):
    """Samples of Omega[f] - f'' (positive iff R > tau pointwise).

    Uses the profile's cancellation-free margin closure when available
    and built for the same tau.
    """
    if p.curvature_margin_fn is not None and p.margin_tau == tau:
        return p.curvature_margin_fn(p.s_grid)
    return omega_functional(p.f, p.f_prime, p.n, tau) - p.f_double_prime


def hyperbolic_hawking_mass(area, mean_curv_sq_integral):
    """m = sqrt(area/16pi) (1 - (1/16pi) (int H^2 dA - 4 area))."""
    if area <= 0:
        raise ValueError("area must be positive")
    sixteen_pi = 4.0 * FOUR_PI
    return np.sqrt(area / sixteen_pi) * (
        1.0 - (mean_curv_sq_integral - 4.0 * area) / sixteen_pi)


def profile_hawking_mass(f_val, fp_val):
    """Hyperbolic Hawking mass of the level sphere of ds^2 + f^2 g_* (n=2).

    m = (f/2)(1 + f^2 - f'^2); constant in s exactly on b=1 model profiles.
    """
    f_val = np.asarray(f_val, dtype=float)
    return 0.5 * f_val * (1.0 + f_val ** 2 - np.asarray(fp_val) ** 2)


# ---------------------------------------------------------------------------
# surface metrics


class AxisymmetricSurfaceMetric:
    """Metric g = e^{2 phi(theta)} g_* sampled at Gauss-Legendre nodes.

    Nodes are stored as x = cos(theta), ascending; phi is the conformal
    exponent sampled at the nodes.
    """

    def __init__(self, x, w, phi):
        self.x = np.asarray(x, dtype=float)
        self.w = np.asarray(w, dtype=float)
        self.phi = np.asarray(phi, dtype=float)
        self._coeffs = spectral.to_legendre(self.phi, self.x, self.w)
        self.validate()

    @classmethod
    def from_modes(cls, scale, coeffs, n_nodes=48):
        """phi = ln(scale) + sum_l coeffs[l-1] P_l(cos theta), l = 1, 2, ..."""
        if scale <= 0:
            raise InvalidMetricError("scale must be positive")
        x, w = spectral.gauss_legendre(n_nodes)
        series = np.zeros(len(coeffs) + 1)
        series[1:] = coeffs
        phi = np.log(scale) + spectral.from_legendre(series, x)
        return cls(x, w, phi)

    @classmethod
    def round_sphere(cls, r0, n_nodes=48):
        return cls.from_modes(r0, [], n_nodes=n_nodes)

    def validate(self):
        n = len(self.x)
        tail = self._coeffs[max(1, n - max(2, n // 8)):]
        scale = max(1.0, np.max(np.abs(self._coeffs)))
        if np.max(np.abs(tail)) > 1e-8 * scale:
            raise InvalidMetricError(
                "phi is under-resolved or pole-singular: spectral tail "
                f"{np.max(np.abs(tail)):.3e} exceeds 1e-8 of coefficient scale")
        if not np.isfinite(self.area()) or self.area() <= 0:
            raise InvalidMetricError("area must be finite and positive")

    @property
    def theta_grid(self):
        return np.arccos(self.x)

    @property
    def phi_coeffs(self):
        return self._coeffs

    def area(self):
        return 2.0 * np.pi * np.sum(self.w * np.exp(2.0 * self.phi))

    def area_radius(self):
        return np.sqrt(self.area() / FOUR_PI)

    def laplacian_phi(self):
        """Delta_{g_*} phi at the nodes."""
        return spectral.from_legendre(
            spectral.sphere_laplacian_coeffs(self._coeffs), self.x)

    def laplacian(self, values):
        """Delta_g of axisymmetric samples at the nodes."""
        c = spectral.to_legendre(np.asarray(values, dtype=float),
                                 self.x, self.w)
        lap_star = spectral.from_legendre(
            spectral.sphere_laplacian_coeffs(c), self.x)
        return np.exp(-2.0 * self.phi) * lap_star

    def integrate(self, values):
        """Integral of axisymmetric samples against dA_g."""
        return 2.0 * np.pi * np.sum(
            self.w * np.exp(2.0 * self.phi) * np.asarray(values))


def gauss_curvature(g):
    """K = e^{-2 phi} (1 - Delta_{g_*} phi) for g = e^{2 phi} g_*."""
    return np.exp(-2.0 * g.phi) * (1.0 - g.laplacian_phi())


class BartnikData:
    """Boundary data (Sigma, g, H0) with constant H0 >= 0."""

    def __init__(self, metric, H0):
        if H0 < 0:
            raise InvalidMetricError("H0 must be nonnegative")
        self.metric = metric
        self.H0 = float(H0)

    @property
    def r0(self):
        return self.metric.area_radius()

    def hawking_mass(self):
        area = self.metric.area()
        return hyperbolic_hawking_mass(area, self.H0 ** 2 * area)


# ---------------------------------------------------------------------------
# collar metrics


class CollarMetric:
    """gamma = v(t,.)^2 dt^2 + E(t)^2 g(t) over path.t_grid x nodes.

    E is stored both as samples and as analytic closures (E_fn, Ep_fn,
    Epp_fn); the path supplies g(t), its curvature, Laplacian, and the
    |g'|^2_g norm at each t sample.
    """

    def __init__(self, path, v, E_fn, Ep_fn, Epp_fn):
        self.path = path
        self.t_grid = path.t_grid
        self.v = np.asarray(v, dtype=float)
        self.E_fn = E_fn
        self.Ep_fn = Ep_fn
        self.Epp_fn = Epp_fn
        self.E = E_fn(self.t_grid)
        if self.v.shape != (len(self.t_grid), len(path.x)):
            raise ValueError("lapse sample shape mismatch")
        if np.any(self.v <= 0) or np.any(self.E <= 0):
            raise ValueError("v and E must be positive")
        if abs(self.E[0] - 1.0) > 1e-12:
            raise ValueError("E(0) must equal 1")

    @property
    def dt(self):
        return self.t_grid[1] - self.t_grid[0]


def mean_curvature_level(c, i):
    """H(t_i, .) = 2 E'(t_i) / (v(t_i, .) E(t_i))."""
    t = c.t_grid[i]
    return 2.0 * c.Ep_fn(t) / (c.v[i] * c.E_fn(t))


def hawking_mass_level(c, i, method="auto"):
    """Hyperbolic Hawking mass of the t_i level set.

    Closed form (E r0/2)(1 - r0^2 E'^2 / v^2 + r0^2 E^2) requires v
    constant on the level; otherwise falls back to the area / int H^2
    definition (method="auto") or raises (method="closed_form").
    """
    t = c.t_grid[i]
    r0 = c.path.r0
    E, Ep = c.E_fn(t), c.Ep_fn(t)
    v_row = c.v[i]
    v_span = np.max(v_row) - np.min(v_row)
    if v_span <= 1e-10 * np.max(np.abs(v_row)):
        v0 = 0.5 * (np.max(v_row) + np.min(v_row))
        return 0.5 * E * r0 * (1.0 - (r0 * Ep / v0) ** 2 + (r0 * E) ** 2)
    if method == "closed_form":
        raise ValueError("closed form requires v constant on the level set")
    area = E ** 2 * c.path.area(i)
    h_sq = (2.0 * Ep / (v_row * E)) ** 2
    h2_integral = E ** 2 * c.path.integrate(i, h_sq)
    return hyperbolic_hawking_mass(area, h2_integral)


def path_norm_gprime(path, i):
    """max over the level of |g'(t_i)|^2_{g(t_i)} for the given path."""
    return float(np.max(path.gprime_norm_sq(i)))


def collar_scalar_curvature(c, i=None, j=None):
    """Scalar curvature of the collar metric at sample (i, j).

    With both indices omitted, returns the full (t, x) array. The time
    derivative of v uses 4th-order stencils, one-sided at the first and
    last two t samples.
    """
    n_t, n_x = c.v.shape
    dvdt = spectral.deriv_uniform(c.v, c.dt, axis=0)
    rows = range(n_t) if i is None else [i]
    out = np.empty((len(list(rows)), n_x))
    rows = range(n_t) if i is None else [i]
    for row, it in enumerate(rows):
        t = c.t_grid[it]
        E, Ep, Epp = c.E_fn(t), c.Ep_fn(t), c.Epp_fn(t)
        v = c.v[it]
        lap_v = c.path.laplacian(it, v)
        K = c.path.gauss_curvature(it)
        gp2 = c.path.gprime_norm_sq(it)
        term1 = (2.0 / v) * (-lap_v / E ** 2 + (K / E ** 2) * v)
        term2 = (1.0 / v ** 2) * (
            (-2.0 * Ep ** 2 - 4.0 * E * Epp) / E ** 2
            - 0.25 * gp2
            + 4.0 * (dvdt[it] / v) * (Ep / E))
        out[row] = term1 + term2
    if i is None:
        return out
    if j is None:
        return out[0]
    return out[0, j]
