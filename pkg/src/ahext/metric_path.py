"""Paths of surface metrics and the stability eigenvalue problem.

The path from boundary data to a round metric is produced by normalized
(area-preserving) 2-D Ricci flow on the conformal factor, followed by a
monotone rearrangement in cos(theta) that makes the area form pointwise
t-independent (the trace-free condition in integrated form), and a time
reparametrization that freezes the path once the metric is round.
"""

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import legendre as npleg
from scipy.linalg import eigh

from . import spectral
from .errors import InvalidMetricError, NotConvergedError
from .geometry import FOUR_PI, AxisymmetricSurfaceMetric, gauss_curvature

# RK4 stability limit on the negative real axis is |dt*lambda| < 2.78;
# keep a margin for the nonlinear terms.
_RK4_LIMIT = 2.5
_CFL_SAFETY = 0.7


# ---------------------------------------------------------------------------
# normalized Ricci flow on the conformal factor


class _FlowWorkspace:
    """Precomputed spectral operators for a fixed node set."""

    def __init__(self, x, w):
        self.x = x
        self.w = w
        n = len(x)
        V = npleg.legvander(x, n - 1)
        ell = np.arange(n)
        # analysis: coefficients from nodal values; synthesis: V
        self.analysis = ((ell + 0.5)[:, None] * (V.T * w))
        self.lap = V @ (-ell * (ell + 1.0) * np.eye(n)) @ self.analysis
        self.lmax_eig = ell[-1] * (ell[-1] + 1.0)

    def laplacian_star(self, phi):
        return self.lap @ phi

    def area(self, phi):
        return 2.0 * np.pi * np.sum(self.w * np.exp(2.0 * phi))


@dataclass
class FlowResult:
    """Raw flow record: phi snapshots at every accepted step."""

    x: np.ndarray
    w: np.ndarray
    times: np.ndarray
    phis: np.ndarray           # (n_steps+1, n_nodes)
    area0: float
    area_drift_max: float      # max pre-renormalization relative area drift
    dt: float

    @property
    def r0(self):
        return np.sqrt(self.area0 / FOUR_PI)

    def metric_at_step(self, k):
        return AxisymmetricSurfaceMetric(self.x, self.w, self.phis[k])

    def max_K_deviation(self, k=-1):
        g = self.metric_at_step(len(self.times) - 1 if k == -1 else k)
        return float(np.max(np.abs(self.r0 ** 2 * gauss_curvature(g) - 1.0)))

    def phi_at_time(self, tau):
        """State at flow time tau by exact re-stepping from the nearest
        stored snapshot (deterministic, no interpolation)."""
        ws = _FlowWorkspace(self.x, self.w)
        k = int(np.searchsorted(self.times, tau + 1e-15 * max(1.0, tau)) - 1)
        k = max(0, min(k, len(self.times) - 1))
        phi = self.phis[k].copy()
        t = self.times[k]
        remaining = tau - t
        if remaining <= 0:
            return phi
        n_sub = max(1, int(np.ceil(remaining / self.dt)))
        h = remaining / n_sub
        for _ in range(n_sub):
            phi = _rk4_step(ws, phi, h, self.area0)
        return phi


def _flow_rhs(ws, phi):
    K = np.exp(-2.0 * phi) * (1.0 - ws.laplacian_star(phi))
    return -K + FOUR_PI / ws.area(phi)


def _rk4_step(ws, phi, h, area0):
    phi = _rk4_step_no_renorm(ws, phi, h)
    # exact area renormalization absorbs the quadrature-level drift
    return phi + 0.5 * np.log(area0 / ws.area(phi))


def normalized_ricci_flow(g0, flow_time, steps=None, kappa=3.0):
    """Run area-preserving Ricci flow d(phi)/dt = -K + 4 pi / area.

    The normalization constant is the area average of K (Gauss-Bonnet),
    which is the unique choice preserving the area; it is recomputed at
    every stage evaluation, and the residual quadrature drift is removed
    exactly after each step.
    """
    g = g0
    K0 = gauss_curvature(g)
    if np.min(K0) <= -kappa:
        raise InvalidMetricError(
            f"min K(g0) = {np.min(K0):.6g} violates the K > -{kappa} bound")
    ws = _FlowWorkspace(g.x, g.w)
    area0 = g.area()
    stiff = ws.lmax_eig * float(np.max(np.exp(-2.0 * g.phi)))
    dt_stable = _RK4_LIMIT / stiff
    if steps is None:
        dt = _CFL_SAFETY * dt_stable
        steps = max(1, int(np.ceil(flow_time / dt)))
    dt = flow_time / steps
    if dt > dt_stable:
        raise NotConvergedError(
            f"step size {dt:.3e} exceeds the RK4 stability bound "
            f"{dt_stable:.3e}; use at least "
            f"{int(np.ceil(flow_time / (_CFL_SAFETY * dt_stable)))} steps")
    phis = np.empty((steps + 1, len(g.x)))
    phis[0] = g.phi
    drift = 0.0
    phi = g.phi.copy()
    for k in range(steps):
        stiff = ws.lmax_eig * float(np.max(np.exp(-2.0 * phi)))
        if dt * stiff > 1.05 * _RK4_LIMIT:
            raise NotConvergedError(
                f"flow stiffened at t={k * dt:.4g}: step {dt:.3e} exceeds "
                f"stability bound {_RK4_LIMIT / stiff:.3e}")
        pre = _rk4_step_no_renorm(ws, phi, dt)
        drift = max(drift, abs(ws.area(pre) / area0 - 1.0))
        phi = pre + 0.5 * np.log(area0 / ws.area(pre))
        phis[k + 1] = phi
    times = dt * np.arange(steps + 1)
    return FlowResult(g.x, g.w, times, phis, area0, drift, dt)


def _rk4_step_no_renorm(ws, phi, h):
    k1 = _flow_rhs(ws, phi)
    k2 = _flow_rhs(ws, phi + 0.5 * h * k1)
    k3 = _flow_rhs(ws, phi + 0.5 * h * k2)
    k4 = _flow_rhs(ws, phi + h * k3)
    return phi + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def flow_to_roundness(g0, tol=5e-7, chunk_time=None, max_chunks=8,
                      kappa=3.0):
    """Flow until max |r0^2 K - 1| <= tol, extending the time as needed."""
    r0 = g0.area_radius()
    if chunk_time is None:
        chunk_time = 4.0 * r0 ** 2
    flow = normalized_ricci_flow(g0, chunk_time, kappa=kappa)
    chunks = 1
    while flow.max_K_deviation() > tol:
        if chunks >= max_chunks:
            raise NotConvergedError(
                f"flow did not reach roundness {tol:.1e} after "
                f"{chunks * chunk_time:.3g} time units "
                f"(residual {flow.max_K_deviation():.3e})")
        flow = normalized_ricci_flow(g0, (chunks + 1) * chunk_time,
                                     kappa=kappa)
        chunks += 1
    return flow


# ---------------------------------------------------------------------------
# rearranged metric path


class MetricPath:
    """Family g(t) = X(t)^* (e^{2 phi_raw(t)} g_*) with t-independent
    area form rho = e^{2 phi_raw(0)}.

    Components in ambient coordinates (x = cos theta, azimuth):
    q = rho X' / (1 - X^2),  p = e^{2 phi_raw(t) o X} (1 - X^2).
    """

    def __init__(self, x, w, t_grid, phis_raw, theta_param=1.0, flow=None):
        self.x = np.asarray(x, dtype=float)
        self.w = np.asarray(w, dtype=float)
        self.t_grid = np.asarray(t_grid, dtype=float)
        self.phis_raw = np.asarray(phis_raw, dtype=float)
        self.theta_param = float(theta_param)
        self._flow = flow
        self.rho = np.exp(2.0 * self.phis_raw[0])
        self.area0 = 2.0 * np.pi * np.sum(self.w * self.rho)
        self.r0 = float(np.sqrt(self.area0 / FOUR_PI))
        self._build()

    def _build(self):
        n_t, n_x = self.phis_raw.shape
        self.X = np.empty((n_t, n_x))
        self.Xp = np.empty((n_t, n_x))
        self.q = np.empty((n_t, n_x))
        self.p = np.empty((n_t, n_x))
        self._phi_series = np.empty((n_t, n_x))
        self._transport_residual = 0.0
        cum0 = None
        for i in range(n_t):
            phi = self.phis_raw[i]
            dens_c = spectral.to_legendre(np.exp(2.0 * phi), self.x, self.w)
            cum_c = npleg.legint(dens_c)
            cum_c[0] -= npleg.legval(-1.0, cum_c)
            if cum0 is None:
                cum0 = npleg.legval(self.x, cum_c)
            if np.array_equal(phi, self.phis_raw[0]):
                X = self.x.copy()
            else:
                X = _monotone_transport(cum_c, dens_c, cum0, self.x)
            self._transport_residual = max(
                self._transport_residual,
                float(np.max(np.abs(npleg.legval(X, cum_c) - cum0)))
                / (self.area0 / (2.0 * np.pi)))
            phi_c = spectral.to_legendre(phi, self.x, self.w)
            self._phi_series[i] = phi_c
            phi_at_X = npleg.legval(X, phi_c)
            self.X[i] = X
            self.Xp[i] = self.rho / np.exp(2.0 * phi_at_X)
            self.q[i] = self.rho * self.Xp[i] / (1.0 - X ** 2)
            self.p[i] = np.exp(2.0 * phi_at_X) * (1.0 - X ** 2)
        if n_t >= 6:
            dt = self.t_grid[1] - self.t_grid[0]
            dlq = spectral.deriv_uniform(np.log(self.q), dt, axis=0)
            dlp = spectral.deriv_uniform(np.log(self.p), dt, axis=0)
            self._gp2 = dlq ** 2 + dlp ** 2
            self._trace = dlq + dlp
        else:
            self._gp2 = np.zeros((n_t, n_x))
            self._trace = np.zeros((n_t, n_x))

    # --- per-level geometry -------------------------------------------------

    def components(self, i):
        return self.q[i], self.p[i]

    def raw_metric(self, i):
        return AxisymmetricSurfaceMetric(self.x, self.w, self.phis_raw[i])

    def gauss_curvature(self, i):
        """K of g(t_i) at the nodes (pullback of the raw curvature)."""
        lap_c = spectral.sphere_laplacian_coeffs(self._phi_series[i])
        K_raw_of = lambda y: (np.exp(-2.0 * npleg.legval(y, self._phi_series[i]))
                              * (1.0 - npleg.legval(y, lap_c)))
        return K_raw_of(self.X[i])

    def pull_back(self, i, samples_on_raw):
        """Evaluate raw-metric samples at the transported coordinate X."""
        c = spectral.to_legendre(np.asarray(samples_on_raw, dtype=float),
                                 self.x, self.w)
        return npleg.legval(self.X[i], c)

    def laplacian(self, i, values):
        """Delta_{g(t_i)} of axisymmetric samples at the nodes."""
        c = spectral.to_legendre(np.asarray(values, dtype=float),
                                 self.x, self.w)
        vx = npleg.legval(self.x, npleg.legder(c))
        flux = (1.0 - self.X[i] ** 2) / self.Xp[i] * vx
        fc = spectral.to_legendre(flux, self.x, self.w)
        dflux = npleg.legval(self.x, npleg.legder(fc))
        return dflux / self.rho

    def gprime_norm_sq(self, i):
        return self._gp2[i]

    def trace_gprime(self, i):
        return self._trace[i]

    def area(self, i):
        return self.area0

    def integrate(self, i, values):
        return 2.0 * np.pi * np.sum(self.w * self.rho * np.asarray(values))

    # --- global diagnostics -------------------------------------------------

    def area_form_residual(self):
        """Max relative residual of the area-form transport equation
        (sqrt(det g(t)) = rho holds identically in the stored components;
        the honest error lives in the transport solve)."""
        return self._transport_residual

    def trace_residual(self):
        """Max |tr_{g(t)} g'(t)| over interior t samples."""
        if len(self.t_grid) < 6:
            return 0.0
        return float(np.max(np.abs(self._trace[2:-2])))

    def roundness_deviation(self, i):
        return float(np.max(np.abs(self.r0 ** 2 * self.gauss_curvature(i)
                                   - 1.0)))


def _monotone_transport(cum_c, dens_c, target, x):
    """Solve cum(X) = target nodewise by Newton on the Legendre series;
    the derivative of the cumulative is the (positive) density."""
    X = x.copy()
    for _ in range(100):
        val = npleg.legval(X, cum_c)
        step = (val - target) / npleg.legval(X, dens_c)
        X = np.clip(X - step, -1.0, 1.0)
        if np.max(np.abs(step)) < 1e-15:
            break
    return X


def constant_path(g, n_t=65, theta_param=1.0):
    """Path that is g at every t (used for trivial collars and tests)."""
    t_grid = np.linspace(0.0, 1.0, n_t)
    phis = np.tile(g.phi, (n_t, 1))
    return MetricPath(g.x, g.w, t_grid, phis, theta_param=theta_param)


def area_form_normalize(flow, stride=None):
    """Rearranged MetricPath over the raw flow's time samples.

    The t grid is the flow time normalized to [0,1]; no roundness claim
    is made (theta_param = 1).
    """
    n = len(flow.times)
    if stride is None:
        stride = max(1, n // 64)
    idx = list(range(0, n, stride))
    if idx[-1] != n - 1:
        idx.append(n - 1)
    total = flow.times[-1] if flow.times[-1] > 0 else 1.0
    t_grid = flow.times[idx] / total
    return MetricPath(flow.x, flow.w, t_grid, flow.phis[idx],
                      theta_param=1.0, flow=flow)


def reparametrize_path(path, theta_param=0.75, n_t=65, round_tol=1e-6):
    """Time-warped path: g(0) = g0 bitwise, g(t) frozen (round) past
    theta_param, with a strictly monotone C-infinity warp between.

    Requires the underlying flow to have reached roundness within
    round_tol (measured as max |r0^2 K - 1|).
    """
    flow = path._flow
    if flow is None:
        raise ValueError("reparametrize_path needs a flow-backed path")
    if flow.max_K_deviation() > round_tol:
        raise NotConvergedError(
            f"terminal roundness {flow.max_K_deviation():.3e} exceeds "
            f"{round_tol:.1e}; rerun with a longer flow_time")
    t_grid = np.linspace(0.0, 1.0, n_t)
    k_theta = int(round(theta_param * (n_t - 1)))
    if abs(t_grid[k_theta] - theta_param) > 1e-12:
        raise ValueError("theta_param must lie on the t grid")
    T = flow.times[-1]
    phis = np.empty((n_t, len(flow.x)))
    phis[0] = flow.phis[0]
    phi_end = flow.phis[-1]
    for i in range(1, n_t):
        if i >= k_theta:
            phis[i] = phi_end
        else:
            tau = T * _warp(t_grid[i] / theta_param)
            phis[i] = flow.phi_at_time(tau)
    return MetricPath(flow.x, flow.w, t_grid, phis,
                      theta_param=theta_param, flow=flow)


def _warp(y):
    """Monotone C-infinity warp: 0 -> 0, flat at 1 (all derivatives 0)."""
    z = 1.0 - y
    if z <= 0.0:
        return 1.0
    return 1.0 - z * np.exp(1.0 - 1.0 / z)


def _warp_prime(y):
    z = 1.0 - y
    if z <= 0.0:
        return 0.0
    return np.exp(1.0 - 1.0 / z) * (1.0 + 1.0 / z)


def compute_alpha_beta(path):
    """alpha = (1/4) max |g'|^2_g, beta = min r0^2 K over the path grid."""
    alpha = 0.25 * float(np.max(path._gp2))
    beta = min(float(np.min(path.r0 ** 2 * path.gauss_curvature(i)))
               for i in range(len(path.t_grid)))
    return alpha, beta


# ---------------------------------------------------------------------------
# the eigenvalue problem of -Delta_g + K(g)


def _galerkin_matrices(g, n_basis=None):
    n = len(g.x) if n_basis is None else n_basis
    xq, wq = spectral.gauss_legendre(2 * n + 16)
    norm = np.sqrt(np.arange(n) + 0.5)
    Vq = npleg.legvander(xq, n - 1) * norm
    phi_c = g.phi_coeffs
    pot = 1.0 - npleg.legval(xq, spectral.sphere_laplacian_coeffs(phi_c))
    wt = npleg.legval(xq, phi_c)
    weight = np.exp(2.0 * wt)
    ell = np.arange(n)
    A = np.diag(ell * (ell + 1.0)) + (Vq.T * (wq * pot)) @ Vq
    B = (Vq.T * (wq * weight)) @ Vq
    return A, 0.5 * (B + B.T), norm


def eigen_spectrum(g, k=4):
    """Lowest k eigenvalues of -Delta_g + K(g) in the axisymmetric sector."""
    A, B, _ = _galerkin_matrices(g)
    vals = eigh(0.5 * (A + A.T), B, eigvals_only=True)
    return vals[:k]

def first_eigenpair(g):
    """Smallest eigenvalue and positive L^2(dV_g)-normalized eigenfunction."""
    A, B, norm = _galerkin_matrices(g)
    vals, vecs = eigh(0.5 * (A + A.T), B)
    lam1 = vals[0]
    coeff = vecs[:, 0] * norm
    u = npleg.legval(g.x, coeff)
    if np.sum(u) < 0:
        u = -u
    nrm = g.integrate(u ** 2)
    u = u / np.sqrt(nrm)
    if np.any(u <= 0):
        raise NotConvergedError("first eigenfunction not positive on grid")
    return float(lam1), u


def first_eigenvalue_azimuthal(g, m_mode):
    """Lowest eigenvalue in the azimuthal-mode-m sector (oracle helper).

    Basis (1-x^2)^{m/2} P_k with the extra centrifugal potential
    m^2/(1-x^2); used to confirm the axisymmetric minimizer.
    """
    if m_mode < 1:
        raise ValueError("m_mode must be >= 1")
    n = len(g.x)
    xq, wq = spectral.gauss_legendre(2 * n + 32)
    P = npleg.legvander(xq, n - 1)
    dP = np.column_stack([npleg.legval(xq, npleg.legder(
        np.eye(n)[k])) for k in range(n)])
    s = (1.0 - xq ** 2) ** (0.5 * m_mode)
    V = P * s[:, None]
    dV = dP * s[:, None] - m_mode * (xq / (1.0 - xq ** 2) * s)[:, None] * P
    phi_c = g.phi_coeffs
    pot = (1.0 - npleg.legval(xq, spectral.sphere_laplacian_coeffs(phi_c))
           + m_mode ** 2 / (1.0 - xq ** 2))
    weight = np.exp(2.0 * npleg.legval(xq, phi_c))
    A = (dV.T * (wq * (1.0 - xq ** 2))) @ dV + (V.T * (wq * pot)) @ V
    B = (V.T * (wq * weight)) @ V
    vals = eigh(0.5 * (A + A.T), 0.5 * (B + B.T), eigvals_only=True)
    return float(vals[0])


@dataclass
class EigenPath:
    """lambda(t) and positive normalized eigenfunctions along a path."""

    lambda_: np.ndarray          # (n_t,)
    u: np.ndarray                # (n_t, n_x) on the rearranged coordinates
    dtu_over_u_sup: float
    gaps: np.ndarray             # (n_t,) oracle gap lambda2 - lambda1

    def inf_u(self):
        return float(np.min(self.u))

    def inf_u_sq_lambda_plus_3(self):
        lam = self.lambda_[:, None]
        return float(np.min(self.u ** 2 * (lam + 3.0)))


def eigenpath(path):
    """Continued first eigenpair along the path, pulled back to the
    rearranged coordinates."""
    n_t = len(path.t_grid)
    lams = np.empty(n_t)
    gaps = np.empty(n_t)
    us = np.empty((n_t, len(path.x)))
    prev_key = None
    for i in range(n_t):
        key = hash(path.phis_raw[i].tobytes())
        if prev_key is not None and key == prev_key[0]:
            lams[i], gaps[i], us[i] = prev_key[1], prev_key[2], prev_key[3]
            continue
        g = path.raw_metric(i)
        spec2 = eigen_spectrum(g, k=2)
        lam, u_raw = first_eigenpair(g)
        gap = spec2[1] - spec2[0]
        if gap < 1e-6:
            raise NotConvergedError(
                f"eigenvalue gap {gap:.2e} too small at t={path.t_grid[i]:.3f}")
        u = path.pull_back(i, u_raw)
        u = u / np.sqrt(path.integrate(i, u ** 2))
        lams[i], gaps[i], us[i] = lam, gap, u
        prev_key = (key, lams[i], gaps[i], us[i].copy())
    if np.any(lams + 3.0 <= 0):
        raise NotConvergedError("lambda_1 + 3 <= 0 somewhere along the path")
    dt = path.t_grid[1] - path.t_grid[0]
    dtu = spectral.deriv_uniform(us, dt, axis=0)
    sup = float(np.max(np.abs(dtu / us)))
    return EigenPath(lams, us, sup, gaps)
