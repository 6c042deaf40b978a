"""Profile gluing with scalar-curvature control.

Pipeline: a C^1 bridge with nonincreasing slope joins two profiles whose
warped metrics satisfy R > tau; a localized mollification smooths the two
junction kinks while preserving the curvature inequality; a bending
reparametrization creates strict R > tau inside an exact model profile so
it can serve as the right-hand gluing piece; the assembly routine attaches
a collar-end profile to an AdS-Schwarzschild exterior of prescribed mass.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import InterpolatedUnivariateSpline
from scipy.optimize import brentq

from . import spectral
from .ads import AdSSchwParams, metric_coefficient, profile_solve
from .errors import (AdmissibilityError, HypothesisError, InvalidProfileError,
                     NotConvergedError)
from .geometry import (ProfileCurve, omega_functional, profile_hawking_mass,
                       profile_margin)

_BUMP_WIDTH_FACTOR = 2.0   # bending bump width w = factor * delta


# ---------------------------------------------------------------------------
# piecewise profile helpers


class PiecewiseCurve:
    """Contiguous segments, each with (f, f', f'') closures."""

    def __init__(self, breaks, segments):
        # breaks: interior breakpoints (ascending); len(segments) = len(breaks)+1
        self.breaks = np.asarray(breaks, dtype=float)
        self.segments = segments

    def _dispatch(self, s, which):
        s = np.asarray(s, dtype=float)
        scalar = s.ndim == 0
        s = np.atleast_1d(s)
        idx = np.searchsorted(self.breaks, s, side="right")
        out = np.empty_like(s)
        for k, seg in enumerate(self.segments):
            mask = idx == k
            if np.any(mask):
                out[mask] = seg[which](s[mask])
        return out[0] if scalar else out

    def f(self, s):
        return self._dispatch(s, 0)

    def fp(self, s):
        return self._dispatch(s, 1)

    def fpp(self, s):
        return self._dispatch(s, 2)


def _as_callables(p):
    """(f, f', f'') closures for a profile; quintic spline fallback."""
    if p.f_fn is not None and p.fp_fn is not None and p.fpp_fn is not None:
        return p.f_fn, p.fp_fn, p.fpp_fn
    sp = InterpolatedUnivariateSpline(p.s_grid, p.f, k=5)
    return sp, sp.derivative(1), sp.derivative(2)


def margin_closure(p, tau):
    """Callable s -> Omega[f](s) - f''(s), cancellation-free if available."""
    if p.curvature_margin_fn is not None and p.margin_tau == tau:
        return p.curvature_margin_fn
    f_fn, fp_fn, fpp_fn = _as_callables(p)
    return lambda s: (omega_functional(f_fn(s), fp_fn(s), p.n, tau)
                      - fpp_fn(s))


# ---------------------------------------------------------------------------
# the bridge slope function zeta


@dataclass
class ZetaBridge:
    """Closed-form C^1 nonincreasing bridge slope on [0, L].

    A cubic smoothstep transition between two plateaus; the plateau
    fraction is chosen so the integral matches the height gap exactly.
    """

    slope_left: float
    slope_right: float
    gap: float
    L: float = field(init=False)
    _rho: float = field(init=False)       # plateau fraction
    _left_plateau: bool = field(init=False)

    def __post_init__(self):
        sl, sr, gap = self.slope_left, self.slope_right, self.gap
        if not (sl > 0 and sr <= sl and gap > 0):
            raise HypothesisError("zeta", "need slope_left > 0, "
                                  "slope_right <= slope_left, gap > 0")
        if sr == sl:
            self.L = gap / sl
            self._rho = 1.0
            self._left_plateau = True
            return
        mu = 0.5 * (sl + max(sr, 0.0))
        self.L = gap / mu
        frac = (mu - sr) / (sl - sr)
        if frac >= 0.5:
            self._left_plateau = True
            self._rho = 2.0 * frac - 1.0
        else:
            self._left_plateau = False
            self._rho = 1.0 - 2.0 * frac

    def _transition_interval(self):
        if self._left_plateau:
            return self._rho * self.L, self.L
        return 0.0, (1.0 - self._rho) * self.L

    def zeta(self, s):
        s = np.asarray(s, dtype=float)
        sl, sr = self.slope_left, self.slope_right
        if sr == sl:
            return np.full_like(s, sl)
        lo, hi = self._transition_interval()
        y = np.clip((s - lo) / (hi - lo), 0.0, 1.0)
        psi = 1.0 - 3.0 * y ** 2 + 2.0 * y ** 3
        return sr + (sl - sr) * psi

    def zeta_prime(self, s):
        s = np.asarray(s, dtype=float)
        sl, sr = self.slope_left, self.slope_right
        if sr == sl:
            return np.zeros_like(s)
        lo, hi = self._transition_interval()
        y = (s - lo) / (hi - lo)
        inside = (y > 0.0) & (y < 1.0)
        out = np.zeros_like(s)
        yc = y[inside]
        out[inside] = (sl - sr) * (-6.0 * yc + 6.0 * yc ** 2) / (hi - lo)
        return out

    def antiderivative(self, s):
        """Z(s) = int_0^s zeta, exact piecewise polynomial."""
        s = np.asarray(s, dtype=float)
        sl, sr = self.slope_left, self.slope_right
        if sr == sl:
            return sl * s
        lo, hi = self._transition_interval()
        width = hi - lo
        y = np.clip((s - lo) / width, 0.0, 1.0)
        # int_0^y (1 - 3y^2 + 2y^3) = y - y^3 + y^4/2
        Psi = y - y ** 3 + 0.5 * y ** 4
        base = sr * np.maximum(s - lo, 0.0) + (sl - sr) * width * Psi
        return sl * np.minimum(s, lo) + base


def build_zeta(slope_left, slope_right, gap):
    """Bridge slope with given endpoint slopes and exact integral = gap."""
    return ZetaBridge(slope_left, slope_right, gap)


# ---------------------------------------------------------------------------
# mollification


class _Cutoff:
    """eta_delta: 0 on the outer half-intervals, 1 on [b1-delta, a2+delta],
    C-infinity monotone in between."""

    def __init__(self, a1, b1, a2, b2, delta):
        self.mid1 = 0.5 * (a1 + b1)
        self.mid2 = 0.5 * (a2 + b2)
        self.lo = b1 - delta
        self.hi = a2 + delta
        if not (self.mid1 < self.lo and self.hi < self.mid2):
            raise ValueError("delta too large for the cutoff construction")

    def eta(self, s):
        s = np.asarray(s, dtype=float)
        up = spectral.smoothstep_cinf((s - self.mid1) / (self.lo - self.mid1))
        down = spectral.smoothstep_cinf((self.mid2 - s) / (self.mid2 - self.hi))
        return np.where(s <= self.lo, up, np.where(s >= self.hi, down, 1.0))

    def eta_prime(self, s):
        s = np.asarray(s, dtype=float)
        up = spectral.smoothstep_cinf_prime(
            (s - self.mid1) / (self.lo - self.mid1)) / (self.lo - self.mid1)
        down = -spectral.smoothstep_cinf_prime(
            (self.mid2 - s) / (self.mid2 - self.hi)) / (self.mid2 - self.hi)
        return np.where(s <= self.lo, up, np.where(s >= self.hi, down, 0.0))

    def eta_pp(self, s, h=1e-6):
        return (self.eta_prime(s + h) - self.eta_prime(s - h)) / (2.0 * h)


class MollifiedProfile:
    """f_eps(s) = int f_tilde(s - eps eta(s) t) phi(t) dt by fixed
    Gauss-Legendre quadrature against the standard bump phi."""

    def __init__(self, piecewise, cutoff, epsilon, n_quad=48):
        self.pw = piecewise
        self.cut = cutoff
        self.eps = epsilon
        self.t_k, self.c_k = spectral.mollifier_quadrature(n_quad)

    def _args(self, s, eta):
        return s[:, None] - (self.eps * eta)[:, None] * self.t_k[None, :]

    def f(self, s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        eta = self.cut.eta(s)
        out = np.empty_like(s)
        off = eta == 0.0
        if np.any(off):
            out[off] = self.pw.f(s[off])
        on = ~off
        if np.any(on):
            args = self._args(s[on], eta[on])
            out[on] = (self.pw.f(args.ravel()).reshape(args.shape)
                       @ self.c_k)
        return out

    def fp(self, s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        eta = self.cut.eta(s)
        etap = self.cut.eta_prime(s)
        out = np.empty_like(s)
        off = eta == 0.0
        if np.any(off):
            out[off] = self.pw.fp(s[off])
        on = ~off
        if np.any(on):
            args = self._args(s[on], eta[on])
            chain = 1.0 - (self.eps * etap[on])[:, None] * self.t_k[None, :]
            vals = self.pw.fp(args.ravel()).reshape(args.shape) * chain
            out[on] = vals @ self.c_k
        return out

    def fpp(self, s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        eta = self.cut.eta(s)
        etap = self.cut.eta_prime(s)
        etapp = self.cut.eta_pp(s)
        out = np.empty_like(s)
        off = eta == 0.0
        if np.any(off):
            out[off] = self.pw.fpp(s[off])
        on = ~off
        if np.any(on):
            args = self._args(s[on], eta[on])
            chain = 1.0 - (self.eps * etap[on])[:, None] * self.t_k[None, :]
            v2 = self.pw.fpp(args.ravel()).reshape(args.shape) * chain ** 2
            v1 = (self.pw.fp(args.ravel()).reshape(args.shape)
                  * (-(self.eps * etapp[on])[:, None] * self.t_k[None, :]))
            out[on] = (v2 + v1) @ self.c_k
        return out


def mollify_profile(piecewise, cutoff, epsilon, s):
    """Samples of the localized mollification of a piecewise profile."""
    return MollifiedProfile(piecewise, cutoff, epsilon).f(s)


# ---------------------------------------------------------------------------
# the gluing problem


@dataclass
class GluingProblem:
    f1: ProfileCurve
    f2: ProfileCurve
    tau: float
    n: int = 2

    def validate(self):
        if self.tau > 0:
            raise HypothesisError("tau", "tau must be <= 0")
        if self.f1.n != self.n or self.f2.n != self.n:
            raise HypothesisError("n", "cross-section dimensions disagree")
        for name, p in (("(i) piece 1", self.f1), ("(i) piece 2", self.f2)):
            marg = profile_margin(p, self.tau)
            if np.min(marg) <= 0:
                raise HypothesisError(
                    name, f"R > tau fails: min(Omega - f'') = {np.min(marg):.3e}")
        f1b, f1pb = _endpoint(self.f1, -1)
        f2a, f2pa = _endpoint(self.f2, 0)
        if not f1b < f2a:
            raise HypothesisError("(ii)", f"f1(b1) = {f1b:.6g} must be < "
                                  f"f2(a2) = {f2a:.6g}")
        cap1 = np.sqrt(1.0 - self.tau * f1b ** 2 / (self.n * (self.n - 1.0)))
        if not (0.0 < f1pb < cap1):
            raise HypothesisError("(iii)", f"need 0 < f1'(b1) = {f1pb:.6g} "
                                  f"< {cap1:.6g}")
        cap2 = np.sqrt(1.0 - self.tau * f2a ** 2 / (self.n * (self.n - 1.0)))
        if not (-cap2 < f2pa <= f1pb):
            raise HypothesisError("(iv)", f"need -{cap2:.6g} < f2'(a2) = "
                                  f"{f2pa:.6g} <= f1'(b1) = {f1pb:.6g}")


def _endpoint(p, which):
    s = p.s_grid[which]
    if p.f_fn is not None:
        return float(p.f_fn(s)), float(p.fp_fn(s))
    return float(p.f[which]), float(p.f_prime[which])


@dataclass
class BridgeConstruction:
    zeta: ZetaBridge
    a1: float
    b1: float
    a2: float          # global (translated) start of piece 2
    b2: float
    shift2: float      # global = piece-2-local + shift2
    delta: float
    epsilon: float
    d: float           # (1/3) of the pre-mollification margin infimum
    eps_iterations: int


def glue_profiles(problem, n_out=4097, max_eps_halvings=40):
    """Glue two profiles with an R > tau bridge (C^1 + mollification).

    Returns a ProfileCurve on the combined interval whose outer halves
    coincide with the inputs bitwise; the attached ``bridge`` record
    witnesses the construction.
    """
    problem.validate()
    f1, f2, tau, n = problem.f1, problem.f2, problem.tau, problem.n
    a1, b1 = f1.a, f1.b
    f1b, f1pb = _endpoint(f1, -1)
    f2a, f2pa = _endpoint(f2, 0)
    zeta = build_zeta(f1pb, f2pa, f2a - f1b)
    L = zeta.L
    a2g = b1 + L
    b2g = a2g + (f2.b - f2.a)
    shift2 = a2g - f2.a

    c1 = _as_callables(f1)
    c2 = _as_callables(f2)
    bridge_f = lambda s: f1b + zeta.antiderivative(s - b1)
    bridge_fp = lambda s: zeta.zeta(s - b1)
    bridge_fpp = lambda s: zeta.zeta_prime(s - b1)
    pw = PiecewiseCurve(
        [b1, a2g],
        [c1,
         (bridge_f, bridge_fp, bridge_fpp),
         tuple(lambda s, fn=fn: fn(s - shift2) for fn in c2)])

    m1 = margin_closure(f1, tau)
    m2 = margin_closure(f2, tau)
    bridge_margin = lambda s: (omega_functional(bridge_f(s), bridge_fp(s),
                                                n, tau) - bridge_fpp(s))
    pre_margin = PiecewiseCurve(
        [b1, a2g],
        [(m1, m1, m1), (bridge_margin,) * 3,
         (lambda s: m2(s - shift2),) * 3])

    # pre-mollification margin infimum (grid surrogate), avoiding the two
    # kink abscissas where f'' is only one-sided
    probe = np.linspace(a1, b2g, 4 * n_out + 1)
    probe = probe[np.minimum(np.abs(probe - b1), np.abs(probe - a2g)) > 1e-13]
    inf_margin = float(np.min(pre_margin.f(probe)))
    if inf_margin <= 0:
        raise NotConvergedError(
            f"pre-mollification margin {inf_margin:.3e} not positive; "
            "gluing intervals badly chosen")
    d = inf_margin / 3.0

    delta = 0.45 * min(b1 - a1, f2.b - f2.a)
    cutoff = _Cutoff(a1, b1, a2g, b2g, delta)
    increasing = np.all(f1.f_prime > 0) and np.all(f2.f_prime > 0)

    # first-order estimate of the admissible mollification radius:
    # |Delta f''| ~ eps (sup|eta''| sup|f'| + 2 sup|eta'| sup|f''|)
    trans = np.concatenate([np.linspace(cutoff.mid1, cutoff.lo, 2049),
                            np.linspace(cutoff.hi, cutoff.mid2, 2049)])
    sup_ep = float(np.max(np.abs(cutoff.eta_prime(trans))))
    sup_epp = float(np.max(np.abs(cutoff.eta_pp(trans))))
    sup_fp = float(np.max(np.abs(pw.fp(probe))))
    sup_fpp = float(np.max(np.abs(pw.fpp(probe))))
    scale = sup_epp * sup_fp + 2.0 * sup_ep * sup_fpp + 1e-300
    eps = min(delta / 8.0, 0.3 * inf_margin / scale)
    for it in range(max_eps_halvings):
        mp = MollifiedProfile(pw, cutoff, eps)
        # check grid must resolve the cutoff transitions and the
        # mollification windows around both kinks
        s_check = np.unique(np.concatenate([
            np.linspace(a1, b2g, 2 * n_out - 1),
            np.linspace(cutoff.mid1, cutoff.lo, 2049),
            np.linspace(cutoff.hi, cutoff.mid2, 2049),
            b1 + np.linspace(-4.0 * eps, 4.0 * eps, 513),
            a2g + np.linspace(-4.0 * eps, 4.0 * eps, 513)]))
        eta_chk = cutoff.eta(s_check)
        active = eta_chk > 0.0
        sc = s_check[active]
        marg = (omega_functional(mp.f(sc), mp.fp(sc), n, tau) - mp.fpp(sc))
        ok = np.min(marg) > 0
        if ok and increasing:
            ok = np.min(mp.fp(s_check)) > 0
        if ok:
            break
        eps *= 0.5
    else:
        raise NotConvergedError(
            "mollification radius search exhausted below machine scale; "
            "grid too coarse for the available margin")

    record = BridgeConstruction(zeta, a1, b1, a2g, b2g, shift2,
                                delta, eps, d, it + 1)
    out_margin = _glued_margin_closure(mp, pre_margin, cutoff, n, tau)
    out = ProfileCurve.from_callables(
        mp.f, mp.fp, mp.fpp, a1, b2g, n_out, n=n,
        curvature_margin_fn=out_margin, margin_tau=tau)
    out.bridge = record
    return out


def _glued_margin_closure(mp, pre_margin, cutoff, n, tau):
    def margin(s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        eta = cutoff.eta(s)
        out = np.empty_like(s)
        off = eta == 0.0
        if np.any(off):
            out[off] = pre_margin.f(s[off])
        on = ~off
        if np.any(on):
            sc = s[on]
            out[on] = (omega_functional(mp.f(sc), mp.fp(sc), n, tau)
                       - mp.fpp(sc))
        return out
    return margin


# ---------------------------------------------------------------------------
# bending


@dataclass
class BendRecord:
    s0: float
    delta: float
    width: float
    trivial: bool          # R > tau already held near s0
    min_bracket: float     # certified positive factor of the margin
    clause_holds: Optional[bool]   # u~'(s0-delta) < u'(s0), when u'' > 0


_TAIL_NODES = spectral.gauss_legendre(64)


def _tail_integral(w, d_vals):
    """T(d) = int_0^d exp(-w^2/z^2) dz by Gauss-Legendre quadrature."""
    d_vals = np.atleast_1d(np.asarray(d_vals, dtype=float))
    tq, wq = _TAIL_NODES
    d = np.maximum(d_vals, 0.0)
    z = 0.5 * d[..., None] * (tq + 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        expo = -(w / np.where(z > 0, z, 1.0)) ** 2
    vals = np.where((z > 0) & (expo > -745.0), np.exp(np.maximum(expo, -745.0)),
                    0.0)
    return 0.5 * d * (vals @ wq)


class _BentProfile:
    """u-tilde = u o sigma on [s0 - delta, s0) with bump width w."""

    def __init__(self, calls, r_minus_tau_fn, s0, delta, w, n, tau):
        self.u, self.up, self.upp = calls
        self.rmt = r_minus_tau_fn   # stable R - tau of the input profile
        self.s0, self.delta, self.w = s0, delta, w
        self.n, self.tau = n, tau

    def _e(self, s):
        d = self.s0 - np.asarray(s, dtype=float)
        out = np.zeros_like(d)
        pos = d > 0
        expo = -(self.w / d[pos]) ** 2
        out[pos] = np.where(expo > -745.0, np.exp(expo), 0.0)
        return out

    def sigma(self, s):
        d = self.s0 - np.asarray(s, dtype=float)
        return np.asarray(s, dtype=float) - _tail_integral(self.w, d).reshape(
            np.shape(d))

    def theta(self, s):
        return 1.0 + self._e(s)

    def theta_prime(self, s):
        d = self.s0 - np.asarray(s, dtype=float)
        e = self._e(s)
        out = np.zeros_like(e)
        pos = d > 0
        out[pos] = -2.0 * self.w ** 2 * e[pos] / d[pos] ** 3
        return out

    def f(self, s):
        return self.u(self.sigma(s))

    def fp(self, s):
        return self.up(self.sigma(s)) * self.theta(s)

    def fpp(self, s):
        sig = self.sigma(s)
        th = self.theta(s)
        return self.upp(sig) * th ** 2 + self.up(sig) * self.theta_prime(s)

    def bracket(self, s):
        """Positive factor: R~ - tau = theta^2 (R - tau)(sigma) + e * bracket."""
        s = np.asarray(s, dtype=float)
        d = self.s0 - s
        sig = self.sigma(s)
        u = self.u(sig)
        up = self.up(sig)
        e = self._e(s)
        n = self.n
        return (4.0 * n * up * self.w ** 2 / (u * d ** 3)
                - (2.0 + e) * (n * (n - 1.0) / u ** 2 - self.tau))

    def r_minus_tau(self, s):
        th = self.theta(s)
        return th ** 2 * self.rmt(self.sigma(s)) + self._e(s) * self.bracket(s)

    def margin(self, s):
        """Omega - f'' in the cancellation-free product form."""
        return self.f(s) * self.r_minus_tau(s) / (2.0 * self.n)


def bend_profile(p, s0, tau, max_delta=None, slope_cap=None, n_check=513,
                 max_halvings=40):
    """Bend a profile below s0 so R > tau strictly there.

    Returns (delta, bent ProfileCurve on [s0 - delta, p.b], record).  The
    output coincides with p on [s0, end] exactly.  Strict positivity of
    R - tau on [s0 - delta, s0) is certified in product form: the margin
    equals theta^2 (R - tau)(sigma) + e * bracket with e > 0, so checking
    bracket > 0 (and the input's R >= tau) on the grid certifies it even
    where e underflows.
    """
    calls = _as_callables(p)
    u_fn, up_fn, upp_fn = calls
    if not up_fn(s0) > 0:
        raise InvalidProfileError("bend requires u'(s0) > 0")
    n, a = p.n, p.a
    m_cl = margin_closure(p, tau)
    rmt = lambda s: 2.0 * n * m_cl(s) / u_fn(s)

    delta0 = min(0.8 * (s0 - a), 0.5)
    if max_delta is not None:
        delta0 = min(delta0, max_delta)

    # "nothing needs to be done" when R > tau already holds near s0
    probe = s0 - np.linspace(0.0, delta0, 65)
    vals = m_cl(probe)
    if np.min(vals) > 0:
        delta = delta0
        rec = BendRecord(s0, delta, 0.0, True, float("nan"), None)
        return delta, p, rec

    if slope_cap is None:
        # default cap: the unbent slope at s0, binding when u'' > 0
        slope_cap = float(up_fn(s0)) if upp_fn(s0) > 0 else None
    delta = delta0
    for _ in range(max_halvings):
        w = _BUMP_WIDTH_FACTOR * delta
        bent = _BentProfile(calls, rmt, s0, delta, w, n, tau)
        grid = s0 - np.linspace(delta, delta / n_check, n_check)
        sig_lo = float(bent.sigma(s0 - delta))
        ok = sig_lo > a
        if ok:
            ok = np.all(up_fn(bent.sigma(grid)) > 0)
        if ok:
            ok = np.all(bent.bracket(grid) > 0)
        if ok:
            ok = np.all(rmt(bent.sigma(grid)) > -1e-9)
        clause = None
        if ok and slope_cap is not None:
            clause = float(bent.fp(s0 - delta)) <= slope_cap
            ok = clause
        if ok:
            break
        delta *= 0.5
    else:
        raise NotConvergedError("bending width search exhausted")

    min_bracket = float(np.min(bent.bracket(grid)))
    rec = BendRecord(s0, delta, w, False, min_bracket, clause)

    pw = PiecewiseCurve([s0], [(bent.f, bent.fp, bent.fpp), calls])

    def margin(s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        out = np.empty_like(s)
        left = s < s0
        if np.any(left):
            out[left] = bent.margin(s[left])
        if np.any(~left):
            out[~left] = m_cl(s[~left])
        return out

    num = max(n_check, 257)
    out = ProfileCurve.from_callables(
        pw.f, pw.fp, pw.fpp, s0 - delta, p.b, num, n=n,
        curvature_margin_fn=margin, margin_tau=tau)
    out.bend = rec
    return delta, out, rec


# ---------------------------------------------------------------------------
# attachment to an AdS-Schwarzschild exterior


@dataclass
class AttachmentRecord:
    m_e: float
    m_star: float
    branch: str            # "positive-mass" or "nonpositive-mass"
    r_star: float
    epsilon1: Optional[float]
    mu: Optional[float]    # 2 (m_e - m_star) / f(b), nonpositive-mass branch
    bend: BendRecord
    bridge: BridgeConstruction
    shift_ext: float       # global s = exterior s + shift_ext
    tail_start: float      # global s past which the profile is exactly u_{m_e}
    s_end: float
    increasing: bool


def _backward_reach(params, r_star, floor):
    """How far backward the exterior profile extends above a radius floor."""
    def rhs(s, y):
        return [y[1], params.b * y[0] + params.m / y[0] ** 2]

    def stop(s, y):
        return y[0] - floor

    stop.terminal = True
    f0 = max(metric_coefficient(params, r_star), 0.0)
    sol = solve_ivp(rhs, (0.0, -3.0), [r_star, np.sqrt(f0)],
                    method="DOP853", rtol=1e-10, atol=1e-12, events=stop)
    return float(sol.t[-1])


def glue_to_ads_schwarzschild(f, m_e, tail_length=2.0, n_out=8193):
    """Extend a profile by an AdS-Schwarzschild (b = 1) exterior of mass m_e.

    Returns (extension ProfileCurve, AttachmentRecord); beyond
    record.tail_start the profile is the exact exterior model, so the
    total mass of the extension is m_e by construction.
    """
    tau = -6.0
    fb, fpb = _endpoint(f, -1)
    if not fpb > 0:
        raise HypothesisError("(ii) H > 0", "profile end must have f' > 0")
    m_star = float(profile_hawking_mass(fb, fpb))
    if m_star < -fb ** 3:
        raise HypothesisError(
            "(iii) mass lower bound",
            f"end Hawking mass {m_star:.6g} < -f(b)^3 = {-fb ** 3:.6g}")
    if not m_e > m_star:
        raise AdmissibilityError(
            f"target mass {m_e:.6g} must exceed the end Hawking mass "
            f"{m_star:.6g}")

    params = AdSSchwParams(m_e, 1.0)
    epsilon1 = None
    mu = None
    if m_e > 0:
        branch = "positive-mass"
        # slope matching: F(r_star) = f'(b)^2 with r_star > r_plus
        target = fpb ** 2
        G = lambda r: metric_coefficient(params, r) - target
        hi = params.r_plus + 1.0
        while G(hi) < 0:
            hi *= 2.0
        r_star = brentq(G, params.r_plus, hi, xtol=1e-15, rtol=8.9e-16)
        if not r_star > fb:
            raise NotConvergedError(
                "slope-matched exterior radius fails r_star > f(b); "
                "input profile violates the attachment chain of inequalities")
    else:
        branch = "nonpositive-mass"
        mu = 2.0 * (m_e - m_star) / fb
        epsilon1 = 0.25 * fb
        for _ in range(60):
            r_star = fb + epsilon1
            F = metric_coefficient(params, r_star)
            if F > 0 and 1.03 * np.sqrt(F) < fpb:
                break
            epsilon1 *= 0.5
        else:
            raise AdmissibilityError(
                "mass margin too small: no exterior anchor with "
                "u' comfortably below f'(b) "
                f"(mu = {mu:.3e})")

    reach = _backward_reach(params, r_star, 0.3 * min(fb, r_star))
    s_min = 0.9 * reach if reach < -1e-6 else -1e-6
    ext = profile_solve(params, r_star, tail_length + 3.0, 2049, s_min=s_min)
    # the model family satisfies R = -6 identically; adopt the exact margin
    ext.curvature_margin_fn = lambda s: np.zeros_like(np.asarray(s, float))
    ext.margin_tau = tau

    # delta window: small enough that the bent profile stays above f(b)
    up0 = float(np.sqrt(max(metric_coefficient(params, r_star), 0.0)))
    delta_cap = min(-s_min * 0.9, 0.5,
                    0.9 * (r_star - fb) / (1.02 * max(up0, fpb)))
    delta_b, bent, bend_rec = bend_profile(
        ext, 0.0, tau, max_delta=delta_cap, slope_cap=fpb)
    # keep only bends that stay above the piece-1 end value
    for _ in range(30):
        f2a = float(bent.f_fn(-delta_b)) if bent.f_fn else bent.f[0]
        if f2a > fb:
            break
        delta_b, bent, bend_rec = bend_profile(
            ext, 0.0, tau, max_delta=0.5 * delta_b, slope_cap=fpb)
    else:
        raise NotConvergedError("could not fit the bend below the anchor")

    a2, b2 = -delta_b, -0.5 * delta_b
    bc = _as_callables(bent)
    f2 = ProfileCurve.from_callables(
        bc[0], bc[1], bc[2], a2, b2, 1025, n=2,
        curvature_margin_fn=bent.curvature_margin_fn, margin_tau=tau)

    problem = GluingProblem(f, f2, tau, n=2)
    glued = glue_profiles(problem)
    rec = glued.bridge
    shift_ext = rec.shift2
    tail_start = shift_ext            # exterior s = 0 in global coordinates
    s_end = shift_ext + tail_length

    gcalls = _as_callables(glued)
    bcalls = _as_callables(bent)
    pw = PiecewiseCurve(
        [rec.b2],
        [gcalls,
         tuple(lambda s, fn=fn: fn(s - shift_ext) for fn in bcalls)])
    g_marg = margin_closure(glued, tau)
    b_marg = margin_closure(bent, tau)

    def margin(s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        out = np.empty_like(s)
        left = s <= rec.b2
        if np.any(left):
            out[left] = g_marg(s[left])
        if np.any(~left):
            out[~left] = b_marg(s[~left] - shift_ext)
        return out

    increasing = bool(np.all(glued.f_prime > 0))
    out = ProfileCurve.from_callables(
        pw.f, pw.fp, pw.fpp, glued.a, s_end, n_out, n=2,
        curvature_margin_fn=margin, margin_tau=tau)
    record = AttachmentRecord(m_e, m_star, branch, r_star, epsilon1, mu,
                              bend_rec, rec, shift_ext, tail_start, s_end,
                              increasing)
    out.attachment = record
    return out, record
