"""End-to-end extension builders and mass upper bounds.

Three collar constructions realize prescribed boundary data with scalar
curvature above -6: a minimal-boundary collar with an eigenfunction
lapse, and two constant-mean-curvature collars whose level profiles
follow a negative-mass model family (flat-model b = 0 and hyperboloidal
b > 0 variants).  Each collar ends in a rotationally symmetric zone that
is glued to an AdS-Schwarzschild exterior of prescribed mass, yielding
upper bounds for the corresponding quasi-local mass.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .ads import AdSSchwParams, metric_coefficient, profile_solve
from .errors import HypothesisError, NotConvergedError
from .geometry import (BartnikData, CollarMetric, ProfileCurve,
                       collar_scalar_curvature, gauss_curvature,
                       hawking_mass_level, mean_curvature_level,
                       omega_functional, profile_hawking_mass)
from .gluing import glue_to_ads_schwarzschild
from .metric_path import (compute_alpha_beta, eigenpath, first_eigenpair,
                          flow_to_roundness, reparametrize_path,
                          area_form_normalize, constant_path)

_A_SAFETY = 1.05        # strict inequalities, grid-robust
_A_FLOOR = 0.02         # lapse floor when the feasible infimum is 0
_TAU = -6.0


# ---------------------------------------------------------------------------
# parameter records


@dataclass
class MinimalCollarParams:
    A: float
    epsilon: float
    alpha: float
    beta: float
    sup_dtu_over_u: float
    inf_u_sq_lambda_plus_3: float
    hypothesis: str                # "lambda1" or "K>-3"
    u_end: float                   # constant eigenfunction value at t = 1
    C_value: float                 # end-mass slack coefficient
    C_expression: str = "r0/2 * (1 + r0^2) + r0^3"


@dataclass
class CMCCollarParams:
    variant: str                   # "b0" or "bpos"
    m: float
    b: float
    k: float
    A: float
    A0: float
    alpha: float
    beta: float
    delta: Optional[float] = None  # bpos coupling only
    xi: Optional[float] = None
    zeta: Optional[float] = None
    finite_m_bound: float = float("nan")
    limit_bound: float = float("nan")


# ---------------------------------------------------------------------------
# round-zone profiles (the rotationally symmetric collar tails in arclength)


def minimal_round_zone(r0, A_u1, epsilon, theta_param, num=513):
    """f(s) = r0 sqrt(1 + eps s^2 / (A u(1))^2) on [A u(1) theta, A u(1)]."""
    c = epsilon / A_u1 ** 2
    f = lambda s: r0 * np.sqrt(1.0 + c * np.asarray(s, float) ** 2)
    fp = lambda s: r0 * c * np.asarray(s, float) / np.sqrt(
        1.0 + c * np.asarray(s, float) ** 2)
    fpp = lambda s: r0 * c / (1.0 + c * np.asarray(s, float) ** 2) ** 1.5
    return ProfileCurve.from_callables(f, fp, fpp, A_u1 * theta_param, A_u1,
                                       num, n=2)


def cmc_round_zone(model_profile, k, A, theta_param, num=513):
    """f(s) = u_{m,b}(k s) on [A theta, A] in collar arclength s = A t."""
    u, up, upp = (model_profile.f_fn, model_profile.fp_fn,
                  model_profile.fpp_fn)
    f = lambda s: u(k * np.asarray(s, float))
    fp = lambda s: k * up(k * np.asarray(s, float))
    fpp = lambda s: k * k * upp(k * np.asarray(s, float))
    return ProfileCurve.from_callables(f, fp, fpp, A * theta_param, A,
                                       num, n=2)


# ---------------------------------------------------------------------------
# minimal collar


def build_minimal_collar(data, path, eigen, epsilon=0.01):
    """Collar gamma = A^2 u(t,.)^2 dt^2 + (1 + eps t^2) g(t) with minimal
    boundary; A is the smallest grid-feasible lapse scale times 1.05."""
    if data.H0 != 0.0:
        raise HypothesisError("H0", "minimal collar requires H0 = 0")
    if not 0.0 < epsilon < 1.0:
        raise HypothesisError("epsilon", "need 0 < epsilon < 1")
    g0 = data.metric
    lam1, _ = first_eigenpair(g0)
    minK = float(np.min(gauss_curvature(g0)))
    if lam1 > 0:
        hypothesis = "lambda1"
    elif minK > -3.0:
        hypothesis = "K>-3"
    else:
        raise HypothesisError(
            "stability", f"neither lambda_1 = {lam1:.4g} > 0 nor "
            f"min K = {minK:.4g} > -3 holds")
    if np.any(eigen.lambda_ <= 0):
        raise HypothesisError(
            "lambda(t)", "first eigenvalue must stay positive along the path")

    alpha, beta = compute_alpha_beta(path)
    sup_dtu = eigen.dtu_over_u_sup
    inf_u2l3 = eigen.inf_u_sq_lambda_plus_3()
    rhs = 2.0 + alpha + 2.0 * sup_dtu
    if inf_u2l3 <= 0:
        raise NotConvergedError(
            f"lapse selection infeasible: inf u^2 (lambda + 3) = "
            f"{inf_u2l3:.4g} <= 0")
    A = _A_SAFETY * np.sqrt(rhs / inf_u2l3)

    u_end_row = eigen.u[-1]
    u_end = float(np.mean(u_end_row))
    if np.max(np.abs(u_end_row - u_end)) > 1e-6 * abs(u_end):
        raise NotConvergedError("end eigenfunction not constant; path not "
                                "round past theta")
    if not epsilon / (1.0 + epsilon) < (A * u_end) ** 2:
        raise HypothesisError(
            "epsilon", f"need eps/(1+eps) = {epsilon / (1 + epsilon):.4g} "
            f"< (A u(1))^2 = {(A * u_end) ** 2:.4g}")

    E_fn = lambda t: np.sqrt(1.0 + epsilon * np.asarray(t, float) ** 2)
    Ep_fn = lambda t: epsilon * np.asarray(t, float) / E_fn(t)
    Epp_fn = lambda t: epsilon / E_fn(t) ** 3
    collar = CollarMetric(path, A * eigen.u, E_fn, Ep_fn, Epp_fn)

    R = collar_scalar_curvature(collar)
    min_R6 = float(np.min(R)) + 6.0
    if min_R6 <= 0:
        raise NotConvergedError(
            f"collar curvature check failed: min(R + 6) = {min_R6:.4e}")

    r0 = data.r0
    C = 0.5 * r0 * (1.0 + r0 ** 2) + r0 ** 3
    collar.params = MinimalCollarParams(
        A=float(A), epsilon=epsilon, alpha=alpha, beta=beta,
        sup_dtu_over_u=sup_dtu, inf_u_sq_lambda_plus_3=inf_u2l3,
        hypothesis=hypothesis, u_end=u_end, C_value=C)
    collar.min_R_plus_6 = min_R6
    return collar


# ---------------------------------------------------------------------------
# CMC collars


def _cmc_common_checks(data):
    if data.H0 <= 0:
        raise HypothesisError("H0", "CMC collar requires H0 > 0")
    r0 = data.r0
    if not (data.H0 * r0 / 2.0) ** 2 < 1.0 + 3.0 * r0 ** 2:
        raise HypothesisError(
            "H0^2 r0^2/4 < 1 + 3 r0^2",
            f"H0^2 r0^2/4 = {(data.H0 * r0 / 2.0) ** 2:.4g} >= "
            f"{1.0 + 3.0 * r0 ** 2:.4g}")


def _cmc_collar(data, path, params, model, s_samples=1025):
    """Assemble the CMC collar gamma = A^2 dt^2 + r0^-2 u(Akt)^2 g(t) and
    grid-verify its curvature and boundary realization."""
    A, k, r0 = params.A, params.k, data.r0
    u, up, upp = model.f_fn, model.fp_fn, model.fpp_fn
    E_fn = lambda t: u(A * k * np.asarray(t, float)) / r0
    Ep_fn = lambda t: A * k * up(A * k * np.asarray(t, float)) / r0
    Epp_fn = lambda t: (A * k) ** 2 * upp(A * k * np.asarray(t, float)) / r0
    v = np.full((len(path.t_grid), len(path.x)), A)
    collar = CollarMetric(path, v, E_fn, Ep_fn, Epp_fn)

    H0_real = float(np.max(np.abs(mean_curvature_level(collar, 0) - data.H0)))
    if H0_real > 1e-10:
        raise NotConvergedError(
            f"boundary mean curvature residual {H0_real:.3e} > 1e-10")
    R = collar_scalar_curvature(collar)
    min_R6 = float(np.min(R)) + 6.0
    if min_R6 <= 0:
        raise NotConvergedError(
            f"collar curvature check failed: min(R + 6) = {min_R6:.4e}")
    collar.params = params
    collar.min_R_plus_6 = min_R6
    collar.boundary_H_residual = H0_real
    return collar


def build_cmc_collar_b0(data, path, m):
    """CMC collar on the b = 0 (flat-model) negative-mass profile family."""
    _cmc_common_checks(data)
    if m >= 0:
        raise HypothesisError("m", "model mass must be negative")
    alpha, beta = compute_alpha_beta(path)
    r0, H0 = data.r0, data.H0
    hh = (H0 * r0 / 2.0) ** 2
    if alpha > 0 and not hh < (beta + 3.0 * r0 ** 2) / alpha:
        raise HypothesisError(
            "H0^2 r0^2/4 < (beta + 3 r0^2)/alpha",
            f"{hh:.4g} >= {(beta + 3.0 * r0 ** 2) / alpha:.4g}")

    k2 = hh / (1.0 - 2.0 * m / r0)
    k = np.sqrt(k2)
    radicand = beta + 3.0 * r0 ** 2 - k2 * (1.0 + alpha * (1.0 - 2.0 * m / r0))
    if radicand <= 0:
        # feasible for |m| large enough; report the threshold
        thr = (hh + alpha * hh - beta - 3.0 * r0 ** 2) * r0 / (
            2.0 * max(hh, 1e-300))
        raise HypothesisError(
            "A0 radicand", f"radicand {radicand:.4g} <= 0; "
            f"choose m < {-abs(thr):.4g} (larger |m|)")
    A0 = r0 * np.sqrt(alpha / radicand)
    A = max(_A_SAFETY * A0, _A_FLOOR)

    s_needed = A * k
    model = profile_solve(AdSSchwParams(m, 0.0), r0, 1.05 * s_needed + 1e-9,
                          1025)
    model.curvature_margin_fn = None

    xi = H0 * r0 / 2.0 * np.sqrt(
        alpha / (beta + 3.0 * r0 ** 2 - alpha * hh)) if alpha > 0 else 0.0
    m_H = data.hawking_mass()
    limit_bound = ((xi + 1.0) * m_H
                   + 0.5 * r0 ** 3 * xi * (H0 ** 2 / 4.0
                                           + (xi + 1.0) * (xi + 2.0)))
    # pre-limit certificate, valid for the chosen A > A0 at this m
    hA = H0 * A / 2.0
    finite_bound = ((hA + 1.0) * m_H - hA * k2 * m
                    + 0.5 * r0 ** 3 * (hA + 1.0) * ((hA + 1.0) ** 2 - 1.0))

    params = CMCCollarParams(variant="b0", m=m, b=0.0, k=float(k), A=float(A),
                             A0=float(A0), alpha=alpha, beta=beta, xi=float(xi),
                             finite_m_bound=float(finite_bound),
                             limit_bound=float(limit_bound))
    collar = _cmc_collar(data, path, params, model)
    collar.model = model
    end = hawking_mass_level(collar, len(path.t_grid) - 1)
    if end > finite_bound + 1e-10:
        raise NotConvergedError(
            f"end mass {end:.6g} exceeds its pre-limit bound "
            f"{finite_bound:.6g}")
    collar.end_mass = float(end)
    return collar


def build_cmc_collar_bpos(data, path, m, delta=None, epsilon_budget=0.1):
    """CMC collar on the b > 0 (hyperboloidal-model) profile family."""
    _cmc_common_checks(data)
    if m >= 0:
        raise HypothesisError("m", "model mass must be negative")
    alpha, beta = compute_alpha_beta(path)
    r0, H0 = data.r0, data.H0
    if not beta > -3.0 * r0 ** 2:
        raise HypothesisError(
            "beta > -3 r0^2", f"beta = {beta:.4g} <= {-3.0 * r0 ** 2:.4g}")
    if delta is None:
        delta = min(H0 ** 2 / 8.0, epsilon_budget / 2.0, 0.25)
    if not 0.0 < delta < min(H0 ** 2 / 4.0, epsilon_budget, 0.5):
        raise HypothesisError(
            "delta", f"need 0 < delta < min(H0^2/4, eps, 1/2) = "
            f"{min(H0 ** 2 / 4.0, epsilon_budget, 0.5):.4g}, got {delta:.4g}")

    b = delta * (1.0 - 2.0 * m / r0) / ((H0 ** 2 / 4.0 - delta) * r0 ** 2)
    k2 = (H0 ** 2 / 4.0 - delta) * r0 ** 2 / (1.0 - 2.0 * m / r0)
    k = np.sqrt(k2)
    # consistency of the coupling and the boundary-H relation
    assert abs(k2 * b - delta) <= 1e-12 * max(1.0, delta)
    k2_check = (H0 * r0 / 2.0) ** 2 / (1.0 + b * r0 ** 2 - 2.0 * m / r0)
    assert abs(k2 - k2_check) <= 1e-12 * k2

    A0 = (np.sqrt(alpha / 6.0) if beta > 0
          else np.sqrt(alpha / (3.0 + beta / r0 ** 2)))
    A = max(_A_SAFETY * A0, _A_FLOOR)

    model = profile_solve(AdSSchwParams(m, b), r0, 1.05 * A * k + 1e-9, 1025)
    model.curvature_margin_fn = None

    zeta = float(np.exp(A0 * H0 / 2.0))
    m_H = data.hawking_mass()
    limit_bound = (zeta * m_H + (zeta - 1.0) * H0 ** 2 * r0 ** 3 / 8.0
                   + zeta * (zeta ** 2 - 1.0) * r0 ** 3 / 2.0)
    # unconditional pre-limit bound from the sinh-comparison estimate
    arg = np.sqrt(delta) * A * np.sqrt(
        1.0 - 2.0 * m / (r0 * (1.0 + b * r0 ** 2)))
    U = (r0 * np.cosh(arg)
         + np.sqrt(1.0 / b + r0 ** 2) * np.sinh(arg))
    finite_bound = 0.5 * U * (1.0 - k2 + (1.0 - delta) * U ** 2) + k2 * m

    params = CMCCollarParams(variant="bpos", m=m, b=float(b), k=float(k),
                             A=float(A), A0=float(A0), alpha=alpha, beta=beta,
                             delta=float(delta), zeta=zeta,
                             finite_m_bound=float(finite_bound),
                             limit_bound=float(limit_bound))
    collar = _cmc_collar(data, path, params, model)
    collar.model = model
    end = hawking_mass_level(collar, len(path.t_grid) - 1)
    if end > finite_bound + 1e-10:
        raise NotConvergedError(
            f"end mass {end:.6g} exceeds its pre-limit bound "
            f"{finite_bound:.6g}")
    collar.end_mass = float(end)
    collar.limit_slack = float(end - limit_bound)
    return collar


# ---------------------------------------------------------------------------
# mass upper bounds


def bartnik_mass_upper_bound(data, path, variant="auto"):
    """Quasi-local mass upper bound realized by the collar constructions.

    minimal: the Hawking mass (r0 + r0^3)/2 of the data itself; cmc-b0
    and cmc-bpos: the xi- and zeta-weighted bounds; auto: the minimum of
    the applicable variants.
    """
    alpha, beta = compute_alpha_beta(path)
    r0, H0 = data.r0, data.H0
    m_H = data.hawking_mass()

    def minimal_bound():
        if H0 != 0:
            raise HypothesisError("H0", "minimal bound requires H0 = 0")
        lam1, _ = first_eigenpair(data.metric)
        minK = float(np.min(gauss_curvature(data.metric)))
        if lam1 <= 0 and minK <= -3.0:
            raise HypothesisError(
                "stability", f"neither lambda_1 = {lam1:.4g} > 0 nor "
                f"min K = {minK:.4g} > -3 holds")
        return 0.5 * (r0 + r0 ** 3)

    def b0_bound():
        _cmc_common_checks(data)
        hh = (H0 * r0 / 2.0) ** 2
        if alpha > 0 and not hh < (beta + 3.0 * r0 ** 2) / alpha:
            raise HypothesisError(
                "H0^2 r0^2/4 < (beta + 3 r0^2)/alpha",
                f"{hh:.4g} >= {(beta + 3.0 * r0 ** 2) / alpha:.4g}")
        xi = (H0 * r0 / 2.0 * np.sqrt(
            alpha / (beta + 3.0 * r0 ** 2 - alpha * hh)) if alpha > 0 else 0.0)
        return ((xi + 1.0) * m_H
                + 0.5 * r0 ** 3 * xi * (H0 ** 2 / 4.0
                                        + (xi + 1.0) * (xi + 2.0)))

    def bpos_bound():
        _cmc_common_checks(data)
        if not beta > -3.0 * r0 ** 2:
            raise HypothesisError(
                "beta > -3 r0^2", f"beta = {beta:.4g}")
        A0 = (np.sqrt(alpha / 6.0) if beta > 0
              else np.sqrt(alpha / (3.0 + beta / r0 ** 2)))
        zeta = np.exp(A0 * H0 / 2.0)
        return (zeta * m_H + (zeta - 1.0) * H0 ** 2 * r0 ** 3 / 8.0
                + zeta * (zeta ** 2 - 1.0) * r0 ** 3 / 2.0)

    if variant == "minimal":
        return float(minimal_bound())
    if variant == "cmc-b0":
        return float(b0_bound())
    if variant == "cmc-bpos":
        return float(bpos_bound())
    if variant == "auto":
        if H0 == 0:
            return float(minimal_bound())
        vals = []
        errs = []
        for fn in (b0_bound, bpos_bound):
            try:
                vals.append(float(fn()))
            except HypothesisError as e:
                errs.append(str(e))
        if not vals:
            raise HypothesisError("auto", "; ".join(errs))
        return min(vals)
    raise ValueError(f"unknown variant {variant!r}")


# ---------------------------------------------------------------------------
# end-to-end extensions


@dataclass
class ExtensionReport:
    variant: str
    min_R_plus_6: float
    boundary_metric_residual: float
    boundary_H_residual: float
    level_masses: list                 # (t, mass) pairs along the collar
    exterior_mass: float
    bound_values: dict
    parameters: dict
    certificates: dict

    @property
    def passed(self):
        return all(c["pass"] for c in self.certificates.values())


def _certificate(value, tol, mode="leq"):
    ok = value <= tol if mode == "leq" else value > tol
    return {"value": float(value), "tolerance": float(tol),
            "mode": mode, "pass": bool(ok)}


def prepare_path(g0, n_t=65, theta_param=0.75, round_tol=1e-6):
    """Flow the boundary metric to roundness and reparametrize so the
    path is frozen (round) past theta_param with g(0) = g0 bitwise."""
    if np.max(np.abs(g0.phi_coeffs[1:])) <= 1e-14:
        return constant_path(g0, n_t=n_t, theta_param=theta_param)
    flow = flow_to_roundness(g0, tol=0.5 * round_tol)
    raw = area_form_normalize(flow)
    return reparametrize_path(raw, theta_param=theta_param, n_t=n_t,
                              round_tol=round_tol)


def build_extension(data, target_mass, variant, m_model=-1.0e4,
                    epsilon=0.01, delta=None, n_t=65, theta_param=0.75,
                    tail_length=2.0, path=None):
    """Collar + gluing pipeline; returns (ExtensionReport, ProfileCurve).

    The profile covers the rotationally symmetric part (round collar
    zone, bridge, and exterior); the collar over [0, theta] carries the
    non-round geometry and is certified by its own curvature sweep.
    """
    if path is None:
        path = prepare_path(data.metric, n_t=n_t, theta_param=theta_param)
    r0 = data.r0

    if variant == "auto":
        variant = "minimal" if data.H0 == 0 else "cmc-b0"

    if variant == "minimal":
        eigen = eigenpath(path)
        collar = build_minimal_collar(data, path, eigen, epsilon=epsilon)
        p = collar.params
        A_u1 = p.A * p.u_end
        f1 = minimal_round_zone(r0, A_u1, p.epsilon, path.theta_param)
        bound_values = {"minimal": 0.5 * (r0 + r0 ** 3)}
        end_bound = data.hawking_mass() + np.sqrt(p.epsilon) * p.C_value
        param_echo = {"variant": variant, "A": p.A, "epsilon": p.epsilon,
                      "alpha": p.alpha, "beta": p.beta, "r0": r0,
                      "H0": data.H0, "u_end": p.u_end,
                      "C": p.C_value, "C_expression": p.C_expression,
                      "hypothesis": p.hypothesis,
                      "theta_param": path.theta_param, "n_t": n_t,
                      "target_mass": target_mass}
    elif variant in ("cmc-b0", "cmc-bpos"):
        if variant == "cmc-b0":
            collar = build_cmc_collar_b0(data, path, m_model)
        else:
            collar = build_cmc_collar_bpos(data, path, m_model, delta=delta)
        p = collar.params
        f1 = cmc_round_zone(collar.model, p.k, p.A, path.theta_param)
        bound_values = {f"cmc-{p.variant}-limit": p.limit_bound,
                        f"cmc-{p.variant}-finite-m": p.finite_m_bound}
        end_bound = p.finite_m_bound
        param_echo = {"variant": variant, "m": p.m, "b": p.b, "k": p.k,
                      "A": p.A, "A0": p.A0, "delta": p.delta,
                      "alpha": p.alpha, "beta": p.beta, "r0": r0,
                      "H0": data.H0, "xi": p.xi, "zeta": p.zeta,
                      "theta_param": path.theta_param, "n_t": n_t,
                      "target_mass": target_mass}
    else:
        raise ValueError(f"unknown variant {variant!r}")

    ext, rec = glue_to_ads_schwarzschild(f1, target_mass,
                                         tail_length=tail_length)

    # boundary realization
    g0 = data.metric
    bm_res = float(np.max(np.abs(np.exp(2.0 * path.phis_raw[0])
                                 - np.exp(2.0 * g0.phi))))
    if variant == "minimal":
        bh_res = float(np.max(np.abs(mean_curvature_level(collar, 0))))
    else:
        bh_res = collar.boundary_H_residual

    # curvature certificates
    s = np.linspace(ext.a, ext.b, 8193)
    margin = ext.curvature_margin_fn(s)
    strict = s <= rec.bridge.b2
    bent_zone = (s > rec.bridge.b2) & (s < rec.tail_start)
    tail = s >= rec.tail_start
    min_strict = float(np.min(margin[strict]))
    min_bent = float(np.min(margin[bent_zone])) if np.any(bent_zone) else 0.0
    st = s[tail]
    tail_res = float(np.max(np.abs(
        omega_functional(ext.f_fn(st), ext.fp_fn(st), 2, _TAU)
        - ext.fpp_fn(st)))) if np.any(tail) else 0.0
    # convert the profile margin to R + 6 units: R + 6 = (4/f) (Omega - f'')
    min_R6_profile = float(np.min(4.0 * margin[strict] / ext.f_fn(s[strict])))
    min_R6 = min(collar.min_R_plus_6, min_R6_profile)

    # mean convexity: H > 0 on the collar interior and f' > 0 beyond
    H_min = min(float(np.min(mean_curvature_level(collar, i)))
                for i in range(1, len(path.t_grid)))
    fp_min = float(np.min(ext.fp_fn(s)))

    n_lev = len(path.t_grid)
    level_masses = [(float(path.t_grid[i]),
                     float(hawking_mass_level(collar, i)))
                    for i in range(n_lev)]
    end_mass = level_masses[-1][1]

    tail_mass_res = float(np.max(np.abs(
        profile_hawking_mass(ext.f_fn(st), ext.fp_fn(st)) - target_mass)))

    certificates = {
        "boundary_metric": _certificate(bm_res, 1e-10),
        "boundary_mean_curvature": _certificate(bh_res, 1e-10),
        "collar_scalar": _certificate(collar.min_R_plus_6, 0.0, mode="gt"),
        "profile_scalar_strict": _certificate(min_strict, 0.0, mode="gt"),
        "profile_scalar_bent": _certificate(
            min(min_bent, rec.bend.min_bracket
                if not rec.bend.trivial else 1.0), 0.0,
            mode="gt" if rec.bend.trivial else "geq_zero_and_bracket"),
        "tail_scalar_residual": _certificate(tail_res, 1e-8),
        "mean_convexity": _certificate(min(H_min, fp_min), 0.0, mode="gt"),
        "tail_mass": _certificate(tail_mass_res, 1e-8),
        "end_mass_bound": _certificate(end_mass - end_bound, 1e-10),
        "admissibility": _certificate(end_mass - target_mass, 0.0),
    }
    # geq_zero_and_bracket: the bent-zone margin is certified positive in
    # product form; the grid value may underflow to exact zero
    c = certificates["profile_scalar_bent"]
    if c["mode"] == "geq_zero_and_bracket":
        c["pass"] = bool(min_bent >= 0.0 and rec.bend.min_bracket > 0.0)

    report = ExtensionReport(
        variant=variant, min_R_plus_6=min_R6,
        boundary_metric_residual=bm_res, boundary_H_residual=bh_res,
        level_masses=level_masses, exterior_mass=float(target_mass),
        bound_values={k: float(v) for k, v in bound_values.items()},
        parameters=param_echo, certificates=certificates)
    report.attachment = rec
    report.collar = collar
    return report, ext
