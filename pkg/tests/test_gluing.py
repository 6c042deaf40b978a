"""Bridge slope, mollified gluing, bending, and model attachment."""

import numpy as np
import pytest

from ahext.ads import AdSSchwParams, profile_solve
from ahext.errors import (AdmissibilityError, HypothesisError,
                          InvalidProfileError)
from ahext.geometry import ProfileCurve, profile_margin, profile_hawking_mass
from ahext.gluing import (build_zeta, GluingProblem, glue_profiles,
                          bend_profile, glue_to_ads_schwarzschild, _Cutoff)


def _cone(f0, slope, length=1.0, num=513, n=2):
    f_fn = lambda s: f0 + slope * np.asarray(s, float)
    fp_fn = lambda s: np.full_like(np.asarray(s, float), slope)
    fpp_fn = lambda s: np.zeros_like(np.asarray(s, float))
    return ProfileCurve.from_callables(f_fn, fp_fn, fpp_fn, 0.0, length,
                                       num, n=n)


# --- bridge slope ----------------------------------------------------------

@pytest.mark.parametrize("sl,sr,gap", [
    (0.95, 0.8, 0.3), (1.0, 1.0, 0.5), (0.5, -0.2, 0.7), (2.0, 0.0, 1.0)])
def test_zeta_bridge_contract(sl, sr, gap):
    z = build_zeta(sl, sr, gap)
    s = np.linspace(0.0, z.L, 4001)
    vals = z.zeta(s)
    assert abs(vals[0] - sl) < 1e-14 and abs(vals[-1] - sr) < 1e-14
    assert np.all(np.diff(vals) <= 1e-14)            # nonincreasing
    # exact integral: the plateau fraction is chosen for this identity
    assert abs(z.antiderivative(np.array(z.L)) - gap) < 1e-14 * max(1.0, gap)
    # C^1: analytic derivative against central differences
    h = 1e-7 * z.L
    mid = s[1:-1]
    fd = (z.zeta(mid + h) - z.zeta(mid - h)) / (2.0 * h)
    assert np.max(np.abs(fd - z.zeta_prime(mid))) < 1e-5
    # antiderivative differentiates back to zeta
    fd2 = (z.antiderivative(mid + h) - z.antiderivative(mid - h)) / (2.0 * h)
    assert np.max(np.abs(fd2 - vals[1:-1])) < 1e-6


def test_zeta_bridge_guards():
    with pytest.raises(HypothesisError):
        build_zeta(-0.1, -0.2, 1.0)
    with pytest.raises(HypothesisError):
        build_zeta(0.5, 0.6, 1.0)
    with pytest.raises(HypothesisError):
        build_zeta(0.5, 0.4, -1.0)


# --- cutoff ----------------------------------------------------------------

def test_cutoff_plateaus_and_derivative():
    c = _Cutoff(0.0, 1.0, 2.0, 3.0, 0.2)
    s = np.linspace(0.0, 3.0, 1201)
    eta = c.eta(s)
    assert np.all(eta[s <= 0.5] == 0.0)
    assert np.all(eta[s >= 2.5] == 0.0)
    assert np.all(eta[(s >= 0.8) & (s <= 2.2)] == 1.0)
    assert np.all((eta >= 0.0) & (eta <= 1.0))
    h = 1e-6
    fd = (c.eta(s + h) - c.eta(s - h)) / (2.0 * h)
    assert np.max(np.abs(fd - c.eta_prime(s))) < 1e-6


# --- gluing ----------------------------------------------------------------

def test_glue_cones_outer_halves_bitwise():
    f1 = _cone(0.5, 0.95)
    f2 = _cone(1.75, 0.8)
    out = glue_profiles(GluingProblem(f1, f2, 0.0))
    rec = out.bridge
    # outer halves coincide with the inputs bitwise
    mid1 = 0.5 * (rec.a1 + rec.b1)
    mid2 = 0.5 * (rec.a2 + rec.b2)
    s_left = np.linspace(rec.a1, mid1, 257)
    s_right = np.linspace(mid2, rec.b2, 257)
    assert np.array_equal(out.f_fn(s_left), f1.f_fn(s_left))
    assert np.array_equal(out.fp_fn(s_left), f1.fp_fn(s_left))
    assert np.array_equal(out.f_fn(s_right), f2.f_fn(s_right - rec.shift2))
    assert np.array_equal(out.fp_fn(s_right), f2.fp_fn(s_right - rec.shift2))
    # strict curvature margin and monotonicity everywhere
    s = np.linspace(rec.a1, rec.b2, 8193)
    assert np.min(out.curvature_margin_fn(s)) > 0
    assert np.min(out.fp_fn(s)) > 0
    # C^1 across the glue zone at the output resolution
    assert np.max(np.abs(np.diff(out.f) / out.h -
                         0.5 * (out.f_prime[:-1] + out.f_prime[1:]))) < 1e-3


def test_glue_dimension_three():
    f1 = _cone(0.5, 0.95, n=3)
    f2 = _cone(1.75, 0.8, n=3)
    out = glue_profiles(GluingProblem(f1, f2, 0.0, n=3))
    s = np.linspace(out.a, out.b, 4097)
    assert np.min(out.curvature_margin_fn(s)) > 0


def test_glue_hypothesis_clauses():
    f1 = _cone(0.5, 0.95)
    with pytest.raises(HypothesisError) as e:
        GluingProblem(f1, _cone(1.75, 0.8), 1.0).validate()
    assert e.value.clause == "tau"
    with pytest.raises(HypothesisError) as e:
        GluingProblem(f1, _cone(0.3, 0.8), 0.0).validate()   # not above f1
    assert e.value.clause == "(ii)"
    with pytest.raises(HypothesisError) as e:
        # nonincreasing first piece: clause (iii) needs f1' > 0
        GluingProblem(_cone(0.5, -0.1), _cone(1.0, -0.2), 0.0).validate()
    assert e.value.clause == "(iii)"
    with pytest.raises(HypothesisError) as e:
        GluingProblem(f1, _cone(1.75, 0.96), 0.0).validate() # steeper than f1
    assert e.value.clause == "(iv)"
    with pytest.raises(HypothesisError) as e:
        # slope 1 cone has R = 0 = tau: hypothesis (i) fails non-strictly
        GluingProblem(_cone(0.5, 1.0), _cone(1.9, 0.8), 0.0).validate()
    assert e.value.clause == "(i) piece 1"


def test_glue_margin_infimum_grid_refinement():
    # the grid-min stand-in for the margin infimum stabilizes under
    # refinement of the probe resolution
    f1 = _cone(0.5, 0.95)
    f2 = _cone(1.75, 0.8)
    ds = [glue_profiles(GluingProblem(f1, f2, 0.0), n_out=n).bridge.d
          for n in (1025, 2049, 4097, 8193)]
    rel = [abs(b - a) / a for a, b in zip(ds, ds[1:])]
    assert rel[-1] < 1e-2
    assert rel[-1] <= rel[0] + 1e-12


# --- bending ---------------------------------------------------------------

def test_bend_model_profile_certificates():
    params = AdSSchwParams(1.0, 1.0)
    p = profile_solve(params, params.r_plus, 3.0, 1025)
    # the ideal family member has R = -6 identically; declare the exact
    # zero margin so the product-form certificate is free of ODE noise
    p.curvature_margin_fn = lambda s: np.zeros_like(np.asarray(s, float))
    p.margin_tau = -6.0
    s0 = 1.5
    delta, bent, rec = bend_profile(p, s0, -6.0, max_delta=0.6)
    assert 0 < delta <= 0.6
    assert not rec.trivial
    assert rec.min_bracket > 0
    assert rec.clause_holds
    # exact coincidence on [s0, end]
    s_right = np.linspace(s0, p.b, 513)
    assert np.array_equal(bent.f_fn(s_right), p.f_fn(s_right))
    assert np.array_equal(bent.fpp_fn(s_right), p.fpp_fn(s_right))
    # margin nonnegative on the bent zone (zero only where the
    # exponential factor underflows); the unmodified model tail sits at
    # zero margin up to the ODE residual
    s = np.linspace(bent.a, bent.b, 4097)
    marg = bent.curvature_margin_fn(s)
    assert np.min(marg[s < s0]) >= 0
    assert np.max(np.abs(marg[s >= s0])) == 0.0
    # strictly positive where the exponential factor is representable
    d = s0 - s[s < s0 - 1e-3]
    e = np.exp(-(2.0 * delta) ** 2 / d ** 2)
    live = e > 0
    assert np.min(bent.curvature_margin_fn((s0 - d)[live])) > 0
    # u'(s0 - delta) stays below the cap u'(s0) (u'' > 0 here)
    assert bent.fp_fn(s0 - delta) < p.fp_fn(s0)


def test_bend_trivial_when_margin_positive():
    p = ProfileCurve.from_callables(np.cosh, np.sinh, np.cosh,
                                    0.5, 2.0, 513)
    delta, bent, rec = bend_profile(p, 1.5, -6.0)
    assert rec.trivial
    s_all = np.linspace(bent.a, bent.b, 1025)
    assert np.array_equal(bent.f_fn(s_all), p.f_fn(s_all))


def test_bend_requires_positive_slope():
    params = AdSSchwParams(1.0, 1.0)
    p = profile_solve(params, params.r_plus, 3.0, 1025)
    with pytest.raises(InvalidProfileError):
        bend_profile(p, 0.0, -6.0)    # horizon: u'(0) = 0


# --- model attachment ------------------------------------------------------

def _collar_like_profile(r0=1.0, eps=0.01, A_u1=0.4):
    # round-zone shape f(s) = r0 sqrt(1 + eps s^2 / A_u1^2) on [0, A_u1]
    c = eps / A_u1 ** 2
    f_fn = lambda s: r0 * np.sqrt(1.0 + c * np.asarray(s, float) ** 2)
    fp_fn = lambda s: r0 * c * np.asarray(s, float) / np.sqrt(
        1.0 + c * np.asarray(s, float) ** 2)
    fpp_fn = lambda s: r0 * c / (1.0 + c * np.asarray(s, float) ** 2) ** 1.5
    return ProfileCurve.from_callables(f_fn, fp_fn, fpp_fn, 0.0, A_u1, 513)


def test_attach_positive_mass_branch():
    f = _collar_like_profile()
    ext, rec = glue_to_ads_schwarzschild(f, 1.1)
    assert rec.branch == "positive-mass"
    assert rec.m_e == 1.1 and rec.epsilon1 is None
    s = np.linspace(ext.a, ext.b, 8193)
    assert np.min(ext.curvature_margin_fn(s)) >= 0
    # nondecreasing; flat only at the minimal boundary s = 0
    fp = ext.fp_fn(s)
    assert fp[0] >= 0 and np.min(fp[1:]) > 0
    # past tail_start the profile is the exact model: mass is m_e
    st = s[s >= rec.tail_start]
    masses = profile_hawking_mass(ext.f_fn(st), ext.fp_fn(st))
    assert np.max(np.abs(masses - 1.1)) < 1e-9
    # boundary piece untouched
    s_in = np.linspace(f.a, 0.5 * (f.a + f.b), 129)
    assert np.array_equal(ext.f_fn(s_in), f.f_fn(s_in))


def _steep_profile(f0=0.44, slope=1.25, f_end=0.5):
    # steep cone whose end Hawking mass is negative (f'^2 > 1 + f^2)
    # while R > -6 still holds (f'^2 < 1 + 3 f^2 along the piece)
    return _cone(f0, slope, length=(f_end - f0) / slope)


def test_attach_nonpositive_mass_branch():
    f = _steep_profile()
    # end mass (f/2)(1 + f^2 - f'^2) = -0.018..., so m_e in (m*, 0]
    # takes the epsilon_1 branch
    ext, rec = glue_to_ads_schwarzschild(f, -0.005)
    assert rec.branch == "nonpositive-mass"
    assert rec.m_star < -0.005 < 0
    assert rec.epsilon1 is not None and rec.epsilon1 > 0
    assert rec.mu is not None and rec.mu > 0   # 2 (m_e - m*) / f(b)
    s = np.linspace(ext.a, ext.b, 8193)
    assert np.min(ext.curvature_margin_fn(s)) >= 0
    st = s[s >= rec.tail_start]
    masses = profile_hawking_mass(ext.f_fn(st), ext.fp_fn(st))
    assert np.max(np.abs(masses + 0.005)) < 1e-9


def test_attach_target_below_end_mass_rejected():
    f = _collar_like_profile()
    m_star = float(profile_hawking_mass(f.f_fn(f.b), f.fp_fn(f.b)))
    with pytest.raises(AdmissibilityError):
        glue_to_ads_schwarzschild(f, m_star - 0.01)


def test_attach_mass_floor_hypothesis():
    # end slope above sqrt(1 + 3 f^2) puts the end mass below -f(b)^3
    f = _cone(0.45, 1.33, length=0.05 / 1.33)
    with pytest.raises(HypothesisError) as e:
        glue_to_ads_schwarzschild(f, 0.5)
    assert "mass lower bound" in e.value.clause
