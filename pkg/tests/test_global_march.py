import math

import numpy as np
import pytest

from vdwwedge import eos, global_march as gm
from vdwwedge.errors import DomainError

from conftest import REF_THETA


@pytest.fixture(scope="module")
def consts(ref_model):
    return gm.compute_constants(ref_model, REF_THETA)


def test_sigma_star_identity(ref_model, consts):
    # sigma_* = arcsin(c2e/q*) - theta is an exact consequence of the
    # definitions; both evaluation routes must agree to roundoff
    lhs = consts.sigma_star
    rhs = math.asin(consts.c2_e / consts.q_star) - REF_THETA
    assert abs(lhs - rhs) < 1e-12


def test_u_star_forms(ref_model, consts):
    assert consts.u_star == pytest.approx(consts.c1_e - consts.c2_e, abs=1e-15)
    assert consts.u_star < 0


def test_q_lim_closed_form(ref_model, consts):
    q2 = consts.q_star**2 + 2.0 * eos.enthalpy_h(ref_model.params, ref_model.tau2_e)
    assert consts.q_lim == pytest.approx(math.sqrt(q2), rel=1e-14)


def test_theta_trends(ref_model):
    sig, ad = [], []
    for deg in (70.0, 80.0, 85.0):
        c = gm.compute_constants(ref_model, math.radians(deg))
        sig.append(c.sigma_star)
        ad.append(c.a_d)
    assert sig[0] > sig[1] > sig[2] > 0
    assert ad[0] < ad[1] < ad[2] < math.pi / 2


def test_dtheta_derivative(ref_model):
    # d(theta + 2 sigma_*)/d theta at theta = pi/2 equals 2 tau1e/tau2e - 1
    h = 1e-4
    f = lambda t: t + 2.0 * gm.sigma_star_of_theta(ref_model, t)
    fd = (f(math.pi / 2 - h) - f(math.pi / 2 - 3 * h)) / (2 * h)
    fd2 = (f(math.pi / 2 - 0.5 * h) - f(math.pi / 2 - 2.5 * h)) / (2 * h)
    # one-sided extrapolated estimate toward pi/2
    est = 2 * fd2 - fd
    closed = 2.0 * ref_model.tau1_e / ref_model.tau2_e - 1.0
    assert est == pytest.approx(closed, abs=1e-3)


def test_assumptions_hold(consts):
    assert consts.assumption_a1
    assert consts.assumption_a2
    assert consts.assumption_a3
    assert consts.psi_feasible
    assert consts.theta + 2 * consts.sigma_star < consts.psi < math.pi / 2


def test_h_n_positive(consts):
    assert consts.h_n_min > 0
    assert consts.h_n_n == 8


def test_tau_star(ref_model, consts):
    # beyond tau_star: kappa > 1/(gamma-1) and c decreasing
    p = ref_model.params
    g = p.gamma
    assert consts.tau_star > ref_model.tau2_e
    for tau in np.geomspace(1.3 * consts.tau_star, 1e6, 30):
        assert eos.kappa(p, tau) > 1.0 / (g - 1.0)
    c_vals = [eos.sound_speed(p, t) for t in np.geomspace(1.3 * consts.tau_star, 1e8, 40)]
    assert all(a > b for a, b in zip(c_vals, c_vals[1:]))


def test_invariant_region_nesting(ref_model, consts):
    region = gm.InvariantRegion(psi=consts.psi, tau_g=ref_model.tau2_e,
                                m_cal=-1.0, n_pow=8,
                                delta_caps=(1e-3, consts.a_inf / 2,
                                            (REF_THETA + consts.sigma_star) / 2))
    b1 = region.bounds(ref_model, 0.5)
    b2 = region.bounds(ref_model, 5.0)
    assert b1["alpha_l"] >= b2["alpha_l"]
    assert b1["beta_r"] <= b2["beta_r"]
    assert b1["alpha_r"] == b2["alpha_r"]

    ok, face, margin = region.membership(ref_model, math.pi + REF_THETA,
                                         math.pi - REF_THETA, ref_model.tau2_e + 1.0)
    assert ok and margin > 0
    ok, face, _ = region.membership(ref_model, math.pi + consts.psi + 0.1,
                                    math.pi - REF_THETA, ref_model.tau2_e + 1.0)
    assert not ok and face == "alpha_r"


def test_upsilon_factory(ref_model, consts):
    ups, a_min = gm.upsilon_factory(ref_model, consts, ref_model.tau2_e,
                                    0.4, ref_model.tau2_e + 2.0)
    assert a_min > 0
    ok, _ = ups(math.pi + REF_THETA, math.pi - REF_THETA - 2 * consts.sigma_star,
                ref_model.tau2_e + 0.5)
    assert ok
    ok, face = ups(math.pi + consts.psi + 0.2, math.pi - REF_THETA,
                   ref_model.tau2_e + 0.5)
    assert not ok


def test_compute_constants_domain(ref_model):
    with pytest.raises(DomainError):
        gm.compute_constants(ref_model, math.pi / 2)


def test_sigma_inf_positive(consts):
    assert consts.sigma_inf > consts.sigma_star
    assert consts.a_d > 0


def test_boundary_m_cal(ref_params, ref_boundaries):
    chains = [(ref_boundaries.be.states(ref_params), "minus")]
    m = gm.boundary_m_cal(chains, 8)
    assert m < 0
