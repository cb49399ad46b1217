import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from vdwwedge import charkit as ck, eos
from vdwwedge.charkit import make_state, state_from_angles
from vdwwedge.errors import SubsonicState

from conftest import REF_THETA


def test_state_derived_quantities(ref_params):
    s = make_state(ref_params, 0.2, 0.0, 0.0, 0.0, 3.27)
    assert s.U == -0.2 and s.V == 0.0
    assert s.sigma == pytest.approx(math.pi)
    assert s.alpha == pytest.approx(math.pi + s.A)
    assert s.beta == pytest.approx(math.pi - s.A)
    assert 0 < s.A < math.pi / 2


def test_subsonic_raises(ref_params):
    with pytest.raises(SubsonicState):
        make_state(ref_params, 1e-4, 0.0, 0.0, 0.0, 3.27)


def test_char_slopes_symmetric_flow(ref_params):
    # U = (-q, 0): lambda_pm = +-tan(A)
    s = make_state(ref_params, 0.5, 0.0, 0.0, 0.0, 3.27)
    lp, lm = ck.char_slopes(s)
    assert lp == pytest.approx(math.tan(math.pi + s.A), abs=1e-12)
    assert lp == pytest.approx(-lm, abs=1e-12)


@given(st.floats(min_value=0.1, max_value=0.6),
       st.floats(min_value=0.0, max_value=2 * math.pi),
       st.floats(min_value=1.3, max_value=4.0))
@settings(max_examples=50, deadline=None)
def test_eigenvalue_residual_property(ref_params, qfac, ang, mach):
    # random supersonic state: lambda solves (V - lambda U)^2 = c^2(1+lambda^2)
    tau = 3.3
    c = eos.sound_speed(ref_params, tau)
    q = mach * c
    U, V = q * math.cos(ang), q * math.sin(ang)
    s = make_state(ref_params, 0.0, 0.0, U, V, tau)
    for lam in ck.char_slopes(s):
        if abs(lam) > 1e6:
            continue
        res = (V - lam * U) ** 2 - c * c * (1 + lam * lam)
        assert abs(res) < 1e-8 * (1 + lam * lam) ** 2


def test_round_trip_angles(ref_params):
    rng = np.random.default_rng(7)
    for _ in range(60):
        tau = 3.0 + 2.5 * rng.random()
        c = eos.sound_speed(ref_params, tau)
        q = c * (1.05 + 2.0 * rng.random())
        sigma = math.pi * (0.6 + 0.8 * rng.random())
        s0 = make_state(ref_params, 0.0, 0.0, q * math.cos(sigma), q * math.sin(sigma), tau)
        s1 = state_from_angles(ref_params, 0.0, 0.0, s0.alpha, s0.beta, tau)
        assert s1.u == pytest.approx(s0.u, abs=1e-12)
        assert s1.v == pytest.approx(s0.v, abs=1e-12)


def test_alpha_on_rotated_fan(ref_params, ref_boundaries):
    # states sampled from the planar wave rotated onto the lower face keep
    # the straight-characteristic angle alpha = pi + theta
    for k in range(0, len(ref_boundaries.pb), 10):
        s = ref_boundaries.pb.state(k, ref_params)
        assert s.alpha == pytest.approx(math.pi + REF_THETA, abs=1e-9)


def test_transport_constant_state(ref_params):
    s = make_state(ref_params, 0.3, 0.1, 0.0, 0.0, 3.3)
    plus = ck.transport_rhs(ref_params, s, "plus")
    minus = ck.transport_rhs(ref_params, s, "minus")
    sin2 = math.sin(s.A) ** 2
    # with d rho = 0 only the geometric turning terms survive
    assert plus.dbeta_0 == pytest.approx(-2 * sin2 / s.c, rel=1e-12)
    assert minus.dalpha_0 == pytest.approx(2 * sin2 / s.c, rel=1e-12)
    assert plus.dalpha_0 == 0.0 and minus.dbeta_0 == 0.0


def test_transport_rho_on_fan_boundary(ref_params, ref_boundaries):
    # along the cross characteristic of the fan, alpha is constant, so the
    # minus-family relation pins d rho/ds = -2 c sin(2A) / (tau^4 p'')
    pb = ref_boundaries.pb
    for k in range(3, len(pb) - 3, 17):
        s = pb.state(k, ref_params)
        sp = pb.state(k + 1, ref_params)
        sm = pb.state(k - 1, ref_params)
        ds = math.hypot(sp.xi - sm.xi, sp.eta - sm.eta)
        fd = (1.0 / sp.tau - 1.0 / sm.tau) / ds
        t4 = eos.tau4_d2p(ref_params, s.tau)
        expected = -2.0 * s.c * math.sin(2 * s.A) / t4
        assert fd == pytest.approx(expected, rel=2e-3)
        assert fd < 0


def test_transport_coeffs_f_positive(ref_params, ref_model):
    # f > 0 wherever p'' > 0 and p' < 0
    for tau in np.linspace(1.5, ref_model.tau1_i - 1e-3, 20):
        for A in np.linspace(0.1, 1.5, 10):
            assert ck.transport_coeffs(ref_params, tau, A).f > 0
    for tau in np.linspace(ref_model.tau2_i + 1e-3, 40.0, 20):
        for A in np.linspace(0.1, 1.5, 10):
            assert ck.transport_coeffs(ref_params, tau, A).f > 0


def _constant_grid(eosp, n=12):
    xi = np.linspace(0.3, 0.4, n)
    eta = np.linspace(-0.05, 0.05, n)
    XI, ETA = np.meshgrid(xi, eta, indexing="ij")
    return ck.CharGrid(label="const", eos=eosp, xi=XI, eta=ETA,
                       u=0.2 * np.ones_like(XI), v=np.zeros_like(XI),
                       tau=3.3 * np.ones_like(XI))


def test_decomposition_residuals_constant_grid(ref_params):
    # all characteristic-direction derivatives vanish identically
    grid = _constant_grid(ref_params)
    rep = ck.decomposition_residuals(grid)
    for key, entry in rep.items():
        assert entry["max"] < 1e-12, key


def test_commutator_residual_constant_grid(ref_params):
    grid = _constant_grid(ref_params)
    res = ck.commutator_residual(grid)
    assert np.nanmax(np.abs(res[2:-2, 2:-2])) < 1e-12


def test_decomposition_residuals_sigma1(ref_model, ref_sigma1):
    rep = ck.decomposition_residuals(ref_sigma1)
    # smooth nearly-constant patch: residuals small in absolute terms
    for key, entry in rep.items():
        assert np.isfinite(entry["max"]), key
        assert entry["max"] < 1e-2, (key, entry["max"])


def test_simple_wave_grid_residuals(ref_params, ref_boundaries):
    # build a grid from rotated fan states along straight C+ lines: the
    # c-decompositions reduce to transport along one family only and the
    # FD residuals stay at discretization size
    pb = ref_boundaries.pb
    n = len(pb)
    m = 10
    eosp = ref_params
    xi = np.empty((m, n))
    eta = np.empty((m, n))
    u = np.empty((m, n))
    v = np.empty((m, n))
    tau = np.empty((m, n))
    for j in range(n):
        s = pb.state(j, eosp)
        for i in range(m):
            t = 1e-3 * i
            xi[i, j] = s.xi + t * math.cos(s.alpha)
            eta[i, j] = s.eta + t * math.sin(s.alpha)
            u[i, j] = s.u
            v[i, j] = s.v
            tau[i, j] = s.tau
    grid = ck.CharGrid(label="simple", eos=eosp, xi=xi, eta=eta, u=u, v=v, tau=tau)
    rep = ck.decomposition_residuals(grid)
    assert rep["rho_minus_plus"]["max"] < 5e-2
