import math

import numpy as np
import pytest

from vdwwedge import _quad, eos, hodograph as H, shock_tracker
from vdwwedge.charkit import char_slopes, make_state
from vdwwedge.errors import EpsilonTooLarge, NonSpacelikeData

from conftest import REF_THETA


def test_hodo_state_positions(ref_params):
    # xi = u - c cos(sigma)/sin(A) inverts the physical derived state
    s0 = make_state(ref_params, 0.21, 0.03, 0.0, 0.0, 3.3)
    hs = H.hodo_state(ref_params, s0.u, s0.v, s0.alpha, s0.beta, s0.tau)
    assert hs.xi == pytest.approx(s0.xi, abs=1e-13)
    assert hs.eta == pytest.approx(s0.eta, abs=1e-13)


def test_gamma_c_perpendicularity(ref_params):
    # Lambda_pm = -1 / lambda_mp
    s0 = make_state(ref_params, 0.21, 0.03, 0.0, 0.0, 3.3)
    lp, lm = char_slopes(s0)
    U, V, c = s0.U, s0.V, s0.c
    disc = math.sqrt(U * U + V * V - c * c)
    Lam_p = (U * V + c * disc) / (c * c - V * V)
    Lam_m = (U * V - c * disc) / (c * c - V * V)
    assert Lam_p == pytest.approx(-1.0 / lm, rel=1e-10)
    assert Lam_m == pytest.approx(-1.0 / lp, rel=1e-10)


def test_spacelike_guard(ref_params, ref_hodo_data):
    H.spacelike_check(ref_hodo_data)
    # a curve that doubles back flips the tangent against the Gamma fan
    bad = list(ref_hodo_data) + list(reversed(ref_hodo_data))
    with pytest.raises(NonSpacelikeData):
        H.spacelike_check(bad)


def test_cauchy_z_signs(ref_triangle):
    zp, zm = ref_triangle.z_fields()
    assert np.nanmax(zp[1:, :]) < 0
    assert np.nanmin(zm[1:, :]) > 0
    # Z- starts from zero on the shock image
    assert np.nanmax(np.abs(zm[0, 1:])) < 1e-2
    assert np.nanmax(np.abs(zm[0, 1:])) < 0.01 * np.nanmax(np.abs(zp[0, :]))


def test_cauchy_dhat_c_identity(ref_params, ref_triangle):
    # D+- c = -1/kappa along the marching legs
    tri = ref_triangle
    n0 = tri.n0
    worst = 0.0
    for l in range(0, n0 - 1, 9):
        for k in range(0, n0 - l - 1, 9):
            a = tri.node(l, k)
            x = tri.node(l + 1, k)
            dc = x.c - a.c
            kap = eos.kappa(ref_params, 0.5 * (a.tau + x.tau))
            worst = max(worst, abs(dc / tri.t_plus[l + 1, k] + 1.0 / kap))
    assert worst < 1e-4


def test_inversion_reproduces_shock(ref_shock, ref_triangle):
    patch = H.invert_to_physical(ref_triangle)
    n = len(ref_shock)
    d = np.hypot(patch.xi[0, :n] - ref_shock.xi, patch.eta[0, :n] - ref_shock.eta)
    scene = abs(ref_shock.xi[0])
    assert np.max(d) < 1e-10 * scene


def test_blowup_indicator(ref_model, ref_sigma1, ref_boundaries):
    # the C- derivative of rho adjacent to the shock grows under refinement
    ratios = []
    for n_points in (60, 120):
        curve = shock_tracker.track_shock(
            ref_model, ref_sigma1, ref_boundaries.point_b,
            ref_boundaries.a_hat_b, n_points=n_points, theta=REF_THETA)
        data = [H.hodo_state(ref_model.params, curve.u_back[k], curve.v_back[k],
                             curve.alpha_back[k], curve.beta_back[k],
                             curve.tau_back[k]) for k in range(len(curve))]
        tri = H.solve_hodograph_cauchy(ref_model, data)
        patch = H.invert_to_physical(tri)
        vals = []
        for k in range(1, tri.n0 - 2):
            dr = 1.0 / tri.tau[1, k] - 1.0 / tri.tau[0, k + 1]
            darc = math.hypot(patch.xi[1, k] - patch.xi[0, k + 1],
                              patch.eta[1, k] - patch.eta[0, k + 1])
            if darc > 0:
                vals.append(abs(dr) / darc)
        ratios.append(max(vals))
    assert ratios[1] / ratios[0] > 1.5


def test_principal_parts_basics(ref_model, ref_parts):
    p = ref_parts
    assert p.tau_g > ref_model.tau2_i
    assert p.tau_m > p.tau_g
    assert p.q_m > p.q_g
    assert 0 < p.nu1 < p.nu2
    assert p.nu2 == pytest.approx(math.tan(p.state_g3.alpha), rel=1e-12)


def test_principal_endpoint_angles(ref_parts):
    assert ref_parts.plus.alpha[-1] == pytest.approx(math.pi + ref_parts.A_m, abs=1e-9)
    assert ref_parts.plus.beta[-1] == pytest.approx(math.pi - ref_parts.A_m, abs=1e-9)
    assert abs(ref_parts.plus.v[-1]) < 1e-12


def test_principal_riemann_invariant(ref_model, ref_parts):
    # sigma + turning angle constant along the C+ principal part
    p = ref_model.params
    worst = 0.0
    for k in range(0, len(ref_parts.plus.nu), 10):
        sg = 0.5 * (ref_parts.plus.alpha[k] + ref_parts.plus.beta[k])
        I = _quad.sigma_angle_integral(p, ref_parts.tau_g, ref_parts.q_g,
                                       tau_hi=ref_parts.plus.tau[k])
        worst = max(worst, abs(sg + I - math.pi - ref_parts.sigma_g))
    assert worst < 1e-8


def test_principal_monotonicity(ref_params, ref_parts):
    pp = ref_parts.plus
    rho = 1.0 / pp.tau
    # nu decreases along the tabulation (from nu2 toward nu1) while rho falls
    assert np.all(np.diff(pp.nu) < 0)
    q = np.array([H.hodo_state(ref_params, pp.u[k], pp.v[k], pp.alpha[k],
                               pp.beta[k], pp.tau[k]).q
                  for k in range(len(pp.nu))])
    assert np.all(np.diff(q) > 0)


def test_principal_mirror_identity(ref_parts):
    plus, minus = ref_parts.plus, ref_parts.minus
    assert np.max(np.abs(minus.u - plus.u)) < 1e-10
    assert np.max(np.abs(minus.v + plus.v)) < 1e-10
    assert np.max(np.abs(minus.nu + plus.nu)) < 1e-10
    assert np.max(np.abs(minus.tau - plus.tau)) == 0.0


def test_alpha_equals_arctan_nu(ref_parts):
    pp = ref_parts.plus
    for k in range(0, len(pp.nu), 13):
        assert pp.alpha[k] == pytest.approx(math.pi + math.atan(pp.nu[k]), abs=1e-12)


def test_dgp_points_geometry(ref_dgp, ref_shock):
    pts = ref_dgp.points
    assert pts["G_h"][1] == pytest.approx(0.0, abs=1e-11)
    assert pts["L_h"][1] == pytest.approx(0.0, abs=1e-11)
    assert pts["M_h"][1] == pytest.approx(-pts["N_h"][1], abs=1e-11)
    # physical images sit near G (microscopic interaction zone)
    assert abs(pts["L"][0] - ref_shock.point_g[0]) < 1e-3
    assert pts["L"][1] == pytest.approx(0.0, abs=1e-10)


def test_dgp_z_boundaries(ref_dgp):
    z = ref_dgp.z_report
    # Z+ vanishes on Gamma+^G, Z- on Gamma-^G (FD estimate, scheme order)
    assert abs(z["ra"]["z_plus_on_gamma_plus_g"]) < 0.2
    assert abs(z["rb"]["z_minus_on_gamma_minus_g"]) < 0.2
    for name in ("ra", "rb", "rc"):
        assert z[name]["z_plus_max"] < 0
        assert z[name]["z_minus_min"] > 0


def test_dgp_mirror_symmetry(ref_dgp):
    ra, rb = ref_dgp.ra, ref_dgp.rb
    assert np.nanmax(np.abs(rb["tau"].T - ra["tau"])) < 1e-12
    assert np.nanmax(np.abs(rb["eta"].T + ra["eta"])) < 1e-12


def test_dgp_epsilon_too_large(ref_model, ref_parts, ref_triangle):
    edge = [ref_triangle.node(l, k) for (l, k) in ref_triangle.gamma_minus_edge()]
    with pytest.raises(EpsilonTooLarge):
        H.solve_dgp(ref_model, ref_parts, edge, epsilon=1e9, n_arc=8)


def test_z_transport_consistency(ref_params, ref_triangle):
    # integrating the Z- transport equation along one Gamma+ grid line
    # reproduces the FD Z- values at scheme order
    tri = ref_triangle
    zp, zm = tri.z_fields()
    k = tri.n0 // 2
    val = zm[0, k + 1]
    worst = 0.0
    for l in range(0, min(tri.n0 - k - 2, 30)):
        a = tri.node(l, k + 1)
        t4 = eos.tau4_d2p(ref_params, a.tau)
        c = a.c
        wco = -t4 / (4.0 * c * c * c * a.tau) * (
            (eos.varpi(ref_params, a.tau) - math.tan(a.A) ** 2)
            * (4.0 * math.sin(a.A) ** 2 - 1.0) + 2.0 * math.tan(a.A) ** 2)
        rhs_coeff = -t4 * (math.tan(a.A) ** 2 + 1.0) / (4.0 * c * c * c * a.tau)
        dt = tri.t_plus[l + 1, k]
        val = val + dt * (-wco * val + rhs_coeff * zp[l, k + 1])
        if np.isfinite(zm[l + 1, k]):
            worst = max(worst, abs(val - zm[l + 1, k]))
    assert worst < 5e-3


def test_jacobian_formula(ref_params, ref_triangle):
    # inverse Jacobian -c^2 Z+ Z- / (4 sin^4 A) matches the FD Jacobian of
    # the physical coordinates on hodograph cells (this is the product of
    # the D+- xi expressions divided by cos(alpha) cos(beta); it shares the
    # sign and zero set certified by the Z fields)
    tri = ref_triangle
    patch = H.invert_to_physical(tri)
    zp, zm = tri.z_fields()
    worst = 0.0
    count = 0
    for l in range(20, tri.n0 - 2, 7):
        for k in range(1, tri.n0 - l - 2, 7):
            st = tri.node(l, k)
            pred = -st.c ** 2 * zp[l, k] * zm[l, k] / (4.0 * math.sin(st.A) ** 4)
            du_p = tri.u[l + 1, k] - tri.u[l, k]
            dv_p = tri.v[l + 1, k] - tri.v[l, k]
            du_m = tri.u[l + 1, k - 1] - tri.u[l, k]
            dv_m = tri.v[l + 1, k - 1] - tri.v[l, k]
            dxi_p = patch.xi[l + 1, k] - patch.xi[l, k]
            deta_p = patch.eta[l + 1, k] - patch.eta[l, k]
            dxi_m = patch.xi[l + 1, k - 1] - patch.xi[l, k]
            deta_m = patch.eta[l + 1, k - 1] - patch.eta[l, k]
            area_uv = du_p * dv_m - dv_p * du_m
            area_xe = dxi_p * deta_m - deta_p * dxi_m
            if abs(area_uv) < 1e-30:
                continue
            fd = area_xe / area_uv
            if abs(pred) > 1e-6:
                worst = max(worst, abs(fd - pred) / abs(pred))
                count += 1
    assert count > 10
    assert worst < 0.2
