import math

import numpy as np
import pytest

from vdwwedge import eos, goursat, riemann1d, shock_tracker as st, sonic_pairs
from vdwwedge.errors import ShockExitsPatch

from conftest import REF_THETA


def test_initial_point(ref_shock):
    assert ref_shock.chi[0] == pytest.approx(math.pi + REF_THETA, abs=1e-12)
    assert ref_shock.tau_back[0] == pytest.approx(ref_shock.tau_front[0], abs=3.0)


def test_double_sonic_start(ref_model, ref_shock):
    assert ref_shock.tau_front[0] == pytest.approx(ref_model.tau1_e, abs=1e-9)
    assert ref_shock.tau_back[0] == pytest.approx(ref_model.tau2_e, abs=1e-9)
    assert ref_shock.classification[0] is sonic_pairs.PairKind.DOUBLE_SONIC


def test_dm_ds_zero_at_start(ref_shock):
    assert abs(ref_shock.dm_ds[0]) < 1e-6
    # and grows away from the start
    assert abs(ref_shock.dm_ds[-1]) > abs(ref_shock.dm_ds[0])


def test_post_sonic_everywhere(ref_shock):
    kinds = set(k for k in ref_shock.classification[1:])
    assert kinds == {sonic_pairs.PairKind.POST_SONIC}
    margins = ref_shock.n_front[1:] - ref_shock.c_front[1:]
    assert np.all(margins > 0)
    rel = np.abs(ref_shock.n_back - ref_shock.c_back) / ref_shock.c_back
    assert np.max(rel) < 1e-6


def test_chi_monotone_convex(ref_shock):
    assert np.all(np.diff(ref_shock.chi) > 0)
    assert np.all(ref_shock.dchi_ds > 0)


def test_front_tau_increases(ref_shock):
    assert np.all(np.diff(ref_shock.tau_front) > 0)


def test_backside_rho_increases(ref_shock):
    # exactly zero at B (s_po' vanishes at the double-sonic anchor)
    assert abs(ref_shock.drhob_ds[0]) < 1e-12
    assert np.all(ref_shock.drhob_ds[1:] > 0)
    assert np.all(np.diff(1.0 / ref_shock.tau_back) > 0)


def test_g_on_axis(ref_shock, ref_boundaries):
    scale = abs(ref_boundaries.point_p[0])
    assert abs(ref_shock.point_g[1]) < 1e-8 * scale


def test_rh_residuals(ref_params, ref_shock):
    rh = ref_shock.rh_residuals(ref_params)
    assert rh.max() < 1e-6


def test_chi_equals_alpha_back(ref_shock):
    assert np.max(np.abs(ref_shock.chi - ref_shock.alpha_back)) < 1e-8


def test_shock_stays_inside_patch(ref_shock, ref_sigma1):
    # the fitted curve stays on the high-xi side of the closing C+ curve
    assert ref_shock.point_g[0] > ref_sigma1.xi[-1, -1]


def test_tangential_estimates_signs(ref_shock):
    a, b = st.backside_tangential_estimates(ref_shock)
    assert np.all(a > 0)
    assert np.all(b < 0)


def test_closed_form_vs_chain_rule(ref_shock):
    # two independent algebraic routes to the same projections
    a, b = st.backside_tangential_estimates(ref_shock)
    ac, bc = st.closed_form_tangential(ref_shock)
    assert np.max(np.abs(a - ac)) < 1e-8
    assert np.max(np.abs(b - bc)) < 1e-8


def test_chain_rule_vs_fd(ref_shock):
    a, _ = st.backside_tangential_estimates(ref_shock)
    dub = np.gradient(ref_shock.u_back, ref_shock.s)
    dvb = np.gradient(ref_shock.v_back, ref_shock.s)
    fd = np.cos(ref_shock.alpha_back) * dub + np.sin(ref_shock.alpha_back) * dvb
    assert np.max(np.abs(fd[3:-3] - a[3:-3])) < 5e-4 * (1 + np.abs(a).max())


def test_mirrored_curve(ref_shock):
    dg = ref_shock.mirrored()
    assert dg.point_g[0] == ref_shock.point_g[0]
    assert np.allclose(dg.eta, -ref_shock.eta)
    assert np.allclose(dg.alpha_back, 2 * math.pi - ref_shock.beta_back)


def test_near_b_asymptotics(ref_model):
    # Lemma-type smallness: the backside deviation from the limiting state
    # shrinks with tau1_e - tau0
    sups = []
    for amp in (1e-3, 2.5e-4):
        tau0 = ref_model.tau1_e - amp * (ref_model.tau1_e - 1.0)
        wave = riemann1d.build_wave(ref_model, tau0, n_fan=512, z_cut=0.3)
        bset = goursat.build_boundaries(ref_model, wave, REF_THETA,
                                        n_boundary=40, nodes_per_efold=2.0,
                                        z_cut=0.3)
        g = goursat.solve_goursat(ref_model, bset.pb, bset.pd)
        curve = st.track_shock(ref_model, g, bset.point_b, bset.a_hat_b,
                               n_points=40, theta=REF_THETA)
        # sigma_* analog from the G-side values
        from vdwwedge.global_march import sigma_star_of_theta
        sig = sigma_star_of_theta(ref_model, REF_THETA)
        sup = (np.max(np.abs(curve.alpha_back - math.pi - REF_THETA))
               + np.max(np.abs(curve.beta_back - math.pi + REF_THETA + 2 * sig))
               + np.max(np.abs(curve.tau_back - ref_model.tau2_e)))
        sups.append(sup)
    assert sups[1] < 0.6 * sups[0]


def test_interpolant_rejects_far_points(ref_sigma1):
    interp = st.front_interpolant(ref_sigma1)
    with pytest.raises(ShockExitsPatch):
        interp(10.0, 10.0)
