import math

import numpy as np
import pytest

from vdwwedge import eos, goursat, hodograph, riemann1d, shock_tracker

REF_S = 0.31
REF_GAMMA = 1.02
REF_THETA = math.radians(80.0)


@pytest.fixture(scope="session")
def ref_params():
    return eos.EosParams(S=REF_S, gamma=REF_GAMMA)


@pytest.fixture(scope="session")
def ref_model(ref_params):
    return eos.find_landmarks(ref_params)


@pytest.fixture(scope="session")
def ref_tau0(ref_model):
    return ref_model.tau1_e - 1e-3 * (ref_model.tau1_e - 1.0)


@pytest.fixture(scope="session")
def ref_wave(ref_model, ref_tau0):
    return riemann1d.build_wave(ref_model, ref_tau0, n_fan=1024, z_cut=0.1)


@pytest.fixture(scope="session")
def ref_boundaries(ref_model, ref_wave):
    return goursat.build_boundaries(ref_model, ref_wave, REF_THETA,
                                    n_boundary=80, nodes_per_efold=3.0,
                                    z_cut=0.1)


@pytest.fixture(scope="session")
def ref_sigma1(ref_model, ref_boundaries):
    return goursat.solve_goursat(ref_model, ref_boundaries.pb, ref_boundaries.pd)


@pytest.fixture(scope="session")
def ref_shock(ref_model, ref_sigma1, ref_boundaries):
    return shock_tracker.track_shock(
        ref_model, ref_sigma1, ref_boundaries.point_b, ref_boundaries.a_hat_b,
        n_points=100, theta=REF_THETA,
    )


@pytest.fixture(scope="session")
def ref_hodo_data(ref_params, ref_shock):
    c = ref_shock
    return [hodograph.hodo_state(ref_params, c.u_back[k], c.v_back[k],
                                 c.alpha_back[k], c.beta_back[k], c.tau_back[k])
            for k in range(len(c))]


@pytest.fixture(scope="session")
def ref_triangle(ref_model, ref_hodo_data):
    return hodograph.solve_hodograph_cauchy(ref_model, ref_hodo_data)


@pytest.fixture(scope="session")
def ref_parts(ref_model, ref_shock, ref_hodo_data):
    return hodograph.principal_parts(ref_model, ref_shock.point_g,
                                     ref_hodo_data[-1], n_nodes=80)


@pytest.fixture(scope="session")
def ref_dgp(ref_model, ref_parts, ref_triangle, ref_hodo_data):
    edge = [ref_triangle.node(l, k) for (l, k) in ref_triangle.gamma_minus_edge()]
    pts = np.array([[s.u, s.v] for s in ref_hodo_data])
    arclen = float(np.sum(np.hypot(np.diff(pts[:, 0]), np.diff(pts[:, 1]))))
    return hodograph.solve_dgp(ref_model, ref_parts, edge,
                               epsilon=0.01 * arclen, n_arc=16)
