"""Characteristic boundaries of the interaction region and the fan-fan patch.

The cross characteristics PB and BE thread the rotated planar wave of one
wedge face (PD and DF mirror them).  Along them the straight-characteristic
angle of the fan is constant (alpha = pi + theta on PB and BE), and the
Mach angle obeys

    dA/dtau = tau^2 p'' (varpi - tan^2 A) sin(2A) / (8 c^2),

with A = theta at the undisturbed edge and A = A_hat_b just behind the
planar shock.  Positions follow from xi = u - c cos(sigma)/sin(A),
eta = v - c sin(sigma)/sin(A) with sigma = pi + theta - A.

The fan-interaction patch Sigma^1 is a Goursat problem with PB (C- curve)
and PD (C+ curve) as data; it is marched with the averaged-coefficient
node solver on an (n+1) x (n+1) characteristic grid whose far corner is
the C+ curve from B meeting the C- curve from D on the axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from . import _quad, eos as eos_mod, riemann1d
from .charkit import CharGrid, make_state, solve_char_node
from .errors import DomainError, MachAngleOutOfRange, OdeStepFailure

HALF_PI = 0.5 * math.pi


@dataclass
class BoundaryCurve:
    """Parametric characteristic curve with flow states along it."""

    label: str           # PB, BE, PD, DF
    family: str          # 'plus' or 'minus' (which characteristic family)
    tau: np.ndarray      # parameter (specific volume along the curve)
    xi: np.ndarray
    eta: np.ndarray
    u: np.ndarray
    v: np.ndarray
    A: np.ndarray        # Mach angle along the curve

    def __len__(self):
        return len(self.tau)

    def state(self, k, eos):
        return make_state(eos, self.xi[k], self.eta[k], self.u[k], self.v[k], self.tau[k])

    def states(self, eos):
        return [self.state(k, eos) for k in range(len(self))]

    def mirrored(self, label):
        return BoundaryCurve(
            label=label, family="plus" if self.family == "minus" else "minus",
            tau=self.tau.copy(), xi=self.xi.copy(), eta=-self.eta, u=self.u.copy(),
            v=-self.v, A=self.A.copy(),
        )


@dataclass
class BoundarySet:
    pb: BoundaryCurve
    be: BoundaryCurve
    pd: BoundaryCurve
    df: BoundaryCurve
    point_p: tuple
    point_b: tuple
    point_d: tuple
    point_e: tuple
    point_f: tuple
    a_hat_b: float
    theta: float


def _mach_ode_rhs_tau(eos, tau, A):
    t4 = eos_mod.tau4_d2p(eos, tau)
    c2 = eos_mod.sound_speed_sq(eos, tau)
    w = eos_mod.varpi(eos, tau)
    return t4 / (tau * tau) * (w - math.tan(A) ** 2) * math.sin(2.0 * A) / (8.0 * c2)


def _mach_ode_rhs_lam(eos, lam, A):
    """Same ODE in lam = log(tau - 1); stable out to the vacuum cut."""
    tau = 1.0 + math.exp(lam)
    wt2 = eos_mod.w_tau2_d2p(eos, tau)
    c2 = eos_mod.sound_speed_sq(eos, tau)
    w = eos_mod.varpi(eos, tau)
    return wt2 * (w - math.tan(A) ** 2) * math.sin(2.0 * A) / (8.0 * c2)


def _check_angle(A, where):
    if not 0.0 < A < HALF_PI:
        raise MachAngleOutOfRange(f"A = {A} left (0, pi/2) on {where}")


def _pb_positions(eos, theta, taus, A_of_tau, u_hat_of_tau):
    n = len(taus)
    xi = np.empty(n)
    eta = np.empty(n)
    u = np.empty(n)
    v = np.empty(n)
    Aar = np.empty(n)
    st, ct = math.sin(theta), math.cos(theta)
    for k, t in enumerate(taus):
        A = A_of_tau(t)
        _check_angle(A, "fan cross-characteristic")
        uh = u_hat_of_tau(t)
        c = math.sqrt(eos_mod.sound_speed_sq(eos, t))
        sig = math.pi + theta - A
        u[k] = uh * st
        v[k] = -uh * ct
        xi[k] = u[k] - c * math.cos(sig) / math.sin(A)
        eta[k] = v[k] - c * math.sin(sig) / math.sin(A)
        Aar[k] = A
    return xi, eta, u, v, Aar


def build_boundaries(model, wave, theta, *, n_boundary=200, nodes_per_efold=4.0,
                     z_cut=0.02, ode_rtol=1e-12, ode_atol=1e-14):
    """Integrate the Mach-angle ODEs and assemble PB, BE, PD, DF.

    PB and PD are resampled to n_boundary arclength-uniform nodes; BE and
    DF live on a uniform grid in log(tau - 1) whose density is set by
    nodes_per_efold, truncated at the vacuum cut z_cut with the analytic
    endpoint E attached.
    """
    eos = model.params
    if wave.case is not riemann1d.Case.FAN_SHOCK_FAN:
        raise DomainError("boundary construction needs a fan-shock-fan wave")
    if not 0.0 < theta < HALF_PI:
        raise DomainError(f"half-angle must lie in (0, pi/2), got {theta}")

    tau0, t1e, t2e = wave.tau0, model.tau1_e, model.tau2_e

    sol_r = solve_ivp(
        lambda t, y: [_mach_ode_rhs_tau(eos, t, y[0])],
        (tau0, t1e), [theta], method="RK45", rtol=ode_rtol, atol=ode_atol,
        dense_output=True,
    )
    if not sol_r.success:
        raise OdeStepFailure(f"PB Mach-angle ODE failed: {sol_r.message}")
    A_r = lambda t: float(sol_r.sol(t)[0])
    u_r = lambda t: riemann1d._fan_u(eos, wave.right_fan, t)

    # fine tabulation for arclength, then uniform-arclength resampling
    fine = np.linspace(tau0, t1e, max(8 * n_boundary, 64))
    xi_f, eta_f, _, _, _ = _pb_positions(eos, theta, fine, A_r, u_r)
    s_f = np.concatenate([[0.0], np.cumsum(np.hypot(np.diff(xi_f), np.diff(eta_f)))])
    targets = np.linspace(0.0, s_f[-1], n_boundary)
    taus_pb = np.interp(targets, s_f, fine)
    taus_pb[0], taus_pb[-1] = tau0, t1e
    xi, eta, u, v, Aar = _pb_positions(eos, theta, taus_pb, A_r, u_r)
    pb = BoundaryCurve("PB", "minus", taus_pb, xi, eta, u, v, Aar)

    point_p = (xi[0], eta[0])
    point_b = (xi[-1], eta[-1])
    ub, vb = wave.u2 * math.sin(theta), -wave.u2 * math.cos(theta)
    qb = math.hypot(ub - point_b[0], vb - point_b[1])
    a_hat_b = math.asin(min(model.c(t2e) / qb, 1.0))

    lam0 = math.log(t2e - 1.0)
    lam1 = _quad.logw_of_z(eos, z_cut)
    sol_l = solve_ivp(
        lambda lam, y: [_mach_ode_rhs_lam(eos, lam, y[0])],
        (lam0, lam1), [a_hat_b], method="RK45", rtol=ode_rtol, atol=ode_atol,
        dense_output=True,
    )
    if not sol_l.success:
        raise OdeStepFailure(f"BE Mach-angle ODE failed: {sol_l.message}")
    n_be = max(int(nodes_per_efold * (lam1 - lam0)) + 1, 32)
    lams = np.linspace(lam0, lam1, n_be)
    taus_be = 1.0 + np.exp(lams)
    A_l = lambda t: float(sol_l.sol(math.log(t - 1.0))[0])
    u_l = lambda t: riemann1d._fan_u(eos, wave.left_fan, t)
    xi, eta, u, v, Aar = _pb_positions(eos, theta, taus_be, A_l, u_l)
    be = BoundaryCurve("BE", "minus", taus_be, xi, eta, u, v, Aar)

    point_e = (wave.xi2 * math.sin(theta), -wave.xi2 * math.cos(theta))
    pd = pb.mirrored("PD")
    df = be.mirrored("DF")
    point_d = (pd.xi[-1], pd.eta[-1])
    point_f = (point_e[0], -point_e[1])
    return BoundarySet(
        pb=pb, be=be, pd=pd, df=df, point_p=point_p, point_b=point_b,
        point_d=point_d, point_e=point_e, point_f=point_f, a_hat_b=a_hat_b,
        theta=theta,
    )


def _boundary_phi(eos, states, phi0):
    """Trapezoidal path integral of (U, V) . dx along a boundary curve."""
    phi = np.empty(len(states))
    phi[0] = phi0
    for k in range(1, len(states)):
        a, b = states[k - 1], states[k]
        phi[k] = phi[k - 1] + 0.5 * (
            (a.U + b.U) * (b.xi - a.xi) + (a.V + b.V) * (b.eta - a.eta)
        )
    return phi


def solve_goursat(model, pb, pd, *, tol=1e-12, maxiter=50, corner_tol=1e-10,
                  label="sigma1"):
    """March the Goursat patch with PB as C- data and PD as C+ data.

    Grid convention: index i runs along C+ curves (PD is the j = 0 line),
    index j along C- curves (PB is the i = 0 line).  The far corner is the
    closure point G1 of the C+ curve from B and the C- curve from D.
    """
    eos = model.params
    sb0 = pb.state(0, eos)
    sd0 = pd.state(0, eos)
    mismatch = (
        abs(sb0.u - sd0.u) + abs(sb0.v - sd0.v) + abs(sb0.tau - sd0.tau)
        + abs(sb0.xi - sd0.xi) + abs(sb0.eta - sd0.eta)
    )
    if mismatch > corner_tol:
        raise DomainError(f"corner data mismatch at P: {mismatch:.3e}")

    ni, nj = len(pd), len(pb)
    xi = np.full((ni, nj), np.nan)
    eta = np.full((ni, nj), np.nan)
    u = np.full((ni, nj), np.nan)
    v = np.full((ni, nj), np.nan)
    tau = np.full((ni, nj), np.nan)
    phi = np.full((ni, nj), np.nan)

    pb_states = pb.states(eos)
    pd_states = pd.states(eos)
    phi_p = sb0.phi_pointwise
    phi_pb = _boundary_phi(eos, pb_states, phi_p)
    phi_pd = _boundary_phi(eos, pd_states, phi_p)

    for j, s in enumerate(pb_states):
        xi[0, j], eta[0, j], u[0, j], v[0, j], tau[0, j] = s.xi, s.eta, s.u, s.v, s.tau
        phi[0, j] = phi_pb[j]
    for i, s in enumerate(pd_states):
        xi[i, 0], eta[i, 0], u[i, 0], v[i, 0], tau[i, 0] = s.xi, s.eta, s.u, s.v, s.tau
        phi[i, 0] = phi_pd[i]

    states = {}
    for j in range(nj):
        states[(0, j)] = pb_states[j]
    for i in range(ni):
        states[(i, 0)] = pd_states[i]

    for i in range(1, ni):
        for j in range(1, nj):
            sa = states[(i - 1, j)]
            sb = states[(i, j - 1)]
            st, ph, _, _ = solve_char_node(
                eos, sa, sb, phia=phi[i - 1, j], phib=phi[i, j - 1],
                tol=tol, maxiter=maxiter,
            )
            states[(i, j)] = st
            xi[i, j], eta[i, j] = st.xi, st.eta
            u[i, j], v[i, j], tau[i, j] = st.u, st.v, st.tau
            phi[i, j] = ph
        # free parents no longer needed
        for j in range(nj):
            states.pop((i - 1, j), None)

    return CharGrid(label=label, eos=eos, xi=xi, eta=eta, u=u, v=v, tau=tau, phi=phi)
