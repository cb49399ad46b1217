"""Velocity-plane (hodograph) solvers for the flow behind the shocks.

Swapping dependent and independent variables maps the self-similar system
to a linearly degenerate hyperbolic system for (alpha, beta, tau) on the
(u, v) plane:

    D+ alpha = s(tau, A),   D- beta = -s(tau, A),   D+- tau = tau / c,

with D+ = -sin(beta) du + cos(beta) dv, D- = sin(alpha) du - cos(alpha) dv,
and s = tau^4 p'' (varpi - tan^2 A) sin(2A) / (4 c^3 tau).  Characteristics
of the two planes pair up perpendicularly (Gamma+ with C-, Gamma- with C+),
and the physical point of a hodograph node is recovered from

    xi = u - c cos(sigma)/sin(A),   eta = v - c sin(sigma)/sin(A).

Invertibility is certified by the signs of

    Z+ = D+ beta - tau^4 p'' tan(A) / (2 c^3 tau),
    Z- = D- alpha + tau^4 p'' tan(A) / (2 c^3 tau),

since the inverse Jacobian is -(c cot A)^2 Z+ Z-.  Z- vanishes on the
shock image itself (the shock is an envelope of the back-side C+ family),
is positive inside, while Z+ stays negative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from . import _quad, eos as eos_mod
from .charkit import make_state
from .errors import (
    DomainError,
    EpsilonTooLarge,
    FoldDetected,
    MachAngleDegenerate,
    NonConvergentNode,
    NonSpacelikeData,
    NoTurningPoint,
    OdeFailure,
)

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class HodographState:
    u: float
    v: float
    alpha: float
    beta: float
    tau: float
    _eos: eos_mod.EosParams = None

    @property
    def A(self):
        return 0.5 * (self.alpha - self.beta)

    @property
    def sigma(self):
        return 0.5 * (self.alpha + self.beta)

    @property
    def c(self):
        return math.sqrt(eos_mod.sound_speed_sq(self._eos, self.tau))

    @property
    def q(self):
        return self.c / math.sin(self.A)

    @property
    def xi(self):
        return self.u - self.c * math.cos(self.sigma) / math.sin(self.A)

    @property
    def eta(self):
        return self.v - self.c * math.sin(self.sigma) / math.sin(self.A)


def hodo_state(eos, u, v, alpha, beta, tau):
    if not 0.0 < 0.5 * (alpha - beta) < 0.5 * math.pi:
        raise MachAngleDegenerate(
            f"Mach angle {(alpha - beta) / 2} outside (0, pi/2) at ({u}, {v})"
        )
    return HodographState(u=u, v=v, alpha=alpha, beta=beta, tau=tau, _eos=eos)


def _s_coeff(eos, tau, A):
    """s(tau, A) with D+ alpha = s and D- beta = -s."""
    t4 = eos_mod.tau4_d2p(eos, tau)
    c2 = eos_mod.sound_speed_sq(eos, tau)
    w = eos_mod.varpi(eos, tau)
    c = math.sqrt(c2)
    return t4 * (w - math.tan(A) ** 2) * math.sin(2.0 * A) / (4.0 * c2 * c * tau)


def z_offset(eos, tau, A):
    """tau^4 p'' tan(A) / (2 c^3 tau): Z+ = D+beta - off, Z- = D-alpha + off."""
    t4 = eos_mod.tau4_d2p(eos, tau)
    c2 = eos_mod.sound_speed_sq(eos, tau)
    return t4 * math.tan(A) / (2.0 * c2 * math.sqrt(c2) * tau)


def solve_hodo_node(eos, sa, sb, *, tol=1e-13, maxiter=60):
    """Node at the intersection of Gamma+ from sa and Gamma- from sb.

    Averaged-coefficient scheme: alpha rides Gamma+ from sa, beta rides
    Gamma- from sb, tau follows D+- tau = tau/c along both legs.  Step
    parameters are signed arclengths, so the update is orientation-free.
    """
    alpha_x, beta_x = sa.alpha, sb.beta
    tau_x = 0.5 * (sa.tau + sb.tau)
    u_x = v_x = 0.0
    t_p = t_m = 0.0
    prev_delta = math.inf
    for it in range(maxiter):
        bp = 0.5 * (sa.beta + beta_x)
        am = 0.5 * (sb.alpha + alpha_x)
        dp = (-math.sin(bp), math.cos(bp))
        dm = (math.sin(am), -math.cos(am))
        det = dp[0] * dm[1] - dp[1] * dm[0]
        if abs(det) < 1e-14:
            raise NonConvergentNode("parallel hodograph characteristics")
        du, dv = sb.u - sa.u, sb.v - sa.v
        t_p = (du * dm[1] - dv * dm[0]) / det
        t_m = -(dp[0] * dv - dp[1] * du) / det
        u_x = sa.u + t_p * dp[0]
        v_x = sa.v + t_p * dp[1]

        A_a, A_x = sa.A, 0.5 * (alpha_x - beta_x)
        A_b = sb.A
        s_a = _s_coeff(eos, sa.tau, A_a)
        s_x = _s_coeff(eos, tau_x, A_x)
        s_b = _s_coeff(eos, sb.tau, A_b)
        alpha_new = sa.alpha + 0.5 * (s_a + s_x) * t_p
        beta_new = sb.beta - 0.5 * (s_b + s_x) * t_m

        ca = sa.c
        cb = sb.c
        cx = math.sqrt(eos_mod.sound_speed_sq(eos, tau_x))
        tau_p = sa.tau + 0.5 * (sa.tau / ca + tau_x / cx) * t_p
        tau_m = sb.tau + 0.5 * (sb.tau / cb + tau_x / cx) * t_m
        tau_new = 0.5 * (tau_p + tau_m)

        delta = (
            abs(alpha_new - alpha_x)
            + abs(beta_new - beta_x)
            + abs(tau_new - tau_x) / tau_x
        )
        alpha_x, beta_x, tau_new_clip = alpha_new, beta_new, tau_new
        if not 0.0 < 0.5 * (alpha_x - beta_x) < 0.5 * math.pi:
            raise MachAngleDegenerate(
                f"Mach angle degenerate at hodograph node ({u_x}, {v_x})"
            )
        tau_x = tau_new_clip
        if delta < tol:
            break
        if it > 8 and delta < 1e5 * tol and delta > 0.9 * prev_delta:
            break
        prev_delta = delta
    else:
        if delta > 1e5 * tol:
            raise NonConvergentNode(f"hodograph node stalled, delta = {delta:.3e}")
    return hodo_state(eos, u_x, v_x, alpha_x, beta_x, tau_x), t_p, t_m


@dataclass
class HodoTriangle:
    """Cauchy-march triangle: level l holds n0 - l nodes; node (l, k) has
    Gamma+ parent (l-1, k) and Gamma- parent (l-1, k+1)."""

    eos: eos_mod.EosParams
    u: np.ndarray
    v: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    tau: np.ndarray
    t_plus: np.ndarray   # arclength of the Gamma+ leg into each node
    t_minus: np.ndarray

    @property
    def n0(self):
        return self.u.shape[1]

    def node(self, l, k):
        return hodo_state(
            self.eos, self.u[l, k], self.v[l, k], self.alpha[l, k],
            self.beta[l, k], self.tau[l, k],
        )

    def level_width(self, l):
        return self.n0 - l

    def gamma_plus_edge(self):
        """Nodes (l, 0): the Gamma+ characteristic from the first data node."""
        return [(l, 0) for l in range(self.n0)]

    def gamma_minus_edge(self):
        """Nodes (l, n0-1-l): the Gamma- characteristic from the last node."""
        return [(l, self.n0 - 1 - l) for l in range(self.n0)]

    def z_fields(self):
        """FD Z+ and Z- on nodes with the needed children, NaN elsewhere."""
        n0 = self.n0
        zp = np.full_like(self.u, np.nan)
        zm = np.full_like(self.u, np.nan)
        for l in range(n0 - 1):
            for k in range(n0 - l - 1):
                # child along Gamma+ of (l, k) is (l+1, k); along Gamma- of
                # (l, k+1) it is (l+1, k)
                off = z_offset(self.eos, self.tau[l, k], 0.5 * (self.alpha[l, k] - self.beta[l, k]))
                dbeta = self.beta[l + 1, k] - self.beta[l, k]
                zp[l, k] = dbeta / self.t_plus[l + 1, k] - off
                off2 = z_offset(self.eos, self.tau[l, k + 1], 0.5 * (self.alpha[l, k + 1] - self.beta[l, k + 1]))
                dalpha = self.alpha[l + 1, k] - self.alpha[l, k + 1]
                zm[l, k + 1] = dalpha / self.t_minus[l + 1, k] + off2
        return zp, zm


def spacelike_check(nodes):
    """Verify the Gamma+- directions point to one common side of the data."""
    sides = []
    for k in range(len(nodes) - 1):
        a, b = nodes[k], nodes[k + 1]
        tx, ty = b.u - a.u, b.v - a.v
        dp = (-math.sin(a.beta), math.cos(a.beta))
        dm = (math.sin(a.alpha), -math.cos(a.alpha))
        sides.append((tx * dp[1] - ty * dp[0], tx * dm[1] - ty * dm[0]))
    s0 = sides[0]
    if s0[0] * s0[1] <= 0.0:
        raise NonSpacelikeData("Gamma directions straddle the data curve")
    for sp, sm in sides:
        if sp * s0[0] <= 0.0 or sm * s0[1] <= 0.0:
            raise NonSpacelikeData("data curve loses space-likeness")


def solve_hodograph_cauchy(model, data_nodes, *, tol=1e-13):
    """March the Cauchy triangle from the shock-image data B2G2."""
    eos = model.params
    n0 = len(data_nodes)
    spacelike_check(data_nodes)
    shape = (n0, n0)
    fields = {k: np.full(shape, np.nan) for k in ("u", "v", "alpha", "beta", "tau", "t_plus", "t_minus")}
    for k, s in enumerate(data_nodes):
        fields["u"][0, k] = s.u
        fields["v"][0, k] = s.v
        fields["alpha"][0, k] = s.alpha
        fields["beta"][0, k] = s.beta
        fields["tau"][0, k] = s.tau
    tri = HodoTriangle(eos=eos, **fields)
    prev = list(data_nodes)
    for l in range(1, n0):
        cur = []
        for k in range(n0 - l):
            st, tp, tm = solve_hodo_node(eos, prev[k], prev[k + 1], tol=tol)
            cur.append(st)
            tri.u[l, k], tri.v[l, k] = st.u, st.v
            tri.alpha[l, k], tri.beta[l, k] = st.alpha, st.beta
            tri.tau[l, k] = st.tau
            tri.t_plus[l, k], tri.t_minus[l, k] = tp, tm
        prev = cur
    return tri


@dataclass
class PhysicalPatch:
    """Inverted hodograph solution: physical nodes in the triangle layout."""

    label: str
    eos: eos_mod.EosParams
    xi: np.ndarray
    eta: np.ndarray
    u: np.ndarray
    v: np.ndarray
    tau: np.ndarray
    mask: np.ndarray

    @property
    def shape(self):
        return self.xi.shape

    def edge_states(self, index_list):
        out = []
        for l, k in index_list:
            if self.mask[l, k]:
                out.append(make_state(
                    self.eos, self.xi[l, k], self.eta[l, k], self.u[l, k],
                    self.v[l, k], self.tau[l, k],
                ))
        return out


def invert_to_physical(tri, *, label="sigma2", require_z_signs=True):
    """Map each triangle node to the physical plane; flag folded cells.

    Checks that hodograph-cell orientation is preserved (the inverse
    Jacobian is positive where Z+ < 0 < Z-).
    """
    eos = tri.eos
    n0 = tri.n0
    xi = np.full_like(tri.u, np.nan)
    eta = np.full_like(tri.u, np.nan)
    mask = np.zeros(tri.u.shape, dtype=bool)
    for l in range(n0):
        for k in range(n0 - l):
            st = tri.node(l, k)
            xi[l, k], eta[l, k] = st.xi, st.eta
            mask[l, k] = True
    bad = []
    scene = np.nanmax(np.abs(xi)) + np.nanmax(np.abs(eta))
    for l in range(n0 - 1):
        for k in range(n0 - l - 1):
            # triangle (l,k), (l,k+1), (l+1,k) in both planes
            ah = (tri.u[l, k + 1] - tri.u[l, k]) * (tri.v[l + 1, k] - tri.v[l, k]) - (
                tri.v[l, k + 1] - tri.v[l, k]
            ) * (tri.u[l + 1, k] - tri.u[l, k])
            ap = (xi[l, k + 1] - xi[l, k]) * (eta[l + 1, k] - eta[l, k]) - (
                eta[l, k + 1] - eta[l, k]
            ) * (xi[l + 1, k] - xi[l, k])
            if ah * ap < 0.0 and abs(ap) > 1e-12 * scene * scene:
                bad.append((l, k))
    if bad:
        raise FoldDetected(f"{len(bad)} folded cells in {label}", cells=bad)
    return PhysicalPatch(
        label=label, eos=eos, xi=xi, eta=eta, u=tri.u.copy(), v=tri.v.copy(),
        tau=tri.tau.copy(), mask=mask,
    )


def mirror_hodo_state(s):
    return HodographState(
        u=s.u, v=-s.v, alpha=TWO_PI - s.beta, beta=TWO_PI - s.alpha, tau=s.tau,
        _eos=s._eos,
    )


@dataclass
class CenteredWavePrincipal:
    """Principal part of one centered wave at G, tabulated in nu."""

    family: str
    center: tuple
    nu: np.ndarray
    u: np.ndarray
    v: np.ndarray
    tau: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    nu1: float
    nu2: float
    tau_m: float
    q_m: float
    A_m: float

    @property
    def amplitude(self):
        return self.nu2 - self.nu1


@dataclass
class PrincipalParts:
    plus: CenteredWavePrincipal
    minus: CenteredWavePrincipal
    nu1: float
    nu2: float
    tau_m: float
    q_m: float
    A_m: float
    sigma_g: float
    q_g: float
    tau_g: float
    point_g: tuple
    state_g2: HodographState
    state_g3: HodographState


def principal_parts(model, point_g, state_g2, *, n_nodes=160, rtol=1e-12):
    """Construct both centered-wave principal parts from the G states.

    state_g2 is the hodograph state of the Sigma_2 side at G (v > 0); the
    Sigma_3 side is its mirror.  The turning state (tau_m, q_m) solves the
    angle quadrature sigma(tau_g -> tau_m) = sigma_g along the Bernoulli
    relation through G.
    """
    eos = model.params
    xi_g = point_g[0]
    u_g, v_g, tau_g = state_g2.u, state_g2.v, state_g2.tau
    if v_g <= 0.0:
        raise DomainError("expected v > 0 for the Sigma_2 state at G")
    if tau_g <= model.tau2_i:
        raise DomainError(f"tau_g = {tau_g} <= tau2_i; centered waves need tau_g > tau2_i")
    q_g = math.hypot(u_g - xi_g, v_g)
    sigma_g = math.atan(abs(v_g / (u_g - xi_g)))
    state_g3 = mirror_hodo_state(state_g2)

    try:
        tau_m = _quad.solve_turning_tau(eos, tau_g, q_g, sigma_g, rtol=rtol)
    except Exception as exc:
        raise NoTurningPoint(str(exc)) from exc
    h_g = eos_mod.enthalpy_h(eos, tau_g)
    q_m = math.sqrt(q_g * q_g + 2.0 * h_g - 2.0 * eos_mod.enthalpy_h(eos, tau_m))
    A_m = math.asin(min(math.sqrt(eos_mod.sound_speed_sq(eos, tau_m)) / q_m, 1.0))
    nu1 = math.tan(A_m)
    nu2 = math.tan(state_g3.alpha)

    def rhs(tau, y):
        a, b = y
        A = 0.5 * (a - b)
        t4 = eos_mod.tau4_d2p(eos, tau)
        c2 = eos_mod.sound_speed_sq(eos, tau)
        da = -t4 * math.tan(A) / (tau * tau * 2.0 * c2)
        db = -t4 * (eos_mod.varpi(eos, tau) - math.tan(A) ** 2) * math.sin(2.0 * A) / (
            tau * tau * 4.0 * c2
        )
        return [da, db]

    sol = solve_ivp(
        rhs, (tau_g, tau_m), [state_g3.alpha, state_g3.beta], method="RK45",
        rtol=rtol, atol=1e-14, dense_output=True,
    )
    if not sol.success:
        raise OdeFailure(f"principal-part ODE failed: {sol.message}")

    taus = np.linspace(tau_g, tau_m, n_nodes)
    al = np.empty(n_nodes)
    be = np.empty(n_nodes)
    uu = np.empty(n_nodes)
    vv = np.empty(n_nodes)
    nu = np.empty(n_nodes)
    for k, t in enumerate(taus):
        a, b = sol.sol(t)
        al[k], be[k] = a, b
        A = 0.5 * (a - b)
        sg = 0.5 * (a + b)
        c = math.sqrt(eos_mod.sound_speed_sq(eos, t))
        q = c / math.sin(A)
        uu[k] = xi_g + q * math.cos(sg)
        vv[k] = q * math.sin(sg)
        nu[k] = math.tan(a - math.pi)
    plus = CenteredWavePrincipal(
        family="plus", center=(xi_g, 0.0), nu=nu, u=uu, v=vv, tau=taus.copy(),
        alpha=al, beta=be, nu1=nu1, nu2=nu2, tau_m=tau_m, q_m=q_m, A_m=A_m,
    )
    minus = CenteredWavePrincipal(
        family="minus", center=(xi_g, 0.0), nu=-nu, u=uu.copy(), v=-vv,
        tau=taus.copy(), alpha=TWO_PI - be, beta=TWO_PI - al, nu1=-nu2,
        nu2=-nu1, tau_m=tau_m, q_m=q_m, A_m=A_m,
    )
    return PrincipalParts(
        plus=plus, minus=minus, nu1=nu1, nu2=nu2, tau_m=tau_m, q_m=q_m,
        A_m=A_m, sigma_g=sigma_g, q_g=q_g, tau_g=tau_g, point_g=point_g,
        state_g2=state_g2, state_g3=state_g3,
    )


def _goursat_hodo(eos, row0, col0, *, tol=1e-13):
    """Goursat march: row0 along a Gamma+ curve (j = 0), col0 along a
    Gamma- curve (i = 0), both starting at the shared corner node."""
    ni, nj = len(row0), len(col0)
    fields = {k: np.full((ni, nj), np.nan) for k in ("u", "v", "alpha", "beta", "tau")}
    tp = np.full((ni, nj), np.nan)
    tm = np.full((ni, nj), np.nan)
    nodes = {}
    for i, s in enumerate(row0):
        nodes[(i, 0)] = s
        for key, val in (("u", s.u), ("v", s.v), ("alpha", s.alpha), ("beta", s.beta), ("tau", s.tau)):
            fields[key][i, 0] = val
    for j, s in enumerate(col0):
        nodes[(0, j)] = s
        for key, val in (("u", s.u), ("v", s.v), ("alpha", s.alpha), ("beta", s.beta), ("tau", s.tau)):
            fields[key][0, j] = val
    for i in range(1, ni):
        for j in range(1, nj):
            st, t_p, t_m = solve_hodo_node(eos, nodes[(i - 1, j)], nodes[(i, j - 1)], tol=tol)
            nodes[(i, j)] = st
            fields["u"][i, j], fields["v"][i, j] = st.u, st.v
            fields["alpha"][i, j], fields["beta"][i, j] = st.alpha, st.beta
            fields["tau"][i, j] = st.tau
            tp[i, j], tm[i, j] = t_p, t_m
    return fields, tp, tm, nodes


@dataclass
class DgpSolution:
    """Sigma_4: three hodograph sub-patches joined along the weak
    discontinuities from G_h, plus their physical images."""

    ra: dict
    rb: dict
    rc: dict
    points: dict
    epsilon: float
    upsilon_violations: list
    z_report: dict

    def sub_patches(self):
        return [self.ra, self.rb, self.rc]


def _patch_invert(eos, fields, label):
    ni, nj = fields["u"].shape
    xi = np.full((ni, nj), np.nan)
    eta = np.full((ni, nj), np.nan)
    for i in range(ni):
        for j in range(nj):
            if not np.isfinite(fields["tau"][i, j]):
                continue
            st = hodo_state(
                eos, fields["u"][i, j], fields["v"][i, j],
                fields["alpha"][i, j], fields["beta"][i, j], fields["tau"][i, j],
            )
            xi[i, j], eta[i, j] = st.xi, st.eta
    scene = np.nanmax(np.abs(xi)) + np.nanmax(np.abs(eta))
    bad = []
    for i in range(ni - 1):
        for j in range(nj - 1):
            ah = (fields["u"][i + 1, j] - fields["u"][i, j]) * (
                fields["v"][i, j + 1] - fields["v"][i, j]
            ) - (fields["v"][i + 1, j] - fields["v"][i, j]) * (
                fields["u"][i, j + 1] - fields["u"][i, j]
            )
            ap = (xi[i + 1, j] - xi[i, j]) * (eta[i, j + 1] - eta[i, j]) - (
                eta[i + 1, j] - eta[i, j]
            ) * (xi[i, j + 1] - xi[i, j])
            if ah * ap < 0.0 and abs(ap) > 1e-12 * scene * scene:
                bad.append((i, j))
    if bad:
        raise FoldDetected(f"{len(bad)} folded cells in {label}", cells=bad)
    return xi, eta


def _edge_arc_resample(eos, edge_states, eps, n_arc):
    """First `eps` of hodograph arclength along an edge, resampled."""
    pts = np.array([[s.u, s.v] for s in edge_states])
    seg = np.hypot(np.diff(pts[:, 0]), np.diff(pts[:, 1]))
    s_cum = np.concatenate([[0.0], np.cumsum(seg)])
    if eps >= s_cum[-1]:
        raise EpsilonTooLarge(f"epsilon {eps} exceeds edge length {s_cum[-1]}")
    targets = np.linspace(0.0, eps, n_arc)
    out = []
    for t in targets:
        k = int(np.searchsorted(s_cum, t, side="right")) - 1
        k = min(max(k, 0), len(edge_states) - 2)
        w = (t - s_cum[k]) / (s_cum[k + 1] - s_cum[k])
        a, b = edge_states[k], edge_states[k + 1]
        out.append(hodo_state(
            eos, (1 - w) * a.u + w * b.u, (1 - w) * a.v + w * b.v,
            (1 - w) * a.alpha + w * b.alpha, (1 - w) * a.beta + w * b.beta,
            (1 - w) * a.tau + w * b.tau,
        ))
    return out


def solve_dgp(model, parts, g2_edge_states, *, epsilon, n_arc=24, upsilon=None,
              tol=1e-13, strict_upsilon=False):
    """Solve the shock-interaction (discontinuous Goursat) problem at G.

    g2_edge_states: hodograph states along G2H2 (the Gamma- edge of the
    Sigma_2 triangle, ordered from G2).  J2 sits at hodograph arclength
    `epsilon` along it; K3 is its mirror.  Returns the three sub-patches
    RA (between the G2 arc and Gamma+^G), RB (mirror side), and RC (beyond
    the weak discontinuities from G_h), each with physical images.
    """
    eos = model.params

    arc_g2 = _edge_arc_resample(eos, g2_edge_states, epsilon, n_arc)
    arc_g3 = [mirror_hodo_state(s) for s in arc_g2]

    gamma_plus_g = [
        hodo_state(eos, parts.minus.u[k], parts.minus.v[k], parts.minus.alpha[k],
                   parts.minus.beta[k], parts.minus.tau[k])
        for k in range(len(parts.minus.nu))
    ]
    gamma_minus_g = [
        hodo_state(eos, parts.plus.u[k], parts.plus.v[k], parts.plus.alpha[k],
                   parts.plus.beta[k], parts.plus.tau[k])
        for k in range(len(parts.plus.nu))
    ]

    # RA: corner G2; row0 = Gamma+^G (G2 -> G_h), col0 = arc G2J2
    ra_fields, ra_tp, ra_tm, ra_nodes = _goursat_hodo(eos, gamma_plus_g, arc_g2, tol=tol)
    # RB: corner G3; row0 = arc G3K3 (Gamma+ curve), col0 = Gamma-^G (G3 -> G_h)
    rb_fields, rb_tp, rb_tm, rb_nodes = _goursat_hodo(eos, arc_g3, gamma_minus_g, tol=tol)

    ng = len(gamma_plus_g)
    na = n_arc
    # RC: corner G_h; row0 = G_h N_h (Gamma+ curve: RB's j = ng-1 line),
    # col0 = G_h M_h (Gamma- curve: RA's i = ng-1 line)
    row0 = [rb_nodes[(i, ng - 1)] for i in range(na)]
    col0 = [ra_nodes[(ng - 1, j)] for j in range(na)]
    rc_fields, rc_tp, rc_tm, rc_nodes = _goursat_hodo(eos, row0, col0, tol=tol)

    patches = {}
    steps = {"ra": (ra_tp, ra_tm), "rb": (rb_tp, rb_tm), "rc": (rc_tp, rc_tm)}
    for name, fields in (("ra", ra_fields), ("rb", rb_fields), ("rc", rc_fields)):
        xi, eta = _patch_invert(eos, fields, f"sigma4:{name}")
        patches[name] = {**fields, "xi": xi, "eta": eta}

    violations = []
    if upsilon is not None:
        for name, f in patches.items():
            ni, nj = f["tau"].shape
            for i in range(ni):
                for j in range(nj):
                    t = f["tau"][i, j]
                    if not np.isfinite(t):
                        continue
                    ok, face = upsilon(f["alpha"][i, j], f["beta"][i, j], t)
                    if not ok:
                        violations.append((name, i, j, face))
    if violations and strict_upsilon:
        raise EpsilonTooLarge(f"{len(violations)} nodes left the invariant region")

    z_report = _dgp_z_report(eos, patches, steps)

    points = {
        "G": parts.point_g,
        "G_h": (gamma_plus_g[-1].u, gamma_plus_g[-1].v),
        "J2": (arc_g2[-1].u, arc_g2[-1].v),
        "K3": (arc_g3[-1].u, arc_g3[-1].v),
        "M_h": (ra_fields["u"][ng - 1, na - 1], ra_fields["v"][ng - 1, na - 1]),
        "N_h": (rb_fields["u"][na - 1, ng - 1], rb_fields["v"][na - 1, ng - 1]),
        "L_h": (rc_fields["u"][na - 1, na - 1], rc_fields["v"][na - 1, na - 1]),
        "J": (patches["ra"]["xi"][0, na - 1], patches["ra"]["eta"][0, na - 1]),
        "K": (patches["rb"]["xi"][na - 1, 0], patches["rb"]["eta"][na - 1, 0]),
        "M": (patches["ra"]["xi"][ng - 1, na - 1], patches["ra"]["eta"][ng - 1, na - 1]),
        "N": (patches["rb"]["xi"][na - 1, ng - 1], patches["rb"]["eta"][na - 1, ng - 1]),
        "L": (patches["rc"]["xi"][na - 1, na - 1], patches["rc"]["eta"][na - 1, na - 1]),
    }
    return DgpSolution(
        ra=patches["ra"], rb=patches["rb"], rc=patches["rc"], points=points,
        epsilon=epsilon, upsilon_violations=violations, z_report=z_report,
    )


def _patch_z_fields(eos, f, tp, tm):
    """FD estimates of Z+ at (i, j) from the Gamma+ leg to (i+1, j) and of
    Z- at (i, j) from the Gamma- leg to (i, j+1); legs on the data rows use
    the signed projection onto the characteristic direction."""
    ni, nj = f["u"].shape
    zp = np.full((ni, nj), np.nan)
    zm = np.full((ni, nj), np.nan)
    for i in range(ni - 1):
        for j in range(nj):
            if not (np.isfinite(f["tau"][i, j]) and np.isfinite(f["tau"][i + 1, j])):
                continue
            t = tp[i + 1, j]
            if not np.isfinite(t):
                bm = 0.5 * (f["beta"][i, j] + f["beta"][i + 1, j])
                t = -math.sin(bm) * (f["u"][i + 1, j] - f["u"][i, j]) + math.cos(bm) * (
                    f["v"][i + 1, j] - f["v"][i, j]
                )
            if t == 0.0:
                continue
            off = z_offset(eos, f["tau"][i, j], 0.5 * (f["alpha"][i, j] - f["beta"][i, j]))
            zp[i, j] = (f["beta"][i + 1, j] - f["beta"][i, j]) / t - off
    for i in range(ni):
        for j in range(nj - 1):
            if not (np.isfinite(f["tau"][i, j]) and np.isfinite(f["tau"][i, j + 1])):
                continue
            t = tm[i, j + 1]
            if not np.isfinite(t):
                am = 0.5 * (f["alpha"][i, j] + f["alpha"][i, j + 1])
                t = math.sin(am) * (f["u"][i, j + 1] - f["u"][i, j]) - math.cos(am) * (
                    f["v"][i, j + 1] - f["v"][i, j]
                )
            if t == 0.0:
                continue
            off = z_offset(eos, f["tau"][i, j], 0.5 * (f["alpha"][i, j] - f["beta"][i, j]))
            zm[i, j] = (f["alpha"][i, j + 1] - f["alpha"][i, j]) / t + off
    return zp, zm


def _dgp_z_report(eos, patches, steps):
    """Z signs: near zero on the centered-wave boundaries Gamma+-^G, strictly
    signed (Z+ < 0 < Z-) in the interiors away from those curves."""
    rep = {}
    for name in ("ra", "rb", "rc"):
        f = patches[name]
        tp, tm = steps[name]
        zp, zm = _patch_z_fields(eos, f, tp, tm)
        if name == "ra":
            # j = 0 row is Gamma+^G (Z+ = 0 there; Z- estimates at the row
            # straddle the excluded curve)
            bnd = np.nanmax(np.abs(zp[:, 0]))
            zp_int, zm_int = zp[:, 1:], zm[:, 1:]
            rep[name] = {
                "z_plus_on_gamma_plus_g": float(bnd),
                "z_plus_max": float(np.nanmax(zp_int)),
                "z_minus_min": float(np.nanmin(zm_int)),
            }
        elif name == "rb":
            # i = 0 column is Gamma-^G
            bnd = np.nanmax(np.abs(zm[0, :]))
            zp_int, zm_int = zp[1:, :], zm[1:, :]
            rep[name] = {
                "z_minus_on_gamma_minus_g": float(bnd),
                "z_plus_max": float(np.nanmax(zp_int)),
                "z_minus_min": float(np.nanmin(zm_int)),
            }
        else:
            # both bounding rows of RC are weak-discontinuity seams from G_h;
            # drop the first estimate adjacent to each corner-touching row
            rep[name] = {
                "z_plus_max": float(np.nanmax(zp[1:, 1:])),
                "z_minus_min": float(np.nanmin(zm[1:, 1:])),
            }
    return rep
