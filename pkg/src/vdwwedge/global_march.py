"""Global characteristic march over the outer region and vacuum extraction.

In characteristic coordinates (r along the C+ family, s along C-), the
inner boundary of the outer region is a staircase of characteristic
pieces (BE, BH, HJ, JL, LK, KI, ID, DF), and the region decomposes into
Goursat rectangles solved in dependency order with the shared averaged-
coefficient node solver.  tau is strictly increasing along both forward
families, so each grid line crosses a level curve tau = const at most
once; level curves are extracted per rectangle and stitched.

The vacuum sits at tau = +infinity; with gamma near 1 everything there
converges like z = (tau-1)^(-(gamma-1)/2), so the march runs on grids
geometric in tau-1 down to a configured z_cut and the vacuum boundary is
Richardson-extrapolated in z from the last level curves, with the exact
endpoints E and F pinned analytically.  Hyperbolicity is monitored with
the invariant region Theta(s) in the (alpha, beta) plane.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _quad, eos as eos_mod
from .charkit import (
    CharGrid,
    grid_char_derivative,
    make_state,
    solve_char_node,
    transport_coeffs,
)
from .errors import DomainError, LevelCurveTangency, QuadratureFailure

TWO_PI = 2.0 * math.pi
HALF_PI = 0.5 * math.pi


@dataclass(frozen=True)
class PipelineConstants:
    theta: float
    c1_e: float
    c2_e: float
    u_star: float
    sigma_star: float
    q_star: float
    q_lim: float
    sigma_inf: float
    a_d: float
    a_bar_2e: float
    a_inf: float
    psi: float
    psi_feasible: bool
    delta_star: float
    assumption_a1: bool
    assumption_a2: bool
    assumption_a3: bool
    h_n_min: float
    h_n_n: int
    tau_star: float

    def as_dict(self):
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def sigma_star_of_theta(model, theta):
    """sigma_* = arctan(u* cos(theta) / (u* sin(theta) - c1e / sin(theta)))."""
    c1 = model.c(model.tau1_e)
    c2 = model.c(model.tau2_e)
    u_star = c1 - c2
    return math.atan(u_star * math.cos(theta) / (u_star * math.sin(theta) - c1 / math.sin(theta)))


def compute_constants(model, theta, *, delta_star=1e-3, n_pow=8,
                      psi_margin=1e-3, n_samples=200):
    """Evaluate the boxed constants, the assumption booleans, and psi."""
    eos = model.params
    if not 0.0 < theta < HALF_PI:
        raise DomainError(f"theta must lie in (0, pi/2), got {theta}")
    t1e, t2e = model.tau1_e, model.tau2_e
    c1 = model.c(t1e)
    c2 = model.c(t2e)
    u_star = c1 * (1.0 - t2e / t1e)
    sig_star = math.atan(u_star * math.cos(theta) / (u_star * math.sin(theta) - c1 / math.sin(theta)))
    q_star = math.hypot(u_star * math.sin(theta) - c1 / math.sin(theta), u_star * math.cos(theta))
    # q_lim^2 = q*^2 - 2 int_{tau2e}^inf tau p' = q*^2 + 2 h(tau2e)
    q_lim = math.sqrt(q_star**2 + 2.0 * eos_mod.enthalpy_h(eos, t2e))
    sigma_inf = _quad.sigma_angle_integral(eos, t2e, q_star)

    a_d = math.nan
    if sig_star < sigma_inf:
        tau_d = _quad.solve_turning_tau(eos, t2e, q_star, sig_star)
        q_d = math.sqrt(q_star**2 + 2.0 * eos_mod.enthalpy_h(eos, t2e) - 2.0 * eos_mod.enthalpy_h(eos, tau_d))
        a_d = math.asin(min(model.c(tau_d) / q_d, 1.0))

    a_bar_2e = eos_mod.a_bar(eos, t2e)
    g = eos.gamma
    a_inf = math.atan(math.sqrt((3.0 - g) / (1.0 + g)))

    # A1: varpi > 0 and nonincreasing for tau >= tau2e (log-spaced sample)
    taus = t2e * np.exp(np.linspace(0.0, math.log(1e8), n_samples))
    varps = np.array([eos_mod.varpi(eos, t) for t in taus])
    a1 = bool(np.all(varps > 0.0) and np.all(np.diff(varps) <= 1e-12))
    a2 = theta + 2.0 * sig_star < HALF_PI
    a3 = (not math.isnan(a_d)) and HALF_PI + min(a_d, theta) > 2.0 * a_bar_2e

    lower = max(theta + 2.0 * sig_star, a_bar_2e,
                2.0 * a_bar_2e - (a_d if not math.isnan(a_d) else 0.0),
                2.0 * a_bar_2e - theta)
    feasible = lower < HALF_PI
    psi = 0.5 * (lower + HALF_PI) if feasible else HALF_PI - psi_margin

    # sign report for the power decomposition coefficient H_n
    h_min = math.inf
    for t in taus:
        for A in np.linspace(delta_star / 2, psi, 24):
            h_min = min(h_min, transport_coeffs(eos, t, A, n=n_pow).h_n)

    # far-field threshold: c(tau) peaks where 2p' + tau p'' changes sign
    # (the attraction term), so kappa exceeds 1/(gamma-1) only beyond it
    from scipy.optimize import brentq

    def kappa_gap(lt):
        t = math.exp(lt)
        c2v = eos_mod.sound_speed_sq(eos, t)
        t4 = eos_mod.tau4_d2p(eos, t)
        den = t4 - 2.0 * c2v * t
        if den <= 0.0:
            return -1.0
        return 2.0 * c2v * t / den - 1.0 / (g - 1.0)

    lt_lo, lt_hi = math.log(t2e), math.log(1e8)
    if kappa_gap(lt_lo) > 0:
        tau_star = t2e
    else:
        tau_star = math.exp(brentq(kappa_gap, lt_lo, lt_hi, xtol=1e-10))

    return PipelineConstants(
        theta=theta, c1_e=c1, c2_e=c2, u_star=u_star, sigma_star=sig_star,
        q_star=q_star, q_lim=q_lim, sigma_inf=sigma_inf, a_d=a_d,
        a_bar_2e=a_bar_2e, a_inf=a_inf, psi=psi, psi_feasible=feasible,
        delta_star=delta_star, assumption_a1=a1, assumption_a2=a2,
        assumption_a3=a3, h_n_min=h_min, h_n_n=n_pow, tau_star=tau_star,
    )


@dataclass(frozen=True)
class InvariantRegion:
    """Theta(s) rectangle bounds in the (alpha, beta) plane at offset s."""

    psi: float
    tau_g: float
    m_cal: float     # boundary-data infimum of rho^n d rho / sin^2 A (< 0)
    n_pow: int
    delta_caps: tuple  # fixed caps: A_min/2, A_inf/2, (theta+sigma*)/2

    def a_bar(self, model, s):
        return eos_mod.a_bar(model.params, self.tau_g + s)

    def bounds(self, model, s):
        ab = self.a_bar(model, s)
        return {
            "alpha_l": math.pi - self.psi + 2.0 * ab,
            "alpha_r": math.pi + self.psi,
            "beta_l": math.pi - self.psi,
            "beta_r": math.pi + self.psi - 2.0 * ab,
            "delta": self.delta(model, s),
        }

    def delta(self, model, s):
        eos = model.params
        tau = self.tau_g + s
        # N(s) = max over [tau_g, tau] of tau^(4+n) p''/c, monotone increasing
        t4 = eos_mod.tau4_d2p(eos, tau)
        c = math.sqrt(eos_mod.sound_speed_sq(eos, tau))
        log_n = math.log(t4) + self.n_pow * math.log(tau) - math.log(c)
        if self.m_cal >= 0.0:
            lead = HALF_PI
        else:
            arg = -(math.log(2.0) + math.log(-self.m_cal) + log_n)
            lead = math.atan(math.exp(arg)) if arg < 700.0 else HALF_PI
        return min(lead, *self.delta_caps)

    def membership(self, model, alpha, beta, tau):
        """(inside, face, margin): face names the violated boundary piece."""
        s = tau - self.tau_g
        b = self.bounds(model, max(s, 0.0))
        checks = [
            ("alpha_l", alpha - b["alpha_l"]),
            ("alpha_r", b["alpha_r"] - alpha),
            ("beta_l", beta - b["beta_l"]),
            ("beta_r", b["beta_r"] - beta),
            ("delta", (alpha - beta) - b["delta"]),
        ]
        worst = min(checks, key=lambda kv: kv[1])
        return worst[1] > 0.0, worst[0], worst[1]


def upsilon_factory(model, constants, tau_g, q_m, tau_m):
    """Membership predicate for the DGP invariant region Upsilon(s)."""
    eos = model.params
    taus = np.linspace(tau_g, tau_m, 64)
    a_min = min(
        math.asin(min(math.sqrt(eos_mod.sound_speed_sq(eos, t)) / q_m, 1.0))
        for t in taus
    )
    psi = constants.psi

    def upsilon(alpha, beta, tau):
        s = max(tau - tau_g, 0.0)
        ab = eos_mod.a_bar(eos, tau_g + s)
        checks = [
            ("alpha_l", alpha - (math.pi - psi + 2.0 * ab)),
            ("alpha_r", (math.pi + psi) - alpha),
            ("beta_l", beta - (math.pi - psi)),
            ("beta_r", (math.pi + psi - 2.0 * ab) - beta),
            ("a_min", (alpha - beta) - a_min),
        ]
        worst = min(checks, key=lambda kv: kv[1])
        return worst[1] > 0.0, worst[0]

    return upsilon, a_min


def boundary_m_cal(chains, n_pow):
    """M = inf over the inner boundary of rho^n (d rho/ds) / sin^2 A.

    chains: list of (states, family) with family 'plus' or 'minus'; the
    derivative is taken along the chain (a characteristic of that family).
    """
    worst = math.inf
    for states, family in chains:
        for k in range(len(states) - 1):
            a, b = states[k], states[k + 1]
            ds = math.hypot(b.xi - a.xi, b.eta - a.eta)
            if ds == 0.0:
                continue
            drho = (1.0 / b.tau - 1.0 / a.tau) / ds
            val = (1.0 / a.tau) ** n_pow * drho / math.sin(a.A) ** 2
            worst = min(worst, val)
    return worst


def _march_rect(eos, row0, col0, *, phi_row0=None, phi_col0=None, tau_cut=None,
                tol=1e-12, label="rect"):
    """Goursat rectangle: row0 along a C+ curve (j = 0), col0 along a C-
    curve (i = 0); marching truncates past tau_cut (NaN nodes)."""
    ni, nj = len(row0), len(col0)
    xi = np.full((ni, nj), np.nan)
    eta = np.full((ni, nj), np.nan)
    u = np.full((ni, nj), np.nan)
    v = np.full((ni, nj), np.nan)
    tau = np.full((ni, nj), np.nan)
    phi = np.full((ni, nj), np.nan)
    prev_row = [None] * nj
    for j, s in enumerate(col0):
        prev_row[j] = s
        xi[0, j], eta[0, j], u[0, j], v[0, j], tau[0, j] = s.xi, s.eta, s.u, s.v, s.tau
        if phi_col0 is not None:
            phi[0, j] = phi_col0[j]
    for i, s in enumerate(row0):
        xi[i, 0], eta[i, 0], u[i, 0], v[i, 0], tau[i, 0] = s.xi, s.eta, s.u, s.v, s.tau
        if phi_row0 is not None:
            phi[i, 0] = phi_row0[i]
    for i in range(1, ni):
        cur = [None] * nj
        cur[0] = row0[i]
        for j in range(1, nj):
            sa = prev_row[j]   # C+ parent (i-1, j)
            sb = cur[j - 1]    # C- parent (i, j-1)
            if sa is None or sb is None:
                continue
            if tau_cut is not None and min(sa.tau, sb.tau) > tau_cut:
                continue
            st, ph, _, _ = solve_char_node(
                eos, sa, sb, phia=phi[i - 1, j], phib=phi[i, j - 1], tol=tol,
            )
            cur[j] = st
            xi[i, j], eta[i, j] = st.xi, st.eta
            u[i, j], v[i, j], tau[i, j] = st.u, st.v, st.tau
            phi[i, j] = ph
        prev_row = cur
    return CharGrid(label=label, eos=eos, xi=xi, eta=eta, u=u, v=v, tau=tau, phi=phi)


def _chain_phi(states, phi0):
    phi = np.empty(len(states))
    phi[0] = phi0
    for k in range(1, len(states)):
        a, b = states[k - 1], states[k]
        phi[k] = phi[k - 1] + 0.5 * ((a.U + b.U) * (b.xi - a.xi) + (a.V + b.V) * (b.eta - a.eta))
    return phi


def _resample_chain(eos, states, n):
    """Arclength-uniform resampling of a state chain (linear in fields)."""
    pts = np.array([[s.xi, s.eta] for s in states])
    seg = np.hypot(np.diff(pts[:, 0]), np.diff(pts[:, 1]))
    s_cum = np.concatenate([[0.0], np.cumsum(seg)])
    targets = np.linspace(0.0, s_cum[-1], n)
    out = []
    for t in targets:
        k = int(np.searchsorted(s_cum, t, side="right")) - 1
        k = min(max(k, 0), len(states) - 2)
        w = (t - s_cum[k]) / (s_cum[k + 1] - s_cum[k]) if s_cum[k + 1] > s_cum[k] else 0.0
        a, b = states[k], states[k + 1]
        out.append(make_state(
            eos, (1 - w) * a.xi + w * b.xi, (1 - w) * a.eta + w * b.eta,
            (1 - w) * a.u + w * b.u, (1 - w) * a.v + w * b.v,
            (1 - w) * a.tau + w * b.tau,
        ))
    return out


def _grid_row_states(grid, i):
    out = []
    for j in range(grid.shape[1]):
        if np.isfinite(grid.tau[i, j]):
            out.append(grid.state(i, j))
        else:
            out.append(None)
    return out


def _grid_col_states(grid, j):
    out = []
    for i in range(grid.shape[0]):
        if np.isfinite(grid.tau[i, j]):
            out.append(grid.state(i, j))
        else:
            out.append(None)
    return out


@dataclass
class VacuumBoundary:
    eta: np.ndarray
    xi: np.ndarray
    local_slope: np.ndarray
    lipschitz: float
    levels_used: tuple

    def as_arrays(self):
        return self.eta, self.xi, self.local_slope


@dataclass
class MarchResult:
    patches: dict
    level_curves: list
    vacuum: VacuumBoundary
    theta_report: dict
    invariants: dict
    constants: PipelineConstants
    region: InvariantRegion


def march(model, chains, constants, *, tau_cut, n_cross=64, tol=1e-12,
          n_levels=3, level_z_factors=(4.0, 2.0, 1.05), char_angle_floor=0.05,
          collect_levels=None):
    """Solve the outer region from the inner-boundary chains.

    chains: dict with state lists for BE, BH, JH, JL, KL, KI, DI, DF,
    each ordered away from its strip corner (B, B, J, J, K, K, D, D).
    Returns patches, level curves, the vacuum boundary, and the
    invariant-region report.
    """
    eos = model.params

    be = chains["BE"]
    df = chains["DF"]
    bh = _resample_chain(eos, chains["BH"], n_cross)
    jh = _resample_chain(eos, chains["JH"], n_cross)
    jl = chains["JL"]
    kl = chains["KL"]
    ki = _resample_chain(eos, chains["KI"], n_cross)
    di = _resample_chain(eos, chains["DI"], n_cross)

    # pseudo-potential anchors: exact pointwise values at B and D, then path
    # integrals along the chains (H and I values shared with the JH/KI legs)
    phi_be = _chain_phi(be, be[0].phi_pointwise)
    phi_bh = _chain_phi(bh, bh[0].phi_pointwise)
    phi_jh = _chain_phi(list(reversed(jh)), phi_bh[-1])[::-1]
    phi_jl = _chain_phi(jl, phi_jh[0])
    phi_df = _chain_phi(df, df[0].phi_pointwise)
    phi_di = _chain_phi(di, di[0].phi_pointwise)
    phi_ki = _chain_phi(list(reversed(ki)), phi_di[-1])[::-1]
    phi_kl = _chain_phi(kl, phi_ki[0])

    patches = {}
    patches["A1"] = _march_rect(eos, bh, be, phi_row0=phi_bh, phi_col0=phi_be,
                                tau_cut=tau_cut, tol=tol, label="A1")
    patches["B1"] = _march_rect(eos, jl, jh, phi_row0=phi_jl, phi_col0=phi_jh,
                                tau_cut=tau_cut, tol=tol, label="B1")
    patches["C1"] = _march_rect(eos, ki, kl, phi_row0=phi_ki, phi_col0=phi_kl,
                                tau_cut=tau_cut, tol=tol, label="C1")
    patches["D1"] = _march_rect(eos, df, di, phi_row0=phi_df, phi_col0=phi_di,
                                tau_cut=tau_cut, tol=tol, label="D1")

    def edge(grid, kind):
        if kind == "last_row":
            return _grid_row_states(grid, grid.shape[0] - 1), grid.phi[-1, :]
        return _grid_col_states(grid, grid.shape[1] - 1), grid.phi[:, -1]

    def trim(states, phis):
        st, ph = [], []
        for s, p in zip(states, phis):
            if s is None:
                break
            st.append(s)
            ph.append(p)
        return st, np.asarray(ph)

    # B2: col0 = B1 far C- edge ({r_KL}), row0 = C1 far C+... see module doc
    b1_col, b1_phi = trim(*edge(patches["B1"], "last_row"))
    c1_row, c1_phi = trim(*edge(patches["C1"], "last_col"))
    patches["B2"] = _march_rect(eos, c1_row, b1_col, phi_row0=c1_phi,
                                phi_col0=b1_phi, tau_cut=tau_cut, tol=tol, label="B2")
    d1_row, d1_phi = trim(*edge(patches["D1"], "last_col"))
    c1_col, c1c_phi = trim(*edge(patches["C1"], "last_row"))
    patches["D2"] = _march_rect(eos, d1_row, c1_col, phi_row0=d1_phi,
                                phi_col0=c1c_phi, tau_cut=tau_cut, tol=tol, label="D2")
    a1_col, a1_phi = trim(*edge(patches["A1"], "last_row"))
    b1_row, b1r_phi = trim(*edge(patches["B1"], "last_col"))
    patches["A2"] = _march_rect(eos, b1_row, a1_col, phi_row0=b1r_phi,
                                phi_col0=a1_phi, tau_cut=tau_cut, tol=tol, label="A2")
    a2_col, a2_phi = trim(*edge(patches["A2"], "last_row"))
    b2_row, b2_phi = trim(*edge(patches["B2"], "last_col"))
    patches["A3"] = _march_rect(eos, b2_row, a2_col, phi_row0=b2_phi,
                                phi_col0=a2_phi, tau_cut=tau_cut, tol=tol, label="A3")
    b2_col, b2c_phi = trim(*edge(patches["B2"], "last_row"))
    d2_row, d2_phi = trim(*edge(patches["D2"], "last_col"))
    patches["B3"] = _march_rect(eos, d2_row, b2_col, phi_row0=d2_phi,
                                phi_col0=b2c_phi, tau_cut=tau_cut, tol=tol, label="B3")
    a3_col, a3_phi = trim(*edge(patches["A3"], "last_row"))
    b3_row, b3_phi = trim(*edge(patches["B3"], "last_col"))
    patches["A4"] = _march_rect(eos, b3_row, a3_col, phi_row0=b3_phi,
                                phi_col0=a3_phi, tau_cut=tau_cut, tol=tol, label="A4")

    # invariant region from boundary data
    m_cal = boundary_m_cal(
        [(be, "minus"), (bh, "plus"), (jh, "minus"), (jl, "plus"),
         (kl, "minus"), (ki, "plus"), (di, "minus"), (df, "plus")],
        constants.h_n_n,
    )
    a_min_caps = (
        constants.a_inf / 2.0,
        (constants.theta + constants.sigma_star) / 2.0,
    )
    tau_g = min(min(s.tau for s in jh), min(s.tau for s in ki))
    region = InvariantRegion(
        psi=constants.psi, tau_g=tau_g, m_cal=m_cal, n_pow=constants.h_n_n,
        delta_caps=(constants.delta_star,) + a_min_caps,
    )

    theta_report = _theta_scan(model, region, patches)

    levels = []
    if collect_levels is None:
        g = eos.gamma
        z_cut = (tau_cut - 1.0) ** (-(g - 1.0) / 2.0)
        # keep every level inside the marched tau range (z below z(tau2_e))
        z0 = (model.tau2_e - 1.0) ** (-(g - 1.0) / 2.0)
        f_top = min(max(level_z_factors), 0.85 * z0 / z_cut)
        f_bot = min(level_z_factors)
        factors = np.geomspace(f_top, f_bot, len(level_z_factors))
        collect_levels = [
            1.0 + math.exp(-2.0 * math.log(f * z_cut) / (g - 1.0))
            for f in factors
        ]
    for lev in collect_levels:
        levels.append(extract_level_curve(model, patches, lev))

    vacuum = extract_vacuum_boundary(
        model, levels, chains, constants,
    )

    invariants = _march_invariants(model, patches, levels, region, constants,
                                   char_angle_floor)
    return MarchResult(
        patches=patches, level_curves=levels, vacuum=vacuum,
        theta_report=theta_report, invariants=invariants, constants=constants,
        region=region,
    )


def _theta_scan(model, region, patches):
    """Theta(s)-membership over every computed node of every patch."""
    out = {"checked": 0, "violations": [], "worst_margin": math.inf}
    for name, grid in patches.items():
        d = grid.derived()
        alpha, beta = d["alpha"], d["beta"]
        ni, nj = grid.shape
        for i in range(ni):
            for j in range(nj):
                t = grid.tau[i, j]
                if not np.isfinite(t):
                    continue
                ok, face, margin = region.membership(model, alpha[i, j], beta[i, j], t)
                out["checked"] += 1
                if margin < out["worst_margin"]:
                    out["worst_margin"] = margin
                if not ok:
                    out["violations"].append((name, i, j, face, margin))
    return out


def extract_level_curve(model, patches, level, *, order=("A1", "A2", "A3", "A4",
                                                         "B3", "B2", "B1", "C1",
                                                         "D2", "D1")):
    """Collect the iso-tau polyline across the upper-to-lower patch sweep.

    Within each rectangle every C- grid line (constant i) crosses the level
    at most once since tau increases along it; crossings are interpolated
    with a local monotone cubic and ordered by the C+ index.
    """
    pts = []
    for name in order:
        grid = patches.get(name)
        if grid is None:
            continue
        seg = _level_in_grid(model, grid, level)
        if seg:
            if pts and seg:
                d_fwd = math.hypot(pts[-1][0] - seg[0][0], pts[-1][1] - seg[0][1])
                d_rev = math.hypot(pts[-1][0] - seg[-1][0], pts[-1][1] - seg[-1][1])
                if d_rev < d_fwd:
                    seg = seg[::-1]
            pts.extend(seg)
    return {"level": level, "points": pts}


def _level_in_grid(model, grid, level):
    eos = grid.eos
    out = []
    ni, nj = grid.shape
    tau = grid.tau
    for i in range(ni):
        row = tau[i, :]
        finite = np.isfinite(row)
        if not finite.any():
            continue
        jmax = int(np.where(finite)[0][-1])
        seg = row[: jmax + 1]
        if seg[0] > level or seg[jmax] < level:
            continue
        j = int(np.searchsorted(seg, level)) - 1
        j = min(max(j, 0), jmax - 1)
        # local monotone cubic through up to 4 nodes in arclength
        j0 = max(0, j - 1)
        j1 = min(jmax, j + 2)
        idx = list(range(j0, j1 + 1))
        xs = tau[i, idx]
        if not np.all(np.diff(xs) > 0):
            continue
        from scipy.interpolate import PchipInterpolator

        fields = {}
        for key, f in (("xi", grid.xi), ("eta", grid.eta), ("u", grid.u), ("v", grid.v)):
            fields[key] = float(PchipInterpolator(xs, f[i, idx])(level))
        if grid.phi is not None and np.isfinite(grid.phi[i, idx]).all():
            fields["phi"] = float(PchipInterpolator(xs, grid.phi[i, idx])(level))
        st = make_state(eos, fields["xi"], fields["eta"], fields["u"], fields["v"], level)
        out.append((fields["xi"], fields["eta"], fields["u"], fields["v"],
                    st.alpha, st.beta, grid.label))
    return out


def extract_vacuum_boundary(model, levels, chains, constants, *, n_table=300):
    """Richardson extrapolation of the level-curve images in z.

    Each level curve's velocity-plane image (u, v) converges to the vacuum
    boundary (on which u = xi, v = eta) at rate z = (tau-1)^(-(g-1)/2); a
    quadratic fit in z at fixed v, over levels a factor ~2 apart in z, is
    evaluated at z = 0.  The analytic endpoints E and F pin the ends; near
    them the boundary joins the straight planar vacuum edges.
    """
    g = model.params.gamma
    if len(levels) < 3:
        raise QuadratureFailure("need at least three level curves")
    zs = [(lv["level"] - 1.0) ** (-(g - 1.0) / 2.0) for lv in levels]
    vmin = max(min(p[3] for p in lv["points"]) for lv in levels)
    vmax = min(max(p[3] for p in lv["points"]) for lv in levels)
    # modest table: differencing the extrapolated values amplifies noise,
    # so keep the slope baseline wide
    v_common = np.linspace(vmin, vmax, n_table)
    u_at = []
    for lv in levels:
        vv = np.array([p[3] for p in lv["points"]])
        uu = np.array([p[2] for p in lv["points"]])
        o = np.argsort(vv)
        u_at.append(np.interp(v_common, vv[o], uu[o]))
    u_at = np.array(u_at)
    z = np.array(zs)
    vander = np.vander(z, 3)
    coef, *_ = np.linalg.lstsq(vander, u_at, rcond=None)
    u_vac = coef[-1, :]

    e_pt = chains["E"]
    f_pt = chains["F"]
    eta_full = np.concatenate([[f_pt[1]], v_common, [e_pt[1]]])
    xi_full = np.concatenate([[f_pt[0]], u_vac, [e_pt[0]]])
    o = np.argsort(eta_full)
    eta_full, xi_full = eta_full[o], xi_full[o]
    slopes = np.diff(xi_full) / np.diff(eta_full)
    local = np.concatenate([[slopes[0]], 0.5 * (slopes[1:] + slopes[:-1]), [slopes[-1]]])
    return VacuumBoundary(
        eta=eta_full, xi=xi_full, local_slope=local,
        lipschitz=float(np.max(np.abs(slopes))), levels_used=tuple(zs),
    )


@dataclass
class PiecewiseSolution:
    """Point-query interface over the assembled patches.

    Queries inside a solved patch return (state-dict, provenance); queries
    outside fall back to the rotated planar composite waves of the two
    wedge faces, or vacuum beyond their edges.
    """

    model: object
    wave: object
    theta: float
    interpolants: list          # (label, GridInterpolant)
    shocks: list
    vacuum: object
    seams: dict

    def query(self, xi, eta):
        from .errors import ShockExitsPatch

        for label, interp in self.interpolants:
            try:
                vals = interp(xi, eta, slack=0.01)
            except ShockExitsPatch:
                continue
            return {"u": vals["u"], "v": vals["v"], "tau": vals["tau"],
                    "region": label}
        st, ct = math.sin(self.theta), math.cos(self.theta)
        xh1 = xi * st - eta * ct
        xh2 = xi * st + eta * ct
        xh, sgn = (xh1, -1.0) if xh1 >= xh2 else (xh2, 1.0)
        import vdwwedge.riemann1d as r1

        region, u_hat, tau = r1.sample(self.wave, xh)
        if region == r1.VACUUM or u_hat is None:
            return {"u": None, "v": None, "tau": None, "region": "vacuum"}
        return {"u": u_hat * st, "v": sgn * u_hat * ct, "tau": tau,
                "region": f"outer_{region}"}


def assemble_solution(model, wave, theta, patches, tri_patches, shocks, vacuum,
                      *, stitch_tol=1e-4, seams=None):
    """Bundle the solved patches behind one query interface.

    tri_patches: triangle-layout patches (the hodograph inversions), given
    as objects with xi/eta/u/v/tau arrays.  Raises GapDetected when the
    recorded seam distances exceed the stitching tolerance.
    """
    from .errors import GapDetected
    from .shock_tracker import GridInterpolant

    interpolants = []
    for label, grid in patches.items():
        interpolants.append((label, GridInterpolant(
            grid, {"u": grid.u, "v": grid.v, "tau": grid.tau})))
    for label, tp in tri_patches.items():
        interpolants.append((label, GridInterpolant(
            tp, {"u": tp.u, "v": tp.v, "tau": tp.tau})))
    seams = seams or {}
    for name, dist in seams.items():
        if dist > stitch_tol:
            raise GapDetected(f"seam {name} is open by {dist:.3e}")
    return PiecewiseSolution(
        model=model, wave=wave, theta=theta, interpolants=interpolants,
        shocks=shocks, vacuum=vacuum, seams=seams,
    )


def _march_invariants(model, patches, levels, region, constants, angle_floor):
    """Literal far-field invariants: level curves nowhere characteristic,
    alpha - beta above the configured floor, d+-c < 0 at far nodes, the
    symmetric-field check, and the velocity-plane slope law du/dv =
    -tan((alpha+beta)/2) along extracted level curves."""
    eos = model.params
    rep = {}

    worst_angle = math.inf
    slope_res = 0.0
    for lv in levels:
        pts = lv["points"]
        for k in range(1, len(pts) - 1):
            if pts[k - 1][6] != pts[k][6] or pts[k + 1][6] != pts[k][6]:
                continue  # skip stencils spanning a patch stitch
            x0, y0 = pts[k - 1][0], pts[k - 1][1]
            x1, y1 = pts[k + 1][0], pts[k + 1][1]
            tang = math.atan2(y1 - y0, x1 - x0)
            alpha, beta = pts[k][4], pts[k][5]
            for ang in (alpha, beta):
                d = abs((tang - ang + HALF_PI) % math.pi - HALF_PI)
                worst_angle = min(worst_angle, d)
            du = pts[k + 1][2] - pts[k - 1][2]
            dv = pts[k + 1][3] - pts[k - 1][3]
            if abs(dv) > 0:
                sig = 0.5 * (alpha + beta)
                slope_res = max(slope_res, abs(du / dv + math.tan(sig)))
    rep["level_char_angle_min"] = worst_angle
    rep["level_duv_slope_residual"] = slope_res
    if worst_angle < angle_floor:
        rep["level_tangency"] = True
    rep["alpha_beta_min"] = math.inf
    rep["dcp_max"] = -math.inf
    rep["dcm_max"] = -math.inf
    with np.errstate(invalid="ignore"):
        for grid in patches.values():
            d = grid.derived()
            ab = d["alpha"] - d["beta"]
            rep["alpha_beta_min"] = min(rep["alpha_beta_min"], float(np.nanmin(ab)))
            c = d["c"]
            ni, nj = grid.shape
            if ni < 5 or nj < 5:
                continue
            # interior central differences with fully finite stencils; skip
            # stencils whose baseline is unresolvably short (parallel wake
            # characteristics downstream of the microscopic interaction zone)
            fin = np.isfinite(grid.tau)
            core = fin[2:-2, 2:-2] & fin[:-4, 2:-2] & fin[4:, 2:-2] & fin[2:-2, :-4] & fin[2:-2, 4:]
            dist_p = np.hypot(grid.xi[4:, 2:-2] - grid.xi[:-4, 2:-2],
                              grid.eta[4:, 2:-2] - grid.eta[:-4, 2:-2])
            dist_m = np.hypot(grid.xi[2:-2, 4:] - grid.xi[2:-2, :-4],
                              grid.eta[2:-2, 4:] - grid.eta[2:-2, :-4])
            scale = 1e-5 * (1.0 + np.abs(grid.xi[2:-2, 2:-2]))
            dcp = (c[4:, 2:-2] - c[:-4, 2:-2]) / dist_p
            dcm = (c[2:-2, 4:] - c[2:-2, :-4]) / dist_m
            far_tau = np.where(fin[2:-2, 2:-2], grid.tau[2:-2, 2:-2], 0.0)
            # tau_star is the equality point of the far-field condition; the
            # strict inequalities hold with a margin beyond it
            far = core & (far_tau > 1.25 * constants.tau_star)
            sel_p = far & (dist_p > scale)
            sel_m = far & (dist_m > scale)
            if sel_p.any():
                rep["dcp_max"] = max(rep["dcp_max"], float(np.nanmax(dcp[sel_p])))
            if sel_m.any():
                rep["dcm_max"] = max(rep["dcm_max"], float(np.nanmax(dcm[sel_m])))
    return rep
