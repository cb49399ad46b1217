"""Post-sonic shock fitting through the fan-interaction patch.

The embedded shock from B obeys the fitting ODE in arclength s,

    d xi/ds = cos(chi),  d eta/ds = sin(chi),
    d chi/ds = dm/ds/(rho1 L1) - N1 (q1^2 - c1^2) drho1/ds / (rho1 L1 q1^2)
               + N1/q1^2 + dsigma1/ds,

with front quantities interpolated from the Sigma^1 grid, the mass-flux
derivative dm/ds = -p''(s_po(tau1)) s_po'(tau1) dtau1/ds / (2m) of the
post-sonic pairing, and chi(B) = pi + theta.  The back side is sonic:
tau_b = s_po(tau1), N_b = m tau_b, L_b = L_f, and chi equals the back C+
angle alpha_b.  The curve descends from B to the axis point G; the mirror
shock DG is its reflection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.spatial import cKDTree

from . import eos as eos_mod, sonic_pairs
from .charkit import grid_char_derivative, make_state
from .errors import IntegrationFailure, PairingDomainError, ShockExitsPatch


class GridInterpolant:
    """Bilinear interpolation of node fields in characteristic-index space.

    Locates the containing cell with a KD-tree seed and an inverse-bilinear
    Newton solve; raises ShockExitsPatch for points outside the grid.
    """

    def __init__(self, grid, fields):
        self.grid = grid
        self.fields = dict(fields)
        ni, nj = grid.xi.shape
        pts = np.column_stack([grid.xi.ravel(), grid.eta.ravel()])
        # NaN-padded (truncated) nodes must never win a nearest query
        pts = np.where(np.isfinite(pts), pts, 1e300)
        self.tree = cKDTree(pts)
        self.ni, self.nj = ni, nj

    def _cell_solve(self, i, j, x, y):
        g = self.grid
        x00, x10 = g.xi[i, j], g.xi[i + 1, j]
        x01, x11 = g.xi[i, j + 1], g.xi[i + 1, j + 1]
        y00, y10 = g.eta[i, j], g.eta[i + 1, j]
        y01, y11 = g.eta[i, j + 1], g.eta[i + 1, j + 1]
        if not np.isfinite([x00, x10, x01, x11]).all():
            return None
        a = b = 0.5
        for _ in range(30):
            xa = (1 - a) * (1 - b) * x00 + a * (1 - b) * x10 + (1 - a) * b * x01 + a * b * x11
            ya = (1 - a) * (1 - b) * y00 + a * (1 - b) * y10 + (1 - a) * b * y01 + a * b * y11
            rx, ry = xa - x, ya - y
            dxa = (1 - b) * (x10 - x00) + b * (x11 - x01)
            dxb = (1 - a) * (x01 - x00) + a * (x11 - x10)
            dya = (1 - b) * (y10 - y00) + b * (y11 - y01)
            dyb = (1 - a) * (y01 - y00) + a * (y11 - y10)
            det = dxa * dyb - dxb * dya
            if det == 0.0:
                return None
            da = -(rx * dyb - ry * dxb) / det
            db = -(dxa * ry - dya * rx) / det
            a += da
            b += db
            if abs(da) + abs(db) < 1e-14:
                break
        return a, b

    def _eval_cell(self, i, j, a, b):
        out = {}
        for key, f in self.fields.items():
            out[key] = (
                (1 - a) * (1 - b) * f[i, j]
                + a * (1 - b) * f[i + 1, j]
                + (1 - a) * b * f[i, j + 1]
                + a * b * f[i + 1, j + 1]
            )
        return out

    def __call__(self, x, y, *, slack=1.0):
        """Interpolate at (x, y); bilinear extrapolation up to `slack` cell
        widths outside the nearest cell is tolerated (event overshoot)."""
        _, idx = self.tree.query([x, y])
        i0, j0 = divmod(int(idx), self.nj)
        best = None
        for di in (0, -1, 1, -2, 2):
            for dj in (0, -1, 1, -2, 2):
                i = min(max(i0 + di, 0), self.ni - 2)
                j = min(max(j0 + dj, 0), self.nj - 2)
                ab = self._cell_solve(i, j, x, y)
                if ab is None:
                    continue
                a, b = ab
                excess = max(0.0, -a, a - 1.0, -b, b - 1.0)
                if excess <= 1e-9:
                    return self._eval_cell(i, j, a, b)
                if best is None or excess < best[0]:
                    best = (excess, i, j, a, b)
        if best is not None and (slack is None or best[0] <= slack):
            _, i, j, a, b = best
            return self._eval_cell(i, j, a, b)
        raise ShockExitsPatch(f"point ({x}, {y}) left the solution patch")


def front_interpolant(grid):
    """Interpolant with the fields the fitting ODE needs."""
    d = grid.derived()
    tau = grid.tau
    sigma = d["sigma"]
    fields = {
        "u": grid.u,
        "v": grid.v,
        "tau": tau,
        "dtau_p": grid_char_derivative(grid, tau, "plus"),
        "dtau_m": grid_char_derivative(grid, tau, "minus"),
        "dsig_p": grid_char_derivative(grid, sigma, "plus"),
        "dsig_m": grid_char_derivative(grid, sigma, "minus"),
    }
    return GridInterpolant(grid, fields)


@dataclass
class ShockCurve:
    """Fitted shock polyline with front/back states and diagnostics."""

    s: np.ndarray
    xi: np.ndarray
    eta: np.ndarray
    chi: np.ndarray
    tau_front: np.ndarray
    tau_back: np.ndarray
    m: np.ndarray
    n_front: np.ndarray
    n_back: np.ndarray
    c_front: np.ndarray
    c_back: np.ndarray
    l_tan: np.ndarray
    u_front: np.ndarray
    v_front: np.ndarray
    u_back: np.ndarray
    v_back: np.ndarray
    alpha_back: np.ndarray
    beta_back: np.ndarray
    a_dot: np.ndarray
    b_dot: np.ndarray
    dchi_ds: np.ndarray
    dub_ds: np.ndarray
    dvb_ds: np.ndarray
    dm_ds: np.ndarray
    drhob_ds: np.ndarray
    point_g: tuple
    classification: list = field(default_factory=list)

    def __len__(self):
        return len(self.s)

    def rh_residuals(self, eos):
        """Relative residuals of the three jump relations per point."""
        out = np.empty((len(self.s), 3))
        for k in range(len(self.s)):
            mf = self.m[k]
            out[k, 0] = abs(self.n_front[k] / self.tau_front[k] - self.n_back[k] / self.tau_back[k]) / abs(mf)
            out[k, 1] = 0.0  # L_b := L_f by construction
            hf = eos_mod.enthalpy_h(eos, self.tau_front[k])
            hb = eos_mod.enthalpy_h(eos, self.tau_back[k])
            num = self.n_front[k] ** 2 + 2 * hf - self.n_back[k] ** 2 - 2 * hb
            out[k, 2] = abs(num) / (self.n_front[k] ** 2 + 2 * abs(hf))
        return out

    def mirrored(self):
        return ShockCurve(
            s=self.s, xi=self.xi, eta=-self.eta, chi=2 * math.pi - self.chi,
            tau_front=self.tau_front, tau_back=self.tau_back, m=self.m,
            n_front=self.n_front, n_back=self.n_back, c_front=self.c_front,
            c_back=self.c_back, l_tan=self.l_tan,
            u_front=self.u_front, v_front=-self.v_front,
            u_back=self.u_back, v_back=-self.v_back,
            alpha_back=2 * math.pi - self.beta_back,
            beta_back=2 * math.pi - self.alpha_back,
            # reflection swaps the characteristic families, so the two
            # tangential projections exchange roles on the mirror shock
            a_dot=self.b_dot, b_dot=self.a_dot, dchi_ds=self.dchi_ds,
            dub_ds=self.dub_ds, dvb_ds=-self.dvb_ds, dm_ds=self.dm_ds,
            drhob_ds=self.drhob_ds,
            point_g=(self.point_g[0], -self.point_g[1]),
            classification=list(self.classification),
        )


def _front_quantities(model, interp, x, y, chi, *, slack=1.0):
    f = interp(x, y, slack=slack)
    tau1 = f["tau"]
    lo = model.tau1_e - 1e-6 * (model.tau2_i - model.tau1_e)
    if not lo <= tau1 < model.tau2_i:
        raise PairingDomainError(
            f"front volume {tau1} outside [tau1_e, tau2_i) at ({x}, {y})"
        )
    tau1 = max(tau1, model.tau1_e)
    U, V = f["u"] - x, f["v"] - y
    q2 = U * U + V * V
    n1 = U * math.sin(chi) - V * math.cos(chi)
    l1 = U * math.cos(chi) + V * math.sin(chi)
    c1sq = eos_mod.sound_speed_sq(model.params, tau1)
    sig = math.atan2(V, U) % (2 * math.pi)
    A1 = math.asin(min(math.sqrt(c1sq / q2), 1.0))
    alpha1, beta1 = sig + A1, sig - A1
    den = math.sin(beta1 - alpha1)
    wp = math.sin(beta1 - chi) / den
    wm = -math.sin(alpha1 - chi) / den
    dtau1 = wp * f["dtau_p"] + wm * f["dtau_m"]
    dsig1 = wp * f["dsig_p"] + wm * f["dsig_m"]
    return {
        "tau1": tau1, "u1": f["u"], "v1": f["v"], "U": U, "V": V, "q2": q2,
        "n1": n1, "l1": l1, "c1sq": c1sq, "dtau1": dtau1, "dsig1": dsig1,
    }


def _dchi_ds(model, fr):
    eos = model.params
    tau1 = fr["tau1"]
    spo = sonic_pairs.s_po(model, tau1)
    dspo = sonic_pairs.ds_po(model, tau1, s=spo)
    mf = fr["n1"] / tau1
    dm = -eos_mod.d2pressure(eos, spo) * dspo * fr["dtau1"] / (2.0 * mf)
    rho1 = 1.0 / tau1
    drho1 = -fr["dtau1"] / tau1**2
    term = (
        dm / (rho1 * fr["l1"])
        - fr["n1"] * (fr["q2"] - fr["c1sq"]) * drho1 / (rho1 * fr["l1"] * fr["q2"])
        + fr["n1"] / fr["q2"]
        + fr["dsig1"]
    )
    return term, spo, dspo, mf, dm


def track_shock(model, grid, start, a_hat_b, *, n_points=200, rtol=1e-11,
                atol=1e-13, theta=None):
    """Integrate the shock from B down to the axis point G.

    start is (xi_B, eta_B); chi(B) = alpha_1(B) = pi + theta.  Returns the
    resampled ShockCurve with backside states and Lemma-type diagnostics.
    """
    eos = model.params
    interp = front_interpolant(grid)
    if theta is None:
        raise ValueError("theta (wedge half-angle) is required")
    chi0 = math.pi + theta

    def rhs(s, y):
        # stage points may overshoot the axis event; extrapolate freely there
        # and certify in-domain membership on the resampled curve afterwards
        x, e, chi = y
        fr = _front_quantities(model, interp, x, e, chi, slack=None)
        dchi, *_ = _dchi_ds(model, fr)
        return [math.cos(chi), math.sin(chi), dchi]

    def hit_axis(s, y):
        return y[1]

    hit_axis.terminal = True
    hit_axis.direction = -1.0

    span = 10.0 * (abs(start[1]) + 1e-12)
    sol = solve_ivp(
        rhs, (0.0, span), [start[0], start[1], chi0], method="RK45",
        rtol=rtol, atol=atol, dense_output=True, events=hit_axis,
        max_step=span / 50.0,
    )
    if not sol.success:
        raise IntegrationFailure(f"shock integration failed: {sol.message}")
    if sol.t_events[0].size == 0:
        raise IntegrationFailure("shock never reached the axis")
    s_end = sol.t_events[0][0]

    s_nodes = np.linspace(0.0, s_end, n_points)
    n = len(s_nodes)
    arr = lambda: np.empty(n)
    out = {k: arr() for k in (
        "xi", "eta", "chi", "tau_front", "tau_back", "m", "n_front", "n_back",
        "c_front", "c_back", "l_tan", "u_front", "v_front", "u_back", "v_back",
        "alpha_back", "beta_back", "a_dot", "b_dot", "dchi_ds", "dub_ds",
        "dvb_ds", "dm_ds", "drhob_ds")}
    classification = []

    for k, s in enumerate(s_nodes):
        x, e, chi = sol.sol(s)
        if k == n - 1:
            e = 0.0 if abs(e) < 1e-9 else e
        fr = _front_quantities(model, interp, x, e, chi)
        dchi, spo, dspo, mf, dm = _dchi_ds(model, fr)
        tau1, taub = fr["tau1"], spo
        nb = mf * taub
        cb = math.sqrt(eos_mod.sound_speed_sq(eos, taub))
        lb = fr["l1"]
        Ub = nb * math.sin(chi) + lb * math.cos(chi)
        Vb = -nb * math.cos(chi) + lb * math.sin(chi)
        ub, vb = Ub + x, Vb + e
        sb = make_state(eos, x, e, ub, vb, taub)
        rho_b = 1.0 / taub
        drho_b = -dspo * fr["dtau1"] / taub**2
        qb, sigb, Ab = sb.q, sb.sigma, sb.A

        # backside derivatives along the shock: Bernoulli for dq, the
        # differentiated mass-flux relation for dsigma, then the chain rule
        dq_b = -taub * qb * math.sin(Ab) ** 2 * drho_b - lb / qb
        dsig_b = (
            dchi
            - dm / (rho_b * lb)
            + nb * (qb * qb - cb * cb) * drho_b / (rho_b * lb * qb * qb)
            - nb / (qb * qb)
        )
        dub_ds = math.cos(sigb) * dq_b - qb * math.sin(sigb) * dsig_b + math.cos(chi)
        dvb_ds = math.sin(sigb) * dq_b + qb * math.cos(sigb) * dsig_b + math.sin(chi)
        a_dot = math.cos(sb.alpha) * dub_ds + math.sin(sb.alpha) * dvb_ds
        b_dot = math.cos(sb.beta) * dub_ds + math.sin(sb.beta) * dvb_ds

        out["xi"][k], out["eta"][k], out["chi"][k] = x, e, chi
        out["tau_front"][k], out["tau_back"][k] = tau1, taub
        out["m"][k], out["n_front"][k], out["n_back"][k] = mf, fr["n1"], nb
        out["c_front"][k] = math.sqrt(fr["c1sq"])
        out["c_back"][k] = cb
        out["l_tan"][k] = lb
        out["u_front"][k], out["v_front"][k] = fr["u1"], fr["v1"]
        out["u_back"][k], out["v_back"][k] = ub, vb
        out["alpha_back"][k], out["beta_back"][k] = sb.alpha, sb.beta
        out["a_dot"][k], out["b_dot"][k] = a_dot, b_dot
        out["dchi_ds"][k] = dchi
        out["dub_ds"][k], out["dvb_ds"][k] = dub_ds, dvb_ds
        out["dm_ds"][k], out["drhob_ds"][k] = dm, drho_b
        if k == 0:
            classification.append(sonic_pairs.PairKind.DOUBLE_SONIC)
        else:
            classification.append(
                sonic_pairs.classify(model, tau1, taub, tol_sonic=1e-6).kind
            )

    g_xi, g_eta, _ = sol.sol(s_end)
    return ShockCurve(
        s=s_nodes, point_g=(float(g_xi), float(g_eta)), classification=classification,
        **{k: v for k, v in out.items()},
    )


def backside_tangential_estimates(curve):
    """Space-likeness certificates: characteristic-direction projections of
    the backside velocity derivative along the shock.

    Returns per-point (cos(alpha_b), sin(alpha_b)) . d(u_b, v_b)/ds and the
    beta_b analog, from the chain-rule derivatives stored on the curve.
    Expected signs: positive and negative respectively on BG.
    """
    a = np.cos(curve.alpha_back) * curve.dub_ds + np.sin(curve.alpha_back) * curve.dvb_ds
    b = np.cos(curve.beta_back) * curve.dub_ds + np.sin(curve.beta_back) * curve.dvb_ds
    return a, b


def closed_form_tangential(curve):
    """Independent compact forms of the certificates, for cross-checking:

        a_dot = q_b sin(A_b) (dchi/ds - dm/ds / (rho_b L_b)),
        b_dot = -a_dot - 2 tau_b q_b cos(A_b) sin^2(A_b) drho_b/ds.
    """
    qb = curve.c_back / np.sin(0.5 * (curve.alpha_back - curve.beta_back))
    A = 0.5 * (curve.alpha_back - curve.beta_back)
    rho_b = 1.0 / curve.tau_back
    phase = curve.dchi_ds - curve.dm_ds / (rho_b * curve.l_tan)
    a = qb * np.sin(A) * phase
    b = -a - 2.0 * curve.tau_back * qb * np.cos(A) * np.sin(A) ** 2 * curve.drhob_ds
    return a, b
