"""Planar expansion of the gas into vacuum: the 1D self-similar profile.

For tau0 < tau1_e the profile is fan-shock-fan: a rarefaction fan from the
rest state down to tau1_e, the double-sonic shock jumping to tau2_e, and a
second fan opening to the vacuum.  Along each fan

    u_hat(tau) = u_anchor - int sqrt(-p') dtau,     xi_hat = u_hat + c(tau),

and xi_hat is strictly decreasing in tau because p'' > 0 on both fan
ranges.  The shock sits at xi_hat_1 with mass flux m^2 = -p'(tau1_e) and
both normal speeds sonic.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import _quad, eos as eos_mod
from .errors import DomainError
from .sonic_pairs import mass_flux_sq

VACUUM = "vacuum"


class Case(enum.Enum):
    FAN_ONLY = "FanOnly"
    SHOCK_FAN = "ShockFan"
    FAN_SHOCK_FAN = "FanShockFan"


@dataclass(frozen=True)
class CaseSplit:
    tau0: float
    case: Case


def case_split(model, tau0):
    """Wave pattern emitted by a wedge face, by the rest volume tau0."""
    if not tau0 > 1.0:
        raise DomainError(f"tau0 must exceed 1, got {tau0}")
    if tau0 >= model.tau2_i:
        return CaseSplit(tau0, Case.FAN_ONLY)
    if tau0 > model.tau1_t:
        return CaseSplit(tau0, Case.SHOCK_FAN)
    return CaseSplit(tau0, Case.FAN_SHOCK_FAN)


@dataclass(frozen=True)
class FanTable:
    """Monotone tabulation of one fan: tau, u_hat, xi_hat (tau increasing)."""

    tau: np.ndarray
    u_hat: np.ndarray
    xi_hat: np.ndarray
    z: np.ndarray | None = None  # set for the vacuum-side fan


@dataclass(frozen=True)
class Wave1D:
    model: object
    tau0: float
    case: Case
    xi0: float
    xi1: float | None
    xi2: float
    u1: float | None
    u2: float | None
    right_fan: FanTable | None
    left_fan: FanTable
    tau_max: float

    def summary(self):
        return {
            "case": self.case.value,
            "tau0": self.tau0,
            "xi0": self.xi0,
            "xi1": self.xi1,
            "xi2": self.xi2,
            "u1": self.u1,
            "u2": self.u2,
            "tau_max": self.tau_max,
        }


def _chebyshev_nodes(a, b, n):
    k = np.arange(n)
    x = np.cos(math.pi * (n - 1 - k) / (n - 1))
    return 0.5 * (a + b) + 0.5 * (b - a) * x


def _fan_table_moderate(eos, tau_lo, tau_hi, u_anchor, n):
    """Fan on a moderate tau interval, anchored at u(tau_lo) = u_anchor."""
    taus = _chebyshev_nodes(tau_lo, tau_hi, n)
    taus[0], taus[-1] = tau_lo, tau_hi
    u = np.empty(n)
    u[0] = u_anchor
    for k in range(1, n):
        u[k] = u[k - 1] - _gauss_sqrt_neg_dp(eos, taus[k - 1], taus[k])
    xi = u + np.array([eos_mod.sound_speed(eos, t) for t in taus])
    return FanTable(tau=taus, u_hat=u, xi_hat=xi)


def _gauss_sqrt_neg_dp(eos, a, b):
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    s = 0.0
    for x, w in zip(_quad._GL_X, _quad._GL_W):
        t = mid + half * x
        s += w * math.sqrt(eos_mod.sound_speed_sq(eos, t)) / t
    return s * half


def _fan_table_vacuum(eos, tau_lo, u_anchor, tau_max, n):
    """Fan from tau_lo toward the vacuum on a uniform z grid."""
    z_lo = _quad.z_of_tau(eos, tau_lo)
    z_hi = _quad.z_of_tau(eos, tau_max)
    z = np.linspace(z_lo, z_hi, n)
    integ = _quad.cumulative_on_z_grid(eos, z)
    u = u_anchor - integ
    taus = np.array([_quad.tau_of_z(eos, zz) for zz in z])
    xi = u + np.array([math.sqrt(eos_mod.sound_speed_sq(eos, t)) for t in taus])
    return FanTable(tau=taus, u_hat=u, xi_hat=xi, z=z)


def build_wave(model, tau0, *, n_fan=2048, tau_max=None, z_cut=0.02):
    """Construct the planar profile for tau0 < tau1_e (fan-shock-fan).

    tau_max bounds the vacuum-side tabulation; by default it is derived
    from z_cut through tau_max = 1 + z_cut^(-2/(gamma-1)).  The analytic
    vacuum edge xi2 uses the full improper integral regardless.
    """
    eos = model.params
    if not 1.0 < tau0 < model.tau1_e:
        raise DomainError(
            f"build_wave needs tau0 in (1, tau1_e = {model.tau1_e}), got {tau0}"
        )
    if tau_max is None:
        tau_max = _quad.tau_of_z(eos, z_cut)
    xi0 = eos_mod.sound_speed(eos, tau0)
    right = _fan_table_moderate(eos, tau0, model.tau1_e, 0.0, n_fan)
    u1 = right.u_hat[-1]
    xi1 = right.xi_hat[-1]
    u2 = model.tau2_e / model.tau1_e * (u1 - xi1) + xi1
    xi2 = u2 - _quad.integral_sqrt_neg_dp(eos, model.tau2_e)
    left = _fan_table_vacuum(eos, model.tau2_e, u2, tau_max, n_fan)
    return Wave1D(
        model=model,
        tau0=tau0,
        case=Case.FAN_SHOCK_FAN,
        xi0=xi0,
        xi1=xi1,
        xi2=xi2,
        u1=u1,
        u2=u2,
        right_fan=right,
        left_fan=left,
        tau_max=tau_max,
    )


def build_fan_only_wave(model, tau0, *, n_fan=2048, tau_max=None, z_cut=0.02):
    """Pure rarefaction profile for tau0 >= tau2_i (case 1)."""
    eos = model.params
    if tau0 < model.tau2_i:
        raise DomainError(f"fan-only profile needs tau0 >= tau2_i, got {tau0}")
    if tau_max is None:
        tau_max = _quad.tau_of_z(eos, z_cut)
    xi0 = eos_mod.sound_speed(eos, tau0)
    xi2 = -_quad.integral_sqrt_neg_dp(eos, tau0)
    left = _fan_table_vacuum(eos, tau0, 0.0, tau_max, n_fan)
    return Wave1D(
        model=model,
        tau0=tau0,
        case=Case.FAN_ONLY,
        xi0=xi0,
        xi1=None,
        xi2=xi2,
        u1=None,
        u2=None,
        right_fan=None,
        left_fan=left,
        tau_max=tau_max,
    )


def _invert_fan(eos, fan, xi_hat, *, newton_iters=3):
    """tau on a fan with the given xi_hat; table lookup plus Newton polish."""
    xi = fan.xi_hat
    # xi_hat decreases with tau, so reverse for interp
    tau = float(np.interp(xi_hat, xi[::-1], fan.tau[::-1]))
    lo, hi = fan.tau[0], fan.tau[-1]
    for _ in range(newton_iters):
        c2 = eos_mod.sound_speed_sq(eos, tau)
        res = _fan_u(eos, fan, tau) + math.sqrt(c2) - xi_hat
        # d xi/d tau = -tau p'' / (2 sqrt(-p')) = -tau^4 p'' / (2 tau^3 sqrt(-p'))
        dxi = -eos_mod.tau4_d2p(eos, tau) / (2.0 * tau * tau * math.sqrt(c2))
        step = res / dxi
        tau = min(max(tau - step, lo), hi)
    return tau


def _fan_u(eos, fan, tau):
    """u_hat on a fan at arbitrary tau: nearest node plus a Gauss panel."""
    k = int(np.searchsorted(fan.tau, tau))
    k = min(max(k, 1), len(fan.tau) - 1)
    k0 = k - 1 if abs(fan.tau[k - 1] - tau) < abs(fan.tau[k] - tau) else k
    return fan.u_hat[k0] - _gauss_sqrt_neg_dp(eos, fan.tau[k0], tau)


def sample(wave, xi_hat):
    """Evaluate the profile at xi_hat: (region, u_hat, tau).

    Region is one of 'constant', 'right_fan', 'shock', 'left_fan', 'vacuum';
    tau is None in the vacuum, and the shock label is returned exactly at
    xi_hat == xi1.
    """
    eos = wave.model.params
    if xi_hat > wave.xi0:
        return ("constant", 0.0, wave.tau0)
    if xi_hat < wave.xi2:
        return (VACUUM, None, None)
    if wave.case is Case.FAN_SHOCK_FAN:
        if xi_hat == wave.xi1:
            return ("shock", wave.u1, wave.model.tau1_e)
        if xi_hat > wave.xi1:
            tau = _invert_fan(eos, wave.right_fan, xi_hat)
            return ("right_fan", _fan_u(eos, wave.right_fan, tau), tau)
    if xi_hat < wave.left_fan.xi_hat[-1]:
        # beyond the tabulated fan but above the analytic vacuum edge
        return ("left_fan_tail", None, None)
    tau = _invert_fan(eos, wave.left_fan, xi_hat)
    return ("left_fan", _fan_u(eos, wave.left_fan, tau), tau)
