"""Quadrature kernels for fan and turning integrals.

For gamma near 1 the integrand sqrt(-p') decays like (tau-1)^-(gamma+1)/2,
so integrals to the vacuum (tau -> inf) converge only like
(tau-1)^-(gamma-1)/2.  The substitution

    z = (tau - 1)^(-(gamma-1)/2),   tau = 1 + z^(-2/(gamma-1))

maps [tau_lo, inf) onto (0, z_lo] and turns sqrt(-p') dtau into a bounded
analytic integrand:

    sqrt(-p') dtau = -(2/(gamma-1)) * sqrt(gamma*S - 2 (tau-1)^(gamma+1)/tau^3) dz.

All fan arclength tables and sigma-angle integrals use this variable; it
is also the natural grid for marching toward the vacuum.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import quad, solve_ivp

from . import eos as eos_mod
from .errors import QuadratureFailure

# 8-point Gauss-Legendre nodes/weights on [-1, 1]
_GL_X, _GL_W = np.polynomial.legendre.leggauss(8)


def z_of_tau(eos, tau):
    return math.exp(-0.5 * (eos.gamma - 1.0) * math.log(tau - 1.0))


def tau_of_z(eos, z):
    lw = -2.0 * math.log(z) / (eos.gamma - 1.0)
    if lw > eos_mod._EXP_MAX:
        return math.inf
    return 1.0 + math.exp(lw)


def logw_of_z(eos, z):
    return -2.0 * math.log(z) / (eos.gamma - 1.0)


def sqrt_neg_dp_kernel(eos, z):
    """G(z) with sqrt(-p') dtau = -(2/(gamma-1)) G(z) dz; G(0) = sqrt(gamma S)."""
    g, s = eos.gamma, eos.S
    lw = -2.0 * math.log(z) / (g - 1.0)
    # correction 2 w^(1+gamma)/tau^3 underflows smoothly to 0 as z -> 0
    if lw > eos_mod._EXP_MAX:
        corr = 0.0
    else:
        w = math.exp(lw)
        tau = 1.0 + w
        corr = 2.0 * math.exp((1.0 + g) * lw - 3.0 * math.log(tau))
    val = g * s - corr
    if val < 0.0:
        raise QuadratureFailure(f"sqrt(-p') kernel negative at z = {z}")
    return math.sqrt(val)


def integral_sqrt_neg_dp(eos, tau_lo, tau_hi=math.inf, *, tol=1e-12):
    """Integral of sqrt(-p'(tau)) over [tau_lo, tau_hi] (tau_hi may be inf)."""
    g = eos.gamma
    z_hi = 0.0 if math.isinf(tau_hi) else z_of_tau(eos, tau_hi)
    z_lo = z_of_tau(eos, tau_lo)
    if z_hi >= z_lo:
        return 0.0
    val, err = quad(
        lambda z: sqrt_neg_dp_kernel(eos, z),
        z_hi,
        z_lo,
        epsabs=tol,
        epsrel=tol,
        limit=200,
    )
    if err > 100 * max(tol, tol * abs(val)) + 1e-9:
        raise QuadratureFailure(f"fan integral error estimate {err:.2e}")
    return 2.0 / (g - 1.0) * val


def cumulative_on_z_grid(eos, z_grid):
    """Cumulative integral of sqrt(-p') dtau along a decreasing z grid.

    Returns I[k] = integral of sqrt(-p') from tau(z_grid[0]) to tau(z_grid[k]),
    computed with per-panel Gauss-Legendre in z (the kernel is analytic).
    """
    g = eos.gamma
    z = np.asarray(z_grid, dtype=float)
    out = np.zeros_like(z)
    acc = 0.0
    for k in range(1, len(z)):
        a, b = z[k - 1], z[k]
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        s = 0.0
        for x, wgt in zip(_GL_X, _GL_W):
            s += wgt * sqrt_neg_dp_kernel(eos, mid + half * x)
        acc += -(2.0 / (g - 1.0)) * s * half
        out[k] = acc
    return out


def turning_kernel_tau(eos, tau, q2):
    """sqrt(q^2 - c^2) * sqrt(-p') / q^2 for the sigma angle integrals."""
    c2 = eos_mod.sound_speed_sq(eos, tau)
    if q2 <= 0.0:
        raise QuadratureFailure("q^2 <= 0 in turning integral")
    d = q2 - c2
    if d < 0.0:
        d = 0.0
    return math.sqrt(d) * math.sqrt(c2) / (tau * q2)


def sigma_angle_integral(eos, tau_lo, q_lo, *, tau_hi=math.inf, rtol=1e-11):
    """sigma = int sqrt(q^2-c^2)/(q c) dq from q(tau_lo) to q(tau_hi).

    q(tau) follows the Bernoulli relation q^2 = q_lo^2 + 2 h(tau_lo) - 2 h(tau).
    Computed in the z variable where the integrand is analytic up to the
    vacuum; tau_hi = inf gives the full turning angle.
    """
    g = eos.gamma
    h0 = eos_mod.enthalpy_h(eos, tau_lo)
    bern = q_lo * q_lo + 2.0 * h0

    def kernel_z(z):
        tau = tau_of_z(eos, z)
        if math.isinf(tau):
            # q^2 -> bern, c^2 -> 0: sqrt(q^2-c^2)/q^2 -> 1/sqrt(bern)
            return sqrt_neg_dp_kernel(eos, z) / math.sqrt(bern)
        q2 = bern - 2.0 * eos_mod.enthalpy_h(eos, tau)
        c2 = eos_mod.sound_speed_sq(eos, tau)
        d = max(q2 - c2, 0.0)
        return sqrt_neg_dp_kernel(eos, z) * math.sqrt(d) / q2

    z_lo = z_of_tau(eos, tau_lo)
    z_hi = 0.0 if math.isinf(tau_hi) else z_of_tau(eos, tau_hi)
    val, err = quad(kernel_z, z_hi, z_lo, epsabs=1e-13, epsrel=rtol, limit=200)
    if err > 1e-6:
        raise QuadratureFailure(f"sigma integral error estimate {err:.2e}")
    return 2.0 / (g - 1.0) * val


def solve_turning_tau(eos, tau_lo, q_lo, sigma_target, *, rtol=1e-12):
    """Find tau_m > tau_lo with sigma(tau_lo -> tau_m) = sigma_target.

    Integrates d sigma/d tau through the z variable with an event; raises
    QuadratureFailure if the total available angle is below the target.
    """
    g = eos.gamma
    h0 = eos_mod.enthalpy_h(eos, tau_lo)
    bern = q_lo * q_lo + 2.0 * h0
    z_lo = z_of_tau(eos, tau_lo)

    def rhs(z, y):
        tau = tau_of_z(eos, z)
        if math.isinf(tau):
            return [-2.0 / (g - 1.0) * sqrt_neg_dp_kernel(eos, z) / math.sqrt(bern)]
        q2 = bern - 2.0 * eos_mod.enthalpy_h(eos, tau)
        c2 = eos_mod.sound_speed_sq(eos, tau)
        d = max(q2 - c2, 0.0)
        return [-2.0 / (g - 1.0) * sqrt_neg_dp_kernel(eos, z) * math.sqrt(d) / q2]

    def event(z, y):
        return y[0] - sigma_target

    event.terminal = True
    event.direction = 1
    sol = solve_ivp(
        rhs,
        (z_lo, 1e-14),
        [0.0],
        method="RK45",
        rtol=rtol,
        atol=1e-14,
        events=event,
        dense_output=False,
    )
    if not sol.success:
        raise QuadratureFailure(f"turning integration failed: {sol.message}")
    if sol.t_events[0].size == 0:
        total = sol.y[0, -1]
        raise QuadratureFailure(
            f"turning angle {sigma_target:.6g} exceeds available {total:.6g}"
        )
    z_m = sol.t_events[0][0]
    return tau_of_z(eos, z_m)
