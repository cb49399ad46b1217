"""Van der Waals thermodynamics on an isentrope.

The gas law is p(tau) = S/(tau-1)^gamma - 1/tau^2 for specific volume
tau > 1, with S > 0 and adiabatic exponent gamma in (1, 2).  For S inside
a window depending on gamma the isentrope is nonconvex: p'' has exactly
two roots tau1_i < tau2_i, p'' > 0 outside [tau1_i, tau2_i] and p'' < 0
inside, while p' < 0 everywhere.

All derivative formulas are closed form.  Quantities that combine powers
of tau and (tau-1) with cancelling growth (tau^2*p', tau^4*p'', h) are
evaluated in log space so they remain accurate at very large tau, where
the naive factors underflow or overflow individually.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.optimize import brentq

from .errors import (
    BracketFailure,
    DomainError,
    NewtonDivergence,
    NoNonconvexWindow,
    SingularityError,
)

_EXP_MAX = 700.0


def _exp(x):
    if x > _EXP_MAX:
        return math.inf
    return math.exp(x)


@dataclass(frozen=True)
class EosParams:
    """Isentrope parameters: entropy-like constant S and exponent gamma."""

    S: float
    gamma: float

    def __post_init__(self):
        if not self.S > 0:
            raise DomainError(f"S must be positive, got {self.S}")
        if not 1.0 < self.gamma < 2.0:
            raise DomainError(f"gamma must lie in (1, 2), got {self.gamma}")


def _check_tau(tau):
    if not tau > 1.0:
        raise DomainError(f"specific volume must exceed 1, got {tau}")


def pressure(eos, tau):
    """p(tau) = S (tau-1)^-gamma - tau^-2."""
    _check_tau(tau)
    lw = math.log(tau - 1.0)
    return eos.S * _exp(-eos.gamma * lw) - 1.0 / (tau * tau)


def dpressure(eos, tau):
    """p'(tau) = -gamma S (tau-1)^-(gamma+1) + 2 tau^-3."""
    _check_tau(tau)
    g = eos.gamma
    lw = math.log(tau - 1.0)
    return -g * eos.S * _exp(-(g + 1.0) * lw) + 2.0 / tau**3


def d2pressure(eos, tau):
    """p''(tau) = gamma (gamma+1) S (tau-1)^-(gamma+2) - 6 tau^-4."""
    _check_tau(tau)
    g = eos.gamma
    lw = math.log(tau - 1.0)
    return g * (g + 1.0) * eos.S * _exp(-(g + 2.0) * lw) - 6.0 / tau**4


def d3pressure(eos, tau):
    """p'''(tau) closed form (used by curvature cross-checks)."""
    _check_tau(tau)
    g = eos.gamma
    lw = math.log(tau - 1.0)
    return -g * (g + 1.0) * (g + 2.0) * eos.S * _exp(-(g + 3.0) * lw) + 24.0 / tau**5


def enthalpy_h(eos, tau):
    """Potential h with h'(tau) = tau p'(tau), normalized so h(+inf) = 0."""
    _check_tau(tau)
    g, s = eos.gamma, eos.S
    lw = math.log(tau - 1.0)
    return s * _exp(-g * lw) + g * s / (g - 1.0) * _exp((1.0 - g) * lw) - 2.0 / tau


def sound_speed_sq(eos, tau):
    """c^2 = -tau^2 p'(tau), evaluated stably for large tau."""
    _check_tau(tau)
    g = eos.gamma
    lw = math.log(tau - 1.0)
    lt = math.log(tau)
    return g * eos.S * _exp(2.0 * lt - (g + 1.0) * lw) - 2.0 / tau


def sound_speed(eos, tau):
    c2 = sound_speed_sq(eos, tau)
    if c2 <= 0.0:
        raise DomainError(f"nonpositive c^2 = {c2} at tau = {tau}")
    return math.sqrt(c2)


def tau4_d2p(eos, tau):
    """tau^4 p''(tau), evaluated stably for large tau."""
    _check_tau(tau)
    g = eos.gamma
    lw = math.log(tau - 1.0)
    lt = math.log(tau)
    return g * (g + 1.0) * eos.S * _exp(4.0 * lt - (g + 2.0) * lw) - 6.0


def w_tau2_d2p(eos, tau):
    """(tau-1) tau^2 p''(tau) = (gamma+1)(c^2 + 2/tau) - 6(tau-1)/tau^2.

    Stable at any tau > 1; the last term underflows smoothly for huge tau.
    """
    g = eos.gamma
    c2 = sound_speed_sq(eos, tau)
    lw = math.log(tau - 1.0)
    lt = math.log(tau)
    return (g + 1.0) * (c2 + 2.0 / tau) - 6.0 * _exp(lw - 2.0 * lt)


def kappa(eos, tau):
    """kappa = -2 p' / (2 p' + tau p'')."""
    c2 = sound_speed_sq(eos, tau)
    t4 = tau4_d2p(eos, tau)
    den = t4 - 2.0 * c2 * tau
    if den == 0.0:
        raise SingularityError(f"2 p' + tau p'' vanishes at tau = {tau}")
    return 2.0 * c2 * tau / den


def mu(eos, tau):
    """mu = (2 p' + tau p'') / (tau p'')."""
    c2 = sound_speed_sq(eos, tau)
    t4 = tau4_d2p(eos, tau)
    if t4 == 0.0:
        raise SingularityError(f"p'' vanishes at tau = {tau}")
    return (t4 - 2.0 * c2 * tau) / t4


def varpi(eos, tau):
    """varpi = -(4 p' + tau p'') / (tau p'')."""
    c2 = sound_speed_sq(eos, tau)
    t4 = tau4_d2p(eos, tau)
    if t4 == 0.0:
        raise SingularityError(f"p'' vanishes at tau = {tau}")
    return (4.0 * c2 * tau - t4) / t4


def a_bar(eos, tau):
    """A_bar = arctan(sqrt(varpi)); requires varpi > 0."""
    w = varpi(eos, tau)
    if w <= 0.0:
        raise DomainError(f"varpi = {w} <= 0 at tau = {tau}; A_bar undefined")
    return math.atan(math.sqrt(w))


def coeffs(eos, tau):
    """Return (kappa, mu, varpi, A_bar); A_bar is None where varpi <= 0."""
    k = kappa(eos, tau)
    m = mu(eos, tau)
    w = varpi(eos, tau)
    ab = math.atan(math.sqrt(w)) if w > 0.0 else None
    return k, m, w, ab


def coeff_ratios(p1, p2, tau):
    """(kappa, mu, varpi) from raw derivative values p' = p1, p'' = p2.

    Generic in the equation of state; used to cross-check the stable
    combination forms and to evaluate polytropic reference limits.
    """
    den = 2.0 * p1 + tau * p2
    if den == 0.0 or p2 == 0.0:
        raise SingularityError("coefficient denominators vanish")
    return (-2.0 * p1 / den, den / (tau * p2), -(4.0 * p1 + tau * p2) / (tau * p2))


def dkappa_dc(eos, tau):
    """d kappa / d c along the isentrope (chain rule through tau)."""
    p1 = dpressure(eos, tau)
    p2 = d2pressure(eos, tau)
    p3 = d3pressure(eos, tau)
    den = 2.0 * p1 + tau * p2
    dk_dtau = -2.0 * (p2 * den - p1 * (3.0 * p2 + tau * p3)) / (den * den)
    # dc/dtau = -c/(tau*kappa)
    c = sound_speed(eos, tau)
    k = kappa(eos, tau)
    dc_dtau = -c / (tau * k)
    return dk_dtau / dc_dtau


def h_inverse(eos, target, tau_lo=None):
    """Solve h(tau) = target for tau > max(tau_lo, 1); h is decreasing."""
    lo = math.log((tau_lo - 1.0)) if tau_lo is not None else math.log(1e-6)
    f = lambda lam: enthalpy_h(eos, 1.0 + math.exp(lam)) - target
    flo = f(lo)
    if flo < 0.0:
        # target above h at the lower end: move the bracket down
        while flo < 0.0 and lo > -600.0:
            lo -= 8.0
            flo = f(lo)
        if flo < 0.0:
            raise DomainError(f"h inverse: target {target} out of range")
    hi = lo + 8.0
    while f(hi) > 0.0:
        hi += 8.0
        if hi > _EXP_MAX:
            raise DomainError(f"h inverse: target {target} too close to 0")
    lam = brentq(f, lo, hi, xtol=1e-14, rtol=8.9e-16)
    return 1.0 + math.exp(lam)


def threshold_s(gamma):
    """Window thresholds (s0, s1, s2): p>0, p'<0, nonconvexity limits."""
    g = gamma
    s0 = g**g * (2.0 - g) ** (2.0 - g) / 4.0
    s1 = 2.0 * (1.0 + g) ** (1.0 + g) * (2.0 - g) ** (2.0 - g) / (27.0 * g)
    s2 = 6.0 * (2.0 + g) ** (2.0 + g) * (2.0 - g) ** (2.0 - g) / (256.0 * g * (g + 1.0))
    return s0, s1, s2


@dataclass(frozen=True)
class EosModel:
    """Isentrope with cached landmark volumes.

    Ordering (when the nonconvex window exists):
        1 < tau1_a < tau1_e < tau1_t < tau1_i < tau2_i < tau2_e < tau2_t < tau2_a
    except that only tau1_a < tau1_e < tau1_i and tau2_i < tau2_e < tau2_a
    are guaranteed; the tangent pair satisfies tau1_a < tau1_t < tau1_i.
    """

    params: EosParams
    tau1_i: float
    tau2_i: float
    tau1_t: float
    tau2_t: float
    tau1_a: float
    tau2_a: float
    tau1_e: float
    tau2_e: float
    property_p_holds: bool

    def p(self, tau):
        return pressure(self.params, tau)

    def dp(self, tau):
        return dpressure(self.params, tau)

    def d2p(self, tau):
        return d2pressure(self.params, tau)

    def h(self, tau):
        return enthalpy_h(self.params, tau)

    def c(self, tau):
        return sound_speed(self.params, tau)

    def c2(self, tau):
        return sound_speed_sq(self.params, tau)

    def as_dict(self):
        return {
            "S": self.params.S,
            "gamma": self.params.gamma,
            "tau1_i": self.tau1_i,
            "tau2_i": self.tau2_i,
            "tau1_t": self.tau1_t,
            "tau2_t": self.tau2_t,
            "tau1_a": self.tau1_a,
            "tau2_a": self.tau2_a,
            "tau1_e": self.tau1_e,
            "tau2_e": self.tau2_e,
            "property_p_holds": self.property_p_holds,
        }


def a_map(model, tau, *, xtol=1e-14):
    """Conjugate volume a(tau) in [tau2_i, tau2_a] with p'(a) = p'(tau)."""
    eps = 1e-9 * (model.tau1_i - model.tau1_a)
    if not model.tau1_a - eps <= tau <= model.tau1_i + eps:
        raise DomainError(
            f"a_map needs tau in [{model.tau1_a}, {model.tau1_i}], got {tau}"
        )
    tau = min(max(tau, model.tau1_a), model.tau1_i)
    target = dpressure(model.params, tau)
    f = lambda s: dpressure(model.params, s) - target
    lo, hi = model.tau2_i, model.tau2_a
    flo, fhi = f(lo), f(hi)
    # p' has its local minimum at tau2_i and climbs back to p'(tau1_i) at tau2_a
    if flo > 0.0:
        return lo
    if fhi < 0.0:
        return hi
    return brentq(f, lo, hi, xtol=xtol, rtol=8.9e-16)


def _inflection_pair(eos, tol):
    g = eos.gamma
    mid = 4.0 / (2.0 - g)
    if d2pressure(eos, mid) >= 0.0:
        s0, s1, s2 = threshold_s(g)
        raise NoNonconvexWindow(
            f"p'' >= 0 at tau = 4/(2-gamma) = {mid:.6g}: no two inflection "
            f"roots for S = {eos.S} (window is ({s1:.6g}, {s2:.6g}))"
        )
    f = lambda t: d2pressure(eos, t)
    lo = 1.0 + 1e-9 * (mid - 1.0)
    t1i = brentq(f, lo, mid, xtol=tol, rtol=8.9e-16)
    hi = 2.0 * mid
    while f(hi) < 0.0:
        hi *= 2.0
        if hi > 1e12:
            raise BracketFailure("no upper inflection root found")
    t2i = brentq(f, mid, hi, xtol=tol, rtol=8.9e-16)
    return t1i, t2i


def _aux_pair(eos, t1i, t2i, tol):
    f1 = lambda t: dpressure(eos, t) - dpressure(eos, t2i)
    lo = 1.0 + 1e-12 * (t1i - 1.0)
    while f1(lo) > 0.0:
        lo = 1.0 + 0.5 * (lo - 1.0)
    t1a = brentq(f1, lo, t1i, xtol=tol, rtol=8.9e-16)
    f2 = lambda t: dpressure(eos, t) - dpressure(eos, t1i)
    hi = 2.0 * t2i
    while f2(hi) < 0.0:
        hi *= 2.0
        if hi > 1e12:
            raise BracketFailure("no conjugate of tau1_i found")
    t2a = brentq(f2, t2i, hi, xtol=tol, rtol=8.9e-16)
    return t1a, t2a


def _a_of(eos, tau, t2i, t2a):
    target = dpressure(eos, tau)
    f = lambda s: dpressure(eos, s) - target
    if f(t2i) > 0.0:
        return t2i
    if f(t2a) < 0.0:
        return t2a
    return brentq(f, t2i, t2a, xtol=1e-14, rtol=8.9e-16)


def _tangent_pair(eos, t1a, t1i, t2i, t2a, tol):
    """Double tangent: p'(x) = p'(y) = (p(x)-p(y))/(x-y).

    Damped 2D Newton seeded between tau1_a and tau1_i; falls back to
    bisection of the equivalent one-variable equation through the
    conjugate map when Newton stalls.
    """

    def F(x, y):
        return (
            dpressure(eos, x) - dpressure(eos, y),
            dpressure(eos, x) * (x - y) - pressure(eos, x) + pressure(eos, y),
        )

    def newton():
        x = 0.5 * (t1a + t1i)
        y = _a_of(eos, x, t2i, t2a)
        f1, f2 = F(x, y)
        norm = abs(f1) + abs(f2)
        for _ in range(80):
            if norm < 1e-15:
                return x, y
            j11 = d2pressure(eos, x)
            j12 = -d2pressure(eos, y)
            j21 = d2pressure(eos, x) * (x - y)
            j22 = dpressure(eos, y) - dpressure(eos, x)
            det = j11 * j22 - j12 * j21
            if det == 0.0:
                return None
            dx = -(f1 * j22 - f2 * j12) / det
            dy = -(j11 * f2 - j21 * f1) / det
            lam = 1.0
            while lam > 1e-8:
                xn, yn = x + lam * dx, y + lam * dy
                if t1a < xn < t1i and t2i < yn < 1.5 * t2a:
                    g1, g2 = F(xn, yn)
                    if abs(g1) + abs(g2) < norm:
                        x, y, f1, f2, norm = xn, yn, g1, g2, abs(g1) + abs(g2)
                        break
                lam *= 0.5
            else:
                return None
        return (x, y) if norm < 1e-12 else None

    got = newton()
    if got is None:
        # bisection on G(x) = p'(x)(x - a(x)) - p(x) + p(a(x))
        def G(x):
            ax = _a_of(eos, x, t2i, t2a)
            return dpressure(eos, x) * (x - ax) - pressure(eos, x) + pressure(eos, ax)

        lo = t1a + 1e-9 * (t1i - t1a)
        hi = t1i - 1e-9 * (t1i - t1a)
        if G(lo) * G(hi) > 0.0:
            raise NewtonDivergence(
                f"double-tangent solve failed: G({lo:.8g}) = {G(lo):.3g}, "
                f"G({hi:.8g}) = {G(hi):.3g}"
            )
        x = brentq(G, lo, hi, xtol=tol, rtol=8.9e-16)
        got = (x, _a_of(eos, x, t2i, t2a))
    return got


def _double_sonic(eos, t1a, t1i, t2i, t2a, tol):
    """Unique pair with p'(t1e) = p'(t2e) = (2h(t1e)-2h(t2e))/(t1e^2-t2e^2)."""

    def g(t):
        at = _a_of(eos, t, t2i, t2a)
        return -dpressure(eos, t) + (
            2.0 * enthalpy_h(eos, t) - 2.0 * enthalpy_h(eos, at)
        ) / (t * t - at * at)

    lo = t1a + 1e-10 * (t1i - t1a)
    hi = t1i - 1e-10 * (t1i - t1a)
    glo, ghi = g(lo), g(hi)
    if glo * ghi > 0.0:
        raise BracketFailure(
            f"double-sonic bracket failed: g({lo:.8g}) = {glo:.3g}, "
            f"g({hi:.8g}) = {ghi:.3g}"
        )
    t1e = brentq(g, lo, hi, xtol=tol, rtol=8.9e-16)
    return t1e, _a_of(eos, t1e, t2i, t2a)


def _property_p(eos, t1i, t2i, t2a, n=1000):
    """Sample the sign pattern of p' and p'' required by the construction."""
    lo, hi = 1.0 + 1e-6 * (t1i - 1.0), 10.0 * t2a
    for k in range(n):
        t = lo * (hi / lo) ** (k / (n - 1.0))
        if dpressure(eos, t) >= 0.0:
            return False
    win = 1e-7 * (t2i - t1i)
    for k in range(n):
        t = 1.0 + (t1i - win - 1.0) * (k + 0.5) / n
        if t > 1.0 and d2pressure(eos, t) <= 0.0:
            return False
    for k in range(n):
        t = t1i + win + (t2i - t1i - 2 * win) * (k + 0.5) / n
        if d2pressure(eos, t) >= 0.0:
            return False
    for k in range(n):
        t = t2i + win + (10.0 * t2a - t2i - win) * (k + 0.5) / n
        if d2pressure(eos, t) <= 0.0:
            return False
    return True


def find_landmarks(params, *, tol=1e-12):
    """Compute all landmark volumes and return the populated EosModel."""
    t1i, t2i = _inflection_pair(params, tol)
    t1a, t2a = _aux_pair(params, t1i, t2i, tol)
    t1t, t2t = _tangent_pair(params, t1a, t1i, t2i, t2a, tol)
    t1e, t2e = _double_sonic(params, t1a, t1i, t2i, t2a, tol)
    holds = _property_p(params, t1i, t2i, t2a)
    return EosModel(
        params=params,
        tau1_i=t1i,
        tau2_i=t2i,
        tau1_t=t1t,
        tau2_t=t2t,
        tau1_a=t1a,
        tau2_a=t2a,
        tau1_e=t1e,
        tau2_e=t2e,
        property_p_holds=holds,
    )
