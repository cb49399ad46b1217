"""Sonic shock pairings for the nonconvex isentrope.

A pairing (tau_f, tau_b) satisfies the normal-shock relations with squared
mass flux m^2 = -(2h(tau_f) - 2h(tau_b)) / (tau_f^2 - tau_b^2).  With
N = m tau and c = tau sqrt(-p') the pairing is classified by comparing the
normal pseudo-speed with the sound speed on each side:

    double-sonic:  N_f = c_f, N_b = c_b   (tau_f = tau1_e, tau_b = tau2_e)
    post-sonic:    N_f > c_f, N_b = c_b   (tau_b = s_po(tau_f))
    pre-sonic:     N_f = c_f, N_b < c_b   (tau_b = s_pr(tau_f))
    transonic:     N_f > c_f, N_b < c_b

Admissibility is Liu's extended entropy condition: the chord slope of
2h over tau^2 from tau_f to tau_b must not be exceeded by the chord to
any intermediate volume.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from scipy.optimize import brentq

from . import eos as eos_mod
from .errors import (
    BracketFailure,
    DomainError,
    InadmissiblePair,
    NegativeMassFluxSq,
)


class PairKind(enum.Enum):
    DOUBLE_SONIC = "DoubleSonic"
    POST_SONIC = "PostSonic"
    PRE_SONIC = "PreSonic"
    TRANSONIC = "Transonic"


@dataclass(frozen=True)
class SonicPairing:
    tau_front: float
    tau_back: float
    mass_flux_sq: float
    kind: PairKind

    @property
    def mass_flux(self):
        return math.sqrt(self.mass_flux_sq)


def mass_flux_sq(eos, tau_f, tau_b):
    """m^2 = -(2h(tau_f) - 2h(tau_b)) / (tau_f^2 - tau_b^2)."""
    if tau_f == tau_b:
        raise DomainError("pairing requires tau_f != tau_b")
    hf = eos_mod.enthalpy_h(eos, tau_f)
    hb = eos_mod.enthalpy_h(eos, tau_b)
    return -(2.0 * hf - 2.0 * hb) / (tau_f * tau_f - tau_b * tau_b)


def double_sonic_pair(model, *, tol=1e-13):
    """The unique pair (tau1_e, tau2_e); recomputed from the model brackets."""
    if not model.property_p_holds:
        raise BracketFailure("EOS does not satisfy the nonconvexity property")
    return eos_mod._double_sonic(
        model.params, model.tau1_a, model.tau1_i, model.tau2_i, model.tau2_a, tol
    )


def _chord_residual(eos, tau, s):
    """r(s) = p'(s)(s^2 - tau^2) - 2h(s) + 2h(tau)."""
    return (
        eos_mod.dpressure(eos, s) * (s * s - tau * tau)
        - 2.0 * eos_mod.enthalpy_h(eos, s)
        + 2.0 * eos_mod.enthalpy_h(eos, tau)
    )


def s_po(model, tau, *, xtol=1e-13):
    """Back volume of the post-sonic pairing for tau in (tau1_e, tau2_i).

    Unique root of p'(s)(s^2 - tau^2) = 2h(s) - 2h(tau) on (tau2_i, tau2_e];
    sonic on the back side. Decreasing in tau, with s_po(tau1_e) = tau2_e
    and s_po -> tau2_i as tau -> tau2_i.
    """
    p = model.params
    if tau == model.tau1_e:
        return model.tau2_e
    if not model.tau1_e < tau < model.tau2_i:
        raise DomainError(
            f"s_po needs tau in ({model.tau1_e}, {model.tau2_i}), got {tau}"
        )
    f = lambda s: _chord_residual(p, tau, s)
    lo, hi = model.tau2_i, model.tau2_e * (1.0 + 1e-12)
    flo, fhi = f(lo), f(hi)
    # the bracket degenerates at both parameter limits; tolerate roundoff
    if flo > 0.0:
        if flo < 1e-10:
            return lo
        raise BracketFailure(f"s_po bracket failed at tau = {tau}: ({flo}, {fhi})")
    if fhi < 0.0:
        if fhi > -1e-10:
            return hi
        raise BracketFailure(f"s_po bracket failed at tau = {tau}: ({flo}, {fhi})")
    return brentq(f, lo, hi, xtol=xtol, rtol=8.9e-16)


def ds_po(model, tau, *, s=None):
    """Derivative of s_po from the differentiated defining relation."""
    if s is None:
        s = s_po(model, tau)
    p = model.params
    num = 2.0 * tau * (eos_mod.dpressure(p, s) - eos_mod.dpressure(p, tau))
    den = eos_mod.d2pressure(p, s) * (s * s - tau * tau)
    return num / den


def s_pr(model, tau, *, xtol=1e-13):
    """Back volume of the pre-sonic pairing for tau in (tau1_e, tau1_i).

    Unique root s > tau of p'(tau)(s^2 - tau^2) = 2h(s) - 2h(tau) with
    p'(s) < p'(tau); lies in (tau1_i, tau2_e], sonic on the front side.
    """
    p = model.params
    if tau == model.tau1_e:
        return model.tau2_e
    if not model.tau1_e < tau < model.tau1_i:
        raise DomainError(
            f"s_pr needs tau in ({model.tau1_e}, {model.tau1_i}), got {tau}"
        )
    # conjugate of tau on the concave interval (tau1_i, tau2_i): the interior
    # maximum of rhat sits past it, so bracket the decreasing-to-zero branch
    target = eos_mod.dpressure(p, tau)
    g = lambda s: eos_mod.dpressure(p, s) - target
    conj = brentq(g, model.tau1_i, model.tau2_i, xtol=1e-14, rtol=8.9e-16)
    amap = eos_mod.a_map(model, tau)

    def rhat(s):
        return (
            target * (s * s - tau * tau)
            - 2.0 * eos_mod.enthalpy_h(p, s)
            + 2.0 * eos_mod.enthalpy_h(p, tau)
        )

    flo, fhi = rhat(conj), rhat(amap)
    if flo > 0.0:
        if flo < 1e-10:
            return conj
        raise BracketFailure(f"s_pr bracket failed at tau = {tau}: ({flo}, {fhi})")
    if fhi < 0.0:
        if fhi > -1e-10:
            return amap
        raise BracketFailure(f"s_pr bracket failed at tau = {tau}: ({flo}, {fhi})")
    return brentq(rhat, conj, amap, xtol=xtol, rtol=8.9e-16)


def liu_admissible(eos, tau_f, tau_b, *, n_check=256):
    """Evaluate Liu's extended entropy condition on a grid of chords.

    Returns (admissible, worst_margin) where the margin is the minimum over
    interior volumes of  -(2h_f-2h_b)/(tau_f^2-tau_b^2) + (2h_f-2h)/(tau_f^2-tau^2).
    """
    if tau_f == tau_b:
        raise DomainError("pairing requires tau_f != tau_b")
    hf = eos_mod.enthalpy_h(eos, tau_f)
    hb = eos_mod.enthalpy_h(eos, tau_b)
    lhs = -(2.0 * hf - 2.0 * hb) / (tau_f * tau_f - tau_b * tau_b)
    lo, hi = min(tau_f, tau_b), max(tau_f, tau_b)
    worst = math.inf
    for k in range(n_check):
        t = lo + (hi - lo) * (k + 1.0) / (n_check + 1.0)
        rhs = -(2.0 * hf - 2.0 * eos_mod.enthalpy_h(eos, t)) / (
            tau_f * tau_f - t * t
        )
        worst = min(worst, lhs - rhs)
    return worst >= 0.0, worst


def classify(model, tau_f, tau_b, *, tol_sonic=1e-8, n_check=256):
    """Classify an admissible pairing by its front/back sonic character."""
    p = model.params
    ok, margin = liu_admissible(p, tau_f, tau_b, n_check=n_check)
    if not ok:
        raise InadmissiblePair(
            f"pairing ({tau_f}, {tau_b}) violates entropy condition "
            f"(margin {margin:.3e})"
        )
    m2 = mass_flux_sq(p, tau_f, tau_b)
    if m2 <= 0.0:
        raise NegativeMassFluxSq(f"m^2 = {m2} for pairing ({tau_f}, {tau_b})")
    nf = math.sqrt(m2) * tau_f
    nb = math.sqrt(m2) * tau_b
    cf = eos_mod.sound_speed(p, tau_f)
    cb = eos_mod.sound_speed(p, tau_b)
    front_sonic = abs(nf - cf) <= tol_sonic * cf
    back_sonic = abs(nb - cb) <= tol_sonic * cb
    if front_sonic and back_sonic:
        kind = PairKind.DOUBLE_SONIC
    elif back_sonic and nf > cf:
        kind = PairKind.POST_SONIC
    elif front_sonic and nb < cb:
        kind = PairKind.PRE_SONIC
    elif nf > cf and nb < cb:
        kind = PairKind.TRANSONIC
    else:
        raise InadmissiblePair(
            f"pairing ({tau_f}, {tau_b}) outside the oblique-shock table: "
            f"N_f-c_f = {nf - cf:.3e}, N_b-c_b = {nb - cb:.3e}"
        )
    return SonicPairing(tau_front=tau_f, tau_back=tau_b, mass_flux_sq=m2, kind=kind)
