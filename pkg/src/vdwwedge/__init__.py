"""Wedge-into-vacuum expansion of a van der Waals gas.

Solver library and CLI for the 2D pseudo-steady potential-flow expansion
of a wedge of nonconvex (van der Waals) gas into vacuum: the planar
fan-shock-fan profile, the fan-interaction Goursat patch, post-sonic
shock fitting, hodograph solvers for the flow behind the shocks and the
shock interaction, and the global characteristic march out to the vacuum
boundary.
"""

__version__ = "0.1.0"

from . import (  # noqa: F401
    charkit,
    eos,
    global_march,
    goursat,
    hodograph,
    pipeline,
    riemann1d,
    shock_tracker,
    sonic_pairs,
)
