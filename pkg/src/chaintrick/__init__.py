"""Stability, Hopf-bifurcation and cycle analysis of a delayed-investment
growth model reduced to finite ODE systems by the linear chain trick."""

from ._version import __version__
from .model_core import (
    DANA_MALGRANGE,
    Equilibrium,
    InvestmentParams,
    MacroParams,
    equilibrium,
    growth_interval,
    investment_derivs,
    phi,
    phi_prime,
    solve_x_star,
)
from .chain_system import (
    ChainState,
    ChainSystem,
    build,
    constant_history_state,
    equilibrium_state,
    jacobian,
    rhs,
)
from .char_poly import (
    CharCoeffsM1,
    CharCoeffsM2,
    StabilityVerdict,
    coeffs_m1,
    coeffs_m2,
    cubic_discriminant,
    phi_quartic,
    phi_quartic_deriv,
    routh_hurwitz_cubic,
    routh_hurwitz_quartic,
)
from .hopf_locator import (
    GIntervalReport,
    HopfPoint,
    critical_delays,
    hopf_in_alpha,
    hopf_in_g,
    hopf_in_T_m1,
    hopf_in_T_m2,
    hopf_in_T_numeric,
)
from .simulator import CycleMetrics, Trajectory, cycle_metrics, integrate
from .sweep import (
    BifurcationCurve,
    curve_T_vs_alpha,
    curve_T_vs_g,
    surface_T,
    table_g_bifurcations,
)
from . import errors

__all__ = [
    "__version__",
    "DANA_MALGRANGE",
    "InvestmentParams",
    "MacroParams",
    "Equilibrium",
    "equilibrium",
    "growth_interval",
    "investment_derivs",
    "phi",
    "phi_prime",
    "solve_x_star",
    "ChainState",
    "ChainSystem",
    "build",
    "constant_history_state",
    "equilibrium_state",
    "jacobian",
    "rhs",
    "CharCoeffsM1",
    "CharCoeffsM2",
    "StabilityVerdict",
    "coeffs_m1",
    "coeffs_m2",
    "cubic_discriminant",
    "phi_quartic",
    "phi_quartic_deriv",
    "routh_hurwitz_cubic",
    "routh_hurwitz_quartic",
    "GIntervalReport",
    "HopfPoint",
    "critical_delays",
    "hopf_in_alpha",
    "hopf_in_g",
    "hopf_in_T_m1",
    "hopf_in_T_m2",
    "hopf_in_T_numeric",
    "CycleMetrics",
    "Trajectory",
    "cycle_metrics",
    "integrate",
    "BifurcationCurve",
    "curve_T_vs_alpha",
    "curve_T_vs_g",
    "surface_T",
    "table_g_bifurcations",
    "errors",
]
