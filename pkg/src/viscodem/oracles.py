"""Closed-form reference solutions for the benchmark and buckling scenarios.

All formulas are small-strain / one-dimensional theory for the standard
three-parameter solid, plus classical elastic buckling loads.  They are
independent of the solver and back the test suite and the `oracle` CLI
subcommand.  FEM eigen-pressures quoted by the source experiments are kept
as fixed reference constants for bracketing checks.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

# plane-strain FEM eigen-pressures used as bracketing references (Pa)
BEAM_EIGENPRESSURE_LONGTERM = 9.36e-3    # E = E_inf
BEAM_EIGENPRESSURE_INSTANT = 2.34e-2     # E = E_0
SHELL_EIGENPRESSURE_LONGTERM = 6.44e-3
SHELL_EIGENPRESSURE_INSTANT = 1.61e-2


@dataclass(frozen=True)
class OracleResult:
    quantity: str
    times: np.ndarray
    values: np.ndarray
    source: str

    def __post_init__(self):
        if not np.all(np.isfinite(self.values)):
            raise ValueError("oracle produced non-finite values")
        if len(self.times) > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("time grid must be strictly increasing")


def relaxation_stress(E_inf, E_1, tau, eps0, t):
    """Uniaxial stress under a held strain eps0: [E_inf + E_1 e^(-t/tau)] eps0."""
    t = np.asarray(t, float)
    if np.any(t < 0):
        raise DomainError("negative time")
    return (E_inf + E_1 * np.exp(-t / tau)) * eps0


def retardation_time(E_inf, E_1, tau):
    return tau * (E_inf + E_1) / E_inf


def creep_strain(E_inf, E_1, tau, sigma0, t):
    """Uniaxial strain under a held stress sigma0, rising from
    sigma0/(E_inf+E_1) toward sigma0/E_inf with the retardation time."""
    t = np.asarray(t, float)
    if np.any(t < 0):
        raise DomainError("negative time")
    tau_r = retardation_time(E_inf, E_1, tau)
    return sigma0 * (1.0 / E_inf
                     - E_1 / (E_inf * (E_inf + E_1)) * np.exp(-t / tau_r))


def initial_creep_rate(E_inf, E_1, tau, sigma0):
    tau_r = retardation_time(E_inf, E_1, tau)
    return sigma0 * E_1 / (tau_r * E_inf * (E_inf + E_1))


def euler_buckling_pressure(E, L, h):
    """Critical end pressure of a clamped-free column of unit depth:
    pi^2 E I / (4 A L^2) with I = h^3/12, A = h."""
    if E <= 0 or L <= 0 or h <= 0:
        raise DomainError("need positive E, L, h")
    I_g = h ** 3 / 12.0
    return math.pi ** 2 * E * I_g / (4.0 * h * L ** 2)


def shell_buckling_pressure(E, nu, a, d):
    """Classical ring estimate 2E/(1-nu^2) (a/d)^3 for a thin-walled
    cylinder of wall thickness a and diameter d (taken as the outer
    diameter here)."""
    if E <= 0 or a <= 0 or d <= 0:
        raise DomainError("need positive E, a, d")
    if not nu < 1.0:
        raise DomainError("need nu < 1")
    return 2.0 * E / (1.0 - nu ** 2) * (a / d) ** 3


def creep_buckling_time(E_inf, E_1, tau, p, critical_pressure):
    """Quasi-static creep-buckling onset: the time at which the applied
    pressure equals critical_pressure(E(t)); informational only.

    critical_pressure is a callable E -> p_cr.  Returns 0.0 if already
    unstable at t = 0, inf if stable in the long-term limit; otherwise the
    bisection root of p = p_cr(E(t)).
    """
    if p >= critical_pressure(E_inf + E_1):
        return 0.0
    if p <= critical_pressure(E_inf):
        return math.inf
    lo, hi = 0.0, tau
    while p < critical_pressure(E_inf + E_1 * math.exp(-hi / tau)):
        hi *= 2.0
        if hi > 1e6 * tau:
            return math.inf
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if p < critical_pressure(E_inf + E_1 * math.exp(-mid / tau)):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def table(quantity: str, E_inf, E_1, tau, load, times) -> OracleResult:
    """Tabulate one oracle on a time grid (for the CLI)."""
    times = np.asarray(times, float)
    if quantity == "relaxation_stress":
        vals = relaxation_stress(E_inf, E_1, tau, load, times)
        src = "held-strain stress decay"
    elif quantity == "creep_strain":
        vals = creep_strain(E_inf, E_1, tau, load, times)
        src = "held-stress strain rise"
    else:
        raise DomainError(f"unknown oracle quantity {quantity!r}")
    return OracleResult(quantity, times, np.asarray(vals, float), src)
