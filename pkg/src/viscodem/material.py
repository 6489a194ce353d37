"""Viscoelastic relaxation functions and neo-Hookean energy/stress kernels.

Relaxation is a Prony sum over shear and volumetric moduli; the standard
three-parameter solid maps onto a single branch with tau = xi / E_1.  The
incremental solver evaluates the elastic kernels below with the relaxed
moduli of the current time, which is exactly the pseudo-elastic step: for
a frozen deformation the resulting stress reproduces the relaxation
solution sigma(t) = G(t) (B0 - I)/J0 + lambda(t) (J0 - 1) I.

The energy/stress kernels are generic: entries of F may be floats, numpy
arrays, or recorded tape variables (anything with *, /, ** and log).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, IncompressibleLimit, InvertedElement


@dataclass(frozen=True)
class MaterialModel:
    """Prony relaxation model: G(t) = G_inf + sum_i G_i exp(-t/tau_i), same
    structure for the first Lame parameter; nu is time-independent."""

    G_inf: float
    lambda_inf: float
    branches: tuple = ()          # (G_i, lambda_i, tau_i)
    nu: float = 0.3

    def __post_init__(self):
        if self.G_inf <= 0 or self.lambda_inf <= 0:
            raise DomainError("long-term moduli must be positive")
        if not 0.0 < self.nu < 0.5:
            raise IncompressibleLimit(f"need 0 < nu < 0.5, got {self.nu}")
        for G_i, lam_i, tau_i in self.branches:
            if G_i <= 0 or lam_i <= 0 or tau_i <= 0:
                raise DomainError("branch moduli and relaxation times must be positive")

    @property
    def instantaneous(self):
        """(G(0), lambda(0))."""
        return (self.G_inf + sum(b[0] for b in self.branches),
                self.lambda_inf + sum(b[1] for b in self.branches))

    def shear_fractions(self):
        """Dimensionless relaxation fractions (m_inf, [m_i]); they sum to 1."""
        G0 = self.instantaneous[0]
        return self.G_inf / G0, [b[0] / G0 for b in self.branches]


def from_standard_solid(E_inf: float, E_1: float, xi: float, nu: float) -> MaterialModel:
    """Three-parameter solid (spring E_inf parallel to spring E_1 + dashpot
    xi) with time-independent Poisson ratio.  tau = xi / E_1; E_1 = 0 gives
    a purely elastic model."""
    if nu >= 0.5:
        raise IncompressibleLimit(f"nu = {nu} >= 0.5")
    if E_inf <= 0 or E_1 < 0 or (E_1 > 0 and xi <= 0):
        raise DomainError("need E_inf > 0, E_1 >= 0, xi > 0 for a viscous branch")

    def split(E):
        return E / (2.0 * (1.0 + nu)), nu * E / ((1.0 + nu) * (1.0 - 2.0 * nu))
    G_inf, lam_inf = split(E_inf)
    branches = ()
    if E_1 > 0:
        tau = xi / E_1
        G_1, lam_1 = split(E_1)
        branches = ((G_1, lam_1, tau),)
    return MaterialModel(G_inf, lam_inf, branches, nu)


def relaxed_moduli(m: MaterialModel, t: float):
    """(G(t), lambda(t)); monotone non-increasing toward the long-term pair."""
    if t < 0:
        raise DomainError(f"negative time {t}")
    G = m.G_inf
    lam = m.lambda_inf
    for G_i, lam_i, tau_i in m.branches:
        decay = math.exp(-t / tau_i)
        G += G_i * decay
        lam += lam_i * decay
    return G, lam


# -- kinematic scalars ----------------------------------------------------

def _det3(F):
    return (F[0][0] * (F[1][1] * F[2][2] - F[1][2] * F[2][1])
            - F[0][1] * (F[1][0] * F[2][2] - F[1][2] * F[2][0])
            + F[0][2] * (F[1][0] * F[2][1] - F[1][1] * F[2][0]))


def _i1(F):
    # trace(F F^T) = sum of squared entries
    s = F[0][0] * F[0][0]
    for i in range(3):
        for j in range(3):
            if i == 0 and j == 0:
                continue
            s = s + F[i][j] * F[i][j]
    return s


def _log(x):
    return x.log() if hasattr(x, "log") else np.log(x)


def strain_energy_density(F, G, lam):
    """Compressible neo-Hookean energy density
    w = G/2 (I1 - 3 - 2 ln J) + lam/2 (J - 1)^2."""
    J = _det3(F)
    if isinstance(J, (int, float, np.floating)) and J <= 0.0:
        raise InvertedElement(det=float(J))
    I1 = _i1(F)
    return 0.5 * G * (I1 - 3.0 - 2.0 * _log(J)) + 0.5 * lam * (J - 1.0) * (J - 1.0)


def cauchy_stress(F, G, lam):
    """sigma = (G/J)(B - I) + lam (J - 1) I with B = F F^T, as a 3x3 nested
    list (symmetric by construction)."""
    J = _det3(F)
    if isinstance(J, (int, float, np.floating)) and J <= 0.0:
        raise InvertedElement(det=float(J))
    gj = G / J
    p = lam * (J - 1.0)
    sig = [[None] * 3 for _ in range(3)]
    for i in range(3):
        for j in range(i, 3):
            b_ij = F[i][0] * F[j][0] + F[i][1] * F[j][1] + F[i][2] * F[j][2]
            s = gj * (b_ij - (1.0 if i == j else 0.0))
            if i == j:
                s = s + p
            sig[i][j] = s
            sig[j][i] = s
    return sig
