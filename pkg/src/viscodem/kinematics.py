"""Deformation gradients in Cartesian and cylindrical frames, and the
multiplicative elastic-growth split F = F_a F_g.

Plane strain throughout: F is stored as a full 3x3 with F_zz = 1 and zero
off-plane shear, so the material kernels apply verbatim.  Cylindrical
components are expressed in the physical orthonormal polar frame, which
keeps the energy/stress invariants frame-independent.  Entries may be
floats, numpy arrays, or tape variables.
"""
from __future__ import annotations

import numpy as np

from .errors import DomainError


def deformation_gradient_cartesian(jac):
    """F = I + grad(u) for a plane-strain displacement Jacobian du_i/dx_j."""
    return [[1.0 + jac[0][0], jac[0][1], 0.0],
            [jac[1][0], 1.0 + jac[1][1], 0.0],
            [0.0, 0.0, 1.0]]


def deformation_gradient_cylindrical(u_r, u_theta, partials, r):
    """Plane-strain F in the orthonormal polar frame.

    partials[i][j] = d(u_r, u_theta)[i] / d(r, theta)[j]; r > 0.
    """
    if isinstance(r, (int, float, np.floating)) and r <= 0:
        raise DomainError(f"radius must be positive, got {r}")
    rinv = 1.0 / r
    return [[1.0 + partials[0][0], (partials[0][1] - u_theta) * rinv, 0.0],
            [partials[1][0], 1.0 + (partials[1][1] + u_r) * rinv, 0.0],
            [0.0, 0.0, 1.0]]


def elastic_part(F, g_r, g_theta, g_z=1.0):
    """F_a = F F_g^-1 for diagonal growth F_g = diag(g_r, g_theta, g_z);
    scales the columns of F by the inverse growth ratios."""
    if isinstance(g_r, (int, float, np.floating)) and (g_r <= 0 or g_theta <= 0 or g_z <= 0):
        raise DomainError("growth ratios must be positive")
    ir, it, iz = 1.0 / g_r, 1.0 / g_theta, 1.0 / g_z
    return [[F[0][0] * ir, F[0][1] * it, F[0][2] * iz],
            [F[1][0] * ir, F[1][1] * it, F[1][2] * iz],
            [F[2][0] * ir, F[2][1] * it, F[2][2] * iz]]
