"""Stress-modulated growth state and its exponential-integrator update.

Growth ratios advance once per optimizer iteration by
g <- g * exp[k (sigma + b) dt], which keeps them strictly positive for any
bounded stress.  The isotropic law drives a single ratio with the in-plane
stress sum; the differential law drives radial and circumferential ratios
with their own normal stresses.  Out-of-plane growth is frozen (g_z = 1,
plane strain).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

ISOTROPIC = "isotropic"
DIFFERENTIAL = "differential"


@dataclass
class GrowthState:
    g_r: np.ndarray
    g_theta: np.ndarray
    law: str                 # ISOTROPIC | DIFFERENTIAL
    k: float                 # 1/(s * stress-unit)
    b_r: float               # homeostatic offset, stress units
    b_theta: float

    @classmethod
    def fresh(cls, n_points: int, law: str, k: float, b_r: float, b_theta=None):
        if law not in (ISOTROPIC, DIFFERENTIAL):
            raise DomainError(f"unknown growth law {law!r}")
        return cls(np.ones(n_points), np.ones(n_points), law, float(k),
                   float(b_r), float(b_r if b_theta is None else b_theta))

    @property
    def jacobian(self) -> np.ndarray:
        """J_g = det F_g = g_r * g_theta (g_z = 1)."""
        return self.g_r * self.g_theta

    def energy_offset(self, weights: np.ndarray) -> float:
        """Stress-free growth contribution J_g sum_i(b_i g_i) integrated over
        the collocation set; constant in the displacement within an
        iteration, so it shifts the reported energy without a gradient."""
        return float(np.sum(self.jacobian
                            * (self.b_r * self.g_r + self.b_theta * self.g_theta)
                            * weights))


def growth_increment(state: GrowthState, sigma_r, sigma_theta, delta_t: float) -> GrowthState:
    """One exponential-integrator step of the growth law; returns a new state."""
    if delta_t <= 0:
        raise DomainError(f"need delta_t > 0, got {delta_t}")
    if state.law == ISOTROPIC:
        f = np.exp(state.k * (sigma_r + sigma_theta + state.b_r) * delta_t)
        return GrowthState(state.g_r * f, state.g_theta * f, state.law,
                           state.k, state.b_r, state.b_theta)
    f_r = np.exp(state.k * (sigma_r + state.b_r) * delta_t)
    f_t = np.exp(state.k * (sigma_theta + state.b_theta) * delta_t)
    return GrowthState(state.g_r * f_r, state.g_theta * f_t, state.law,
                       state.k, state.b_r, state.b_theta)
