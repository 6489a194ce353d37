"""Metrics extracted from simulation records: tip deflections, averaged
stresses, surface profiles, angular Fourier amplitudes, loss-history
statistics.  Everything here is read-only over SimulationRecord."""
from __future__ import annotations

import numpy as np


def tip_deflection(record, step_index: int) -> float:
    """Mean lateral displacement of the beam's loaded end."""
    return float(np.mean(record.rows(step_index, "right_end", "u2")))


def end_elongation(record, step_index: int) -> float:
    """Mean axial displacement of the beam's loaded end."""
    return float(np.mean(record.rows(step_index, "right_end", "u1")))


def central_band_mean(record, step_index: int, key: str,
                      lo_frac: float = 1.0 / 3.0, hi_frac: float = 2.0 / 3.0) -> float:
    """Average a volume field over the axial band [lo, hi] (beam domains)."""
    vol = record.row_slices["volume"]
    x = record.coords[vol, 0]
    L = x.max() + (x.max() - x.min()) / (len(np.unique(x)) - 1) / 2.0
    mask = (x >= lo_frac * L) & (x <= hi_frac * L)
    return float(np.mean(record.steps[step_index].fields[key][vol][mask]))


def surface_profile(record, step_index: int, set_name: str, key: str):
    """(theta_or_y, values) along a boundary sample set."""
    rows = record.row_slices[set_name]
    return record.coords[rows, 1], record.steps[step_index].fields[key][rows]


def fourier_amplitudes(values: np.ndarray) -> np.ndarray:
    """Amplitudes of angular modes k >= 1 of a profile sampled uniformly
    over its angular window (mode k=0 excluded)."""
    c = np.fft.rfft(np.asarray(values, float))
    n = len(values)
    return 2.0 * np.abs(c[1:]) / n


def dominant_fourier_amplitude(values: np.ndarray) -> float:
    return float(fourier_amplitudes(values).max())


def mode_amplitudes_full_circle(theta: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Mirror a half-domain profile (theta in [0, pi]) into a full circle and
    return amplitudes of modes n >= 1 of the closed profile."""
    v = np.concatenate([values, values[::-1]])
    c = np.fft.rfft(v)
    return 2.0 * np.abs(c[1:]) / len(v)


def axisymmetry_deviation(values: np.ndarray) -> float:
    """std/|mean| of a surface field; near zero for axisymmetric response."""
    m = np.mean(values)
    return float(np.std(values) / max(abs(m), 1e-300))


def cantilever_mode_fit(x: np.ndarray, u_y: np.ndarray):
    """Fit A (1 - cos(pi x / (2 L))) to a deflection profile; returns
    (amplitude, r_squared).  x is assumed to span [0, L]."""
    L = x.max()
    shape = 1.0 - np.cos(np.pi * x / (2.0 * L))
    A = float(np.dot(shape, u_y) / np.dot(shape, shape))
    resid = u_y - A * shape
    ss_tot = float(np.sum((u_y - u_y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / max(ss_tot, 1e-300)
    return A, r2


def centerline_deflection(record, step_index: int):
    """(x, mean-over-y u2) column profile for beam domains."""
    vol = record.row_slices["volume"]
    x = record.coords[vol, 0]
    u2 = record.steps[step_index].fields["u2"][vol]
    xs = np.unique(x)
    prof = np.array([u2[x == xi].mean() for xi in xs])
    return xs, prof


def loss_increase_fraction(losses: np.ndarray) -> float:
    """Fraction of iterations whose loss exceeds the previous one."""
    d = np.diff(losses)
    return float(np.mean(d > 0)) if len(d) else 0.0


def trailing_mean(losses: np.ndarray, window: int = 50) -> np.ndarray:
    if len(losses) < window:
        return losses.copy()
    kernel = np.ones(window) / window
    return np.convolve(losses, kernel, mode="valid")
