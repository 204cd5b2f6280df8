"""Ohmic thermal reservoirs and their golden-rule rate kernels.

A reservoir is characterized by its temperature (k_B T in energy units), a
dimensionless coupling strength alpha and an exponential cutoff omega_c.
The spectral density is Ohmic,

    gamma(w) = pi * alpha * w * exp(-w / omega_c)    for w > 0,
    gamma(w) = 0                                     for w <= 0,

with the step function taken literally: every kernel vanishes identically
at non-positive frequency, while the w -> 0+ limits stay finite
(w * n(w) -> k_B T).  The emission/absorption kernels

    rate_down(w) = gamma(w) * (1 + n(w))
    rate_up(w)   = gamma(w) * n(w)

are evaluated in fused form via expm1 so that small-w and large-w regimes
are both safe from cancellation and overflow.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Reservoir",
    "bose_occupation",
    "ohmic_spectral_density",
    "rate_down",
    "rate_up",
]

_LABELS = ("left", "right")


@dataclass(frozen=True)
class Reservoir:
    """One thermal bath attached to the system."""

    label: str
    temperature: float  # k_B T, energy units
    alpha: float        # dimensionless coupling strength
    omega_c: float      # exponential cutoff frequency

    def __post_init__(self):
        if self.label not in _LABELS:
            raise ValueError(f"reservoir label must be one of {_LABELS}, "
                             f"got {self.label!r}")
        if not self.temperature > 0.0:
            raise ValueError(f"temperature must be positive, got {self.temperature}")
        if not self.alpha > 0.0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not self.omega_c > 0.0:
            raise ValueError(f"omega_c must be positive, got {self.omega_c}")


def _split_positive(omega):
    """Return (is_scalar, positive mask, frequencies made safe to evaluate)."""
    om = np.asarray(omega, dtype=float)
    scalar = om.ndim == 0
    om = np.atleast_1d(om)
    pos = om > 0.0
    safe = np.where(pos, om, 1.0)
    return scalar, om, pos, safe


def _as_given(values, scalar):
    return float(values[0]) if scalar else values


def ohmic_spectral_density(omega, r: Reservoir):
    """Coupling-weighted spectral density, zero at non-positive frequency."""
    scalar, _, pos, safe = _split_positive(omega)
    vals = np.where(pos, np.pi * r.alpha * safe * np.exp(-safe / r.omega_c), 0.0)
    return _as_given(vals, scalar)


def bose_occupation(omega, r: Reservoir):
    """Bose-Einstein occupation 1 / (exp(w / k_B T) - 1) for w > 0."""
    om = np.asarray(omega, dtype=float)
    scalar = om.ndim == 0
    om = np.atleast_1d(om)
    if np.any(om <= 0.0):
        raise ValueError("bose_occupation requires strictly positive frequency")
    vals = 1.0 / np.expm1(om / r.temperature)
    return _as_given(vals, scalar)


def rate_down(omega, r: Reservoir):
    """Emission kernel gamma(w) * (1 + n(w)); tends to pi*alpha*k_B*T as w -> 0+."""
    scalar, _, pos, safe = _split_positive(omega)
    x = safe / r.temperature
    # gamma * (1 + n) = pi alpha exp(-w/wc) * kT * x / (1 - exp(-x))
    with np.errstate(over="ignore"):
        body = (np.pi * r.alpha * np.exp(-safe / r.omega_c) * r.temperature
                * x / (-np.expm1(-x)))
    vals = np.where(pos, body, 0.0)
    return _as_given(vals, scalar)


def rate_up(omega, r: Reservoir):
    """Absorption kernel gamma(w) * n(w); tends to pi*alpha*k_B*T as w -> 0+."""
    scalar, _, pos, safe = _split_positive(omega)
    x = safe / r.temperature
    # gamma * n = pi alpha exp(-w/wc) * kT * x / (exp(x) - 1)
    with np.errstate(over="ignore"):
        body = (np.pi * r.alpha * np.exp(-safe / r.omega_c) * r.temperature
                * x / np.expm1(x))
    vals = np.where(pos, body, 0.0)
    return _as_given(vals, scalar)
