"""Energy ladder, dynamical phases and Hamiltonian coefficients."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .timewarp import OscillatorParams, _require_warp

__all__ = [
    "EnergyLevel",
    "energy_tau",
    "energy_t",
    "phase_theta",
    "hamiltonian_coefficients",
]


@dataclass(frozen=True)
class EnergyLevel:
    n: int
    value: float
    coordinate: str
    at: float


def _check_n(n):
    if np.any(np.asarray(n) < 0):
        raise DomainError("quantum number must be non-negative")


def _check_tau(tau):
    tau = np.asarray(tau, dtype=float)
    if np.any(~(tau > 0)):
        raise DomainError("tau must be positive")
    return tau


def energy_tau(p: OscillatorParams, n, tau):
    """``E_n(tau) = hbar omega (n + 1/2) / (2 alpha tau)``."""
    _check_n(n)
    _require_warp(p)
    tau = _check_tau(tau)
    return (p.hbar * p.omega / (2.0 * p.alpha * tau) * (np.asarray(n) + 0.5))[()]


def energy_t(p: OscillatorParams, n, t):
    """``E_n(t) = hbar omega / (2 alpha K) exp(-2 alpha t) (n + 1/2)``.

    With the default ``K = 1/(2 alpha)`` this equals ``hbar omega (n + 1/2)``
    at ``t = 0`` and decays at the classical rate ``exp(-2 alpha t)``.
    """
    _check_n(n)
    _require_warp(p)
    t = np.asarray(t, dtype=float)
    decay = np.exp(-2.0 * p.alpha * t)
    return (p.hbar * p.omega * (np.asarray(n) + 0.5) * decay * p.warp_scale)[()]


def phase_theta(p: OscillatorParams, n, tau):
    """Dynamical phase ``-(1/hbar) int_K^tau E_n`` in closed form.

    Equals ``-(omega / 2 alpha)(n + 1/2) ln(tau/K)``; zero at ``tau = K``.
    """
    _check_n(n)
    _require_warp(p)
    tau = _check_tau(tau)
    if p.K <= 0:
        raise DomainError("phase is defined for K > 0")
    return (-(p.omega / (2.0 * p.alpha)) * (np.asarray(n) + 0.5) * np.log(tau / p.K))[()]


def hamiltonian_coefficients(p: OscillatorParams, tau):
    """Multipliers of ``p**2`` and ``q**2`` in the warped-time Hamiltonian.

    ``H = p**2 / (8 alpha**2 tau**2) + omega**2 q**2 / 2``; returns the pair
    ``(1/(8 alpha**2 tau**2), omega**2 / 2)``.
    """
    _require_warp(p)
    tau = _check_tau(tau)
    kinetic = (1.0 / (8.0 * p.alpha**2 * tau**2))[()]
    return kinetic, 0.5 * p.omega**2
