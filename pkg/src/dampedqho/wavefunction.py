"""Position-space eigenfunctions and superpositions.

The instantaneous eigenfunctions are ordinary Hermite functions whose length
scale ``sqrt(hbar / (2 omega alpha tau))`` shrinks as the warped time grows,
so in laboratory time the packets contract as ``exp(-alpha t)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np
from scipy.integrate import simpson

from .errors import DomainError, QuadratureSupportWarning
from .spectrum import phase_theta
from .timewarp import OscillatorParams, _require_warp

__all__ = [
    "WavefunctionSample",
    "QuadratureNorm",
    "hermite",
    "psi_n_tau",
    "psi_n_t",
    "superpose",
    "quadrature_norm",
]

# above this order 2**n n! is handled in log space
_LOG_NORM_ORDER = 20


@dataclass(frozen=True)
class WavefunctionSample:
    """Complex amplitudes on a position grid at one instant.

    ``time`` is a ``(coordinate, value)`` pair with coordinate ``"t"`` or
    ``"tau"``; ``n`` is the quantum number or ``"superposition"``.
    """

    x: np.ndarray
    values: np.ndarray
    time: tuple
    n: Union[int, str]

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        if x.ndim != 1 or np.any(np.diff(x) <= 0):
            raise ValueError("x grid must be one-dimensional and strictly increasing")
        values = np.asarray(self.values, dtype=complex)
        if values.shape != x.shape:
            raise ValueError("values must match the x grid")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "values", values)

    @property
    def prob(self) -> np.ndarray:
        return np.abs(self.values) ** 2


class QuadratureNorm(NamedTuple):
    value: float
    support_ok: bool


def hermite(n: int, y):
    """Physicists' Hermite polynomial by the three-term recurrence.

    Large ``n`` and ``|y|`` overflow to ``inf``; that is not trapped.
    """
    if n < 0:
        raise DomainError("Hermite order must be non-negative")
    y = np.asarray(y, dtype=float)
    h_prev = np.ones_like(y)
    if n == 0:
        return h_prev[()]
    h = 2.0 * y
    for k in range(1, n):
        h_prev, h = h, 2.0 * y * h - 2.0 * k * h_prev
    return h[()]


def _norm_factor(n: int) -> float:
    if n > _LOG_NORM_ORDER:
        return math.exp(-0.5 * (n * math.log(2.0) + math.lgamma(n + 1)))
    return 1.0 / math.sqrt(2.0**n * math.factorial(n))


def psi_n_tau(p: OscillatorParams, n: int, x, tau):
    """Eigenfunction ``psi_n(x, tau)`` of the warped-time Hamiltonian."""
    _require_warp(p)
    if not tau > 0:
        raise DomainError("tau must be positive")
    lam = 2.0 * p.omega * p.alpha * tau / p.hbar
    x = np.asarray(x, dtype=float)
    return (
        (lam / math.pi) ** 0.25
        * _norm_factor(n)
        * hermite(n, math.sqrt(lam) * x)
        * np.exp(-0.5 * lam * x**2)
    )


def psi_n_t(p: OscillatorParams, n: int, x, t):
    """Eigenfunction in laboratory time, evaluated in its own closed form.

    The ``exp(alpha t / 2)`` prefactor keeps the x-normalisation independent
    of time.
    """
    _require_warp(p)
    if not p.K > 0:
        raise DomainError("K must be positive")
    lam0 = 2.0 * p.omega * p.alpha * p.K / p.hbar
    x = np.asarray(x, dtype=float)
    return (
        (lam0 / math.pi) ** 0.25
        * _norm_factor(n)
        * hermite(n, math.sqrt(lam0) * math.exp(p.alpha * t) * x)
        * np.exp(p.alpha * t / 2.0 - 0.5 * lam0 * x**2 * math.exp(2.0 * p.alpha * t))
    )


def superpose(p: OscillatorParams, coeffs, x_grid, tau) -> WavefunctionSample:
    """Assemble ``sum_n c_n psi_n(x, tau) exp(i theta_n(tau))``.

    ``coeffs`` is a :class:`~dampedqho.dynamics.ModeAmplitudes` or any
    sequence of complex amplitudes indexed by ``n``.
    """
    c = np.asarray(getattr(coeffs, "c", coeffs), dtype=complex)
    if not np.all(np.isfinite(c)):
        raise DomainError("coefficients must be finite")
    x = np.asarray(x_grid, dtype=float)
    total = np.zeros(x.shape, dtype=complex)
    for n, cn in enumerate(c):
        if cn == 0:
            continue
        total += cn * np.exp(1j * phase_theta(p, n, tau)) * psi_n_tau(p, n, x, tau)
    return WavefunctionSample(x, total, ("tau", float(tau)), "superposition")


def quadrature_norm(sample: WavefunctionSample, support_tol: float = 1e-10) -> QuadratureNorm:
    """Composite Simpson estimate of ``int |psi|^2 dx``.

    ``support_ok`` is False (and a :class:`QuadratureSupportWarning` issued)
    when either endpoint amplitude exceeds ``support_tol`` times the peak.
    """
    amp = np.abs(sample.values)
    peak = amp.max() if amp.size else 0.0
    support_ok = bool(max(amp[0], amp[-1]) <= support_tol * peak)
    if not support_ok:
        warnings.warn("grid does not cover the wavefunction support", QuadratureSupportWarning,
                      stacklevel=2)
    return QuadratureNorm(float(simpson(amp**2, x=sample.x)), support_ok)
