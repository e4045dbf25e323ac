"""Phase and flux qubits in the RCSJ model, mapped onto the damped oscillator.

In the small-angle regime both circuits reduce to a shifted damped
oscillator in the junction phase.  The qubit spectra here decay with the
exponent ``alpha_q = 1/(CR)``, while the circuit equation of motion has the
damping coefficient ``1/(2CR)``.  ``alpha_q`` is stored as the decay exponent
and the oscillator core receives ``alpha = alpha_q / 2``.  With that reading
the spectra and the critical resistances are mutually consistent.

The energy offsets subtract a dimensionless squared ratio from a squared
frequency.  That is only meaningful in reduced units; SI output keeps the
same expression and the caller owns the units.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import Optional, Tuple

import numpy as np
from scipy import constants

from .errors import DomainError, SmallAngleWarning
from .timewarp import OscillatorParams

__all__ = [
    "RcsjParams",
    "QubitOscillatorMap",
    "omega_p",
    "omega_f",
    "map_to_oscillator",
    "energy_phase",
    "energy_flux",
    "critical_resistance_phase",
    "critical_resistance_flux",
]

SMALL_ANGLE_LIMIT = 0.3


@dataclass(frozen=True)
class RcsjParams:
    """Circuit parameters.  ``L`` is only needed for the flux qubit.

    The default constants are SI; :meth:`reduced` sets ``hbar = 1`` and
    ``e = 1/2`` so that ``2e/hbar = 1``.
    """

    C: float
    R: float
    I0: float
    I: float = 0.0
    L: Optional[float] = None
    delta_X: float = 0.0
    hbar: float = constants.hbar
    e: float = constants.e

    def __post_init__(self):
        if not (self.C > 0 and self.R > 0 and self.I0 > 0):
            raise DomainError("C, R and I0 must be positive")
        if self.hbar <= 0 or self.e <= 0:
            raise DomainError("hbar and e must be positive")
        if self.L is not None and not self.L > 0:
            raise DomainError("L must be positive")

    @classmethod
    def reduced(cls, C, R, I0, **kw) -> "RcsjParams":
        kw.setdefault("hbar", 1.0)
        kw.setdefault("e", 0.5)
        return cls(C, R, I0, **kw)

    def replace(self, **changes) -> "RcsjParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class QubitOscillatorMap:
    """How a qubit maps onto the oscillator core.

    ``alpha_q`` is the spectrum decay exponent ``1/(CR)``; ``Omega`` the
    effective frequency; ``offset`` the constant energy shift;
    ``delta_shift`` the translation of the phase operator.
    """

    kind: str
    alpha_q: float
    Omega: float
    offset: float
    delta_shift: float
    small_angle_ok: bool


def omega_p(q: RcsjParams) -> float:
    """Plasma frequency ``sqrt(2 e I0 / (hbar C))``."""
    return math.sqrt(2.0 * q.e * q.I0 / (q.hbar * q.C))


def _require_L(q: RcsjParams) -> float:
    if q.L is None or not q.L > 0:
        raise DomainError("flux qubit needs L > 0")
    return q.L


def omega_f(q: RcsjParams) -> float:
    """Flux-qubit frequency ``sqrt(Omega_P^2 + 1/(LC))``."""
    L = _require_L(q)
    return math.sqrt(2.0 * q.e * q.I0 / (q.hbar * q.C) + 1.0 / (L * q.C))


def _phase_terms(q):
    shift = q.I / q.I0
    return omega_p(q), shift, -(omega_p(q) ** 2 + shift**2)


def _flux_terms(q):
    L = _require_L(q)
    Om = omega_f(q)
    shift = q.delta_X / (L * q.C * Om**2)
    return Om, shift, -(omega_p(q) ** 2 + shift**2)


def map_to_oscillator(
    q: RcsjParams, kind: str, K: Optional[float] = None
) -> Tuple[QubitOscillatorMap, OscillatorParams]:
    """Oscillator-core parameters reproducing the qubit spectrum.

    The core gets ``alpha = 1/(2CR)``, ``omega = Omega`` and the qubit's
    ``hbar``; ``K`` defaults to ``1/alpha_q``.  A translation ``|delta_shift|``
    of 0.3 or more sets ``small_angle_ok = False`` and warns.
    """
    if kind == "phase":
        Om, shift, offset = _phase_terms(q)
    elif kind == "flux":
        Om, shift, offset = _flux_terms(q)
    else:
        raise DomainError(f"unknown qubit kind {kind!r}")
    alpha_q = 1.0 / (q.C * q.R)
    ok = abs(shift) < SMALL_ANGLE_LIMIT
    if not ok:
        warnings.warn(f"|delta_shift| = {abs(shift):.3g} outside the small-angle regime",
                      SmallAngleWarning, stacklevel=2)
    core = OscillatorParams(alpha=0.5 * alpha_q, omega=Om, hbar=q.hbar,
                            K=1.0 / alpha_q if K is None else K)
    return QubitOscillatorMap(kind, alpha_q, Om, offset, shift, ok), core


def _ladder(q, Om, n, t, K):
    if np.any(np.asarray(n) < 0):
        raise DomainError("quantum number must be non-negative")
    alpha_q = 1.0 / (q.C * q.R)
    K = 1.0 / alpha_q if K is None else K
    if not K:
        raise DomainError("K must be non-zero")
    t = np.asarray(t, dtype=float)
    return q.hbar * Om / (alpha_q * K) * np.exp(-alpha_q * t) * (np.asarray(n) + 0.5)


def energy_phase(q: RcsjParams, n, t, K: Optional[float] = None):
    """Phase-qubit level ``hbar Omega_P/(alpha_P K) e^{-alpha_P t}(n+1/2) - (Omega_P^2 + (I/I0)^2)``."""
    Om, _, offset = _phase_terms(q)
    return (_ladder(q, Om, n, t, K) + offset)[()]


def energy_flux(q: RcsjParams, n, t, K: Optional[float] = None):
    """Flux-qubit level ``hbar Omega_F/(alpha_F K) e^{-alpha_F t}(n+1/2) - (Omega_P^2 + (delta_X/(L C Omega_F^2))^2)``."""
    Om, _, offset = _flux_terms(q)
    return (_ladder(q, Om, n, t, K) + offset)[()]


def critical_resistance_phase(q: RcsjParams) -> float:
    """``sqrt(hbar / (8 e I0 C))``, where ``1/(2RC) = Omega_P``."""
    return math.sqrt(q.hbar / (8.0 * q.e * q.I0 * q.C))


def critical_resistance_flux(q: RcsjParams) -> float:
    """``sqrt(hbar L / (4 C (2 e I0 L + hbar)))``, where ``1/(2RC) = Omega_F``."""
    L = _require_L(q)
    return math.sqrt(q.hbar * L / (4.0 * q.C * (2.0 * q.e * q.I0 * L + q.hbar)))
