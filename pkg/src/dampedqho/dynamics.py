"""Transition amplitudes between instantaneous eigenstates.

Starting from a number state ``|n>`` the amplitudes ``c_m(t)`` obey

    dc_m/dt = (alpha/2) [ c_{m-2} sqrt(m(m-1)) e^{2i omega t}
                          - c_{m+2} sqrt((m+2)(m+1)) e^{-2i omega t} ].

The coupling is anti-Hermitian (the norm is conserved) and only links
``m`` to ``m +- 2`` (parity is conserved).  Closed forms exist for ``n = 0``
and ``n = 2``; the adaptive integrator in :mod:`dampedqho.ode` provides an
independent route to the same amplitudes.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.signal import find_peaks

from .errors import DomainError, RegimeError, TruncationError, TruncationWarning
from .ode import dopri5
from .timewarp import OscillatorParams, _require_warp

__all__ = [
    "UNDERDAMPED",
    "CRITICAL",
    "OVERDAMPED",
    "ClosedFormConstants",
    "ModeAmplitudes",
    "Trajectory",
    "xi_zeta",
    "classify_regime",
    "rhs_t",
    "rhs_tau",
    "integrate",
    "closed_form_n0",
    "closed_form_n2",
    "critical_n0",
    "critical_n2",
    "closed_form",
    "oscillation_period",
    "is_oscillatory",
    "peak_times",
    "beat_maxima",
]

UNDERDAMPED = "underdamped"
CRITICAL = "critical"
OVERDAMPED = "overdamped"

REGIME_TOL = 1e-9
# below this |xi| the closed forms switch to their critical-damping expansions
CRITICAL_SWITCH = 1e-6
DEFAULT_MODES = 60
TAIL_TOL = 1e-12


@dataclass(frozen=True)
class ClosedFormConstants:
    """``xi = sqrt(1 - omega^2/alpha^2)`` and ``zeta`` with ``e^{+-zeta} = xi +- i omega/alpha``."""

    xi: complex
    zeta: complex
    regime: str


def classify_regime(p: OscillatorParams) -> str:
    """Damping regime from the sign of ``alpha - omega`` (ties within 1e-9 omega are critical)."""
    if not p.alpha > 0:
        raise DomainError("regime classification needs alpha > 0")
    diff = p.alpha - p.omega
    if abs(diff) <= REGIME_TOL * p.omega:
        return CRITICAL
    return UNDERDAMPED if diff < 0 else OVERDAMPED


def xi_zeta(p: OscillatorParams) -> ClosedFormConstants:
    """Principal-branch ``xi`` and ``zeta`` for the closed-form amplitudes."""
    if not p.alpha > 0:
        raise DomainError("xi and zeta need alpha > 0")
    ratio = p.omega / p.alpha
    xi = complex(np.sqrt(complex(1.0 - ratio * ratio)))
    zeta = complex(np.log(xi + 1j * ratio))
    if abs(1.0 - ratio) <= REGIME_TOL:
        regime = CRITICAL
    else:
        regime = UNDERDAMPED if p.alpha < p.omega else OVERDAMPED
    return ClosedFormConstants(xi, zeta, regime)


def _couplings(size: int) -> np.ndarray:
    m = np.arange(size, dtype=float)
    return np.sqrt(m * (m - 1.0))  # entry m couples m-2 -> m


def _rhs(c, coupling, up, down):
    out = np.zeros_like(c)
    out[2:] = up * coupling[2:] * c[:-2]
    out[:-2] -= down * coupling[2:] * c[2:]
    return out


def rhs_t(p: OscillatorParams, t: float, c) -> np.ndarray:
    """``dc/dt`` in laboratory time; indices beyond the vector are zero."""
    c = np.asarray(c, dtype=complex)
    phase = np.exp(2j * p.omega * t)
    return 0.5 * p.alpha * _rhs(c, _couplings(c.size), phase, phase.conjugate())


def rhs_tau(p: OscillatorParams, tau: float, c) -> np.ndarray:
    """``dc/dtau`` in warped time, with phases ``(tau/K)^{+-i omega/alpha}``."""
    _require_warp(p)
    if not tau > 0 or not tau / p.K > 0:
        raise DomainError("tau and tau/K must be positive")
    c = np.asarray(c, dtype=complex)
    phase = np.exp(1j * (p.omega / p.alpha) * math.log(tau / p.K))
    return _rhs(c, _couplings(c.size), phase, phase.conjugate()) / (4.0 * tau)


@dataclass(frozen=True)
class ModeAmplitudes:
    """Truncated amplitude vector ``c_0..c_M`` at time ``t``."""

    c: np.ndarray
    t: float
    n0: Optional[int] = None
    tail: float = 0.0

    @property
    def M(self) -> int:
        return self.c.size - 1

    @property
    def prob(self) -> np.ndarray:
        return np.abs(self.c) ** 2

    @property
    def norm(self) -> float:
        return float(self.prob.sum())


@dataclass
class Trajectory:
    """Amplitudes sampled at times ``t``; ``c`` has shape ``(len(t), M + 1)``.

    ``max_tail`` is the largest ``|c_M|^2 + |c_{M-1}|^2`` over every accepted
    integrator step, not only the samples.
    """

    t: np.ndarray
    c: np.ndarray
    n0: Optional[int]
    max_tail: float
    tail_exceeded: bool
    stats: dict = field(default_factory=dict)

    def __len__(self):
        return self.t.size

    def __getitem__(self, i) -> ModeAmplitudes:
        c = self.c[i]
        return ModeAmplitudes(c, float(self.t[i]), self.n0, float(_tail(c)))

    @property
    def M(self) -> int:
        return self.c.shape[1] - 1

    def norms(self) -> np.ndarray:
        return np.sum(np.abs(self.c) ** 2, axis=1)


def _tail(c) -> float:
    return float(np.sum(np.abs(c[-2:]) ** 2))


def integrate(
    p: OscillatorParams,
    n0: int,
    t_end: float,
    M: int = DEFAULT_MODES,
    t_eval: Optional[Sequence[float]] = None,
    rtol: float = 1e-9,
    atol: float = 1e-12,
    tail_tol: float = TAIL_TOL,
    strict: bool = False,
    c0: Optional[Sequence[complex]] = None,
) -> Trajectory:
    """Integrate the amplitude equations from ``c_m(0) = delta_{m, n0}``.

    Parameters
    ----------
    p : OscillatorParams
        Needs ``alpha > 0``.
    n0 : int
        Initial number state.  Ignored for the initial vector when ``c0`` is
        given, but kept as trajectory metadata.
    t_end : float
        Final time; integration starts at ``t = 0``.
    M : int
        Truncation order, the vector holds ``c_0..c_M``.  For a number-state
        start it must satisfy ``M >= n0 + 10`` and share the parity of ``n0``.
    t_eval : sequence of float, optional
        Output times, default 201 evenly spaced points on ``[0, t_end]``.
    rtol, atol : float
        Local error control of the Dormand-Prince pair.
    tail_tol : float
        Threshold on ``|c_M|^2 + |c_{M-1}|^2``.  Exceeding it sets
        ``tail_exceeded`` and issues a :class:`TruncationWarning`, or raises
        :class:`TruncationError` when ``strict`` is true.
    c0 : sequence of complex, optional
        Arbitrary initial vector of length ``M + 1``.

    Returns
    -------
    Trajectory
    """
    if not p.alpha > 0:
        raise DomainError("integration needs alpha > 0 (the undamped case has no warp)")
    if c0 is None:
        if n0 < 0:
            raise DomainError("n0 must be non-negative")
        if M < n0 + 10:
            raise DomainError(f"M={M} too small, need M >= n0 + 10 = {n0 + 10}")
        if (M - n0) % 2:
            raise DomainError("M must share the parity of n0")
        y0 = np.zeros(M + 1, dtype=complex)
        y0[n0] = 1.0
    else:
        y0 = np.array(c0, dtype=complex)
        if y0.ndim != 1 or y0.size != M + 1:
            raise DomainError("c0 must have length M + 1")
    if t_eval is None:
        t_eval = np.linspace(0.0, t_end, 201)

    coupling = _couplings(M + 1)
    half_alpha = 0.5 * p.alpha
    omega2 = 2.0 * p.omega

    def f(t, c):
        phase = np.exp(1j * omega2 * t)
        return half_alpha * _rhs(c, coupling, phase, phase.conjugate())

    state = {"max_tail": _tail(y0), "first": None}

    def monitor(t, c):
        tail = _tail(c)
        if tail > state["max_tail"]:
            state["max_tail"] = tail
        if tail > tail_tol and state["first"] is None:
            state["first"] = t
            if strict:
                raise TruncationError(
                    f"tail population {tail:.3g} > {tail_tol:g} at t={t:.6g}; increase M (now {M})",
                    tail=tail, t=t,
                )

    res = dopri5(f, (0.0, t_end), y0, t_eval=t_eval, rtol=rtol, atol=atol, on_step=monitor)
    exceeded = state["first"] is not None
    if exceeded:
        warnings.warn(
            f"tail population reached {state['max_tail']:.3g} (> {tail_tol:g}) from "
            f"t={state['first']:.6g}; increase M (now {M})",
            TruncationWarning, stacklevel=2,
        )
    stats = {"n_steps": res.n_steps, "n_rejected": res.n_rejected, "n_fev": res.n_fev}
    return Trajectory(res.t, res.y, n0, state["max_tail"], exceeded, stats)


def _log_prefactor(m: int) -> float:
    # log((m-1)!! / sqrt(m!)) for even m, using (m-1)!! = m! / (2^(m/2) (m/2)!)
    return 0.5 * math.lgamma(m + 1) - 0.5 * m * math.log(2.0) - math.lgamma(m // 2 + 1)


def _prefactor(m: int) -> float:
    return math.exp(_log_prefactor(m))


def _parts(p: OscillatorParams, t):
    """Scaled pieces of the general closed form.

    With ``s = xi alpha t``, ``r = sinh(s)/xi`` and
    ``D = cosh(zeta + s)/xi = cosh(s) + sinh(zeta) r`` (using ``cosh zeta = xi``),
    returns ``r/D``, ``exp(-|Re s|)``, and ``D**(-1/2) exp(|Re s|/2)`` on the
    branch continuous in ``t`` from ``D(0) = 1``.
    """
    k = xi_zeta(p)
    t = np.asarray(t, dtype=float)
    s = k.xi * p.alpha * t
    shift = np.abs(s.real)
    ep = np.exp(s - shift)
    em = np.exp(-s - shift)
    cosh_s = 0.5 * (ep + em)
    r = 0.5 * (ep - em) / k.xi
    D = cosh_s + np.sinh(k.zeta) * r
    arg = np.angle(D)
    # |arg D - Im s| < pi/2 along the path, so Im s picks the sheet
    phi = arg + 2.0 * np.pi * np.round((s.imag - arg) / (2.0 * np.pi))
    inv_sqrt = np.exp(-0.5 * np.log(np.abs(D)) - 0.5j * phi)
    return r / D, np.exp(-2.0 * shift) / D**2, inv_sqrt * np.exp(-0.5 * shift)


def _zeros_like_t(t):
    return np.zeros(np.shape(t), dtype=complex)[()]


def _check_m(m):
    if m < 0:
        raise DomainError("mode index must be non-negative")


def closed_form_n0(p: OscillatorParams, m: int, t):
    """Amplitude ``c_m(t)`` for the ground-state start.

    Even ``m``:
    ``(m-1)!!/sqrt(m!) sqrt(xi) e^{i(m+1/2) omega t} sinh^{m/2}(xi alpha t) / cosh^{(m+1)/2}(zeta + xi alpha t)``,
    odd ``m``: 0.  Delegates to :func:`critical_n0` when ``|xi| < 1e-6``.
    """
    _check_m(m)
    if m % 2:
        return _zeros_like_t(t)
    if abs(xi_zeta(p).xi) < CRITICAL_SWITCH:
        return critical_n0(p, m, t)
    ratio, _, inv_sqrt = _parts(p, t)
    t = np.asarray(t, dtype=float)
    phase = np.exp(1j * (m + 0.5) * p.omega * t)
    return (_prefactor(m) * phase * ratio ** (m // 2) * inv_sqrt)[()]


def closed_form_n2(p: OscillatorParams, m: int, t):
    """Amplitude ``c_m(t)`` for the start in the second excited state.

    Even ``m``:
    ``(m-1)!!/sqrt(2 m!) sqrt(xi) e^{i(m+1/2) omega t} sinh^{m/2} / cosh^{(m+3)/2}(zeta + xi alpha t) (m xi^2/sinh - sinh)``
    with ``sinh = sinh(xi alpha t)``; odd ``m``: 0.  The removable
    singularity at ``t = 0`` is cancelled analytically.  Delegates to
    :func:`critical_n2` when ``|xi| < 1e-6``.
    """
    _check_m(m)
    if m % 2:
        return _zeros_like_t(t)
    if abs(xi_zeta(p).xi) < CRITICAL_SWITCH:
        return critical_n2(p, m, t)
    ratio, m_term, inv_sqrt = _parts(p, t)
    t = np.asarray(t, dtype=float)
    phase = np.exp(1j * (m + 0.5) * p.omega * t)
    if m == 0:
        shape = -ratio
    else:
        shape = ratio ** (m // 2 - 1) * (m * m_term - ratio**2)
    return (_prefactor(m) / math.sqrt(2.0) * phase * shape * inv_sqrt)[()]


def critical_n0(p: OscillatorParams, m: int, t):
    """Ground-state-start amplitude at critical damping.

    ``(m-1)!!/sqrt(m!) e^{i(m+1/2) omega t} (omega t)^{m/2} / (1 + i omega t)^{(m+1)/2}``.
    """
    _check_m(m)
    if m % 2:
        return _zeros_like_t(t)
    wt = p.omega * np.asarray(t, dtype=float)
    z = 1.0 + 1j * wt
    phase = np.exp(1j * (m + 0.5) * wt)
    return (_prefactor(m) * phase * (wt / z) ** (m // 2) / np.sqrt(z))[()]


def critical_n2(p: OscillatorParams, m: int, t):
    """Second-excited-start amplitude at critical damping.

    ``(m-1)!!/sqrt(2 m!) e^{i(m+1/2) omega t} (m/(omega t) - omega t) (omega t)^{m/2} / (1 + i omega t)^{(m+3)/2}``,
    with the ``t -> 0`` limit taken analytically.
    """
    _check_m(m)
    if m % 2:
        return _zeros_like_t(t)
    wt = p.omega * np.asarray(t, dtype=float)
    z = 1.0 + 1j * wt
    phase = np.exp(1j * (m + 0.5) * wt)
    if m == 0:
        shape = -wt / z
    else:
        shape = (wt / z) ** (m // 2 - 1) * (m - wt**2) / z**2
    return (_prefactor(m) / math.sqrt(2.0) * phase * shape / np.sqrt(z))[()]


def closed_form(p: OscillatorParams, n0: int, m: int, t):
    """Dispatch to the closed form for initial state ``n0`` (0 or 2)."""
    if n0 == 0:
        return closed_form_n0(p, m, t)
    if n0 == 2:
        return closed_form_n2(p, m, t)
    raise DomainError("closed forms exist only for n0 = 0 and n0 = 2")


def oscillation_period(p: OscillatorParams) -> float:
    """Period ``pi / sqrt(omega^2 - alpha^2)`` of the underdamped populations."""
    regime = classify_regime(p)
    if regime != UNDERDAMPED:
        raise RegimeError(f"no oscillation period in the {regime} regime")
    return math.pi / math.sqrt(p.omega**2 - p.alpha**2)


def peak_times(t, y) -> np.ndarray:
    """Times of interior local maxima of a sampled series."""
    idx, _ = find_peaks(np.asarray(y, dtype=float))
    return np.asarray(t, dtype=float)[idx]


def is_oscillatory(y, rel_tol: float = 1e-9) -> bool:
    """True when the series has an interior extremum of relative prominence above ``rel_tol``."""
    y = np.asarray(y, dtype=float)
    prominence = rel_tol * max(float(np.ptp(y)), float(np.max(np.abs(y))))
    hi, _ = find_peaks(y, prominence=prominence)
    lo, _ = find_peaks(-y, prominence=prominence)
    return bool(hi.size or lo.size)


def beat_maxima(y, node_tol: float = 1e-3) -> int:
    """Count local maxima that share a lobe with another maximum.

    A lobe is a stretch between nodes, samples at or below ``node_tol`` times
    the series maximum.  A population that rises and falls once per lobe
    scores 0; beating shows up as several humps inside one lobe.
    """
    y = np.asarray(y, dtype=float)
    is_node = y <= node_tol * y.max()
    peaks, _ = find_peaks(y)
    lobe = np.cumsum(is_node)  # peaks in the same lobe share a node count
    _, counts = np.unique(lobe[peaks], return_counts=True)
    return int(counts[counts > 1].sum())
