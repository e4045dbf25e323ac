"""Oscillator parameters and the exponential time warp.

The damped oscillator ``q'' + 2 alpha q' + omega^2 q = 0`` has no Lagrangian
in the laboratory time ``t``.  Re-expressed in the warped time
``tau = K exp(2 alpha t)`` it becomes

    4 alpha^2 tau^2 q_tautau + 8 alpha^2 tau q_tau + omega^2 q = 0,

whose first-derivative coefficient is exactly the tau-derivative of the
second-derivative coefficient, so a Lagrangian exists.  This module holds the
warp itself, a numerical check of that self-adjointness condition, and a
solver for the warp when the damping depends on time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicHermiteSpline

from .errors import DegenerateWarpError, DomainError, WarpGridError

__all__ = [
    "OscillatorParams",
    "TimeWarp",
    "tau_of_t",
    "t_of_tau",
    "helmholtz_selfadjoint_residual",
    "solve_warp_time_dependent",
]


@dataclass(frozen=True)
class OscillatorParams:
    """One damped oscillator and its warp constant.

    Parameters
    ----------
    alpha : float
        Linear damping coefficient (1/time).
    omega : float
        Undamped angular frequency (1/time).
    hbar : float
        Action scale.
    K : float, optional
        Warp integration constant, ``tau(t=0) = K``.  Defaults to
        ``1/(2 alpha)``, which makes the spectrum at ``t = 0`` coincide with
        the undamped ladder.  Mass is absorbed into ``K``.
    """

    alpha: float
    omega: float
    hbar: float = 1.0
    K: Optional[float] = None
    # 1/(2 alpha K), exactly 1 for the default K
    warp_scale: Optional[float] = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        for name in ("alpha", "omega", "hbar"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")
        if self.omega <= 0:
            raise DomainError("omega must be positive")
        if self.hbar <= 0:
            raise DomainError("hbar must be positive")
        if self.K is None:
            if self.alpha != 0:
                object.__setattr__(self, "K", 1.0 / (2.0 * self.alpha))
                object.__setattr__(self, "warp_scale", 1.0)
        elif not math.isfinite(self.K) or self.K == 0:
            raise DegenerateWarpError("K must be finite and non-zero")
        elif self.alpha != 0:
            object.__setattr__(self, "warp_scale", 1.0 / (2.0 * self.alpha * self.K))

    def with_(self, **changes) -> "OscillatorParams":
        """Copy with some fields replaced.  ``K`` is re-defaulted unless given."""
        fields = {"alpha": self.alpha, "omega": self.omega, "hbar": self.hbar, "K": None}
        fields.update(changes)
        return OscillatorParams(**fields)


def _require_warp(p: OscillatorParams) -> None:
    if p.alpha == 0:
        raise DegenerateWarpError("alpha = 0: the undamped oscillator needs no time warp")
    if p.K is None:
        raise DegenerateWarpError("K is undefined")


def tau_of_t(p: OscillatorParams, t):
    """Warped time ``K exp(2 alpha t)``."""
    _require_warp(p)
    return p.K * np.exp(2.0 * p.alpha * np.asarray(t, dtype=float))[()]


def t_of_tau(p: OscillatorParams, tau):
    """Inverse warp ``ln(tau/K) / (2 alpha)``."""
    _require_warp(p)
    ratio = np.asarray(tau, dtype=float) / p.K
    if np.any(~(ratio > 0)):
        raise DomainError("tau/K must be positive")
    return (np.log(ratio) / (2.0 * p.alpha))[()]


@dataclass(frozen=True)
class TimeWarp:
    """A map ``t -> tau`` with derivative access, analytic or sampled.

    Build with :meth:`analytic` or :func:`solve_warp_time_dependent`.
    """

    kind: str
    K: float
    alpha: Optional[float] = None
    t: Optional[np.ndarray] = None
    tau: Optional[np.ndarray] = None
    dtau: Optional[np.ndarray] = None
    _fwd: Optional[CubicHermiteSpline] = field(default=None, repr=False, compare=False)
    _inv: Optional[CubicHermiteSpline] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.kind == "analytic":
            if not self.alpha or not self.K:
                raise DegenerateWarpError("analytic warp needs non-zero alpha and K")
            return
        if self.kind != "sampled":
            raise ValueError(f"unknown warp kind {self.kind!r}")
        t, tau, dtau = (np.array(a, dtype=float) for a in (self.t, self.tau, self.dtau))
        if not (t.ndim == 1 and t.shape == tau.shape == dtau.shape and t.size >= 2):
            raise ValueError("sampled warp needs matching 1-d arrays of length >= 2")
        if np.any(np.diff(t) <= 0):
            raise ValueError("t grid must be strictly increasing")
        if np.any(dtau <= 0):
            raise DomainError("dtau/dt must be positive on the grid")
        for a in (t, tau, dtau):
            a.flags.writeable = False
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "dtau", dtau)
        object.__setattr__(self, "_fwd", CubicHermiteSpline(t, tau, dtau, extrapolate=False))
        object.__setattr__(self, "_inv", CubicHermiteSpline(tau, t, 1.0 / dtau, extrapolate=False))

    @classmethod
    def analytic(cls, p: OscillatorParams) -> "TimeWarp":
        _require_warp(p)
        return cls("analytic", K=p.K, alpha=p.alpha)

    def tau_at(self, t):
        if self.kind == "analytic":
            return self.K * np.exp(2.0 * self.alpha * np.asarray(t, dtype=float))[()]
        return self._fwd(t)[()]

    def dtau_dt(self, t):
        if self.kind == "analytic":
            return 2.0 * self.alpha * self.tau_at(t)
        return self._fwd(t, 1)[()]

    def t_at(self, tau):
        if self.kind == "analytic":
            ratio = np.asarray(tau, dtype=float) / self.K
            if np.any(~(ratio > 0)):
                raise DomainError("tau/K must be positive")
            return (np.log(ratio) / (2.0 * self.alpha))[()]
        return self._inv(tau)[()]


def helmholtz_selfadjoint_residual(
    a: Callable[[float], float],
    b: Callable[[float], float],
    tau_samples: Sequence[float],
    rel_step: float = 1e-6,
) -> np.ndarray:
    """Residual ``b(tau) - da/dtau`` of the self-adjointness condition.

    For a single equation ``a(tau) q'' + b(tau) q' + g(q, tau) = 0`` the
    Helmholtz conditions reduce to ``b = da/dtau``; a vanishing residual at
    every sample certifies that a Lagrangian exists in these coordinates.
    The derivative is a central difference with step ``rel_step * |tau|``.

    Samples where ``a`` or ``b`` fail to evaluate to finite numbers, or where
    ``a`` vanishes, come back as ``nan``.
    """
    out = np.empty(len(tau_samples))
    for i, tau in enumerate(tau_samples):
        tau = float(tau)
        h = rel_step * abs(tau) if tau != 0 else rel_step
        try:
            a0 = float(a(tau))
            deriv = (float(a(tau + h)) - float(a(tau - h))) / (2.0 * h)
            res = float(b(tau)) - deriv
        except (ArithmeticError, ValueError):
            res = math.nan
        else:
            if a0 == 0 or not math.isfinite(a0):
                res = math.nan
        out[i] = res
    return out


def solve_warp_time_dependent(
    alpha_fn: Callable[[float], float],
    t_grid: Sequence[float],
    K: float,
    tol: float = 1e-6,
) -> TimeWarp:
    """Warp for a time-dependent damping ``alpha(t)``.

    The constraint on ``tau(t)`` reduces to ``tau'' = 2 alpha(t) tau'``.  It is
    integrated from the first grid point ``t0`` with

        tau(t0) = K exp(2 alpha(t0) t0),   tau'(t0) = 2 alpha(t0) tau(t0),

    so that a constant ``alpha`` reproduces ``K exp(2 alpha t)`` exactly.

    Grid values carry the integrator's accuracy (relative 1e-12).  ``tol``
    bounds the relative error of the cubic Hermite interpolant between grid
    points, checked at interval midpoints; a coarser grid raises
    :class:`WarpGridError` with an estimate of the largest acceptable step.
    """
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size < 2 or np.any(np.diff(t) <= 0):
        raise ValueError("t_grid must be strictly increasing with at least two points")
    if not K:
        raise DegenerateWarpError("K must be non-zero")
    alphas = np.array([alpha_fn(ti) for ti in t], dtype=float)
    if not np.all(np.isfinite(alphas)):
        raise DomainError("alpha_fn is not finite on the grid")
    if np.all(alphas == 0):
        raise DegenerateWarpError("alpha(t) = 0: the undamped oscillator needs no time warp")
    t0, a0 = t[0], alphas[0]
    tau0 = K * math.exp(2.0 * a0 * t0)
    dtau0 = 2.0 * a0 * tau0
    if not dtau0 > 0:
        raise DegenerateWarpError("alpha(t0) * K must be positive for an increasing warp")

    def rhs(s, y):
        return [y[1], 2.0 * alpha_fn(s) * y[1]]

    mid = 0.5 * (t[1:] + t[:-1])
    sol = solve_ivp(rhs, (t[0], t[-1]), [tau0, dtau0], method="DOP853",
                    rtol=1e-13, atol=0.0, dense_output=True)
    if not sol.success:
        raise DomainError(f"warp integration failed: {sol.message}")
    tau, dtau = sol.sol(t)
    tau[0], dtau[0] = tau0, dtau0
    warp = TimeWarp("sampled", K=K, t=t, tau=tau, dtau=dtau)

    exact_mid = sol.sol(mid)[0]
    rel = np.abs(warp.tau_at(mid) - exact_mid) / np.abs(exact_mid)
    worst = float(rel.max())
    if worst > tol:
        h = np.diff(t)
        # cubic Hermite error scales as h**4
        scale = (tol / np.maximum(rel, 1e-300)) ** 0.25
        max_step = 0.9 * float(np.min(h * np.minimum(scale, 1.0)))
        raise WarpGridError(
            f"grid too coarse: interpolation error {worst:.3g} > {tol:g}; "
            f"use steps <= {max_step:.3g}",
            max_step=max_step,
        )
    return warp
