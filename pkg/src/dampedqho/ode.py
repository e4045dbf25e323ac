"""Adaptive Dormand-Prince 5(4) integrator with cubic Hermite dense output.

Works on real or complex state vectors.  Only what the coefficient dynamics
need: fixed tolerances, sample-time output, and a per-step hook.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import StepSizeError

__all__ = ["OdeResult", "dopri5"]

_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B_HAT = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B - _B_HAT

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0


@dataclass
class OdeResult:
    t: np.ndarray
    y: np.ndarray  # shape (len(t), n)
    n_steps: int
    n_rejected: int
    n_fev: int


def _hermite(t0, t1, y0, y1, f0, f1, t):
    h = t1 - t0
    s = (t - t0) / h
    h00 = (1 + 2 * s) * (1 - s) ** 2
    h10 = s * (1 - s) ** 2
    h01 = s**2 * (3 - 2 * s)
    h11 = s**2 * (s - 1)
    return h00 * y0 + h10 * h * f0 + h01 * y1 + h11 * h * f1


def _initial_step(f, t0, y0, f0, direction, rtol, atol):
    # Hairer, Norsett & Wanner, Solving ODEs I, II.4
    scale = atol + rtol * np.abs(y0)
    d0 = np.sqrt(np.mean(np.abs(y0 / scale) ** 2))
    d1 = np.sqrt(np.mean(np.abs(f0 / scale) ** 2))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    y1 = y0 + direction * h0 * f0
    f1 = f(t0 + direction * h0, y1)
    d2 = np.sqrt(np.mean(np.abs((f1 - f0) / scale) ** 2)) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1 / 5)
    return min(100 * h0, h1)


def dopri5(
    f: Callable[[float, np.ndarray], np.ndarray],
    t_span: tuple,
    y0: Sequence,
    t_eval: Optional[Sequence[float]] = None,
    rtol: float = 1e-9,
    atol: float = 1e-12,
    max_steps: int = 1_000_000,
    on_step: Optional[Callable[[float, np.ndarray], None]] = None,
) -> OdeResult:
    """Integrate ``y' = f(t, y)`` over ``t_span``.

    Values at ``t_eval`` (default: the two endpoints) come from cubic Hermite
    interpolation between accepted steps.  ``on_step(t, y)`` is called after
    every accepted step and may raise to abort.

    Raises
    ------
    StepSizeError
        If the step size underflows relative to ``t`` or ``max_steps`` is hit.
    """
    t0, t1 = float(t_span[0]), float(t_span[1])
    y = np.array(y0, dtype=np.result_type(np.asarray(y0).dtype, float))
    if t_eval is None:
        t_eval = np.array([t0, t1])
    t_eval = np.asarray(t_eval, dtype=float)
    direction = 1.0 if t1 >= t0 else -1.0
    if np.any(direction * np.diff(t_eval) < 0):
        raise ValueError("t_eval must be sorted in the direction of integration")
    if t_eval.size and (direction * (t_eval[0] - t0) < 0 or direction * (t_eval[-1] - t1) > 0):
        raise ValueError("t_eval must lie within t_span")

    out = np.empty((t_eval.size, y.size), dtype=y.dtype)
    k = 0
    while k < t_eval.size and t_eval[k] == t0:
        out[k] = y
        k += 1

    t = t0
    fy = f(t, y)
    n_fev = 1
    if t0 == t1:
        out[k:] = y
        return OdeResult(t_eval, out, 0, 0, n_fev)
    h = _initial_step(f, t0, y, fy, direction, rtol, atol)
    n_fev += 1
    n_steps = n_rejected = 0
    stages = np.empty((7, y.size), dtype=y.dtype)

    while direction * (t1 - t) > 0:
        if n_steps + n_rejected >= max_steps:
            raise StepSizeError(f"exceeded {max_steps} steps at t={t:.6g}")
        min_step = 16 * np.spacing(abs(t)) if t else 1e-300
        if h < min_step:
            raise StepSizeError(f"step size underflow at t={t:.6g}; the problem may be stiff")
        h = min(h, abs(t1 - t))
        hs = direction * h

        stages[0] = fy
        for i in range(1, 7):
            dy = stages[:i].T @ np.asarray(_A[i])
            stages[i] = f(t + _C[i] * hs, y + hs * dy)
        n_fev += 6
        y_new = y + hs * (stages.T @ _B)
        err = hs * (stages.T @ _E)
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        err_norm = float(np.max(np.abs(err / scale)))

        if err_norm <= 1.0:
            t_new = t + hs if abs(t1 - (t + hs)) > 1e-14 * max(1.0, abs(t1)) else t1
            f_new = stages[6].copy()  # FSAL
            while k < t_eval.size and direction * (t_eval[k] - t_new) <= 0:
                out[k] = _hermite(t, t_new, y, y_new, fy, f_new, t_eval[k])
                k += 1
            t, y, fy = t_new, y_new, f_new
            n_steps += 1
            if on_step is not None:
                on_step(t, y)
            factor = _MAX_FACTOR if err_norm == 0 else min(_MAX_FACTOR, _SAFETY * err_norm ** -0.2)
            h *= factor
        else:
            n_rejected += 1
            h *= max(_MIN_FACTOR, _SAFETY * err_norm ** -0.2)

    out[k:] = y
    return OdeResult(t_eval, out, n_steps, n_rejected, n_fev)
