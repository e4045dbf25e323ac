"""Built-in presets that regenerate the data behind the published figures.

``fig1a``/``fig1b`` are ground and first excited eigenfunction densities at
``t = 0`` and ``t = 250``; ``fig2*``/``fig3*`` are mode populations
``m = 0, 2, 4, 6`` for starts in ``|0>``/``|2>`` in the underdamped (a),
critical (b) and overdamped (c) regimes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import dynamics, wavefunction
from .timewarp import OscillatorParams

__all__ = ["FigureSpec", "FIGURES", "figure_table"]

FIG1_PARAMS = OscillatorParams(alpha=0.005, omega=1.0, hbar=1.0)  # K = 1/(2 alpha) = 100
FIG_MODES = (0, 2, 4, 6)
FIG_T_END = 15.0
FIG_T_POINTS = 2001


@dataclass(frozen=True)
class FigureSpec:
    kind: str  # "wavefunction" or "amplitudes"
    alpha: float
    t: float = 0.0
    x_range: tuple = (-30.0, 30.0)
    x_points: int = 4001
    n0: int = 0


FIGURES = {
    "fig1a": FigureSpec("wavefunction", 0.005, t=0.0, x_range=(-30.0, 30.0)),
    "fig1b": FigureSpec("wavefunction", 0.005, t=250.0, x_range=(-10.0, 10.0)),
    "fig2a": FigureSpec("amplitudes", 0.75, n0=0),
    "fig2b": FigureSpec("amplitudes", 1.0, n0=0),
    "fig2c": FigureSpec("amplitudes", 2.0, n0=0),
    "fig3a": FigureSpec("amplitudes", 0.75, n0=2),
    "fig3b": FigureSpec("amplitudes", 1.0, n0=2),
    "fig3c": FigureSpec("amplitudes", 2.0, n0=2),
}


def figure_table(name: str):
    """Columns and rows for a preset.

    Wavefunction presets give ``(n, x, re, im, prob)`` for ``n = 0, 1``;
    amplitude presets give ``(t, m, re_c, im_c, prob)`` ordered by ``t`` then
    ``m``.  Raises ``KeyError`` for an unknown name.
    """
    spec = FIGURES[name]
    if spec.kind == "wavefunction":
        p = FIG1_PARAMS
        x = np.linspace(*spec.x_range, spec.x_points)
        rows = []
        for n in (0, 1):
            psi = np.asarray(wavefunction.psi_n_t(p, n, x, spec.t), dtype=complex)
            rows.extend(zip([n] * x.size, x, psi.real, psi.imag, np.abs(psi) ** 2))
        return ["n", "x", "re", "im", "prob"], rows

    p = OscillatorParams(alpha=spec.alpha, omega=1.0)
    t = np.linspace(0.0, FIG_T_END, FIG_T_POINTS)
    amps = np.array([dynamics.closed_form(p, spec.n0, m, t) for m in FIG_MODES])
    rows = []
    for i, ti in enumerate(t):
        for j, m in enumerate(FIG_MODES):
            c = amps[j, i]
            rows.append((ti, m, c.real, c.imag, abs(c) ** 2))
    return ["t", "m", "re_c", "im_c", "prob"], rows
