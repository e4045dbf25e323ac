"""Time-warp quantization of the linearly damped harmonic oscillator.

Exact spectra and wavefunctions in warped time, transition-amplitude
dynamics (adaptive integration and closed forms), damping-regime analysis,
and the mapping of phase and flux qubits onto the oscillator.
"""

from .errors import (
    DampedQHOError,
    DegenerateWarpError,
    DomainError,
    QuadratureSupportWarning,
    RegimeError,
    SmallAngleWarning,
    StepSizeError,
    TruncationError,
    TruncationWarning,
    WarpGridError,
)
from .timewarp import (
    OscillatorParams,
    TimeWarp,
    helmholtz_selfadjoint_residual,
    solve_warp_time_dependent,
    t_of_tau,
    tau_of_t,
)
from .spectrum import EnergyLevel, energy_t, energy_tau, hamiltonian_coefficients, phase_theta
from .wavefunction import (
    QuadratureNorm,
    WavefunctionSample,
    hermite,
    psi_n_t,
    psi_n_tau,
    quadrature_norm,
    superpose,
)
from .dynamics import (
    ModeAmplitudes,
    Trajectory,
    classify_regime,
    closed_form,
    closed_form_n0,
    closed_form_n2,
    critical_n0,
    critical_n2,
    integrate,
    oscillation_period,
    xi_zeta,
)
from .qubits import (
    QubitOscillatorMap,
    RcsjParams,
    critical_resistance_flux,
    critical_resistance_phase,
    energy_flux,
    energy_phase,
    map_to_oscillator,
)

__version__ = "0.1.0"
