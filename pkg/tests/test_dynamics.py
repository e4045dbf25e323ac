import cmath
import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import simpson, solve_ivp

from dampedqho import (
    DomainError,
    OscillatorParams,
    RegimeError,
    TruncationError,
    TruncationWarning,
    classify_regime,
    closed_form,
    closed_form_n0,
    closed_form_n2,
    critical_n0,
    critical_n2,
    integrate,
    oscillation_period,
    phase_theta,
    psi_n_tau,
    xi_zeta,
)
from dampedqho.dynamics import beat_maxima, is_oscillatory, peak_times, rhs_t, rhs_tau

UNDER = OscillatorParams(alpha=0.75, omega=1.0)
CRIT = OscillatorParams(alpha=1.0, omega=1.0)
OVER = OscillatorParams(alpha=2.0, omega=1.0)


def quiet_integrate(*args, **kw):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        return integrate(*args, **kw)


def closed_matrix(p, n0, t, m_max):
    return np.array([closed_form(p, n0, m, t) for m in range(m_max + 1)]).T


class TestConstants:
    def test_overdamped(self):
        k = xi_zeta(OVER)
        assert k.xi == pytest.approx(math.sqrt(3) / 2, rel=1e-15)
        assert k.regime == "overdamped"

    def test_critical(self):
        k = xi_zeta(CRIT)
        assert k.xi == 0
        assert k.regime == "critical"

    def test_underdamped(self):
        k = xi_zeta(UNDER)
        assert k.xi.real == 0
        assert k.xi.imag == pytest.approx(math.sqrt(16 / 9 - 1), rel=1e-15)
        assert k.xi**2 + (1 / 0.75) ** 2 == pytest.approx(1.0, rel=1e-14)

    @given(alpha=st.floats(0.05, 5), omega=st.floats(0.05, 5))
    def test_zeta_identities(self, alpha, omega):
        k = xi_zeta(OscillatorParams(alpha=alpha, omega=omega))
        assert cmath.exp(k.zeta) == pytest.approx(k.xi + 1j * omega / alpha, rel=1e-12, abs=1e-12)
        assert cmath.exp(-k.zeta) == pytest.approx(k.xi - 1j * omega / alpha, rel=1e-9, abs=1e-9)
        assert cmath.cosh(k.zeta) == pytest.approx(k.xi, abs=1e-9 * (1 + omega / alpha))

    @pytest.mark.parametrize(
        "alpha, regime",
        [(0.75, "underdamped"), (1.0, "critical"), (2.0, "overdamped"),
         (1 + 5e-10, "critical"), (1 - 5e-10, "critical"), (1 + 2e-9, "overdamped"), (1 - 2e-9, "underdamped")],
    )
    def test_classify(self, alpha, regime):
        assert classify_regime(OscillatorParams(alpha=alpha, omega=1.0)) == regime

    def test_classify_needs_damping(self):
        with pytest.raises(DomainError):
            classify_regime(OscillatorParams(alpha=0.0, omega=1.0))


class TestRhs:
    def test_ground_state_kick(self):
        c = np.zeros(8, complex)
        c[0] = 1
        d = rhs_t(UNDER, 0.0, c)
        assert d[2] == pytest.approx(0.375 * math.sqrt(2), rel=1e-15)
        d[2] = 0
        np.testing.assert_array_equal(d, 0)

    def test_tau_kick(self):
        p = OscillatorParams(alpha=0.75, omega=1.0, K=1.3)
        c = np.zeros(8, complex)
        c[0] = 1
        assert abs(rhs_tau(p, p.K, c)[2]) == pytest.approx(math.sqrt(2) / (4 * 1.3), rel=1e-15)

    @given(st.integers(0, 1), st.floats(0, 20))
    def test_parity(self, parity, t):
        rng = np.random.default_rng(1)
        c = rng.normal(size=12) + 1j * rng.normal(size=12)
        c[1 - parity :: 2] = 0
        d = rhs_t(UNDER, t, c)
        np.testing.assert_array_equal(d[1 - parity :: 2], 0)

    @settings(max_examples=30)
    @given(seed=st.integers(0, 2**32 - 1), t=st.floats(0, 30))
    def test_norm_preserving_interior(self, seed, t):
        rng = np.random.default_rng(seed)
        c = rng.normal(size=30) + 1j * rng.normal(size=30)
        c[-2:] = 0  # nothing to leak across the truncation edge
        d = rhs_t(OVER, t, c)
        assert abs(2 * np.vdot(c, d).real) < 1e-13 * np.vdot(c, c).real

    @pytest.mark.parametrize("t", [0.0, 0.7, 3.1])
    def test_chain_rule(self, t):
        p = UNDER
        rng = np.random.default_rng(2)
        c = rng.normal(size=10) + 1j * rng.normal(size=10)
        tau = p.K * math.exp(2 * p.alpha * t)
        np.testing.assert_allclose(rhs_tau(p, tau, c) * 2 * p.alpha * tau, rhs_t(p, t, c), rtol=1e-12)

    def test_tau_form_from_eigenfunction_overlaps(self):
        # dc_m/dtau = -sum_n c_n <m|d_tau n> e^{i(theta_n - theta_m)} with overlaps by quadrature
        p = OscillatorParams(alpha=0.6, omega=1.0, K=0.8)
        tau, h = 1.7, 1e-5
        x = np.linspace(-12, 12, 6001)
        N = 8
        psi = np.array([psi_n_tau(p, n, x, tau) for n in range(N)])
        dpsi = np.array([(psi_n_tau(p, n, x, tau + h) - psi_n_tau(p, n, x, tau - h)) / (2 * h) for n in range(N)])
        overlap = np.array([[simpson(psi[m] * dpsi[n], x=x) for n in range(N)] for m in range(N)])
        theta = np.array([phase_theta(p, n, tau) for n in range(N)])
        rng = np.random.default_rng(3)
        c = rng.normal(size=N) + 1j * rng.normal(size=N)
        expected = -(overlap * np.exp(1j * (theta[None, :] - theta[:, None]))) @ c
        got = rhs_tau(p, tau, np.concatenate([c, np.zeros(2)]))[:N]
        # the last two rows miss couplings to n = N, N+1
        np.testing.assert_allclose(got[: N - 2], expected[: N - 2], atol=1e-7)

    def test_tau_domain(self):
        with pytest.raises(DomainError):
            rhs_tau(UNDER, -1.0, np.zeros(4))


class TestIntegrate:
    def test_needs_damping(self):
        with pytest.raises(DomainError):
            integrate(OscillatorParams(alpha=0.0, omega=1.0), 0, 1.0)

    @pytest.mark.parametrize("n0, M", [(0, 5), (0, 61), (2, 61), (-1, 60)])
    def test_truncation_checks(self, n0, M):
        with pytest.raises(DomainError):
            integrate(UNDER, n0, 1.0, M=M)

    def test_norm_and_parity(self):
        traj = quiet_integrate(UNDER, 0, 20.0, M=60)
        assert np.max(np.abs(traj.norms() - 1)) < 1e-8
        assert np.all(traj.c[:, 1::2] == 0)
        assert traj.c.shape == (201, 61)

    def test_tail_flag_and_warning(self):
        with pytest.warns(TruncationWarning):
            traj = integrate(UNDER, 0, 20.0, M=60)
        assert traj.tail_exceeded
        assert 1e-12 < traj.max_tail < 1e-8

    def test_strict(self):
        with pytest.raises(TruncationError) as info:
            integrate(UNDER, 0, 20.0, M=60, strict=True)
        assert info.value.tail > 1e-12
        assert 0 < info.value.t < 20

    def test_clean_run_no_warning(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            traj = integrate(UNDER, 0, 10.0, M=200)
        assert not traj.tail_exceeded

    def test_arbitrary_initial_vector(self):
        c0 = np.zeros(41, complex)
        c0[0] = c0[1] = 1 / math.sqrt(2)
        traj = quiet_integrate(UNDER, None, 2.0, M=40, c0=c0)
        assert abs(traj.norms()[-1] - 1) < 1e-8
        with pytest.raises(DomainError):
            integrate(UNDER, None, 2.0, M=40, c0=c0[:-1])

    def test_mode_amplitudes(self):
        traj = quiet_integrate(UNDER, 2, 1.0, M=40, t_eval=[0.0, 1.0])
        amps = traj[0]
        assert amps.M == 40 and amps.t == 0.0 and amps.n0 == 2
        assert amps.prob[2] == 1 and amps.norm == 1

    @pytest.mark.parametrize("n0", [0, 2])
    def test_against_scipy_dop853(self, n0):
        p, M = OVER, 40
        t = np.linspace(0, 0.8, 41)
        traj = quiet_integrate(p, n0, 0.8, M=M, t_eval=t)
        y0 = np.zeros(M + 1, complex)
        y0[n0] = 1
        ref = solve_ivp(lambda s, c: rhs_t(p, s, c), (0, 0.8), y0, method="DOP853", t_eval=t, rtol=1e-12, atol=1e-14)
        np.testing.assert_allclose(traj.c, ref.y.T, atol=1e-8)


class TestClosedForms:
    @pytest.mark.parametrize("p", [UNDER, CRIT, OVER, OscillatorParams(alpha=1 + 1e-7, omega=1.0)])
    @pytest.mark.parametrize("n0", [0, 2])
    def test_initial_condition(self, p, n0):
        for m in range(0, 12):
            assert closed_form(p, n0, m, 0.0) == pytest.approx(float(m == n0), abs=1e-14)

    @given(m=st.integers(0, 30).map(lambda k: 2 * k + 1), t=st.floats(0, 20))
    def test_odd_modes_vanish(self, m, t):
        for p in (UNDER, CRIT, OVER):
            assert closed_form_n0(p, m, t) == 0
            assert closed_form_n2(p, m, t) == 0

    def test_critical_examples(self):
        c2 = critical_n0(CRIT, 2, 1.0)
        assert c2 == pytest.approx(np.exp(2.5j) / math.sqrt(2) / (1 + 1j) ** 1.5, rel=1e-14)
        assert abs(c2) ** 2 == pytest.approx(0.5 * 2**-1.5, rel=1e-14)
        c0 = critical_n2(CRIT, 0, 1.0)
        assert abs(c0) ** 2 == pytest.approx(0.5 * 2**-1.5, rel=1e-14)
        assert critical_n2(CRIT, 2, 0.0) == pytest.approx(1, rel=1e-15)

    @pytest.mark.parametrize("n0", [0, 2])
    def test_critical_seam(self, n0):
        # |xi| = 1e-6 just above the switch on both sides of alpha = omega
        t = np.linspace(0, 10, 201)
        for sign in (1, -1):
            alpha = 1 / math.sqrt(1 - sign * 1.0000001e-12)
            p = OscillatorParams(alpha=alpha, omega=1.0)
            assert abs(xi_zeta(p).xi) >= 1e-6
            for m in range(0, 11, 2):
                general = closed_form(p, n0, m, t)
                crit = (critical_n0 if n0 == 0 else critical_n2)(p, m, t)
                assert np.max(np.abs(general - crit)) < 1e-5

    @pytest.mark.parametrize("p", [UNDER, OVER])
    @pytest.mark.parametrize("n0", [0, 2])
    def test_normalisation_infinite_sum(self, p, n0):
        # the full sum is 1 at any time once enough modes are included
        t = np.array([0.3, 0.7, 1.0])
        total = sum(np.abs(closed_form(p, n0, m, t)) ** 2 for m in range(0, 3001, 2))
        np.testing.assert_allclose(total, 1, atol=1e-10)

    def test_near_critical_needs_many_modes(self):
        p = OscillatorParams(alpha=1 + 1e-7, omega=1.0)
        probs = np.array([abs(closed_form(p, 0, m, 10.0)) ** 2 for m in range(0, 40001, 2)])
        assert probs[:41].sum() < 0.7  # m <= 80 misses a third
        assert probs.sum() == pytest.approx(1.0, abs=1e-6)

    def test_dispatch(self):
        with pytest.raises(DomainError):
            closed_form(UNDER, 1, 0, 0.0)
        with pytest.raises(DomainError):
            closed_form_n0(UNDER, -2, 0.0)

    def test_large_time_finite(self):
        c = closed_form(OVER, 2, 40, np.array([50.0, 200.0]))
        assert np.all(np.isfinite(c))


class TestOracleEquivalence:
    # windows where the truncated system is an adequate reference (tail < 1e-8)
    CASES = [
        (UNDER, 200, 10.0),
        (OVER, 200, 1.0),
        (OVER, 60, 0.5),
        (OscillatorParams(alpha=1 + 1e-7, omega=1.0), 400, 3.0),
        (OscillatorParams(alpha=1 - 1e-7, omega=1.0), 400, 3.0),
    ]

    @pytest.mark.parametrize("p, M, t_end", CASES, ids=["under", "over", "over-M60", "near-crit+", "near-crit-"])
    @pytest.mark.parametrize("n0", [0, 2])
    def test_match(self, p, M, t_end, n0):
        t = np.linspace(0, t_end, 101)
        traj = quiet_integrate(p, n0, t_end, M=M, t_eval=t)
        assert np.abs(traj.c[:, :21] - closed_matrix(p, n0, t, 20)).max() < 1e-6

    def test_spec_points(self):
        traj = quiet_integrate(UNDER, 0, 1.0, M=60, t_eval=[0.0, 1.0])
        assert abs(traj.c[1, 2] - closed_form_n0(UNDER, 2, 1.0)) < 1e-6
        traj = quiet_integrate(OVER, 2, 0.5, M=60, t_eval=[0.0, 0.5])
        assert abs(traj.c[1, 4] - closed_form_n2(OVER, 4, 0.5)) < 1e-6


class TestRegimeAnalysis:
    def test_period(self):
        assert oscillation_period(UNDER) == pytest.approx(math.pi / math.sqrt(0.4375), rel=1e-15)
        assert oscillation_period(UNDER) == pytest.approx(4.7496, abs=1e-4)
        assert oscillation_period(OscillatorParams(alpha=1e-9, omega=1.0)) == pytest.approx(math.pi)

    @pytest.mark.parametrize("p", [CRIT, OVER])
    def test_period_needs_underdamping(self, p):
        with pytest.raises(RegimeError):
            oscillation_period(p)

    def test_peak_spacing_from_oracle(self):
        t = np.linspace(0, 20, 4001)
        traj = quiet_integrate(UNDER, 0, 20.0, M=60, t_eval=t)
        peaks = peak_times(t, np.abs(traj.c[:, 0]) ** 2)
        assert np.diff(peaks).mean() == pytest.approx(oscillation_period(UNDER), rel=1e-2)

    def test_is_oscillatory(self):
        t = np.linspace(0, 30, 3001)
        assert is_oscillatory(np.abs(closed_form_n0(UNDER, 0, t)) ** 2)
        assert not is_oscillatory(np.abs(closed_form_n0(CRIT, 0, t)) ** 2)
        assert not is_oscillatory(np.abs(closed_form_n0(OVER, 0, t)) ** 2)

    def test_beat_maxima(self):
        t = np.linspace(0, 15, 2001)
        assert beat_maxima(np.abs(closed_form_n2(UNDER, 4, t)) ** 2) >= 2
        assert beat_maxima(np.abs(closed_form_n0(UNDER, 4, t)) ** 2) == 0
        assert beat_maxima(np.abs(np.sin(t)) ** 2) == 0
