import numpy as np
import pytest

from becsmf import hmf, reduced
from becsmf.errors import AccuracyWarning, InvalidParameterError
from becsmf.initial import cosine_seed
from becsmf.spectral import Grid

from conftest import weak_params


class TestRhs:
    def test_homogeneous_fixed_point(self):
        ds, dd = reduced.rhs(reduced.ReducedState(s=0j, d=-1.0, drive=1.3))
        assert ds == 0 and dd == 0

    def test_real_seed_at_drive_two(self):
        s0 = 2.5e-3
        ds, dd = reduced.rhs(reduced.ReducedState(s=s0 + 0j, d=-1.0, drive=2.0))
        assert ds == pytest.approx(-1j * s0, rel=1e-15)
        assert dd == 0.0

    def test_derivative_is_manifestly_real(self):
        st = reduced.ReducedState(s=0.2 - 0.1j, d=-0.5, drive=1.7)
        _, dd = reduced.rhs(st)
        assert isinstance(dd, float)

    def test_invariants_are_algebraically_conserved(self):
        rng = np.random.default_rng(12)
        for _ in range(100):
            s = complex(rng.standard_normal(), rng.standard_normal()) * 0.4
            d = float(rng.uniform(-1, 1))
            drive = float(rng.uniform(0.2, 5))
            st = reduced.ReducedState(s=s, d=d, drive=drive)
            ds, dd = reduced.rhs(st)
            spin_dot = 2 * d * dd + 2 * (s.conjugate() * ds).real * 2
            para_dot = dd - drive * 2 * s.real * ds.real
            assert abs(spin_dot) < 1e-14
            assert abs(para_dot) < 1e-14


class TestIntegrate:
    @pytest.mark.parametrize("drive", [1.02, 1.05, 1.1, 1.2])
    def test_first_integrals_conserved(self, drive):
        st = reduced.seeded_state(drive, 1e-3)
        traj = reduced.integrate(st, 1e-3, 10_000, record_stride=10)
        d1, d2 = traj.invariant_drift()
        assert d1 < 1e-10
        assert d2 < 1e-10

    def test_pulse_peak_weak_driving(self):
        st = reduced.seeded_state(1.05, 1e-3)
        traj = reduced.integrate(st, 1e-3, 70_000, record_stride=10)
        assert traj.m.max() == pytest.approx(reduced.pulse_amplitude(1.05), abs=1e-4)

    def test_marginal_drive_no_growth(self):
        st = reduced.seeded_state(1.0 + 1e-15, 1e-3, on_pulse=False)
        traj = reduced.integrate(st, 1e-3, 50_000, record_stride=100)
        assert traj.m.max() <= 10 * 1e-3

    def test_time_reversal(self):
        st = reduced.seeded_state(1.1, 1e-3)
        fwd = reduced.integrate(st, 1e-3, 10_000, record_stride=10_000)
        back = reduced.integrate(
            reduced.ReducedState(s=complex(fwd.s[-1]), d=float(fwd.d[-1]), drive=1.1),
            -1e-3, 10_000, record_stride=10_000,
        )
        assert abs(back.s[-1] - st.s) < 1e-9
        assert abs(back.d[-1] - st.d) < 1e-9

    def test_order_parameter_equation_residual(self):
        # along the pulse: (dM/dtau)^2 + (drive^2/2) M^4 - (drive-1) M^2 = 0,
        # with dM/dtau = -Im(S)
        drive = 1.1
        st = reduced.seeded_state(drive, 1e-3)
        traj = reduced.integrate(st, 1e-3, 60_000, record_stride=20)
        res = (
            traj.s.imag**2
            + 0.5 * drive**2 * traj.s.real**4
            - (drive - 1.0) * traj.s.real**2
        )
        assert np.max(np.abs(res)) < 1e-8

    def test_step_size_warning(self):
        st = reduced.seeded_state(1.2, 1e-3)
        with pytest.warns(AccuracyWarning):
            reduced.integrate(st, 0.1, 10)


class TestAnalyticPulse:
    def test_peak_value_at_peak_time(self):
        drive, m0 = 1.05, 1e-3
        t0 = reduced.pulse_peak_time(drive, m0)
        amp = reduced.pulse_amplitude(drive)
        assert reduced.analytic_m(t0, drive, m0) == pytest.approx(amp, rel=1e-14)
        assert reduced.analytic_m(t0 - 1.0, drive, m0) < amp
        assert reduced.analytic_m(t0 + 1.0, drive, m0) < amp

    def test_weak_driving_numbers(self):
        assert reduced.pulse_amplitude(1.05) == pytest.approx(0.301169, abs=2e-6)
        assert reduced.pulse_rate(1.05) == pytest.approx(np.sqrt(0.05), rel=1e-14)
        assert reduced.pulse_peak_time(1.05, 1e-3) == pytest.approx(28.625, abs=2e-3)

    def test_seed_is_recovered_at_time_zero(self):
        drive = 2.0
        m0 = reduced.pulse_amplitude(drive) / 2
        assert reduced.analytic_m(0.0, drive, m0) == pytest.approx(m0, rel=1e-12)

    def test_domain_errors(self):
        with pytest.raises(InvalidParameterError):
            reduced.analytic_m(1.0, 0.9, 1e-3)
        with pytest.raises(InvalidParameterError):
            reduced.analytic_m(1.0, 1.05, 0.5)  # seed above the amplitude
        with pytest.raises(InvalidParameterError):
            reduced.analytic_m(1.0, 1.05, 0.0)

    @pytest.mark.parametrize("drive", [1.02, 1.05, 1.1, 1.2])
    def test_integrator_matches_closed_form(self, drive):
        m0 = 1e-3
        st = reduced.seeded_state(drive, m0)
        t_end = 2.2 * reduced.pulse_peak_time(drive, m0)
        traj = reduced.integrate(st, 1e-3, int(t_end / 1e-3), record_stride=10)
        analytic = reduced.analytic_m(traj.taus, drive, m0)
        assert np.max(np.abs(traj.m - analytic)) <= 1e-4

    def test_pulse_bundle_consistent_with_analytic_m(self):
        p = reduced.pulse(1.1, 1e-3)
        taus = np.linspace(0, 50, 200)
        assert np.array_equal(p(taus), reduced.analytic_m(taus, 1.1, 1e-3))
        assert p(p.t0) == pytest.approx(p.amplitude, rel=1e-14)
        assert p.m0 == 1e-3

    def test_amplitude_never_exceeds_half_sqrt_two(self):
        drives = np.concatenate([np.linspace(1.001, 5, 400), [2.0]])
        amps = np.array([reduced.pulse_amplitude(d) for d in drives])
        assert np.all(amps <= np.sqrt(2) / 2 + 1e-15)
        assert reduced.pulse_amplitude(2.0) == pytest.approx(
            np.sqrt(2) / 2, rel=1e-14
        )

    def test_amplitude_scaling_toward_threshold(self):
        # amplitude * drive / sqrt(drive - 1) is the constant sqrt(2)
        for drive in (1.001, 1.01, 1.1, 1.5, 3.0):
            ratio = reduced.pulse_amplitude(drive) * drive / np.sqrt(drive - 1.0)
            assert ratio == pytest.approx(np.sqrt(2.0), rel=1e-12)
        # and the log-log slope tends to 1/2 at threshold
        x = np.array([1e-4, 2e-4, 5e-4, 1e-3])
        amps = np.array([reduced.pulse_amplitude(1 + xi) for xi in x])
        slope = np.polyfit(np.log(x), np.log(amps), 1)[0]
        assert slope == pytest.approx(0.5, rel=0.01)


class TestSeededState:
    def test_on_pulse_state_sits_on_both_invariants(self):
        st = reduced.seeded_state(1.1, 1e-3)
        spin, para = st.invariants()
        assert spin == pytest.approx(1.0, abs=1e-12)
        assert para == pytest.approx(-1.0, abs=1e-12)

    def test_turning_state_has_real_seed(self):
        st = reduced.seeded_state(1.1, 1e-3, on_pulse=False)
        assert st.s.imag == 0.0
        assert st.invariants()[1] == pytest.approx(-1.0, abs=1e-15)

    def test_rejects_seed_above_amplitude(self):
        with pytest.raises(InvalidParameterError):
            reduced.seeded_state(1.05, 0.5)


class TestProjection:
    def test_homogeneous(self):
        g = Grid(64, 1)
        proj = reduced.project_wavefunction(np.ones(64, complex), g)
        assert abs(proj.s) < 1e-14
        assert proj.d == pytest.approx(-1.0, abs=1e-14)
        assert proj.residual < 1e-14

    def test_exact_ansatz_member(self):
        g = Grid(64, 1)
        psi = 1.0 + 0.1 * np.cos(g.theta)
        psi = psi / np.sqrt(np.mean(np.abs(psi) ** 2))
        proj = reduced.project_wavefunction(psi.astype(complex), g)
        assert proj.s.real > 0
        assert abs(proj.s.imag) < 1e-14
        assert proj.residual < 1e-13

    def test_sine_quadrature_counts_as_residual(self):
        g = Grid(64, 1)
        psi = (1.0 + 0.1j * np.sin(g.theta)).astype(complex)
        proj = reduced.project_wavefunction(psi, g)
        assert abs(proj.c1) < 1e-14
        assert proj.residual == pytest.approx(0.005 / 1.005, rel=1e-6)

    def test_needs_single_period_grid(self):
        with pytest.raises(InvalidParameterError):
            reduced.project_wavefunction(np.ones(64, complex), Grid(64, 2))

    def test_weak_driving_pulse_stays_in_the_ansatz(self):
        # three-momentum-mode content captures a weak-driving pulse to < 5%
        g = Grid(64, 1)
        p = weak_params(drive=1.1)
        traj = hmf.evolve(
            cosine_seed(g, 1e-3), p, g, 1e-3, 55_000,
            trace_stride=1000, snapshot_stride=1000,
        )
        residuals = [
            reduced.project_wavefunction(s, g).residual for s in traj.psi_snaps
        ]
        assert max(residuals) < 0.05
