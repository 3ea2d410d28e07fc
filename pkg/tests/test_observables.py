import dataclasses
import math

import numpy as np
import pytest

from floqtunnel import (
    BarrierSpec,
    DegenerateChannelError,
    DriveSpec,
    IncidentSpec,
    ParameterError,
    RegimeError,
    RegimeWarning,
    ScanError,
    SolverOptions,
    activation_energy,
    compare_exact_analytic,
    find_resonances,
    scan,
    solve,
    spectrum,
)
from floqtunnel.airyapprox import resonance_width
from floqtunnel.observables import _golden_min


class TestActivationEnergy:
    def test_no_drive_returns_incident(self):
        sol = solve(BarrierSpec(1.0, 2.0), DriveSpec(0.0, 0.1), IncidentSpec(0.5))
        assert activation_energy(sol) == pytest.approx(0.5, abs=1e-14)

    def test_delta_weight_at_single_sideband(self, strong_system):
        barrier, drive = strong_system
        sol = solve(barrier, drive, IncidentSpec(0.625))
        target = 12
        s_mod = np.zeros_like(sol.s)
        s_mod[sol.i0 + target] = 1.0
        synthetic = dataclasses.replace(sol, s=s_mod)
        expected = 0.625 + target * drive.omega
        assert activation_energy(synthetic) == pytest.approx(expected, rel=1e-12)

    def test_strong_drive_contrast(self, strong_system):
        barrier, drive = strong_system
        act = activation_energy(solve(barrier, drive, IncidentSpec(0.625)))
        sup = activation_energy(solve(barrier, drive, IncidentSpec(0.6125)))
        assert act - sup > 0.1 * barrier.height

    def test_result_within_open_channel_range(self, strong_system):
        barrier, drive = strong_system
        sol = solve(barrier, drive, IncidentSpec(0.6125))
        open_e = sol.channels.energy[sol.open_mask]
        oa = activation_energy(sol)
        assert open_e.min() <= oa <= open_e.max()

    def test_flux_weighted_variant_close(self, strong_system):
        barrier, drive = strong_system
        sol = solve(barrier, drive, IncidentSpec(0.625))
        plain = activation_energy(sol)
        fluxw = activation_energy(sol, flux_weighted=True)
        assert abs(fluxw - plain) < 0.1

    def test_degenerate_when_no_transmission(self, strong_system):
        barrier, drive = strong_system
        sol = solve(barrier, drive, IncidentSpec(0.625))
        synthetic = dataclasses.replace(sol, s=np.zeros_like(sol.s))
        with pytest.raises(DegenerateChannelError):
            activation_energy(synthetic)


class TestSpectrum:
    def test_no_drive_single_entry(self):
        sol = solve(BarrierSpec(1.0, 2.0), DriveSpec(0.0, 0.1), IncidentSpec(0.5))
        spec = spectrum(sol)
        assert len(spec.ns) == 1
        assert spec.ns[0] == 0

    def test_phase_invariance(self, strong_system):
        barrier, drive = strong_system
        a = spectrum(solve(barrier, DriveSpec(drive.beta, drive.omega, 0.0),
                           IncidentSpec(0.625)))
        b = spectrum(solve(barrier, DriveSpec(drive.beta, drive.omega, np.pi / 3),
                           IncidentSpec(0.625)))
        lo, hi = max(a.ns[0], b.ns[0]), min(a.ns[-1], b.ns[-1])
        am = (a.ns >= lo) & (a.ns <= hi)
        bm = (b.ns >= lo) & (b.ns <= hi)
        assert np.allclose(a.abs_s[am], b.abs_s[bm], rtol=1e-10)
        assert np.allclose(a.flux_weight[am], b.flux_weight[bm], rtol=1e-10)

    def test_oscillatory_lobes_below_and_weight_near_top(self, strong_system):
        barrier, drive = strong_system
        spec = spectrum(solve(barrier, drive, IncidentSpec(0.625)))
        rel = spec.abs_s / spec.abs_s.max()
        below = spec.ns < 0
        sign_changes = np.diff(np.sign(np.diff(rel[below])))
        assert (sign_changes != 0).sum() >= 6  # several Airy-like lobes
        near_top = (spec.energy > 0.9) & (spec.energy < 1.1)
        assert rel[near_top].max() > 1e-3

    def test_floor_filters(self, strong_system):
        barrier, drive = strong_system
        sol = solve(barrier, drive, IncidentSpec(0.625))
        tight = spectrum(sol, floor=1e-6)
        loose = spectrum(sol, floor=1e-16)
        assert len(tight.ns) < len(loose.ns)
        assert tight.abs_s.min() > 1e-6


class TestScan:
    def test_determinism(self, strong_system):
        barrier, drive = strong_system
        oms = np.linspace(0.60, 0.66, 7)
        a = scan(barrier, drive, oms)
        b = scan(barrier, drive, oms)
        assert np.array_equal(a.omega_act, b.omega_act)
        assert np.array_equal(a.total_flux, b.total_flux)

    def test_parallel_equals_serial(self, strong_system):
        barrier, drive = strong_system
        oms = np.linspace(0.60, 0.66, 7)
        a = scan(barrier, drive, oms, jobs=1)
        b = scan(barrier, drive, oms, jobs=2)
        assert np.array_equal(a.omega_act, b.omega_act)

    def test_range_validation(self, strong_system):
        barrier, drive = strong_system
        with pytest.raises(ParameterError):
            scan(barrier, drive, np.array([0.7, 0.6]))
        with pytest.raises(ParameterError):
            scan(barrier, drive, np.array([0.5, 1.5]))

    def test_failed_points_marked(self, strong_system):
        barrier, drive = strong_system
        oms = np.linspace(0.60, 0.64, 5)
        result = scan(barrier, drive, oms, SolverOptions(n_cap=64),
                      max_fail_fraction=1.0)
        assert not result.converged.any()
        assert np.isnan(result.omega_act).all()
        with pytest.raises(ScanError):
            scan(barrier, drive, oms, SolverOptions(n_cap=64), max_fail_fraction=0.2)

    def test_no_drive_curve_is_identity(self):
        barrier = BarrierSpec(1.0, 2.0)
        oms = np.linspace(0.3, 0.9, 9)
        result = scan(barrier, DriveSpec(0.0, 0.05), oms)
        assert np.allclose(result.omega_act, oms, atol=1e-12)


class TestFindResonances:
    def test_monotone_scan_empty(self):
        barrier = BarrierSpec(1.0, 3.0)
        drive = DriveSpec(0.05, 0.02)
        oms = np.linspace(0.3, 0.7, 21)
        result = scan(barrier, drive, oms)
        assert find_resonances(result, barrier, drive, refine=False) == []

    def test_strong_regime_minima_found_and_refined(self, resonance_system):
        barrier, drive = resonance_system
        oms = np.arange(0.790, 0.800, 5e-5)
        result = scan(barrier, drive, oms)
        found = find_resonances(result, barrier, drive, refine=True, min_depth=0.05)
        assert len(found) == 1
        res = found[0]
        assert res.refined
        assert res.depth > 0.1
        # refinement idempotence: a second golden pass moves it by < Gamma/10
        gamma = resonance_width(barrier, drive)

        def value(x):
            return activation_energy(solve(barrier, drive, IncidentSpec(x)))

        x2, _ = _golden_min(value, res.omega0 - gamma, res.omega0 + gamma,
                            xtol=gamma / 10.0)
        assert abs(x2 - res.omega0) < gamma / 10.0 + gamma / 20.0

    def test_needs_enough_points(self, resonance_system):
        barrier, drive = resonance_system
        oms = np.linspace(0.79, 0.80, 4)
        result = scan(barrier, drive, oms)
        with pytest.raises(ParameterError):
            find_resonances(result, barrier, drive)


class TestAdiabaticWashout:
    def test_dips_fade_when_spacing_falls_below_width(self):
        # slowing the drive shrinks the dip spacing ~ omega^(2/3); once it
        # falls below Gamma = exp(-beta L / 2) the dips overlap and the
        # selection effect washes out
        import math

        barrier, beta = BarrierSpec(1.0, 6.0), 1.3
        base = 1.0 - beta**2 / 4.0
        gamma = resonance_width(barrier, DriveSpec(beta, 1.0))
        depths = {}
        spacing = {}
        for omega in (0.004, 0.0008):
            x = 1.5 * math.pi * beta * omega
            lo = base + 0.63 * (x * 2.25) ** (2.0 / 3.0)
            hi = base + 0.63 * (x * 5.9) ** (2.0 / 3.0)
            drive = DriveSpec(beta, omega)
            result = scan(barrier, drive, np.linspace(lo, hi, 1200), jobs=2)
            found = find_resonances(result, barrier, drive, refine=False)
            assert len(found) >= 2
            depths[omega] = max(r.depth for r in found)
            spacing[omega] = float(np.mean(np.diff([r.omega0 for r in found])))
        assert spacing[0.004] >= gamma          # resolved ladder
        assert spacing[0.0008] < gamma          # overlapping resonances
        assert depths[0.0008] < 0.45 * depths[0.004]


class TestCompareExactAnalytic:
    def test_refuses_without_drive(self, strong_system):
        barrier, _ = strong_system
        with pytest.raises(RegimeError):
            compare_exact_analytic(barrier, DriveSpec(0.0, 0.0075), IncidentSpec(0.625))

    def test_warns_out_of_regime(self):
        with pytest.warns(RegimeWarning):
            compare_exact_analytic(
                BarrierSpec(1.0, 0.8), DriveSpec(0.2, 0.3), IncidentSpec(0.5)
            )

    def test_normalization_exact_at_match(self, strong_system):
        barrier, drive = strong_system
        rep = compare_exact_analytic(barrier, drive, IncidentSpec(0.625))
        i = rep.norm_index
        assert rep.abs_g[i] == pytest.approx(rep.abs_s[i], rel=1e-12)

    def test_lobe_zeros_align_within_about_one_sideband(self, strong_system):
        barrier, drive = strong_system
        rep = compare_exact_analytic(barrier, drive, IncidentSpec(0.625))
        mid = rep.exact_lobe_minima[
            (rep.exact_lobe_minima >= -35) & (rep.exact_lobe_minima <= -8)
        ]
        assert len(mid) >= 4
        for n_exact in mid:
            nearest = rep.predicted_zero_n[np.argmin(np.abs(rep.predicted_zero_n - n_exact))]
            assert abs(nearest - n_exact) <= 1.25

    def test_lobe_spacing_matches_lattice_step(self, strong_system):
        # adjacent-zero spacing is the sharpest probe of the xi step
        barrier, drive = strong_system
        rep = compare_exact_analytic(barrier, drive, IncidentSpec(0.625))
        mins = rep.exact_lobe_minima
        mid = mins[(mins >= -35) & (mins <= -5)]
        meas = np.diff(mid)
        pred = np.diff(rep.predicted_zero_n)
        assert np.mean(meas) == pytest.approx(np.mean(pred[-len(meas):]), rel=0.2)

    def test_shape_correlation_positive(self, strong_system):
        barrier, drive = strong_system
        rep = compare_exact_analytic(barrier, drive, IncidentSpec(0.625))
        assert rep.shape_corr > 0.7
