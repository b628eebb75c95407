"""Oscillator dynamics, integration accuracy, and oscillation analysis."""

import math

import numpy as np
import pytest

from gaitsynth.oscillator import (
    CANONICAL_INITIAL,
    CANONICAL_PARAMS,
    DivergenceError,
    FeedbackSignal,
    OscillatorParams,
    OscillatorState,
    ParameterError,
    analyze,
    derivatives,
    rectify,
    series_to_csv,
    simulate,
    step,
)


def test_rectify():
    assert rectify(3.2) == 3.2
    assert rectify(-1.7) == 0.0
    assert rectify(0.0) == 0.0
    assert np.array_equal(rectify(np.array([-1.0, 2.0])), [0.0, 2.0])


class TestParams:
    def test_valid(self):
        p = OscillatorParams(tau1=0.5, tau2=1.0, beta=2.5, gamma=2.5, alpha=0.0, c=1.0)
        assert p.tau1 == 0.5

    @pytest.mark.parametrize("tau1,tau2", [(0.0, 1.0), (1e-7, 1.0), (1.0, 0.0), (-1.0, 1.0)])
    def test_tiny_tau_rejected(self, tau1, tau2):
        with pytest.raises(ParameterError):
            OscillatorParams(tau1=tau1, tau2=tau2, beta=0.0, gamma=0.0, alpha=0.0, c=0.0)

    def test_nonfinite_rejected(self):
        with pytest.raises(ParameterError):
            OscillatorParams(tau1=1.0, tau2=1.0, beta=float("nan"), gamma=0.0,
                             alpha=0.0, c=0.0)


class TestDerivatives:
    def test_origin_equilibrium_when_unforced(self):
        p = OscillatorParams(tau1=1.0, tau2=1.0, beta=2.0, gamma=3.0, alpha=1.0, c=0.0)
        d = derivatives(OscillatorState(0, 0, 0, 0), p)
        assert d == OscillatorState(0.0, 0.0, 0.0, 0.0)

    def test_direct_substitution(self):
        p = OscillatorParams(tau1=1.0, tau2=1.0, beta=0.0, gamma=0.0, alpha=0.0, c=0.0)
        d = derivatives(OscillatorState(1.0, 0.0, 0.0, 0.0), p)
        assert d == OscillatorState(-1.0, 1.0, 0.0, 0.0)

    def test_hand_evaluated_case(self):
        # Independent hand evaluation of the four closed-form rates for
        # state (0.5, 0.2, -0.3, 0.1), tau=(1, 2), beta=2.5, gamma=2.0,
        # c=1, alpha=1, uf=(0.1, -0.1).
        p = OscillatorParams(tau1=1.0, tau2=2.0, beta=2.5, gamma=2.0, alpha=1.0, c=1.0)
        d = derivatives(OscillatorState(0.5, 0.2, -0.3, 0.1), p,
                        FeedbackSignal(0.1, -0.1))
        expected = (-0.1, 0.15, 0.15, -0.05)
        assert d == pytest.approx(expected, abs=1e-12)


class TestStep:
    def test_fixed_point_preserved_exactly(self):
        p = OscillatorParams(tau1=0.7, tau2=1.3, beta=2.0, gamma=1.5, alpha=0.5, c=0.0)
        s = step(OscillatorState(0, 0, 0, 0), p)
        assert s == OscillatorState(0.0, 0.0, 0.0, 0.0)

    def test_neuron_exchange_symmetry_exact(self):
        p = CANONICAL_PARAMS
        s = OscillatorState(0.3, -0.2, 0.7, 0.1)
        fb = FeedbackSignal(0.05, -0.08)
        a = step(s, p, fb)
        b = step(OscillatorState(s.x2, s.v2, s.x1, s.v1), p,
                 FeedbackSignal(fb.uf2, fb.uf1))
        assert (a.x1, a.v1, a.x2, a.v2) == (b.x2, b.v2, b.x1, b.v1)

    def test_dt_validation(self):
        with pytest.raises(ParameterError):
            step(CANONICAL_INITIAL, CANONICAL_PARAMS, dt=0.05)
        with pytest.raises(ParameterError):
            step(CANONICAL_INITIAL, CANONICAL_PARAMS, dt=0.0)

    def test_divergence_error(self):
        with pytest.raises(DivergenceError):
            step(OscillatorState(1e308, 0.0, -1e308, 0.0), CANONICAL_PARAMS)


class TestSimulate:
    def test_sample_count(self):
        series = simulate(CANONICAL_PARAMS, duration=15.0, dt=0.02)
        assert series.shape == (751, 4)

    def test_symmetric_start_stays_on_diagonal(self):
        s0 = OscillatorState(0.3, 0.1, 0.3, 0.1)
        series = simulate(CANONICAL_PARAMS, s0, duration=5.0, dt=0.02)
        assert np.array_equal(series[:, 0], series[:, 2])
        assert np.array_equal(series[:, 1], series[:, 3])

    def test_deterministic(self):
        a = simulate(CANONICAL_PARAMS, duration=3.0, dt=0.02)
        b = simulate(CANONICAL_PARAMS, duration=3.0, dt=0.02)
        assert np.array_equal(a, b)

    def test_duration_validation(self):
        with pytest.raises(ParameterError):
            simulate(CANONICAL_PARAMS, duration=-1.0)

    def test_feedback_source_is_used(self):
        fb = lambda t: FeedbackSignal(0.5, 0.5)  # noqa: E731
        p = OscillatorParams(tau1=0.5, tau2=1.0, beta=2.5, gamma=2.5, alpha=1.0, c=1.0)
        with_fb = simulate(p, fb_source=fb, duration=2.0)
        without = simulate(p, duration=2.0)
        assert not np.array_equal(with_fb, without)

    def test_matches_fine_reference(self):
        coarse = simulate(CANONICAL_PARAMS, CANONICAL_INITIAL, duration=4.0, dt=0.02)
        fine = simulate(CANONICAL_PARAMS, CANONICAL_INITIAL, duration=4.0, dt=0.0005)
        assert np.abs(coarse - fine[::40]).max() < 1e-4

    def test_fourth_order_on_smooth_branch(self):
        # On the symmetric diagonal with the canonical parameters the
        # trajectory decays toward the interior equilibrium c/(1+beta+gamma)
        # without any rectifier switching, so the vector field stays smooth
        # and the integrator must show its full order there.
        s0 = OscillatorState(0.1, 0.05, 0.1, 0.05)
        check = simulate(CANONICAL_PARAMS, s0, duration=2.0, dt=0.0002)
        assert check.min() > 0.0  # no sign change: single smooth branch
        errs = {}
        for dt in (0.02, 0.01):
            run = simulate(CANONICAL_PARAMS, s0, duration=2.0, dt=dt)
            oracle = simulate(CANONICAL_PARAMS, s0, duration=2.0, dt=dt / 100)
            errs[dt] = np.abs(run - oracle[::100]).max()
        assert errs[0.02] / errs[0.01] > 8.0

    def test_bounded_over_sixty_seconds(self):
        series = simulate(CANONICAL_PARAMS, CANONICAL_INITIAL, duration=60.0, dt=0.02)
        assert series.min() >= -50.0 and series.max() <= 50.0

    def test_rectified_outputs_nonnegative(self):
        series = simulate(CANONICAL_PARAMS, CANONICAL_INITIAL, duration=20.0, dt=0.02)
        assert rectify(series[:, 0]).min() >= 0.0
        assert rectify(series[:, 2]).min() >= 0.0


def _upward_crossing_times(d, dt):
    idx = np.flatnonzero((d[:-1] <= 0.0) & (d[1:] > 0.0))
    frac = -d[idx] / (d[idx + 1] - d[idx])
    return (idx + frac) * dt


class TestAnalyze:
    def test_constant_series_not_oscillating(self):
        series = np.tile([0.2, 0.1, 0.2, 0.1], (500, 1))
        rep = analyze(series, 0.02)
        assert not rep.sustained
        assert math.isnan(rep.period)

    def test_synthetic_known_period(self):
        dt = 0.01
        t = np.arange(0, 10, dt)
        x1 = np.maximum(np.sin(2 * np.pi * t), 0.0)
        x2 = np.maximum(np.sin(2 * np.pi * (t - 0.5)), 0.0)
        series = np.column_stack([x1, np.zeros_like(t), x2, np.zeros_like(t)])
        rep = analyze(series, dt)
        assert rep.sustained
        assert rep.period == pytest.approx(1.0, abs=dt)
        assert rep.phase_difference == pytest.approx(0.5, abs=0.02)

    def test_canonical_period_matches_fine_oracle(self):
        # Independent oracle: upward zero-crossing spacing of y1 - y2 on a
        # reference run integrated at dt/100.
        dt = 0.02
        series = simulate(CANONICAL_PARAMS, CANONICAL_INITIAL, duration=60.0, dt=dt)
        rep = analyze(series, dt)
        assert rep.sustained

        fine_dt = dt / 100
        fine = simulate(CANONICAL_PARAMS, CANONICAL_INITIAL, duration=60.0, dt=fine_dt)
        y1 = np.maximum(fine[:, 0], 0.0)
        y2 = np.maximum(fine[:, 2], 0.0)
        skip = int(0.2 * len(fine))
        crossings = _upward_crossing_times((y1 - y2)[skip:], fine_dt)
        oracle_period = np.diff(crossings).mean()
        assert rep.period == pytest.approx(oracle_period, rel=0.02)

    def test_canonical_antiphase(self):
        series = simulate(CANONICAL_PARAMS, CANONICAL_INITIAL, duration=60.0, dt=0.02)
        rep = analyze(series, 0.02)
        assert rep.sustained
        assert 0.4 <= rep.phase_difference <= 0.6

    @pytest.mark.parametrize("tau1,tau2,beta,gamma,c", [
        (0.15, 0.3, 2.5, 2.5, 3.0),
        (0.1, 0.2, 2.5, 2.5, 4.0),
        (0.1, 0.3, 2.0, 2.0, 4.0),
    ])
    def test_sustained_implies_antiphase(self, tau1, tau2, beta, gamma, c):
        # Whenever a run is reported as sustained, the two outputs must sit
        # half a period apart.
        p = OscillatorParams(tau1=tau1, tau2=tau2, beta=beta, gamma=gamma,
                             alpha=0.0, c=c)
        rep = analyze(simulate(p, CANONICAL_INITIAL, duration=15.0, dt=0.02), 0.02)
        assert rep.sustained
        assert 0.4 <= rep.phase_difference <= 0.6

    def test_shape_validation(self):
        with pytest.raises(ParameterError):
            analyze(np.zeros((10, 3)), 0.02)


def test_series_csv_export(tmp_path):
    series = simulate(CANONICAL_PARAMS, duration=1.0, dt=0.02)
    path = tmp_path / "osc.csv"
    series_to_csv(path, series, 0.02)
    lines = path.read_text().splitlines()
    assert lines[0] == "t,x1,v1,x2,v2,y1,y2"
    assert len(lines) == 52  # header + 51 samples
    first = lines[1].split(",")
    assert first[0] == "0.0000"
    # values are repr floats that round-trip exactly
    assert float(first[1]) == series[0, 0]
    y1 = float(first[5])
    assert y1 == max(series[0, 0], 0.0)
