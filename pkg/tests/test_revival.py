import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qdephase.channel import Basis
from qdephase.coherence import coherence_xy, coherence_z
from qdephase.decoherence import critical_omega0
from qdephase.errors import DomainError
from qdephase.grid import TimeGrid, Trace
from qdephase.noise import build_spec
from qdephase.nonmarkov import blp_measure
from qdephase.revival import (FULL_REVIVAL_FLOOR, critical_zeeman, detect_revivals, extremum_residual,
                              predict_xy_revivals, predict_z_revivals, resonant_zeeman, verify_prediction)


def spec(omega0, alpha=0.5):
    return build_spec(alpha, omega0, 50.0)


def z_trace(omega0, t_max, alpha=0.5):
    grid = TimeGrid(t_max, int(20 * t_max) + 1)
    return Trace(grid, coherence_z(spec(omega0, alpha), grid.times))


def xy_trace(omega0, omega_k, t_max, alpha=0.5):
    grid = TimeGrid(t_max, int(20 * t_max) + 1)
    return Trace(grid, coherence_xy(spec(omega0, alpha), omega_k, grid.times))


def interior_peaks(trace):
    return [pk for pk in detect_revivals(trace) if not pk.endpoint]


class TestPredictors:
    def test_z_schedule(self):
        pred = predict_z_revivals(0.2514, 100.0)
        assert pred.kind == "full" and pred.basis is Basis.Z
        assert pred.period == pytest.approx(25.0)
        np.testing.assert_allclose(pred.times, [25, 50, 75, 100], atol=1e-9)

    def test_three_revivals_in_short_window(self):
        pred = predict_z_revivals(0.3771, 50.0)
        assert pred.kind == "full" and len(pred.times) == 3

    def test_single_period(self):
        pred = predict_z_revivals(6.285, 1.0)
        assert pred.times == pytest.approx([1.0])

    def test_non_integer_is_partial(self):
        pred = predict_z_revivals(0.2, 100.0)
        assert pred.kind == "partial"
        np.testing.assert_allclose(pred.times, [6.285 / 0.2 * n for n in (1, 2, 3)])

    def test_xy_full_needs_resonance(self):
        assert predict_xy_revivals(0.2514, 0.1257, 100.0).kind == "full"
        assert predict_xy_revivals(0.2514, 0.3, 100.0).kind == "partial"
        assert predict_xy_revivals(0.2514, 0.1257, 100.0, Basis.Y).basis is Basis.Y

    @given(st.integers(1, 8), st.floats(10.0, 500.0))
    def test_times_are_period_multiples(self, n, t_max):
        w0 = n * 6.285 / t_max
        pred = predict_z_revivals(w0, t_max)
        assert pred.kind == "full" and len(pred.times) == n
        np.testing.assert_allclose(pred.times, pred.period * np.arange(1, n + 1))
        assert pred.period == pytest.approx(6.285 / w0)

    def test_invalid(self):
        with pytest.raises(DomainError):
            predict_z_revivals(0.0, 100.0)
        with pytest.raises(DomainError):
            predict_xy_revivals(0.1, 0.1, -1.0)


class TestZeeman:
    def test_critical_values(self):
        assert critical_zeeman(100.0) == pytest.approx(0.0157, abs=1e-4)
        assert critical_zeeman(50.0) == pytest.approx(0.0314, abs=1e-4)
        assert critical_zeeman(200.0) == pytest.approx(critical_zeeman(100.0) / 2)

    @pytest.mark.parametrize("w0,expected", [(0.2514, 0.1257), (0.3771, 0.1885), (6.285, math.pi)])
    def test_resonant_values(self, w0, expected):
        assert resonant_zeeman(w0) == pytest.approx(expected, abs=1e-4)

    def test_invalid(self):
        with pytest.raises(DomainError):
            critical_zeeman(0.0)
        with pytest.raises(DomainError):
            resonant_zeeman(-1.0)


class TestExtremumResidual:
    def test_noiseless_zero_at_half_turns(self):
        s = spec(0.1, alpha=0.0)
        for m in range(4):
            assert extremum_residual(s, 0.3, m * math.pi / 0.3) == pytest.approx(0.0, abs=1e-12)

    def test_zero_at_origin(self):
        assert extremum_residual(spec(0.1), 0.3, 0.0) == 0.0

    def test_vanishes_at_detected_maximum(self):
        # dense-grid local maximum of the X coherence away from |cos| cusps
        s = spec(0.03)
        wk = 0.05
        t = np.linspace(40.0, 80.0, 400001)
        c = coherence_xy(s, wk, t)
        i = int(np.argmax(c))
        assert 0 < i < t.size - 1
        assert abs(extremum_residual(s, wk, t[i])) <= 1e-3 * wk

    def test_pole(self):
        with pytest.raises(DomainError):
            extremum_residual(spec(0.1), 1.0, math.pi / 2)


class TestDetectRevivals:
    def test_monotone_decay_has_none(self):
        grid = TimeGrid(10.0, 101)
        assert detect_revivals(Trace(grid, np.exp(-grid.times))) == []

    def test_four_z_revivals(self):
        peaks = detect_revivals(z_trace(0.2514, 100.0), floor=FULL_REVIVAL_FLOOR)
        assert len(peaks) == 4
        for pk, expected in zip(peaks, (25, 50, 75, 100)):
            assert abs(pk.time - expected) <= 0.5 and pk.value >= 0.98
        assert peaks[-1].time == pytest.approx(100.0, abs=0.5)

    def test_rising_endpoint(self):
        grid = TimeGrid(1.0, 11)
        peaks = detect_revivals(Trace(grid, grid.times))
        assert len(peaks) == 1 and peaks[0].endpoint and peaks[0].time == 1.0

    def test_prominence_filters_ripple(self):
        grid = TimeGrid(10.0, 1001)
        y = np.exp(-0.2 * grid.times) + 1e-3 * np.sin(20 * grid.times)
        assert interior_peaks(Trace(grid, y)) == []
        assert interior_peaks(Trace(grid, np.cos(grid.times) ** 2))

    def test_floor(self):
        grid = TimeGrid(20.0, 2001)
        y = 0.5 + 0.4 * np.cos(grid.times)
        assert detect_revivals(Trace(grid, y), floor=0.95) == []
        assert len(interior_peaks(Trace(grid, y))) == 3

    def test_markovian_revival_in_x_basis(self):
        assert len(interior_peaks(xy_trace(0.03, 0.05, 100.0))) >= 1


class TestVerifyPrediction:
    def test_z_short_window(self):
        report = verify_prediction(predict_z_revivals(0.3771, 50.0), z_trace(0.3771, 50.0))
        assert report.passed and report.n_matched == 3

    def test_x_long_window(self):
        w0, wk = 0.0943, 0.0471
        report = verify_prediction(predict_xy_revivals(w0, wk, 200.0), xy_trace(w0, wk, 200.0))
        assert report.passed and report.n_matched == 3
        assert all(m.value >= 0.98 for m in report.matches)

    def test_degenerate_flat_trace(self):
        grid = TimeGrid(100.0, 2001)
        trace = Trace(grid, coherence_xy(spec(0.2, alpha=0.0), 0.0, grid.times))
        report = verify_prediction(predict_xy_revivals(0.2, 0.0, 100.0), trace)
        assert report.degenerate and report.passed and report.prediction.kind == "partial"

    def test_mismatched_zeeman_fails_full_floor(self):
        report = verify_prediction(predict_z_revivals(0.2514, 100.0), xy_trace(0.2514, 0.3, 100.0))
        assert min(m.value for m in report.matches) < 0.9

    def test_window_too_short(self):
        with pytest.raises(DomainError):
            verify_prediction(predict_z_revivals(0.2514, 100.0), z_trace(0.2514, 50.0))


class TestProperties:
    @pytest.mark.parametrize("wk", [0.05, 0.3])
    def test_markovian_revival_above_critical_zeeman(self, wk):
        assert blp_measure(spec(0.03), TimeGrid(100.0)).measure == 0
        assert wk > critical_zeeman(100.0)
        assert len(interior_peaks(xy_trace(0.03, wk, 100.0))) >= 1

    @pytest.mark.parametrize("wk", [0.005, 0.0157])
    def test_no_revival_below_critical_zeeman(self, wk):
        assert wk <= critical_zeeman(100.0) + 1e-4
        assert interior_peaks(xy_trace(0.03, wk, 100.0)) == []

    @pytest.mark.parametrize("n,t_max", [(4, 100.0), (3, 50.0), (3, 200.0), (2, 100.0)])
    def test_resonance_gives_full_revivals(self, n, t_max):
        w0 = n * 6.285 / t_max
        report = verify_prediction(predict_xy_revivals(w0, resonant_zeeman(w0), t_max),
                                   xy_trace(w0, resonant_zeeman(w0), t_max))
        assert report.passed
        assert all(m.value >= 0.98 for m in report.matches)

    @given(st.floats(0.002, 0.0310), st.floats(0.1, 2.0))
    def test_z_coherence_non_increasing_when_markovian(self, w0, alpha):
        assert w0 < critical_omega0(100.0)
        y = z_trace(w0, 100.0, alpha).values
        assert np.all(np.diff(y) <= 1e-9)
