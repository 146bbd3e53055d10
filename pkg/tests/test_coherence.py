import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qdephase.channel import Basis, analytic_state, canonical_state, pure_state, transform_basis
from qdephase.coherence import (AlphaCritResult, TimeGrid, Trace, alpha_crit_scan, coherence_xy,
                                coherence_xy_general, coherence_xy_terms, coherence_z, l1_coherence,
                                time_avg_coherence)
from qdephase.decoherence import gamma_exact
from qdephase.errors import DomainError
from qdephase.noise import build_spec


def test_l1_examples():
    assert l1_coherence(np.eye(2) / 2) == 0.0
    assert l1_coherence(pure_state([1, 1])) == pytest.approx(1.0)
    assert l1_coherence(np.array([[0.5, 0.3], [0.3, 0.5]])) == pytest.approx(0.6)
    stack = np.stack([np.eye(2) / 2, pure_state([1, 1])])
    np.testing.assert_allclose(l1_coherence(stack), [0.0, 1.0])


def test_coherence_z():
    spec = build_spec(0.5, 0.2514, 50.0)
    assert coherence_z(spec, 0.0) == 1.0
    assert coherence_z(spec, 25.0) >= 0.98
    assert math.exp(-2 * 3.0) == pytest.approx(0.0025, abs=1e-4)


def test_coherence_xy():
    spec = build_spec(0.5, 0.2514, 50.0)
    assert coherence_xy(spec, 0.1257, 0.0) == 1.0
    assert coherence_xy(spec, 0.1257, math.pi / 2 / 0.1257) < 1e-12
    assert coherence_xy(spec, 0.1257, 50.0) >= 0.98
    osc, decay = coherence_xy_terms(spec, 0.3, np.array([0.0, 10.0]))
    np.testing.assert_allclose(osc, [1.0, abs(math.cos(3.0))])
    np.testing.assert_allclose(decay, np.exp(-2 * gamma_exact(spec, np.array([0.0, 10.0]))))


@given(st.floats(0.0, 200.0), st.floats(0.0, 2.0), st.floats(0.0, 2 * math.pi))
def test_coherence_bounded(t, omega_k, phi):
    spec = build_spec(0.7, 0.06285, 50.0)
    for c in (coherence_z(spec, t), coherence_xy(spec, omega_k, t),
              coherence_xy_general(spec, omega_k, phi, t)):
        assert 0.0 <= c <= 1.0 + 1e-15


def test_general_phase_reduces_to_canonical():
    spec = build_spec(0.5, 0.06285, 50.0)
    t = np.linspace(0, 100, 101)
    np.testing.assert_allclose(coherence_xy_general(spec, 0.3, math.pi / 2, t),
                               coherence_xy(spec, 0.3, t), atol=1e-15)
    np.testing.assert_allclose(coherence_xy_general(spec, 0.3, 0.0, t), 1.0)


@pytest.mark.parametrize("basis", [Basis.X, Basis.Y])
def test_general_phase_matches_simulation(basis):
    spec = build_spec(0.5, 0.06285, 50.0)
    t = np.linspace(0, 100, 101)
    for phi in (0.4, 1.1, 2.8):
        rho = transform_basis(analytic_state(spec, 0.3, canonical_state(basis, phi), t), basis)
        np.testing.assert_allclose(l1_coherence(rho), coherence_xy_general(spec, 0.3, phi, t),
                                   atol=1e-12)


def test_trace_and_grid_validation():
    grid = TimeGrid(10.0, 11)
    assert grid.dt == 1.0 and len(grid) == 11
    trace = Trace.sample(np.cos, grid)
    np.testing.assert_array_equal(trace.times, grid.times)
    for bad in ((0.0, 11), (10.0, 1), (10.0, 2.5)):
        with pytest.raises(DomainError):
            TimeGrid(*bad)
    with pytest.raises(DomainError):
        Trace(grid, np.zeros(5))
    with pytest.raises(DomainError):
        Trace(grid, np.full(11, np.nan))


def test_average_without_noise_is_two_over_pi():
    res = time_avg_coherence(build_spec(0.0, 0.03, 50.0), 0.1258)
    assert res.converged
    assert res.value == pytest.approx(2 / math.pi, abs=1e-3)
    assert res.relative_change <= 1e-3
    assert res.history[-1] == (res.T, res.value)


def test_average_matches_direct_quadrature():
    spec = build_spec(0.8, 0.1, 50.0)
    T = 2000.0
    res = time_avg_coherence(spec, 0.37, T=T, max_doublings=0)
    t = np.linspace(0, res.T, 400_001)
    direct = np.trapezoid(coherence_xy(spec, 0.37, t), t) / res.T
    assert res.value == pytest.approx(direct, rel=1e-4)


def test_average_large_alpha_asymptote():
    # infinite-cutoff limit: mean of exp(-2 a^2 x(pi - x)) over a period ~ 1/(a^2 pi^2),
    # times the mean 2/pi of |cos|
    for alpha in (2.0, 3.0):
        res = time_avg_coherence(build_spec(alpha, 0.03, 50.0), 0.1258)
        assert res.converged
        assert res.value == pytest.approx(2 / (math.pi ** 3 * alpha ** 2), rel=0.1)


def test_coherence_death_at_large_alpha():
    assert time_avg_coherence(build_spec(3.0, 0.03, 50.0), 0.1258).value < 0.01


def test_nonconvergence_is_reported():
    res = time_avg_coherence(build_spec(0.5, 0.03, 50.0), 0.001, T=10.0, max_doublings=0)
    assert not res.converged


def test_average_rejects_bad_input():
    spec = build_spec(0.5, 0.03, 50.0)
    with pytest.raises(DomainError):
        time_avg_coherence(spec, -1.0)
    with pytest.raises(DomainError):
        time_avg_coherence(spec, 1.0, T=0.0)


def test_alpha_crit_scan_brackets_threshold():
    res = alpha_crit_scan(0.1, 0.1258, alpha_range=(0.0, 4.0), step=0.25, resolution=1e-3)
    assert isinstance(res, AlphaCritResult)
    assert res.status == "ok" and res.monotone
    assert res.scan[0][1] >= 0.6
    a = res.alpha_crit
    spec = lambda x: build_spec(x, 0.1, 50.0)  # noqa: E731
    assert time_avg_coherence(spec(a), 0.1258).value < 0.01
    assert time_avg_coherence(spec(a - 2e-3), 0.1258).value >= 0.01


def test_alpha_crit_not_in_range():
    res = alpha_crit_scan(0.5, 0.1258, alpha_range=(0.0, 1.0), step=0.5)
    assert res.alpha_crit is None and res.status == "not-in-range"
    with pytest.raises(DomainError):
        alpha_crit_scan(0.5, 0.1258, alpha_range=(1.0, 0.5))
