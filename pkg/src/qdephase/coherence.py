"""l1-norm coherence, basis-dependent coherence traces and long-time averages."""

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from qdephase.decoherence import gamma_exact
from qdephase.errors import DomainError
from qdephase.grid import TimeGrid, Trace  # noqa: F401  (re-exported)
from qdephase.noise import build_spec

DEATH_THRESHOLD = 0.01


def l1_coherence(rho):
    """Sum of absolute off-diagonal entries; ``2 |rho01|`` for a qubit."""
    rho = np.asarray(rho)
    off = np.abs(rho).sum(axis=(-2, -1)) - np.abs(np.diagonal(rho, axis1=-2, axis2=-1)).sum(axis=-1)
    return off if off.ndim else float(off)


def coherence_z(spec, t):
    """sigma_z-basis coherence of the canonical input, ``exp(-2 Gamma(t))``."""
    value = np.exp(-2.0 * gamma_exact(spec, t))
    return value if np.ndim(t) else float(value)


def coherence_xy_terms(spec, omega_k, t):
    """Return the oscillation term ``|cos(omega_k t)|`` and decay term ``exp(-2 Gamma)``."""
    t_arr = np.asarray(t, dtype=float)
    return np.abs(np.cos(omega_k * t_arr)), np.exp(-2.0 * gamma_exact(spec, t_arr))


def coherence_xy(spec, omega_k, t):
    """sigma_x / sigma_y coherence of the phi = pi/2 input, ``|cos(omega_k t)| exp(-2 Gamma)``."""
    osc, decay = coherence_xy_terms(spec, omega_k, t)
    value = osc * decay
    return value if np.ndim(t) else float(value)


def coherence_xy_general(spec, omega_k, phi, t):
    """X-basis coherence for arbitrary input phase ``phi``.

    ``sqrt(cos^2 phi + sin^2 phi cos^2(omega_k t) exp(-4 Gamma))``; reduces to
    :func:`coherence_xy` at ``phi = pi/2``.
    """
    osc, decay = coherence_xy_terms(spec, omega_k, t)
    value = np.sqrt(math.cos(phi) ** 2 + math.sin(phi) ** 2 * (osc * decay) ** 2)
    return value if np.ndim(t) else float(value)


# -- long-time average ------------------------------------------------------------

@dataclass
class TimeAverage:
    """Outcome of :func:`time_avg_coherence`.

    ``value`` is the average over ``[0, T]`` and ``value_half`` over ``[0, T/2]``;
    ``history`` lists ``(T, value)`` for every horizon tried.
    """

    value: float
    value_half: float
    T: float
    relative_change: float
    converged: bool
    history: list = field(default_factory=list)


@lru_cache(maxsize=64)
def _unit_gamma_period(omega0, omegaJ, p, n_per_period):
    # Gamma / alpha^2 on one exact period; the comb sum is 2 pi / omega0 periodic.
    spec = build_spec(1.0, omega0, omegaJ, p)
    t = np.arange(n_per_period) * (2 * math.pi / omega0 / n_per_period)
    g = gamma_exact(spec, t)
    g.setflags(write=False)
    return g


def _points_per_period(spec, omega_k):
    period = 2 * math.pi / spec.omega0
    shortest = min(period, 2 * math.pi / omega_k) if omega_k > 0 else period
    # resolve both periods (>= 50 samples each) and the decay spikes near the
    # Gamma minima, whose width shrinks like 1 / alpha^2
    n = max(50 * math.ceil(period / shortest), math.ceil(400 * (1 + spec.alpha ** 2)))
    return int(n)


class _RunningIntegral:
    """Trapezoid integral of |cos(omega_k t)| * decay(t) on the grid t_i = i dt.

    ``decay`` is sampled on one period and tiled; partial sums are kept so that
    extending the horizon only evaluates the new samples.
    """

    _BLOCK = 2_000_000

    def __init__(self, decay_period, omega0, omega_k):
        self.decay = decay_period
        self.omega_k = omega_k
        self.dt = 2 * math.pi / omega0 / decay_period.size
        self.n = -1
        self.total = 0.0

    def _f(self, idx):
        return np.abs(np.cos(self.omega_k * (idx * self.dt))) * self.decay[idx % self.decay.size]

    def extend(self, n):
        """Advance the partial sum to sample ``n``."""
        for start in range(self.n + 1, n + 1, self._BLOCK):
            idx = np.arange(start, min(start + self._BLOCK, n + 1))
            self.total += float(np.sum(self._f(idx)))
        self.n = max(self.n, n)

    def average(self, n):
        """Average over ``[0, n dt]``; requires ``n == self.n``."""
        ends = self._f(np.array([0, n]))
        return self.dt * (self.total - 0.5 * ends.sum()) / (n * self.dt)


def time_avg_coherence(spec, omega_k, T=None, convergence_tol=1e-3, max_doublings=8,
                       points_per_period=None):
    """Long-time average ``(1/T) int_0^T |cos(omega_k t)| exp(-2 Gamma(t)) dt``.

    The horizon starts at ``T`` (default ``20 max(2 pi/omega0, 2 pi/omega_k)``) and
    is doubled until the averages over ``T/2`` and ``T`` differ by at most
    ``convergence_tol`` relative, or ``max_doublings`` is exhausted.  Set
    ``max_doublings=0`` to evaluate a single fixed horizon.  Non-convergence is
    reported through ``converged``, never raised.
    """
    if omega_k < 0:
        raise DomainError(f"omega_k must be >= 0, got {omega_k}")
    period = 2 * math.pi / spec.omega0
    if T is None:
        longest = max(period, 2 * math.pi / omega_k) if omega_k > 0 else period
        T = 20 * longest
    if not T > 0:
        raise DomainError(f"T must be > 0, got {T}")

    m = int(points_per_period or _points_per_period(spec, omega_k))
    decay = np.exp(-2 * spec.alpha ** 2 * _unit_gamma_period(spec.omega0, spec.omegaJ, spec.p, m))
    dt = period / m

    integral = _RunningIntegral(decay, spec.omega0, omega_k)
    n_steps = 2 * max(1, math.ceil(T / dt / 2))
    integral.extend(n_steps // 2)
    half = integral.average(n_steps // 2)
    history = []
    for k in range(max_doublings + 1):
        if k:
            n_steps *= 2
            half = full
        integral.extend(n_steps)
        full = integral.average(n_steps)
        T_eff = n_steps * dt
        history.append((T_eff, full))
        change = abs(full - half) / max(abs(full), 1e-300)
        if change <= convergence_tol:
            return TimeAverage(full, half, T_eff, change, True, history)
    return TimeAverage(full, half, T_eff, change, False, history)


@dataclass
class AlphaCritResult:
    """Coherence-death threshold from :func:`alpha_crit_scan`.

    ``alpha_crit`` is ``None`` when ``status == "not-in-range"``.  ``scan`` holds
    the coarse ``(alpha, <C>)`` samples; ``monotone`` records whether they were
    non-increasing as the bisection assumes.
    """

    alpha_crit: float | None
    status: str
    monotone: bool
    scan: list


def alpha_crit_scan(omega0, omega_k, omegaJ=50.0, T=None, alpha_range=(0.0, 5.0), step=0.05,
                    resolution=1e-3, threshold=DEATH_THRESHOLD, convergence_tol=1e-3, p=0.0,
                    known=None):
    """Smallest noise strength with ``<C> < threshold`` (coherence death).

    A coarse scan with spacing ``step`` brackets the first crossing, then
    bisection narrows it to ``resolution``.  ``known`` maps coarse-grid alphas to
    averages already computed with the same settings; those are not recomputed.
    """
    lo_a, hi_a = alpha_range
    if not hi_a > lo_a or step <= 0:
        raise DomainError("alpha_range must be ascending and step > 0")
    # fix the sampling density for the whole scan so <C>(alpha) is smooth
    m = _points_per_period(build_spec(hi_a, omega0, omegaJ, p), omega_k)

    def avg(alpha):
        spec = build_spec(alpha, omega0, omegaJ, p)
        return time_avg_coherence(spec, omega_k, T, convergence_tol, points_per_period=m).value

    alphas = np.arange(lo_a, hi_a + 0.5 * step, step)
    scan = []
    crossing = None
    known = known or {}
    for a in alphas:
        c = known[float(a)] if float(a) in known else avg(float(a))
        scan.append((float(a), c))
        if c < threshold:
            crossing = len(scan) - 1
            break
    values = [c for _, c in scan]
    monotone = all(b <= a * (1 + 1e-6) for a, b in zip(values, values[1:]))
    if crossing is None:
        return AlphaCritResult(None, "not-in-range", monotone, scan)
    if crossing == 0:
        return AlphaCritResult(scan[0][0], "below-range", monotone, scan)
    lo, hi = scan[crossing - 1][0], scan[crossing][0]
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        if avg(mid) < threshold:
            hi = mid
        else:
            lo = mid
    return AlphaCritResult(hi, "ok", monotone, scan)
