"""Trace distance, the BLP non-Markovianity measure and its critical frequency."""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from qdephase.decoherence import FIT_LINEAR, FIT_PEAK_RATIO, critical_omega0, gamma_dot, gamma_exact
from qdephase.errors import DomainError
from qdephase.grid import TimeGrid
from qdephase.noise import build_spec


def trace_distance(rho1, rho2):
    """``D = 1/2 ||rho1 - rho2||_1`` from the eigenvalues of the Hermitian difference."""
    diff = np.asarray(rho1, dtype=complex) - np.asarray(rho2, dtype=complex)
    diff = 0.5 * (diff + np.conj(np.swapaxes(diff, -1, -2)))
    value = 0.5 * np.abs(np.linalg.eigvalsh(diff)).sum(axis=-1)
    return value if np.ndim(value) else float(value)


@dataclass
class BlpReport:
    """BLP measure over a window.

    Attributes
    ----------
    window : TimeGrid
    measure : float
        ``N = -2 int_{Gamma_dot < 0} Gamma_dot exp(-2 Gamma) dt``.
    increasing_intervals : list of (float, float)
        Disjoint, ordered intervals on which the trace distance grows.
    t_s : float or None
        Earliest time at which ``N`` becomes positive.
    """

    window: TimeGrid
    measure: float
    increasing_intervals: list = field(default_factory=list)
    t_s: float | None = None


def _root(f, a, b, xtol):
    return brentq(f, a, b, xtol=xtol, rtol=4 * np.finfo(float).eps)


def decreasing_intervals(spec, window, xtol=1e-6):
    """Intervals of ``window`` where ``gamma_dot < 0``, edges refined by bisection."""
    t = window.times
    gd = gamma_dot(spec, t)
    neg = gd < 0

    def f(x):
        return gamma_dot(spec, x)

    intervals = []
    i = 0
    n = t.size
    while i < n:
        if not neg[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and neg[j + 1]:
            j += 1
        if i == 0:
            start = t[0]
        elif gd[i - 1] == 0.0:
            start = t[i - 1]
        else:
            start = _root(f, t[i - 1], t[i], xtol)
        if j == n - 1:
            end = t[-1]
        elif gd[j + 1] == 0.0:
            end = t[j + 1]
        else:
            end = _root(f, t[j], t[j + 1], xtol)
        intervals.append((float(start), float(end)))
        i = j + 1
    return intervals


def blp_measure(spec, window, xtol=1e-6):
    """BLP measure of the dephasing dynamics over ``window``.

    The integrand ``-2 Gamma_dot exp(-2 Gamma)`` is the derivative of the trace
    distance ``exp(-2 Gamma)`` of the optimal antipodal pair, so each interval
    with ``Gamma_dot < 0`` contributes exactly
    ``exp(-2 Gamma(t_end)) - exp(-2 Gamma(t_start))``.
    """
    if not isinstance(window, TimeGrid):
        window = TimeGrid(float(window))
    intervals = decreasing_intervals(spec, window, xtol)
    total = 0.0
    kept = []
    for a, b in intervals:
        d_a, d_b = np.exp(-2.0 * gamma_exact(spec, np.array([a, b])))
        gain = d_b - d_a
        if gain > 0:
            total += gain
            kept.append((a, b))
    t_s = kept[0][0] if kept else None
    return BlpReport(window, float(total), kept, t_s)


def blp_riemann(spec, window, refine=10):
    """Brute-force check: trapezoid integral of ``max(0, -2 Gamma_dot e^{-2 Gamma})``.

    Uses a grid ``refine`` times finer than ``window``.
    """
    n = (len(window) - 1) * refine + 1
    t = np.linspace(0.0, window.t_max, n)
    integrand = np.maximum(0.0, -2.0 * gamma_dot(spec, t) * np.exp(-2.0 * gamma_exact(spec, t)))
    return float(np.trapezoid(integrand, t))


def earliest_nonmarkov_time(omega0, alpha=0.5, omegaJ=50.0, p=0.0, xtol=1e-9):
    """Earliest time ``t_s`` at which the BLP measure turns positive.

    Returns ``(analytic, numeric)``: ``1.57 / (0.4996 omega0)`` and the first sign
    change of ``gamma_dot`` for the given comb (``alpha`` only scales it).
    """
    if not omega0 > 0:
        raise DomainError(f"omega0 must be > 0, got {omega0}")
    analytic = FIT_LINEAR / (FIT_PEAK_RATIO * omega0)
    spec = build_spec(alpha if alpha > 0 else 1.0, omega0, omegaJ, p)
    # Gamma_dot first vanishes near omega0 t = pi; scan a bracket around it
    t = np.linspace(0.0, 2.5 * math.pi / omega0, 2001)[1:]
    gd = gamma_dot(spec, t)
    idx = np.flatnonzero(gd < 0)
    if idx.size == 0:
        return analytic, None
    k = idx[0]
    numeric = t[k - 1] if gd[k - 1] == 0 else _root(lambda x: gamma_dot(spec, x), t[k - 1], t[k], xtol)
    return analytic, float(numeric)


def is_nonmarkovian(omega0, t_max, alpha=0.5, omegaJ=50.0, n_points=2001, p=0.0):
    spec = build_spec(alpha, omega0, omegaJ, p)
    return blp_measure(spec, TimeGrid(t_max, n_points)).measure > 0


def critical_omega0_numeric(t_max, alpha=0.5, omegaJ=50.0, n_points=2001, tol=1e-7, p=0.0):
    """Smallest ``omega0`` with a positive BLP measure on ``[0, t_max]``, by bisection.

    The bracket starts at half and twice the closed-form prediction.
    """
    guess = critical_omega0(t_max)
    lo, hi = 0.5 * guess, 2.0 * guess
    if is_nonmarkovian(lo, t_max, alpha, omegaJ, n_points, p):
        raise DomainError("non-Markovian already at the lower bracket")
    if not is_nonmarkovian(hi, t_max, alpha, omegaJ, n_points, p):
        raise DomainError("still Markovian at the upper bracket")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if is_nonmarkovian(mid, t_max, alpha, omegaJ, n_points, p):
            hi = mid
        else:
            lo = mid
    return hi


def blp_scan(omega0_values, t_max, alpha=0.5, omegaJ=50.0, n_points=2001, p=0.0):
    """BLP measure for each base frequency; returns a list of :class:`BlpReport`."""
    window = TimeGrid(t_max, n_points)
    return [blp_measure(build_spec(alpha, w0, omegaJ, p), window) for w0 in omega0_values]
