"""Closed-form revival predictors and their verification on coherence traces."""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import find_peaks, peak_prominences

from qdephase.channel import Basis
from qdephase.decoherence import PERIOD_CONSTANT, gamma_dot
from qdephase.errors import DomainError

FULL_REVIVAL_FLOOR = 0.98
DEFAULT_PROMINENCE = 0.02
DEFAULT_TIME_TOL = 0.5
_INTEGER_TOL = 1e-3


@dataclass
class RevivalPrediction:
    """Predicted revival instants ``n * T`` within ``[0, t_max]``.

    ``kind`` is ``"full"`` when the resonance conditions hold (complete revival
    to unity expected) and ``"partial"`` otherwise, in which case ``times`` only
    marks the minima of the periodic decoherence function.
    """

    basis: Basis
    period: float
    times: list
    kind: str
    t_max: float


@dataclass
class Peak:
    time: float
    value: float
    prominence: float
    endpoint: bool = False


@dataclass
class RevivalMatch:
    predicted: float
    peak: Peak | None
    time_error: float | None
    value: float


@dataclass
class RevivalReport:
    prediction: RevivalPrediction
    peaks: list
    matches: list = field(default_factory=list)
    passed: bool = False
    degenerate: bool = False

    @property
    def n_matched(self):
        return sum(m.peak is not None for m in self.matches)


def _revival_times(omega0, t_max):
    period = PERIOD_CONSTANT / omega0
    cycles = omega0 * t_max / PERIOD_CONSTANT
    n_max = int(math.floor(cycles + _INTEGER_TOL * max(cycles, 1.0)))
    integer = n_max >= 1 and abs(cycles - round(cycles)) <= _INTEGER_TOL * max(cycles, 1.0)
    return period, [n * period for n in range(1, n_max + 1)], integer


def predict_z_revivals(omega0, t_max):
    """Full sigma_z revivals at ``n 6.285 / omega0`` when ``omega0 = n 6.285 / t_max``."""
    if not omega0 > 0 or not t_max > 0:
        raise DomainError("omega0 and t_max must be > 0")
    period, times, integer = _revival_times(omega0, t_max)
    return RevivalPrediction(Basis.Z, period, times, "full" if integer else "partial", t_max)


def predict_xy_revivals(omega0, omega_k, t_max, basis=Basis.X):
    """sigma_x / sigma_y schedule; full only if also ``omega_k = pi omega0 / 6.285``."""
    if not omega0 > 0 or not t_max > 0:
        raise DomainError("omega0 and t_max must be > 0")
    period, times, integer = _revival_times(omega0, t_max)
    resonant = math.isclose(omega_k, resonant_zeeman(omega0), rel_tol=_INTEGER_TOL)
    kind = "full" if integer and resonant else "partial"
    return RevivalPrediction(Basis(basis), period, times, kind, t_max)


def critical_zeeman(t_max):
    """``pi / (2 t_max)``: above it the X/Y coherence revives within ``[0, t_max]``."""
    if not t_max > 0:
        raise DomainError(f"t_max must be > 0, got {t_max}")
    return math.pi / (2 * t_max)


def resonant_zeeman(omega0):
    """``pi omega0 / 6.285``: Zeeman energy locking |cos| to the Gamma period."""
    if not omega0 > 0:
        raise DomainError(f"omega0 must be > 0, got {omega0}")
    return math.pi * omega0 / PERIOD_CONSTANT


def extremum_residual(spec, omega_k, t):
    """``omega_k tan(omega_k t) + 2 Gamma_dot(t)``; zero at extrema of the X/Y coherence."""
    c = math.cos(omega_k * t)
    if abs(c) < 1e-6:
        raise DomainError(f"tan(omega_k t) has a pole near t = {t}")
    return omega_k * math.sin(omega_k * t) / c + 2.0 * gamma_dot(spec, t)


def detect_revivals(trace, floor=0.0, min_prominence=DEFAULT_PROMINENCE):
    """Strict local maxima of ``trace`` with value >= ``floor`` and enough prominence.

    The final sample counts as a peak when the trace is still rising into it.  A
    peak with nothing higher to its right has its right flank cut off by the
    window, so its prominence is measured on the left flank only.
    """
    y = np.asarray(trace.values)
    t = trace.times
    idx, _ = find_peaks(y, height=floor, plateau_size=(1, 1))
    peaks = []
    if idx.size:
        prom, left_bases, _ = peak_prominences(y, idx)
        for i, p, lb in zip(idx, prom, left_bases):
            if not np.any(y[i + 1:] >= y[i]):
                p = y[i] - y[lb]
            if p >= min_prominence:
                peaks.append(Peak(float(t[i]), float(y[i]), float(p)))
    if y.size >= 2 and y[-1] > y[-2] and y[-1] >= floor:
        higher = np.flatnonzero(y[:-1] >= y[-1])
        left = higher[-1] + 1 if higher.size else 0
        prom = float(y[-1] - y[left:].min())
        if prom >= min_prominence:
            peaks.append(Peak(float(t[-1]), float(y[-1]), prom, endpoint=True))
    return peaks


def verify_prediction(prediction, trace, time_tol=DEFAULT_TIME_TOL, value_floor=FULL_REVIVAL_FLOOR,
                      min_prominence=DEFAULT_PROMINENCE):
    """Match each predicted instant with the nearest detected peak.

    Passes iff every predicted time has a peak within ``time_tol`` and, for
    ``kind == "full"``, that peak reaches ``value_floor``.  A flat trace gives no
    peaks; it is flagged ``degenerate`` and judged on its values at the
    predicted times (vacuous for partial predictions).
    """
    t = trace.times
    if prediction.times and max(prediction.times) > t[-1] + time_tol:
        raise DomainError("trace does not cover the prediction window")
    y = np.asarray(trace.values)
    degenerate = bool(np.ptp(y) < 1e-12)
    peaks = [] if degenerate else detect_revivals(trace, 0.0, min_prominence)
    matches = []
    ok = True
    for tp in prediction.times:
        near = [pk for pk in peaks if abs(pk.time - tp) <= time_tol]
        best = min(near, key=lambda pk: abs(pk.time - tp)) if near else None
        if best is not None:
            value = best.value
        else:
            window = np.abs(t - tp) <= time_tol
            value = float(y[window].max()) if window.any() else float(np.interp(tp, t, y))
        matches.append(RevivalMatch(tp, best, None if best is None else best.time - tp, value))
        if degenerate:
            ok &= prediction.kind == "partial" or value >= value_floor
        else:
            ok &= best is not None and (prediction.kind != "full" or value >= value_floor)
    return RevivalReport(prediction, peaks, matches, bool(ok), degenerate)
