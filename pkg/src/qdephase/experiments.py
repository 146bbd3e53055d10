"""Experiment runners: turn a parsed :class:`~qdephase.config.Experiment` into tables.

Runners only call into the library modules; every number they emit comes from
there.
"""

import math
import warnings

import numpy as np
from scipy.signal import find_peaks
from scipy.stats import unitary_group

from qdephase import __version__
from qdephase.channel import (SIGMA_X, SIGMA_Y, SIGMA_Z, Basis, analytic_state, canonical_state,
                              evolve_ensemble, transform_basis)
from qdephase.coherence import (_points_per_period, alpha_crit_scan, coherence_xy_terms,
                                coherence_z, l1_coherence, time_avg_coherence)
from qdephase.decoherence import critical_omega0, gamma_exact, gamma_fitted
from qdephase.errors import ConfigError, DomainError, RangeWarning
from qdephase.grape import GrapeProblem, kron_all, local_operator, optimize, pauli_controls, rotation
from qdephase.grid import TimeGrid, Trace
from qdephase.noise import build_spec
from qdephase.nonmarkov import blp_measure, critical_omega0_numeric
from qdephase.revival import detect_revivals, predict_xy_revivals, predict_z_revivals, verify_prediction
from qdephase.tables import ResultTable


def _meta(exp, **extra):
    meta = {"experiment": exp.name, "tool_version": __version__, "config": exp.echo()}
    if exp.params.get("seed") is not None:
        meta["seed"] = exp.params["seed"]
    meta.update(extra)
    return meta


def _label(x):
    return format(x, ".10g")


def _count_maxima(values):
    # interior maxima of a sampled curve, ignoring numerical ripple
    scale = float(np.max(values)) or 1.0
    idx, _ = find_peaks(values, prominence=1e-3 * scale)
    return int(idx.size)


def run_gamma(exp):
    p = exp.params
    grid = TimeGrid(p["t_max"], p["points"])
    t = grid.times
    data = {"t": t}
    summary = []
    for w0 in p["omega0"]:
        spec = build_spec(p["alpha"], w0, p["omegaJ"], p["p"])
        g = gamma_exact(spec, t)
        data[f"gamma_{_label(w0)}"] = g
        peak = float(g.max())
        row = {"omega0": w0, "J": spec.J, "maxima": _count_maxima(g),
               "end_over_peak": float(g[-1] / peak) if peak > 0 else 0.0}
        if p["fitted"]:
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always", RangeWarning)
                gf = gamma_fitted(p["alpha"], w0, t)
            data[f"fitted_{_label(w0)}"] = gf
            row["max_fit_deviation_over_peak"] = float(np.max(np.abs(g - gf)) / peak) if peak else 0.0
            row["outside_fit_range"] = any(issubclass(w.category, RangeWarning) for w in caught)
        summary.append(row)
    return [ResultTable.from_columns("gamma", data, _meta(exp, curves=summary))]


def run_nonmarkov_scan(exp):
    p = exp.params
    window = TimeGrid(p["t_max"], p["points"])
    omegas = np.linspace(p["omega0_min"], p["omega0_max"], p["omega0_points"])
    measures = []
    onsets = []
    for w0 in omegas:
        report = blp_measure(build_spec(p["alpha"], float(w0), p["omegaJ"], p["p"]), window)
        measures.append(report.measure)
        onsets.append(math.nan if report.t_s is None else report.t_s)
    positive = [float(w) for w, n in zip(omegas, measures) if n > 0]
    extra = {"critical_formula": critical_omega0(p["t_max"]),
             "first_positive_on_grid": positive[0] if positive else None}
    if p["critical"]:
        try:
            extra["critical_numeric"] = critical_omega0_numeric(
                p["t_max"], p["alpha"], p["omegaJ"], p["points"], p=p["p"])
        except DomainError as exc:
            extra["critical_numeric"] = None
            extra["critical_numeric_error"] = str(exc)
    table = ResultTable.from_columns("blp", {"omega0": omegas, "N": measures, "t_s": onsets},
                                     _meta(exp, **extra))
    return [table]


def _prediction(p, basis):
    if basis is Basis.Z:
        return predict_z_revivals(p["omega0"], p["t_max"])
    return predict_xy_revivals(p["omega0"], p["omega_k"], p["t_max"], basis)


def _analytic_coherence(spec, p, basis, t):
    if basis is Basis.Z:
        return coherence_z(spec, t), None, None
    osc, decay = coherence_xy_terms(spec, p["omega_k"], t)
    return osc * decay, osc, decay


def run_coherence(exp):
    p = exp.params
    basis = Basis(p["basis"])
    grid = TimeGrid(p["t_max"], p["points"])
    t = grid.times
    spec = build_spec(p["alpha"], p["omega0"], p["omegaJ"], p["p"])
    rho0 = canonical_state(basis)
    coh, osc, decay = _analytic_coherence(spec, p, basis, t)

    data = {"t": t, "coh_analytic": coh}
    rho_an = analytic_state(spec, p["omega_k"], rho0, t)
    offdiag = {"t": t, "re_analytic": rho_an[:, 0, 1].real, "im_analytic": rho_an[:, 0, 1].imag,
               "abs_analytic": np.abs(rho_an[:, 0, 1])}
    extra = {}
    if p["ensemble"] > 0:
        rho_mc = evolve_ensemble(spec, p["omega_k"], rho0, grid, p["ensemble"], p["seed"])
        data["coh_mc"] = l1_coherence(transform_basis(rho_mc, basis))
        offdiag.update(re_mc=rho_mc[:, 0, 1].real, im_mc=rho_mc[:, 0, 1].imag,
                       abs_mc=np.abs(rho_mc[:, 0, 1]))
        extra["mc_sup_gap_abs_rho01"] = float(np.max(np.abs(offdiag["abs_mc"] - offdiag["abs_analytic"])))
    if osc is not None:
        data["osc"] = osc
        data["decay"] = decay

    trace = Trace(grid, coh)
    peaks = [pk for pk in detect_revivals(trace) if pk.time > 0]
    report = verify_prediction(_prediction(p, basis), trace)
    extra.update(
        peaks=[{"t": pk.time, "value": pk.value, "endpoint": pk.endpoint} for pk in peaks],
        interior_peaks=sum(not pk.endpoint for pk in peaks),
        revival_prediction={"kind": report.prediction.kind, "times": report.prediction.times,
                            "passed": report.passed},
    )
    return [ResultTable.from_columns("coherence", data, _meta(exp, **extra)),
            ResultTable.from_columns("offdiag", offdiag, _meta(exp))]


def run_revival_verify(exp):
    p = exp.params
    basis = Basis(p["basis"])
    grid = TimeGrid(p["t_max"], p["points"])
    spec = build_spec(p["alpha"], p["omega0"], p["omegaJ"], p["p"])
    coh = _analytic_coherence(spec, p, basis, grid.times)[0]
    report = verify_prediction(_prediction(p, basis), Trace(grid, coh), time_tol=p["time_tol"])
    rows = {"predicted": [], "peak_time": [], "value": [], "matched": []}
    for m in report.matches:
        rows["predicted"].append(m.predicted)
        rows["peak_time"].append(math.nan if m.peak is None else m.peak.time)
        rows["value"].append(m.value)
        rows["matched"].append(float(m.peak is not None))
    extra = {"kind": report.prediction.kind, "period": report.prediction.period,
             "passed": report.passed, "degenerate": report.degenerate,
             "detected_peaks": [pk.time for pk in report.peaks]}
    return [ResultTable("revivals", list(rows), list(zip(*rows.values())), _meta(exp, **extra))]


def run_longterm(exp):
    p = exp.params
    alphas = np.arange(p["alpha_min"], p["alpha_max"] + 0.5 * p["alpha_step"], p["alpha_step"])
    data = {"alpha": alphas}
    crit = {"omega0": [], "omega_k": [], "alpha_crit": []}
    details = []
    for w0 in p["omega0"]:
        for wk in p["omega_k"]:
            m = _points_per_period(build_spec(p["alpha_max"], w0, p["omegaJ"], p["p"]), wk)
            values = []
            converged = True
            for a in alphas:
                avg = time_avg_coherence(build_spec(float(a), w0, p["omegaJ"], p["p"]), wk, p["T"],
                                         p["tol"], points_per_period=m)
                values.append(avg.value)
                converged &= avg.converged
            data[f"C_{_label(w0)}_{_label(wk)}"] = values
            res = alpha_crit_scan(w0, wk, p["omegaJ"], p["T"], (p["alpha_min"], p["alpha_max"]),
                                  p["alpha_step"], p["resolution"], p["threshold"], p["tol"], p["p"],
                                  known=dict(zip(map(float, alphas), values)))
            crit["omega0"].append(w0)
            crit["omega_k"].append(wk)
            crit["alpha_crit"].append(math.nan if res.alpha_crit is None else res.alpha_crit)
            details.append({"omega0": w0, "omega_k": wk, "status": res.status,
                            "monotone": res.monotone, "all_converged": bool(converged)})
    return [ResultTable.from_columns("average", data, _meta(exp)),
            ResultTable.from_columns("alpha_crit", crit, _meta(exp, scans=details))]


_SINGLE = {
    "hadamard": np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2),
    "x": SIGMA_X, "y": SIGMA_Y, "z": SIGMA_Z,
}
_TWO = {
    "cnot": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex),
    "cz": np.diag([1, 1, 1, -1]).astype(complex),
    "swap": np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex),
}


def grape_target(text, n_qubits, seed):
    """Target unitary from its name: ``haar``, ``identity``, ``hadamard``, ``x``, ``y``,
    ``z``, ``rx:<angle>``, ``ry:<angle>``, ``rz:<angle>`` (one qubit) or ``cnot``,
    ``cz``, ``swap`` (two qubits).  ``r<axis>:theta`` is ``exp(-i theta sigma / 2)``."""
    d = 2 ** n_qubits
    name, _, arg = text.strip().lower().partition(":")
    if name == "haar":
        return unitary_group.rvs(d, random_state=np.random.default_rng(seed))
    if name == "identity":
        return np.eye(d, dtype=complex)
    if name in _TWO:
        if n_qubits != 2:
            raise ConfigError(f"target {name!r} needs qubits = 2", field="target")
        return _TWO[name]
    if n_qubits != 1:
        raise ConfigError(f"target {name!r} needs qubits = 1", field="target")
    if name in _SINGLE:
        return _SINGLE[name]
    if name in ("rx", "ry", "rz"):
        try:
            angle = float(arg)
        except ValueError:
            raise ConfigError(f"rotation angle {arg!r} is not a number", field="target") from None
        return rotation(name[1], 0.5 * angle)
    raise ConfigError(f"unknown target {text!r}", field="target")


def grape_drift(n_qubits, drift, coupling):
    """``sum_q (w_q / 2) Z_q + (coupling / 2) Z Z``."""
    freqs = drift * n_qubits if len(drift) == 1 else drift
    h = np.zeros((2 ** n_qubits, 2 ** n_qubits), dtype=complex)
    for q, w in enumerate(freqs):
        h += 0.5 * w * local_operator(SIGMA_Z, q, n_qubits)
    if n_qubits == 2:
        h += 0.5 * coupling * kron_all([SIGMA_Z, SIGMA_Z])
    return h


def run_grape(exp):
    p = exp.params
    n = p["qubits"]
    target = grape_target(p["target"], n, p["seed"])
    problem = GrapeProblem(target, grape_drift(n, p["drift"], p["coupling"]), pauli_controls(n),
                           p["segments"], p["dt"], p["amp_bound"])
    init = np.zeros(problem.shape) if p["init"] == "zero" else None
    res = optimize(problem, init, eps_s=p["eps"], max_iter=p["max_iter"], seed=p["seed"])
    labels = [f"u_{ax}{q}" for q in range(n) for ax in "xy"]
    controls = {"segment": np.arange(problem.n_segments), **dict(zip(labels, res.controls.T))}
    extra = {"fidelity": res.fidelity, "iterations": res.iterations, "converged": res.converged}
    history = {"iteration": np.arange(len(res.history)), "fidelity": res.history}
    return [ResultTable.from_columns("controls", controls, _meta(exp, **extra)),
            ResultTable.from_columns("history", history, _meta(exp, **extra))]


RUNNERS = {
    "gamma": run_gamma,
    "nonmarkov-scan": run_nonmarkov_scan,
    "coherence": run_coherence,
    "revival-verify": run_revival_verify,
    "longterm": run_longterm,
    "grape": run_grape,
}


def run_experiment(exp):
    """Run one experiment; returns its list of :class:`ResultTable`."""
    return RUNNERS[exp.kind](exp)
