"""GRAPE synthesis of one- and two-qubit unitaries with piecewise-constant controls.

Segment ``j`` evolves under ``H_j = H_int + sum_k u[j, k] C_k`` for ``dt``; the
total propagator is ``U_D = U_N ... U_1`` and the figure of merit is the
phase-insensitive fidelity ``F = |Tr(U_T^dagger U_D)| / 2^n``.
"""

import math
from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from qdephase.channel import IDENTITY, SIGMA_X, SIGMA_Y, SIGMA_Z
from qdephase.errors import DomainError


def kron_all(ops):
    return reduce(np.kron, ops)


def local_operator(op, qubit, n_qubits):
    """``op`` acting on ``qubit`` (0-based, most significant first)."""
    return kron_all([op if q == qubit else IDENTITY for q in range(n_qubits)])


def pauli_controls(n_qubits):
    """sigma_x and sigma_y on every qubit, in that order."""
    return [local_operator(p, q, n_qubits) for q in range(n_qubits) for p in (SIGMA_X, SIGMA_Y)]


def _is_unitary(u, atol):
    return np.allclose(u.conj().T @ u, np.eye(u.shape[0]), atol=atol, rtol=0)


def _is_hermitian(h, atol):
    return np.allclose(h, h.conj().T, atol=atol, rtol=0)


@dataclass
class GrapeProblem:
    """Control synthesis problem.

    Parameters
    ----------
    target : ndarray, (d, d)
        Target unitary, ``d = 2**n_qubits``.
    drift : ndarray, (d, d)
        Internal Hamiltonian ``H_int``.
    controls : sequence of ndarray, (d, d)
        Hermitian control operators.
    n_segments : int
    dt : float
        Segment duration.
    amp_bound : float, optional
        Amplitudes are clipped to ``[-amp_bound, amp_bound]`` after each update.
    """

    target: np.ndarray
    drift: np.ndarray
    controls: list
    n_segments: int
    dt: float
    amp_bound: float | None = None

    def __post_init__(self):
        self.target = np.asarray(self.target, dtype=complex)
        self.drift = np.asarray(self.drift, dtype=complex)
        self.controls = np.asarray(self.controls, dtype=complex)
        d = self.target.shape[0]
        if d not in (2, 4) or self.target.shape != (d, d):
            raise DomainError("target must be a 2x2 or 4x4 matrix (one or two qubits)")
        if not _is_unitary(self.target, 1e-10):
            raise DomainError("target is not unitary")
        if self.drift.shape != (d, d) or not _is_hermitian(self.drift, 1e-12):
            raise DomainError("drift must be a Hermitian matrix of the target's size")
        if self.controls.ndim != 3 or self.controls.shape[1:] != (d, d):
            raise DomainError("controls must be a list of matrices of the target's size")
        if not all(_is_hermitian(c, 1e-12) for c in self.controls):
            raise DomainError("control operators must be Hermitian")
        if int(self.n_segments) != self.n_segments or self.n_segments < 1:
            raise DomainError("n_segments must be a positive integer")
        if not self.dt > 0:
            raise DomainError("dt must be > 0")
        if self.amp_bound is not None and not self.amp_bound > 0:
            raise DomainError("amp_bound must be > 0")

    @property
    def dim(self):
        return self.target.shape[0]

    @property
    def n_qubits(self):
        return int(round(math.log2(self.dim)))

    @property
    def n_controls(self):
        return self.controls.shape[0]

    @property
    def shape(self):
        return (self.n_segments, self.n_controls)


@dataclass
class GrapeResult:
    controls: np.ndarray
    fidelity: float
    iterations: int
    converged: bool
    history: list = field(default_factory=list)


def fidelity(target, actual):
    """``|Tr(U_T^dagger U_D)| / d``; 1 iff equal up to a global phase."""
    target = np.asarray(target)
    actual = np.asarray(actual)
    if target.shape != actual.shape or target.ndim != 2:
        raise DomainError(f"dimension mismatch: {target.shape} vs {actual.shape}")
    return float(min(1.0, abs(np.trace(target.conj().T @ actual)) / target.shape[0]))


def _check_controls(problem, controls):
    controls = np.asarray(controls, dtype=float)
    if controls.shape != problem.shape:
        raise DomainError(f"controls must have shape {problem.shape}, got {controls.shape}")
    return controls


def _segments(problem, controls):
    """Eigendecomposition and propagator of every segment Hamiltonian."""
    hams = problem.drift[None] + np.einsum("jk,kab->jab", controls, problem.controls)
    evals, evecs = np.linalg.eigh(hams)
    phases = np.exp(-1j * problem.dt * evals)
    props = (evecs * phases[:, None, :]) @ np.conj(np.swapaxes(evecs, -1, -2))
    return evals, evecs, phases, props


def propagate(problem, controls):
    """Ordered product ``U_N ... U_1`` of the segment exponentials."""
    controls = _check_controls(problem, controls)
    props = _segments(problem, controls)[3]
    u = np.eye(problem.dim, dtype=complex)
    for p in props:
        u = p @ u
    return u


def _propagator_derivatives(problem, evals, evecs, phases):
    """d U_j / d u[j, k] for all segments and controls (exact, eigenbasis form)."""
    dt = problem.dt
    diff = evals[:, :, None] - evals[:, None, :]
    dphase = phases[:, :, None] - phases[:, None, :]
    degenerate = np.abs(diff) < 1e-10
    safe = np.where(degenerate, 1.0, diff)
    kernel = np.where(degenerate, -1j * dt * phases[:, :, None], dphase / safe)
    vh = np.conj(np.swapaxes(evecs, -1, -2))
    ctrl_eig = np.einsum("jab,kbc,jcd->jkad", vh, problem.controls, evecs)
    return np.einsum("jab,jkbc,jcd->jkad", evecs, kernel[:, None] * ctrl_eig, vh)


def gradient(problem, controls, exact=True):
    """Gradient of :func:`fidelity` of :func:`propagate` w.r.t. every amplitude.

    ``dF/du = Re[conj(z) dz/du] / (|z| d)`` with ``z = Tr(U_T^dagger U_D)``.  With
    ``exact=False`` the segment derivative is the first-order approximation
    ``-i dt C_k U_j``, accurate for ``dt ||H|| << 1``.

    Returns
    -------
    ndarray, shape (n_segments, n_controls)
    """
    controls = _check_controls(problem, controls)
    evals, evecs, phases, props = _segments(problem, controls)
    n = problem.n_segments
    d = problem.dim

    forward = np.empty((n + 1, d, d), dtype=complex)
    forward[0] = np.eye(d)
    for j in range(n):
        forward[j + 1] = props[j] @ forward[j]
    backward = np.empty((n + 1, d, d), dtype=complex)
    backward[n] = problem.target.conj().T
    for j in range(n - 1, -1, -1):
        backward[j] = backward[j + 1] @ props[j]

    z = np.trace(backward[n] @ forward[n])
    if abs(z) < 1e-14:
        return np.zeros(problem.shape)

    if exact:
        dprops = _propagator_derivatives(problem, evals, evecs, phases)
    else:
        dprops = -1j * problem.dt * np.einsum("kab,jbc->jkac", problem.controls, props)
    # dz/du[j,k] = Tr(U_T^dag U_N..U_{j+1} dU_j U_{j-1}..U_1)
    left = backward[1:]
    right = forward[:-1]
    dz = np.einsum("jab,jkbc,jca->jk", left, dprops, right)
    return (np.conj(z) * dz).real / (abs(z) * d)


def random_controls(problem, seed, scale=0.1):
    """Uniform controls in ``[-scale, scale] * bound`` (bound defaults to 1)."""
    rng = np.random.default_rng(seed)
    bound = problem.amp_bound or 1.0
    return rng.uniform(-scale * bound, scale * bound, size=problem.shape)


def optimize(problem, init_controls=None, eps_s=20.0, max_iter=1000, df_tol=1e-10,
             target_fidelity=1.0 - 1e-12, seed=0, max_halvings=40, exact=True):
    """Gradient ascent ``u <- u + eps_s g`` with backtracking.

    Every iteration starts from the fixed step ``eps_s``; a step that lowers the
    fidelity is halved until it does not.  Stops when the fidelity gain falls
    below ``df_tol``, ``target_fidelity`` is reached, or after ``max_iter``
    iterations.  ``history`` holds the fidelity after every accepted step and is
    non-decreasing.
    """
    if not eps_s > 0:
        raise DomainError("eps_s must be > 0")
    if init_controls is None:
        u = random_controls(problem, seed)
    else:
        u = _check_controls(problem, init_controls).copy()

    def clip(x):
        return np.clip(x, -problem.amp_bound, problem.amp_bound) if problem.amp_bound else x

    u = clip(u)
    f = fidelity(problem.target, propagate(problem, u))
    history = [f]
    for it in range(max_iter):
        if f >= target_fidelity:
            return GrapeResult(u, f, it, True, history)
        g = gradient(problem, u, exact=exact)
        step = eps_s
        for _ in range(max_halvings):
            trial = clip(u + step * g)
            f_trial = fidelity(problem.target, propagate(problem, trial))
            if f_trial >= f:
                break
            step *= 0.5
        else:
            return GrapeResult(u, f, it, True, history)
        gain = f_trial - f
        u, f = trial, f_trial
        history.append(f)
        if gain < df_tol:
            return GrapeResult(u, f, it + 1, True, history)
    return GrapeResult(u, f, max_iter, f >= target_fidelity, history)


def rotation(axis, angle):
    """``exp(-i angle sigma_axis)`` for ``axis`` in ``"xyz"``."""
    sigma = {"x": SIGMA_X, "y": SIGMA_Y, "z": SIGMA_Z}[axis]
    return math.cos(angle) * IDENTITY - 1j * math.sin(angle) * sigma
