"""Qubit evolution through the engineered dephasing channel.

The qubit Hamiltonian is ``H(t) = (omega_k / 2) sigma_z + beta(t) sigma_z`` so each
noise realization contributes the unitary

    U(t) = exp(-i omega_k t sigma_z / 2) exp(-i Phi(t) sigma_z),

and the ensemble average damps the off-diagonal element by ``exp(-2 Gamma(t))``
while leaving the populations untouched.

Density matrices are plain ``(2, 2)`` complex arrays (stacks ``(..., 2, 2)`` are
accepted wherever it makes sense); Bloch vectors are length-3 real arrays.
"""

import math
from enum import Enum

import numpy as np
from scipy.special import j0

from qdephase.decoherence import gamma_exact
from qdephase.errors import DomainError
from qdephase.grid import as_times
from qdephase.noise import phase_integral, phase_integral_batch, sample_realization

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY = np.eye(2, dtype=complex)

_SQRT_HALF = 1.0 / math.sqrt(2.0)


class Basis(Enum):
    """Reference basis: eigenbasis of sigma_z, sigma_x or sigma_y."""

    Z = "Z"
    X = "X"
    Y = "Y"


# columns are the eigenvectors (+, -) of the basis Pauli in computational coordinates
BASIS_VECTORS = {
    Basis.Z: IDENTITY,
    Basis.X: _SQRT_HALF * np.array([[1, 1], [1, -1]], dtype=complex),
    Basis.Y: _SQRT_HALF * np.array([[1, 1], [1j, -1j]], dtype=complex),
}

_AXIS = {Basis.Z: np.array([0.0, 0.0, 1.0]),
         Basis.X: np.array([1.0, 0.0, 0.0]),
         Basis.Y: np.array([0.0, 1.0, 0.0])}


def check_density(rho, atol=1e-10):
    """Raise :class:`DomainError` unless ``rho`` is a valid qubit density matrix.

    Checks Hermiticity, unit trace (1e-12) and eigenvalues >= ``-atol``.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape[-2:] != (2, 2):
        raise DomainError(f"expected 2x2 density matrix, got shape {rho.shape}")
    if not np.allclose(rho, np.conj(np.swapaxes(rho, -1, -2)), atol=1e-12, rtol=0):
        raise DomainError("density matrix is not Hermitian")
    if not np.allclose(np.trace(rho, axis1=-2, axis2=-1), 1.0, atol=1e-12, rtol=0):
        raise DomainError("density matrix does not have unit trace")
    if np.min(np.linalg.eigvalsh(rho)) < -atol:
        raise DomainError("density matrix is not positive semidefinite")
    return rho


def check_bloch(r):
    r = np.asarray(r, dtype=float)
    if r.shape != (3,):
        raise DomainError(f"expected Bloch vector of length 3, got shape {r.shape}")
    if r @ r > 1 + 1e-10:
        raise DomainError(f"Bloch vector has length {math.sqrt(r @ r):.6g} > 1")
    return r


def bloch_to_density(r):
    rx, ry, rz = check_bloch(r)
    return 0.5 * (IDENTITY + rx * SIGMA_X + ry * SIGMA_Y + rz * SIGMA_Z)


def density_to_bloch(rho):
    rho = np.asarray(rho, dtype=complex)
    return np.array([2 * rho[0, 1].real, -2 * rho[0, 1].imag, (rho[0, 0] - rho[1, 1]).real])


def pure_state(psi):
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


def canonical_state(basis, phi=None):
    """Maximally coherent input ``(|e+> + e^{i phi} |e->)/sqrt(2)`` of ``basis``.

    ``phi`` defaults to ``pi/2`` for X and Y (the minimal-coherence choice that
    gives ``|cos(omega_k t)| exp(-2 Gamma)``) and to 0 for Z.
    """
    basis = Basis(basis)
    if phi is None:
        phi = 0.0 if basis is Basis.Z else math.pi / 2
    vecs = BASIS_VECTORS[basis]
    return pure_state(vecs[:, 0] + np.exp(1j * phi) * vecs[:, 1])


def blp_pair(basis):
    """Antipodal input pair used for the BLP trace distance in ``basis``."""
    basis = Basis(basis)
    phi = 0.0 if basis is Basis.Z else math.pi / 2
    return canonical_state(basis, phi), canonical_state(basis, phi + math.pi)


def transform_basis(rho, basis):
    """Express ``rho`` in the eigenbasis of ``basis``: ``V^dagger rho V``.

    ``V`` has the basis eigenvectors as columns.  For X this is the Hadamard
    conjugation (self-inverse); Z is the identity.
    """
    basis = Basis(basis)
    rho = np.asarray(rho, dtype=complex)
    if basis is Basis.Z:
        return rho.copy()
    v = BASIS_VECTORS[basis]
    return v.conj().T @ rho @ v


def l1_offdiag(rho):
    return 2.0 * np.abs(np.asarray(rho)[..., 0, 1])


def bloch_coherence(r, basis):
    """Coherence ``r sqrt(1 - (r_hat . k_hat)^2)`` of a Bloch vector w.r.t. ``basis``."""
    r = check_bloch(r)
    along = r @ _AXIS[Basis(basis)]
    return math.sqrt(max(r @ r - along ** 2, 0.0))


def analytic_state(spec, omega_k, rho0, t):
    """Closed-form ensemble state at ``t`` (scalar or array).

    ``rho01(t) = rho01(0) exp(-i omega_k t) exp(-2 Gamma(t))``, diagonals fixed.
    Returns ``(2, 2)`` for scalar ``t`` and ``(n_t, 2, 2)`` otherwise.
    """
    if omega_k < 0:
        raise DomainError(f"omega_k must be >= 0, got {omega_k}")
    rho0 = check_density(rho0)
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    decay = np.exp(-2.0 * gamma_exact(spec, t_arr))
    return _with_offdiag(rho0, t_arr, omega_k, decay, scalar=np.ndim(t) == 0)


def _with_offdiag(rho0, t, omega_k, factor, scalar):
    out = np.empty((t.size, 2, 2), dtype=complex)
    out[:, 0, 0] = rho0[0, 0]
    out[:, 1, 1] = rho0[1, 1]
    out[:, 0, 1] = rho0[0, 1] * np.exp(-1j * omega_k * t) * factor
    out[:, 1, 0] = np.conj(out[:, 0, 1])
    return out[0] if scalar else out


def channel_unitary(realization, omega_k, t):
    """Single-member evolution operator ``U(t)`` (diagonal 2x2)."""
    phase = 0.5 * omega_k * t + phase_integral(realization, t)
    return np.diag([np.exp(-1j * phase), np.exp(1j * phase)])


def evolve_ensemble(spec, omega_k, rho0, grid, n_members, seed, chunk=256):
    """Monte Carlo ensemble average ``(1/N) sum_m U_m rho0 U_m^dagger``.

    Member ``m`` uses ``sample_realization(spec, seed, member=m)``; its
    off-diagonal is ``rho01(0) exp(-i(omega_k t + 2 Phi_m(t)))`` with the closed
    form phase, so the only error is sampling error.  Members are reduced in a
    fixed order, so results are reproducible bit for bit.

    Returns
    -------
    ndarray, shape (n_t, 2, 2)
    """
    if n_members < 1:
        raise DomainError(f"ensemble size must be >= 1, got {n_members}")
    if omega_k < 0:
        raise DomainError(f"omega_k must be >= 0, got {omega_k}")
    rho0 = check_density(rho0)
    t = as_times(grid)
    acc = np.zeros(t.size, dtype=complex)
    for start in range(0, n_members, chunk):
        members = range(start, min(start + chunk, n_members))
        phases = np.stack([sample_realization(spec, seed, member=m).phases for m in members])
        phi = phase_integral_batch(spec, phases, t)
        acc += np.exp(-2j * phi).sum(axis=1)
    return _with_offdiag(rho0, t, omega_k, acc / n_members, scalar=False)


def uniform_phase_mean(spec, t):
    """Exact expectation of ``exp(-2i Phi(t))`` over uniform i.i.d. phases.

    Each mode contributes a Bessel factor, giving
    ``prod_j J0(4 alpha j^(p/2-1) sin(j omega0 t / 2))``.  The Gaussian
    approximation of this product is ``exp(-2 Gamma(t))``; the two differ where
    single low modes carry a large phase amplitude.
    """
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    amp = 4.0 * spec.alpha * spec.weights / spec.modes
    out = np.ones(t_arr.size)
    step = max(1, 2_000_000 // spec.J)
    for start in range(0, t_arr.size, step):
        arg = np.outer(t_arr[start:start + step], 0.5 * spec.frequencies)
        out[start:start + step] = np.prod(j0(amp * np.sin(arg)), axis=1)
    return out if np.ndim(t) else float(out[0])


def kraus_operators(p):
    """Kraus operators of the p-dephasing channel."""
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"dephasing probability must lie in [0, 1], got {p}")
    return [math.sqrt(1 - p) * IDENTITY,
            math.sqrt(p) * np.array([[1, 0], [0, 0]], dtype=complex),
            math.sqrt(p) * np.array([[0, 0], [0, 1]], dtype=complex)]


def kraus_dephase(bloch, p):
    """Apply the dephasing channel to a Bloch vector: ``((1-p) rx, (1-p) ry, rz)``."""
    rho = bloch_to_density(bloch)
    out = sum(m @ rho @ m.conj().T for m in kraus_operators(p))
    return density_to_bloch(out)
