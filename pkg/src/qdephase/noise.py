"""Random phase-modulation noise on a harmonic comb.

The injected noise is

    beta(t) = alpha * omega0 * sum_{j=1}^{J} j F(j) cos(omega_j t + psi_j),

with ``omega_j = j * omega0``, ``J = floor(omegaJ / omega0)``, spectral weight
``F(j) = j**(p/2 - 1)`` and i.i.d. uniform random phases ``psi_j``.  Frequencies
are angular in rad/ms and times in ms throughout the package.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from qdephase._harmonic import harmonic_sum
from qdephase.errors import DomainError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class NoiseSpec:
    """Parameters of the noise ensemble.

    Attributes
    ----------
    alpha : float
        Dimensionless noise strength.
    omega0 : float
        Base angular frequency of the comb [rad/ms].
    omegaJ : float
        Cutoff angular frequency [rad/ms].
    p : float
        Spectral exponent; ``p = 0`` is white noise (``j F(j) = 1``).
    """

    alpha: float
    omega0: float
    omegaJ: float
    p: float = 0.0
    J: int = field(init=False)

    def __post_init__(self):
        if not self.alpha >= 0:
            raise DomainError(f"alpha must be >= 0, got {self.alpha}")
        if not self.omega0 > 0:
            raise DomainError(f"omega0 must be > 0, got {self.omega0}")
        if not self.omegaJ >= self.omega0:
            raise DomainError(
                f"omegaJ must be >= omega0, got omegaJ={self.omegaJ}, omega0={self.omega0}")
        if not math.isfinite(self.p):
            raise DomainError(f"p must be finite, got {self.p}")
        # relative slack so that e.g. 0.3/0.1 counts three modes
        n_modes = math.floor(self.omegaJ / self.omega0 * (1.0 + 1e-12))
        object.__setattr__(self, "J", max(int(n_modes), 1))

    @property
    def modes(self):
        """Mode indices ``1..J`` as floats."""
        return np.arange(1, self.J + 1, dtype=float)

    @property
    def frequencies(self):
        """Mode angular frequencies ``omega_j = j * omega0``."""
        return self.modes * self.omega0

    @property
    def weights(self):
        """Spectral amplitudes ``j F(j) = j**(p/2)``."""
        return self.modes ** (self.p / 2.0)

    @property
    def is_white(self):
        return self.p == 0.0


def build_spec(alpha, omega0, omegaJ, p=0.0):
    """Validate the noise parameters and derive the mode count."""
    return NoiseSpec(float(alpha), float(omega0), float(omegaJ), float(p))


@dataclass(frozen=True)
class NoiseRealization:
    """One draw of the random phases for a given spec."""

    spec: NoiseSpec
    phases: np.ndarray

    def __post_init__(self):
        phases = np.array(self.phases, dtype=float)
        if phases.shape != (self.spec.J,):
            raise DomainError(f"expected {self.spec.J} phases, got shape {phases.shape}")
        phases.setflags(write=False)
        object.__setattr__(self, "phases", phases)


def member_seed_sequence(seed, member=None):
    """Seed sequence for ``seed`` or for ensemble member ``member`` of it.

    Member streams are spawned children of the master seed, so any member can be
    regenerated on its own and in any order.
    """
    if member is None:
        return np.random.SeedSequence(seed)
    return np.random.SeedSequence(seed, spawn_key=(int(member),))


def sample_realization(spec, seed, member=None):
    """Draw ``J`` i.i.d. phases uniform on ``[0, 2 pi)``.

    Parameters
    ----------
    spec : NoiseSpec
    seed : int
        Master seed; identical ``(spec, seed, member)`` give identical phases.
    member : int, optional
        Ensemble member index.  Uses an independent counter-based stream
        (Philox) derived from ``seed``.
    """
    rng = np.random.Generator(np.random.Philox(member_seed_sequence(seed, member)))
    phases = TWO_PI * rng.random(spec.J)
    phases[phases >= TWO_PI] = 0.0
    return NoiseRealization(spec, phases)


def beta(realization, t):
    """Noise amplitude beta(t) [rad/ms], scalar or array ``t``."""
    spec = realization.spec
    coeffs = spec.weights * np.exp(1j * realization.phases)
    value = spec.alpha * spec.omega0 * harmonic_sum(coeffs, spec.omega0 * np.asarray(t, float)).real
    return value if np.ndim(t) else float(value)


def phase_integral(realization, t):
    """Accumulated phase Phi(t) = int_0^t beta(tau) dtau [rad], closed form.

    ``Phi(t) = alpha * sum_j j**(p/2 - 1) * (sin(omega_j t + psi_j) - sin(psi_j))``.
    """
    spec = realization.spec
    coeffs = spec.weights / spec.modes * np.exp(1j * realization.phases)
    t_arr = np.asarray(t, dtype=float)
    moving = harmonic_sum(coeffs, spec.omega0 * t_arr).imag
    value = spec.alpha * (moving - np.sum(coeffs.imag))
    value = np.where(t_arr == 0.0, 0.0, value)
    return value if np.ndim(t) else float(value)


def phase_integral_batch(spec, phases, t):
    """Phi(t) for many realizations at once.

    Parameters
    ----------
    spec : NoiseSpec
    phases : ndarray, shape (n_members, J)
    t : ndarray, shape (n_t,)

    Returns
    -------
    ndarray, shape (n_t, n_members)
    """
    t = np.asarray(t, dtype=float)
    amp = spec.alpha * spec.weights / spec.modes
    phases = np.atleast_2d(phases)
    a_cos = (amp * np.cos(phases)).T
    a_sin = (amp * np.sin(phases)).T
    out = np.empty((t.size, phases.shape[0]))
    step = max(1, 4_000_000 // spec.J)
    for start in range(0, t.size, step):
        arg = np.outer(t[start:start + step], spec.frequencies)
        # sin(wt + psi) - sin(psi) = sin(wt) cos(psi) + (cos(wt) - 1) sin(psi)
        out[start:start + step] = np.sin(arg) @ a_cos + (np.cos(arg) - 1.0) @ a_sin
    return out
