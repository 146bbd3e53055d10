"""Fast evaluation of long harmonic sums  S(theta) = sum_j c_j exp(i j theta).

The decoherence function, its derivative and the noise phase are all sums over
a harmonic comb with up to ~10^5 modes, evaluated on grids of ~10^3 points.
Direct evaluation costs one transcendental call per (point, mode) pair.  Here
the mode index is split as ``j = q*B + r + 1`` with ``B ~ sqrt(J)`` so that

    exp(i j theta) = exp(i q B theta) * exp(i (r+1) theta),

which needs only ``O(n sqrt(J))`` exponentials and one complex matrix product.
"""

import math

import numpy as np

_CHUNK = 512


def harmonic_sum(coeffs, theta):
    """Evaluate ``sum_{j=1}^{J} coeffs[j-1] * exp(1j * j * theta)``.

    Parameters
    ----------
    coeffs : array_like, shape (J,)
        Real or complex mode coefficients, mode ``j`` at index ``j - 1``.
    theta : array_like
        Angles at which to evaluate; any shape.

    Returns
    -------
    numpy.ndarray
        Complex array with the shape of ``theta``.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    theta = np.asarray(theta, dtype=float)
    shape = theta.shape
    theta = theta.ravel()
    n_modes = coeffs.size
    if n_modes == 0:
        return np.zeros(shape, dtype=complex)

    block = int(math.ceil(math.sqrt(n_modes)))
    n_blocks = -(-n_modes // block)
    weights = np.zeros(n_blocks * block, dtype=complex)
    weights[:n_modes] = coeffs
    weights = weights.reshape(n_blocks, block).T.copy()

    inner = np.arange(1, block + 1, dtype=float)
    outer = np.arange(n_blocks, dtype=float) * block
    out = np.empty(theta.size, dtype=complex)
    for start in range(0, theta.size, _CHUNK):
        th = theta[start:start + _CHUNK]
        fine = np.exp(1j * np.outer(th, inner))
        coarse = np.exp(1j * np.outer(th, outer))
        out[start:start + _CHUNK] = np.einsum("nq,nq->n", coarse, fine @ weights)
    return out.reshape(shape)
