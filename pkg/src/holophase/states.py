"""Two-qubit pure states, Schmidt decomposition and local Bloch projections.

States are plain complex arrays of shape (4,) in the basis order
HH, HV, VH, VV (qubit a first). Reshaping to (2, 2) gives the amplitude
matrix ``M[j, k] = psi_{jk}``.
"""

from dataclasses import dataclass

import numpy as np

from .core import PAULI
from .errors import NotNormalized

NORM_TOL = 1e-12
DEGENERACY_TOL = 1e-9

H = np.array([1, 0], dtype=complex)
V = np.array([0, 1], dtype=complex)


def as_state(psi, tol=NORM_TOL):
    """Validate and return a normalised two-qubit state as a complex (4,) array."""
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if psi.shape != (4,):
        raise ValueError(f"two-qubit state needs 4 amplitudes, got {psi.size}")
    if not np.all(np.isfinite(psi)):
        raise ValueError("state has non-finite amplitudes")
    if abs(np.vdot(psi, psi).real - 1.0) > tol:
        raise NotNormalized(f"norm^2 = {np.vdot(psi, psi).real!r}")
    return psi


def normalize(psi):
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    return psi / np.linalg.norm(psi)


def product_state(a, b):
    return normalize(np.kron(a, b))


def prepared_state(alpha):
    """cos(alpha/2)|HH> + sin(alpha/2)|VV>, the entanglement-tunable source state."""
    return np.array([np.cos(alpha / 2), 0, 0, np.sin(alpha / 2)], dtype=complex)


def random_state(rng):
    z = rng.normal(size=4) + 1j * rng.normal(size=4)
    return z / np.linalg.norm(z)


def fidelity(phi, psi):
    """|<phi|psi>|^2, i.e. comparison up to a global phase."""
    return abs(np.vdot(phi, psi)) ** 2


def amplitude_matrix(psi):
    return np.asarray(psi, dtype=complex).reshape(2, 2)


@dataclass(frozen=True)
class SchmidtForm:
    """cos(alpha/2) e^{-i beta/2}|n m> + sin(alpha/2) e^{i beta/2}|n' m'>.

    ``basis_a`` and ``basis_b`` hold the Schmidt vectors as rows:
    ``basis_a[0]`` is |n_a>, ``basis_a[1]`` is |n_a perp>.
    """

    alpha: float
    beta: float
    basis_a: np.ndarray
    basis_b: np.ndarray
    eta: int
    degenerate: bool

    def reconstruct(self):
        t0 = np.cos(self.alpha / 2) * np.exp(-0.5j * self.beta)
        t1 = np.sin(self.alpha / 2) * np.exp(0.5j * self.beta)
        return (t0 * np.kron(self.basis_a[0], self.basis_b[0])
                + t1 * np.kron(self.basis_a[1], self.basis_b[1]))


def _fix_phase(vec):
    """Rotate ``vec`` so its first nonzero component is real positive.

    Returns the rotated vector and the phase that was removed.
    """
    k = int(np.flatnonzero(np.abs(vec) > 1e-12)[0])
    p = np.angle(vec[k])
    return vec * np.exp(-1j * p), p


def schmidt_decompose(psi):
    """Schmidt form with the larger coefficient first (alpha in [0, pi/2]).

    For equal coefficients (within 1e-9) the qubit-a basis is pinned to
    (|H>, |V>) and the qubit-b vectors follow from the state; the result is
    flagged ``degenerate`` with ``eta = 0``.
    """
    psi = as_state(psi)
    m = amplitude_matrix(psi)
    u, s, vh = np.linalg.svd(m)
    degenerate = bool(s[0] - s[1] < DEGENERACY_TOL)
    if degenerate:
        na = np.eye(2, dtype=complex)
        # psi = sum_k |n_k> (x) (n_k^dagger M)^T
        mb = na.conj() @ m
        mb0 = mb[0] / np.linalg.norm(mb[0])
        mb1 = mb[1] - np.vdot(mb0, mb[1]) * mb0
        mb = np.stack([mb0, mb1 / np.linalg.norm(mb1)])
    else:
        na = u.T.copy()
        mb = vh.copy()

    coeffs = np.empty(2, dtype=complex)
    basis_a = np.empty((2, 2), dtype=complex)
    basis_b = np.empty((2, 2), dtype=complex)
    for k in range(2):
        basis_a[k], _ = _fix_phase(na[k])
        basis_b[k], _ = _fix_phase(mb[k])
        coeffs[k] = np.vdot(np.kron(basis_a[k], basis_b[k]), psi)

    mags = np.abs(coeffs)
    alpha = 2 * np.arctan2(mags[1], mags[0])
    if mags[1] < 1e-15:
        beta = 0.0
    else:
        beta = float(np.mod(np.angle(coeffs[1]) - np.angle(coeffs[0]), 2 * np.pi))
        if beta > 2 * np.pi - 1e-13:
            beta = 0.0
    eta = 0 if degenerate else 1
    return SchmidtForm(alpha=float(alpha), beta=beta, basis_a=basis_a,
                       basis_b=basis_b, eta=eta, degenerate=degenerate)


def tangle(psi):
    """Concurrence squared, (2|psi_HH psi_VV - psi_HV psi_VH|)^2."""
    p = as_state(psi)
    return float((2 * abs(p[0] * p[3] - p[1] * p[2])) ** 2)


def reduced_density(psi, qubit):
    m = amplitude_matrix(as_state(psi))
    if qubit == "a":
        return m @ m.conj().T
    if qubit == "b":
        return m.T @ m.conj()
    raise ValueError(f"qubit must be 'a' or 'b', got {qubit!r}")


def reduced_bloch(psi, qubit):
    """Bloch vector (<sigma1>, <sigma2>, <sigma3>) of one qubit's reduced state."""
    rho = reduced_density(psi, qubit)
    return np.array([np.trace(rho @ p).real for p in PAULI])


def preferred_direction(psi, qubit, tol=DEGENERACY_TOL):
    """Unit Bloch direction of the dominant Schmidt vector, or None if maximally mixed."""
    r = reduced_bloch(psi, qubit)
    n = np.linalg.norm(r)
    if n < tol:
        return None
    return r / n
