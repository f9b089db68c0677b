"""Small dense complex linear algebra: Pauli matrices, SU(2) exponentials, phase unwrapping.

Pauli labels follow the polarisation convention used throughout the package:
``SIGMA1`` is diagonal in the H/V basis, ``SIGMA2`` is the real off-diagonal
matrix and ``SIGMA3`` completes a right-handed triple (``SIGMA1 @ SIGMA2 ==
1j * SIGMA3``). Axis 3-vectors are always ordered (sigma1, sigma2, sigma3).
"""

import numpy as np

from .errors import InvalidAxis, StepTooLarge

TOL = 1e-12

I2 = np.eye(2, dtype=complex)
SIGMA1 = np.array([[1, 0], [0, -1]], dtype=complex)
SIGMA2 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA3 = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI = np.stack([SIGMA1, SIGMA2, SIGMA3])


def kron(a, b):
    """Tensor product of two 2x2 operators, basis order HH, HV, VH, VV."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def is_unitary(m, tol=TOL):
    m = np.asarray(m)
    return bool(np.abs(m.conj().T @ m - np.eye(m.shape[0])).max() <= tol)


def is_hermitian(m, tol=TOL):
    m = np.asarray(m)
    return bool(np.abs(m - m.conj().T).max() <= tol)


def pauli_dot(vec):
    """Return ``vec[0]*SIGMA1 + vec[1]*SIGMA2 + vec[2]*SIGMA3``."""
    return np.tensordot(np.asarray(vec), PAULI, axes=1)


def _check_axis(axis, tol=TOL):
    axis = np.asarray(axis, dtype=float)
    if axis.shape != (3,) or abs(np.linalg.norm(axis) - 1.0) > tol:
        raise InvalidAxis(f"axis must be a unit 3-vector, got {axis!r}")
    return axis


def su2_exp(axis, angle):
    """exp(-i angle/2 axis.sigma) in closed form.

    Parameters
    ----------
    axis : array_like, shape (3,)
        Unit rotation axis in (sigma1, sigma2, sigma3) components.
    angle : float or ndarray
        Rotation angle(s) in radians. An array of angles returns a stack of
        matrices with shape ``angle.shape + (2, 2)``.

    Raises
    ------
    InvalidAxis
        If ``axis`` is not normalised to within 1e-12.
    """
    n = _check_axis(axis)
    angle = np.asarray(angle, dtype=float)
    c = np.cos(angle / 2)[..., None, None]
    s = np.sin(angle / 2)[..., None, None]
    return c * I2 - 1j * s * pauli_dot(n)


def hermitian_flow(gen, t):
    """exp(-i t G) for a Hermitian 2x2 generator, vectorised over ``t``.

    The generator is split as g0*I + g.sigma so the exponential reduces to a
    scalar phase times an SU(2) rotation by 2|g|t about g/|g|.
    """
    gen = np.asarray(gen, dtype=complex)
    t = np.asarray(t, dtype=float)
    g0 = np.trace(gen).real / 2
    g = np.array([np.trace(gen @ p).real / 2 for p in PAULI])
    norm = np.linalg.norm(g)
    phase = np.exp(-1j * g0 * t)[..., None, None]
    if norm == 0.0:
        return phase * np.broadcast_to(I2, t.shape + (2, 2))
    return phase * su2_exp(g / norm, 2 * norm * t)


def so3_from_su2(u):
    """Adjoint action of a 2x2 unitary as a real 3x3 rotation.

    ``R[i, j] = tr(sigma_i U sigma_j U^dagger) / 2``, so the Bloch vector of
    ``U rho U^dagger`` is ``R @ bloch(rho)``.
    """
    u = np.asarray(u, dtype=complex)
    ud = u.conj().T
    return np.array([[np.trace(PAULI[i] @ u @ PAULI[j] @ ud).real / 2
                      for j in range(3)] for i in range(3)])


def su2_axis_angle(w):
    """Decompose an SU(2) matrix as exp(-i omega/2 n.sigma).

    Returns ``(n, omega)`` with ``omega`` in [0, 2pi]. At omega = 0 or 2pi the
    axis is arbitrary and (1, 0, 0) is returned.
    """
    w = np.asarray(w, dtype=complex)
    a0 = np.trace(w).real / 2
    # w = a0 I - i v.sigma  =>  v_j = (i/2) tr(w sigma_j)
    v = np.array([(0.5j * np.trace(w @ p)).real for p in PAULI])
    vn = np.linalg.norm(v)
    omega = 2 * np.arctan2(vn, a0)
    if vn < 1e-15:
        return np.array([1.0, 0.0, 0.0]), omega
    return v / vn, omega


def wrap_phase(x):
    """Map angles onto (-pi, pi]."""
    return np.pi - np.mod(np.pi - np.asarray(x, dtype=float), 2 * np.pi)


def unwrap_phases(series):
    """Continuous lift of a phase series.

    A raw step smaller than pi is kept as is. A larger raw step is read as a
    branch-cut wrap and replaced by its wrapped value, but only when that value
    is small (< pi/2); otherwise the step is ambiguous and the caller has to
    sample more finely.

    Raises
    ------
    StepTooLarge
        On an ambiguous step.
    """
    x = np.asarray(series, dtype=float)
    if x.size < 2:
        return x.copy()
    d = np.diff(x)
    wrapped = wrap_phase(d)
    big = np.abs(d) >= np.pi
    bad = big & (np.abs(wrapped) >= np.pi / 2)
    if bad.any():
        k = int(np.flatnonzero(bad)[0])
        raise StepTooLarge(f"phase jump of {d[k]:.4f} rad between samples {k} and {k + 1}")
    steps = np.where(big, wrapped, d)
    return np.concatenate([[x[0]], x[0] + np.cumsum(steps)])
