"""Jones-calculus wave plates and the two-photon coincidence fringe model.

Retarders use the symmetric-phase convention

    J(delta, theta) = R(theta) diag(e^{-i delta/2}, e^{+i delta/2}) R(-theta),

so every plate is in SU(2). Any global phase left between a plate product and
the ideal U(s) is measured and carried into the fringe model rather than
dropped: a single-qubit phase gamma becomes 2*gamma on the two-photon term.
"""

from dataclasses import dataclass

import numpy as np

from .core import wrap_phase
from .errors import DecompositionMismatch, InvalidCounts, UndefinedPhase
from .evolutions import experiment_unitary
from .phases import experiment_overlap, experiment_phase_closed

QUARTER = np.pi / 2
HALF = np.pi
MISMATCH_TOL = 1e-6


@dataclass(frozen=True)
class WavePlate:
    retardance: float
    angle: float


def rotation(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]], dtype=complex)


def jones_matrix(plate):
    """Jones matrix of a linear retarder with its optic axis at ``plate.angle``."""
    d = plate.retardance
    core = np.diag([np.exp(-0.5j * d), np.exp(0.5j * d)])
    return rotation(plate.angle) @ core @ rotation(-plate.angle)


def quarter_wave(angle):
    return WavePlate(QUARTER, angle)


def half_wave(angle):
    return WavePlate(HALF, angle)


def plate_product(*plates):
    """Matrix product of plates in the order written (the rightmost acts first)."""
    m = np.eye(2, dtype=complex)
    for p in plates:
        m = m @ jones_matrix(p)
    return m


@dataclass(frozen=True)
class PlateCheck:
    residual: float
    global_phase: float


def match_up_to_phase(actual, target):
    """Best gamma with actual ~ e^{i gamma} target, and the max-norm residual."""
    gamma = float(np.angle(np.trace(target.conj().T @ actual)))
    residual = float(np.abs(actual - np.exp(1j * gamma) * target).max())
    return PlateCheck(residual=residual, global_phase=gamma)


def plate_unitary(s, hwp_offset=0.0):
    """U(s) built from plates: Q(-pi/4) H(pi/4 - s/2) Q(-pi/4)."""
    return plate_product(quarter_wave(-np.pi / 4),
                         half_wave(np.pi / 4 - s / 2 + hwp_offset),
                         quarter_wave(-np.pi / 4))


def verify_plate_decomposition(s, hwp_offset=0.0):
    """Compare the three-plate product with the exponential form of U(s).

    ``hwp_offset`` perturbs the half-wave plate angle and exists for fault
    injection only.

    Raises
    ------
    DecompositionMismatch
        If the residual after removing the global phase exceeds 1e-6.
    """
    check = match_up_to_phase(plate_unitary(s, hwp_offset), experiment_unitary(s))
    if check.residual > MISMATCH_TOL:
        raise DecompositionMismatch(f"plate product differs from U(s={s}) by {check.residual:.3g}")
    return check


def arm_unitaries(s):
    """The two interferometer-arm evolutions (U_breve, U_hat).

    U_breve = Q(-pi/4) H(pi/4 - s/4) Q(-pi/4) and
    U_hat   = Q(pi/4)  H(-pi/4 - s/4) Q(pi/4).
    """
    u_breve = plate_product(quarter_wave(-np.pi / 4), half_wave(np.pi / 4 - s / 4),
                            quarter_wave(-np.pi / 4))
    u_hat = plate_product(quarter_wave(np.pi / 4), half_wave(-np.pi / 4 - s / 4),
                          quarter_wave(np.pi / 4))
    return u_breve, u_hat


def verify_arm_decomposition(s):
    """Check U_hat^dagger U_breve = e^{i gamma'} U(s); gamma' is reported."""
    u_breve, u_hat = arm_unitaries(s)
    check = match_up_to_phase(u_hat.conj().T @ u_breve, experiment_unitary(s))
    if check.residual > MISMATCH_TOL:
        raise DecompositionMismatch(f"arm product differs from U(s={s}) by {check.residual:.3g}")
    return check


def plate_fringe_offset(s):
    """Two-photon phase 2*gamma' contributed by the arm plates at opening angle s."""
    return 2.0 * verify_arm_decomposition(s).global_phase


def visibility_theory(alpha, s):
    """|<psi|U (x) U|psi>| = sqrt(cos^2 2s + cos^2 alpha sin^2 2s)."""
    return float(np.sqrt(np.cos(2 * s) ** 2 + (np.cos(alpha) * np.sin(2 * s)) ** 2))


def experimental_visibility(v_t, n, n0):
    """v_e = v_t (N - N0) / (N + N0)."""
    if n + n0 <= 0:
        raise InvalidCounts("N and N0 are both zero")
    if not 0 <= n0 <= n:
        raise InvalidCounts(f"need 0 <= N0 <= N, got N={n}, N0={n0}")
    return v_t * (n - n0) / (n + n0)


@dataclass(frozen=True)
class CoincidenceModel:
    """Expected coincidence fringe c_e(phi) for one (alpha, s) setting.

    Parameters
    ----------
    n, n0 : float
        Maximum and background counts of the s = 0 reference fringe.
    v_t : float
        Theoretical visibility |<psi|psi'>|.
    phi_h : float
        Holonomic phase, the fringe offset in 2*phi.
    plate_phase : float
        Extra two-photon phase 2*gamma' from the plate convention.
    """

    n: float
    n0: float
    v_t: float
    phi_h: float
    plate_phase: float = 0.0

    def __post_init__(self):
        if not 0 <= self.n0 <= self.n:
            raise InvalidCounts(f"need 0 <= N0 <= N, got N={self.n}, N0={self.n0}")
        if not 0.0 <= self.v_t <= 1.0 + 1e-12:
            raise ValueError(f"v_t must lie in [0, 1], got {self.v_t}")

    @classmethod
    def from_settings(cls, alpha, s, n, n0, include_plates=True):
        """Model for the prepared state at entanglement ``alpha`` and opening angle ``s``."""
        v_t = min(abs(experiment_overlap(alpha, s)), 1.0)
        try:
            phi_h = experiment_phase_closed(alpha, s)
        except UndefinedPhase:
            phi_h, v_t = 0.0, 0.0
        offset = plate_fringe_offset(s) if include_plates else 0.0
        return cls(n=n, n0=n0, v_t=v_t, phi_h=phi_h, plate_phase=offset)

    @property
    def reference_visibility(self):
        return (self.n - self.n0) / (self.n + self.n0)

    @property
    def visibility(self):
        return self.v_t * self.reference_visibility

    @property
    def fringe_phase(self):
        return float(wrap_phase(self.phi_h + self.plate_phase))


def expected_counts(phi, model):
    """(N - N0)/2 [1 + v_t cos(2 phi - Phi)] + N0, vectorised over ``phi``."""
    phi = np.asarray(phi, dtype=float)
    return (model.n - model.n0) / 2 * (1 + model.v_t * np.cos(2 * phi - model.fringe_phase)) + model.n0


def sample_counts(phi, model, seed):
    """Independent Poisson draws around :func:`expected_counts`, reproducible per seed."""
    rng = np.random.default_rng(seed)
    return rng.poisson(expected_counts(phi, model))
