"""Maximally entangled states as points of the SO(3) ball, and border crossings.

Every maximally entangled state can be written (I (x) V)|Phi+> with
|Phi+> = (|HH> + |VV>)/sqrt(2) and V unitary; V = sqrt(2) M^T for the
amplitude matrix M. Dividing V by a square root of its determinant gives an
SU(2) element W, defined up to sign. Its rotation, as axis times angle in
[0, pi], is the ball point. Tracking W continuously along a path, the ball
border (rotation angle pi) is crossed whenever tr W changes sign.
"""

import csv
from dataclasses import dataclass, field

import numpy as np

from .core import PAULI, su2_axis_angle
from .errors import LeavesMESManifold, NotMaximallyEntangled, StepTooLarge
from .evolutions import MAX_POINTS, sample
from .states import amplitude_matrix, as_state, tangle

MES_TOL = 1e-6
BORDER_TOL = 1e-9

PHI_PLUS = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)


@dataclass(frozen=True)
class BallPoint:
    r: np.ndarray

    @property
    def radius(self):
        return float(np.linalg.norm(self.r))

    def same_as(self, other, tol=1e-9):
        """Equality in the ball, with antipodal border points identified."""
        if np.abs(self.r - other.r).max() <= tol:
            return True
        on_border = abs(self.radius - np.pi) <= tol and abs(other.radius - np.pi) <= tol
        return bool(on_border and np.abs(self.r + other.r).max() <= tol)


def mes_to_su2(psi, branch_hint=None):
    """SU(2) element W with psi = e^{i chi} (I (x) W)|Phi+>.

    The sign of W is picked closest to ``branch_hint`` if given, otherwise so
    that tr W >= 0.

    Raises
    ------
    NotMaximallyEntangled
        If the tangle is below 1 - 1e-6.
    """
    psi = as_state(psi)
    t = tangle(psi)
    if t < 1 - MES_TOL:
        raise NotMaximallyEntangled(f"tangle {t:.9f} is below 1 - {MES_TOL}")
    v = np.sqrt(2) * amplitude_matrix(psi).T
    w = v / np.sqrt(np.linalg.det(v))
    if branch_hint is not None:
        if np.linalg.norm(w + branch_hint) < np.linalg.norm(w - branch_hint):
            w = -w
    elif np.trace(w).real < 0:
        w = -w
    return w


def su2_to_ball(w):
    n, omega = su2_axis_angle(w)
    if omega > np.pi:
        n, omega = -n, 2 * np.pi - omega
    return BallPoint(omega * n)


def _ball_coords(ws):
    """Vectorised :func:`su2_to_ball` over a stack of SU(2) matrices, shape (n, 3)."""
    a0 = np.einsum("kii->k", ws).real / 2
    v = np.stack([(0.5j * np.einsum("kij,ji->k", ws, p)).real for p in PAULI], axis=1)
    vn = np.linalg.norm(v, axis=1)
    # fold omega in (pi, 2pi] onto the other sign of W
    sgn = np.where(a0 < 0, -1.0, 1.0)
    angle = 2 * np.arctan2(vn, np.abs(a0))
    with np.errstate(invalid="ignore", divide="ignore"):
        axis = np.where(vn[:, None] > 1e-15, v / vn[:, None], 0.0)
    return sgn[:, None] * angle[:, None] * axis


def mes_to_ball(psi, branch_hint=None):
    """Ball coordinates (rotation angle times axis, radians) of a maximally entangled state."""
    return su2_to_ball(mes_to_su2(psi, branch_hint))


@dataclass
class HomotopyRecord:
    """Border crossings of a maximally entangled trajectory in the SO(3) ball.

    ``grazing`` counts border contacts that do not pass through (the path
    touches rotation angle pi and turns back); they add nothing to the phase.
    """

    crossings: int
    path_points: list
    t: np.ndarray
    segment: np.ndarray
    crossing_indices: list = field(default_factory=list)
    grazing: int = 0
    ends_on_border: bool = False

    @property
    def parity(self):
        return "odd" if self.crossings % 2 else "even"

    @property
    def topological_phase(self):
        return self.crossings * np.pi


def _lift_su2(states, flip_branch):
    """Continuous SU(2) lift of sampled maximally entangled states, shape (n, 2, 2)."""
    tangles = 4 * np.abs(states[:, 0] * states[:, 3] - states[:, 1] * states[:, 2]) ** 2
    low = np.flatnonzero(tangles < 1 - MES_TOL)
    if low.size:
        k = int(low[0])
        raise LeavesMESManifold(f"sample {k} has tangle {tangles[k]:.9f}")
    v = np.sqrt(2) * states.reshape(-1, 2, 2).transpose(0, 2, 1)
    w = v / np.sqrt(np.linalg.det(v))[:, None, None]
    w[0] = mes_to_su2(states[0])
    if flip_branch:
        w[0] = -w[0]
    # Re tr(W_{k-1}^dagger W_k) / 2 is the cosine of half the relative rotation
    rel = np.einsum("kij,kij->k", w[:-1].conj(), w[1:]).real / 2
    signs = np.concatenate([[1.0], np.cumprod(np.where(rel < 0, -1.0, 1.0))])
    w *= signs[:, None, None]
    step = np.abs(rel)
    if (step < np.cos(np.pi / 4)).any():
        k = int(np.flatnonzero(step < np.cos(np.pi / 4))[0]) + 1
        raise StepTooLarge(f"SU(2) branch jumps by more than pi/2 at sample {k}")
    return w


def _count_crossings(a0):
    """Sign changes of cos(omega/2) = tr(W)/2, skipping samples on the border."""
    idx = np.flatnonzero(np.abs(a0) > BORDER_TOL)
    crossings, grazing = [], 0
    for i, j in zip(idx[:-1], idx[1:]):
        if np.sign(a0[i]) != np.sign(a0[j]):
            crossings.append(int(j))
        elif j > i + 1:
            grazing += 1
    return crossings, grazing


def trace_ball(trajectory, flip_branch=False):
    """Follow a maximally entangled trajectory through the ball and count crossings.

    Parameters
    ----------
    flip_branch : bool
        Start the SU(2) lift on the -W branch; the crossing count must not change.

    Raises
    ------
    LeavesMESManifold
        A sampled state is not maximally entangled.
    StepTooLarge
        Branch continuity fails even at the refinement cap.
    """
    traj = trajectory
    while True:
        samples = sample(traj)
        try:
            ws = _lift_su2(samples.states, flip_branch)
            break
        except StepTooLarge:
            traj = samples.trajectory.refined()
            if len(traj.segments) * (traj.samples_per_segment + 1) > MAX_POINTS:
                raise
    a0 = np.einsum("kii->k", ws).real / 2
    crossings, grazing = _count_crossings(a0)
    return HomotopyRecord(
        crossings=len(crossings),
        path_points=[BallPoint(r) for r in _ball_coords(ws)],
        t=samples.t,
        segment=samples.segment,
        crossing_indices=crossings,
        grazing=grazing,
        ends_on_border=bool(abs(a0[-1]) <= BORDER_TOL),
    )


def export_ball_path(record):
    """Rows (t, r_x, r_y, r_z, segment_index, crossing_flag) for re-plotting paths."""
    flags = set(record.crossing_indices)
    return [(float(t), float(p.r[0]), float(p.r[1]), float(p.r[2]), int(seg), int(k in flags))
            for k, (t, p, seg) in enumerate(zip(record.t, record.path_points, record.segment))]


BALL_COLUMNS = ("t", "r_x", "r_y", "r_z", "segment_index", "crossing_flag")


def write_ball_path_csv(record, fh):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(BALL_COLUMNS)
    for row in export_ball_path(record):
        w.writerow([repr(row[0]), repr(row[1]), repr(row[2]), repr(row[3]), row[4], row[5]])
