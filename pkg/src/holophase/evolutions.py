"""One-parameter bilocal evolutions and their sampling.

A trajectory is a chain of segments. On segment k the state is

    psi(t) = exp(-i (t - t0) G_a) (x) exp(-i (t - t0) G_b) psi(t0),   t in [t0, t1],

with the parameter t continuing from one segment into the next.
"""

from dataclasses import dataclass, field

import numpy as np

from .core import SIGMA1, SIGMA2, hermitian_flow, is_hermitian, su2_exp
from .errors import DegenerateSchmidt, NonConvergent, StepTooLarge
from .states import as_state, schmidt_decompose

DEFAULT_SAMPLES = 1024
MAX_POINTS = 2 ** 20


@dataclass(frozen=True)
class Segment:
    gen_a: np.ndarray
    gen_b: np.ndarray
    t0: float
    t1: float

    def __post_init__(self):
        for g in (self.gen_a, self.gen_b):
            if np.shape(g) != (2, 2) or not is_hermitian(g):
                raise ValueError("segment generators must be Hermitian 2x2 matrices")
        if not self.t1 >= self.t0:
            raise ValueError("segment needs t1 >= t0")

    @property
    def duration(self):
        return self.t1 - self.t0

    def propagators(self, dt):
        """Local propagators exp(-i dt G) for qubits a and b, vectorised over dt."""
        return hermitian_flow(self.gen_a, dt), hermitian_flow(self.gen_b, dt)

    def unitary(self):
        ua, ub = self.propagators(self.duration)
        return np.kron(ua, ub)


@dataclass(frozen=True)
class Trajectory:
    initial: np.ndarray
    segments: tuple
    samples_per_segment: int = DEFAULT_SAMPLES

    def __post_init__(self):
        object.__setattr__(self, "initial", as_state(self.initial))
        object.__setattr__(self, "segments", tuple(self.segments))
        n = self.samples_per_segment
        if n < 2 or n % 2:
            raise ValueError("samples_per_segment must be an even integer >= 2")

    def refined(self, factor=2):
        return Trajectory(self.initial, self.segments, self.samples_per_segment * factor)

    def unitary(self):
        """Composite two-qubit propagator over all segments."""
        u = np.eye(4, dtype=complex)
        for seg in self.segments:
            u = seg.unitary() @ u
        return u

    def endpoint(self):
        return self.unitary() @ self.initial


@dataclass
class Samples:
    """Sampled states of a trajectory.

    ``t``, ``states`` and ``segment`` are flat over all segments; each segment
    contributes ``n + 1`` points including both of its endpoints, so segment
    joints appear twice.
    """

    t: np.ndarray
    states: np.ndarray
    segment: np.ndarray
    n: int
    trajectory: Trajectory = field(repr=False)

    def segment_slices(self):
        step = self.n + 1
        return [slice(k * step, (k + 1) * step) for k in range(len(self.trajectory.segments))]

    def __iter__(self):
        return iter(zip(self.t, self.states))

    def __len__(self):
        return len(self.t)


def _evaluate(trajectory, n):
    ts, states, seg_idx = [], [], []
    psi0 = trajectory.initial
    for k, seg in enumerate(trajectory.segments):
        t = np.linspace(seg.t0, seg.t1, n + 1)
        ua, ub = seg.propagators(t - seg.t0)
        m0 = psi0.reshape(2, 2)
        # (A (x) B) vec(M) = vec(A M B^T)
        m = np.einsum("tij,jk,tlk->til", ua, m0, ub)
        block = m.reshape(-1, 4)
        ts.append(t)
        states.append(block)
        seg_idx.append(np.full(n + 1, k))
        psi0 = block[-1]
    if not trajectory.segments:
        ts, states, seg_idx = [np.zeros(1)], [psi0[None, :]], [np.zeros(1, dtype=int)]
    return np.concatenate(ts), np.concatenate(states), np.concatenate(seg_idx)


def _check_steps(states):
    ov = np.einsum("ij,ij->i", states[:-1].conj(), states[1:])
    bad = (np.abs(ov) < 1e-9) | (np.abs(np.angle(ov)) >= np.pi / 2)
    return not bad.any()


def sample(trajectory, refine=True):
    """Sample a trajectory, doubling the density until consecutive overlaps are safe.

    Consecutive states must overlap with argument magnitude below pi/2. With
    ``refine=False`` a violation raises :class:`StepTooLarge` instead.

    Raises
    ------
    StepTooLarge
        Coarse sampling with ``refine=False``.
    NonConvergent
        The total point count would exceed 2**20.
    """
    n = trajectory.samples_per_segment
    nseg = max(len(trajectory.segments), 1)
    while True:
        if nseg * (n + 1) > MAX_POINTS:
            raise NonConvergent(f"refinement cap of {MAX_POINTS} points exceeded")
        t, states, seg = _evaluate(trajectory, n)
        if _check_steps(states):
            traj = trajectory if n == trajectory.samples_per_segment else Trajectory(
                trajectory.initial, trajectory.segments, n)
            return Samples(t=t, states=states, segment=seg, n=n, trajectory=traj)
        if not refine:
            raise StepTooLarge(f"{n} samples per segment is too coarse")
        n *= 2


def schmidt_evolution(schmidt, theta_max=2 * np.pi, eta=None, initial=None,
                      samples_per_segment=DEFAULT_SAMPLES):
    """Bilocal rotation of both qubits about their Schmidt directions.

    Each qubit is generated by sigma^(k)/2 with
    ``sigma^(k) = eta (|k><k| - |k perp><k perp|)``; theta runs from 0 to
    ``theta_max`` (2pi for a full Schmidt evolution).

    Parameters
    ----------
    schmidt : SchmidtForm or array_like
        Schmidt form of the initial state, or the state itself.
    eta : {+1, -1}, optional
        Overrides the sign taken from ``schmidt``. Mandatory for degenerate
        (maximally entangled) forms, where the rotation axes are a free choice.
    initial : array_like, optional
        Initial state; defaults to the state rebuilt from ``schmidt``.
    """
    if not hasattr(schmidt, "basis_a"):
        initial = as_state(schmidt) if initial is None else initial
        schmidt = schmidt_decompose(schmidt)
    if eta is None:
        if schmidt.degenerate or schmidt.eta == 0:
            raise DegenerateSchmidt("maximally entangled input: pass eta and rely on the pinned basis")
        eta = schmidt.eta
    if eta not in (1, -1):
        raise ValueError("eta must be +1 or -1")

    def gen(basis):
        k, kp = basis
        return 0.5 * eta * (np.outer(k, k.conj()) - np.outer(kp, kp.conj()))

    seg = Segment(gen(schmidt.basis_a), gen(schmidt.basis_b), 0.0, float(theta_max))
    psi0 = schmidt.reconstruct() if initial is None else initial
    return Trajectory(psi0, (seg,), samples_per_segment)


def _experiment_factors(s):
    """(axis, angle) of the three SU(2) factors of U(s), rightmost first."""
    return [
        (np.array([0.0, -1.0, 0.0]), np.pi / 2),
        (np.array([np.sin(s), np.cos(s), 0.0]), np.pi),
        (np.array([0.0, -1.0, 0.0]), np.pi / 2),
    ]


def experiment_unitary(s):
    """U(s) = exp(i pi/4 s2) exp(-i pi/2 (s1 sin s + s2 cos s)) exp(i pi/4 s2)."""
    u = np.eye(2, dtype=complex)
    for axis, angle in _experiment_factors(s):
        u = su2_exp(axis, angle) @ u
    return u


def experiment_trajectory(initial, s, samples_per_segment=DEFAULT_SAMPLES):
    """Piecewise flow realising (U(s) (x) U(s)) on ``initial``.

    One segment per exponential factor, applied right to left, each with the
    same generator on both qubits.
    """
    segments = []
    t0 = 0.0
    for axis, angle in _experiment_factors(s):
        g = 0.5 * (axis[0] * SIGMA1 + axis[1] * SIGMA2)
        segments.append(Segment(g, g, t0, t0 + angle))
        t0 += angle
    return Trajectory(initial, tuple(segments), samples_per_segment)


def identity_trajectory(initial, duration=1.0, samples_per_segment=DEFAULT_SAMPLES):
    zero = np.zeros((2, 2), dtype=complex)
    return Trajectory(initial, (Segment(zero, zero, 0.0, duration),), samples_per_segment)
