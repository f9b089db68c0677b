"""Pancharatnam, dynamical and holonomic phases along sampled trajectories.

The holonomic phase is the Pancharatnam phase arg<psi(0)|psi(tau)> minus the
dynamical phase Im int <psi|d psi/dt> dt. Both are computed numerically from
samples; the closed forms for the Schmidt and wave-plate evolutions live here
too so the two routes can be compared.
"""

from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from .core import unwrap_phases, wrap_phase
from .errors import EstimatorMismatch, InvalidTangle, StepTooLarge, UndefinedPhase
from .evolutions import MAX_POINTS, sample
from .states import as_state

OVERLAP_TOL = 1e-9
ESTIMATOR_TOL = 1e-6
# A step within this distance of a half turn is an exact zero crossing of the overlap.
_HALF_TURN_TOL = 1e-6


@dataclass(frozen=True)
class PhaseDecomposition:
    """Phases of one evolution.

    Wrapped values lie in (-pi, pi]. They are NaN when the endpoint overlap
    vanishes; in that case the unwrapped values stop at the last sample with a
    well-defined overlap and ``endpoint_defined`` is False.
    """

    pancharatnam_wrapped: float
    pancharatnam_unwrapped: float
    dynamical: float
    holonomic_wrapped: float
    holonomic_unwrapped: float
    overlap_magnitude: float
    endpoint_defined: bool = True
    zero_passages: int = 0


def pancharatnam(initial, final):
    """arg<initial|final> in (-pi, pi].

    Raises
    ------
    UndefinedPhase
        If the states are orthogonal (overlap below 1e-9).
    """
    ov = np.vdot(as_state(initial), as_state(final))
    if abs(ov) < OVERLAP_TOL:
        raise UndefinedPhase(f"|overlap| = {abs(ov):.3g}")
    return float(wrap_phase(np.angle(ov)))


def _local_generator(seg):
    return np.kron(seg.gen_a, np.eye(2)) + np.kron(np.eye(2), seg.gen_b)


def _segment_estimates(samples):
    """Per-segment dynamical phase by Simpson quadrature and by finite differences.

    The finite-difference sum Im sum <psi_k|psi_k+1 - psi_k> is a midpoint rule
    with an O(h^2) error; one Richardson step against the every-other-sample
    sum lifts it to O(h^4) so the two estimators can be held to 1e-6.
    """
    simp, fd = [], []
    for seg, sl in zip(samples.trajectory.segments, samples.segment_slices()):
        psi = samples.states[sl]
        t = samples.t[sl]
        g = _local_generator(seg)
        energy = np.einsum("ti,ij,tj->t", psi.conj(), g, psi).real
        simp.append(-simpson(energy, x=t) if seg.duration > 0 else 0.0)

        def fd_sum(p):
            return np.einsum("ti,ti->t", p[:-1].conj(), p[1:] - p[:-1]).imag.sum()

        fd.append((4 * fd_sum(psi) - fd_sum(psi[::2])) / 3)
    return np.array(simp), np.array(fd)


def _checked_dynamical(trajectory, tol=ESTIMATOR_TOL):
    """Sample and integrate, refining until quadrature and finite differences agree."""
    traj = trajectory
    while True:
        samples = sample(traj)
        simp, fd = _segment_estimates(samples)
        gap = np.abs(simp - fd).max() if simp.size else 0.0
        if gap <= tol:
            return samples, simp
        nseg = len(traj.segments)
        if nseg * (2 * samples.n + 1) > MAX_POINTS:
            raise EstimatorMismatch(
                f"quadrature and finite-difference dynamical phases differ by {gap:.3g}")
        traj = samples.trajectory.refined()


def segment_dynamical_phases(trajectory):
    """Dynamical phase accumulated on each segment (array, radians)."""
    _, simp = _checked_dynamical(trajectory)
    return simp


def dynamical_phase(trajectory):
    """Im int <psi|d psi/dt> dt = -int <psi|G|psi> dt summed over segments.

    Raises
    ------
    EstimatorMismatch
        Simpson and finite-difference estimates still disagree by more than
        1e-6 at the refinement cap.
    """
    return float(segment_dynamical_phases(trajectory).sum())


def _lift(samples):
    """Continuous lift of arg<psi(0)|psi(t_k)> over the samples.

    Samples where the overlap vanishes are skipped. Between defined samples
    the principal step is used; a step of exactly a half turn (the overlap
    changes sign through zero, as for maximally entangled states) is taken as
    -pi, matching the limit from slightly less entangled states.

    Returns (lifted phase at the last defined sample, index of that sample,
    number of zero passages).
    """
    ov = samples.states @ samples.trajectory.initial.conj()
    ok = np.flatnonzero(np.abs(ov) >= OVERLAP_TOL)
    f = ov[ok]
    steps = np.angle(f[1:] * f[:-1].conj())
    half = np.abs(steps) > np.pi - _HALF_TURN_TOL
    if (np.abs(steps[~half]) >= np.pi / 2).any():
        raise StepTooLarge("overlap phase moves too fast between samples")
    # unwrap each zero-free run, then join runs with -pi
    args = np.angle(f)
    cuts = np.flatnonzero(half) + 1
    total = 0.0
    start = 0
    for end in list(cuts) + [len(f)]:
        run = unwrap_phases(args[start:end])
        if start == 0:
            total = run[-1]
        else:
            jump = wrap_phase(steps[start - 1] + np.pi) - np.pi
            total += jump + (run[-1] - run[0])
        start = end
    return float(total), int(ok[-1]), int(half.sum())


def holonomic_phase(trajectory, strict=True):
    """Pancharatnam, dynamical and holonomic phases of a trajectory.

    Parameters
    ----------
    strict : bool
        If True, a vanishing endpoint overlap raises :class:`UndefinedPhase`;
        otherwise the decomposition is returned with NaN wrapped values.
    """
    traj = trajectory
    while True:
        samples, seg_dyn = _checked_dynamical(traj)
        try:
            lifted, last, passes = _lift(samples)
            break
        except StepTooLarge:
            traj = samples.trajectory.refined()
            if len(traj.segments) * (traj.samples_per_segment + 1) > MAX_POINTS:
                raise
    dyn = float(seg_dyn.sum())
    final = samples.states[-1]
    ov = np.vdot(samples.trajectory.initial, final)
    defined = abs(ov) >= OVERLAP_TOL
    if not defined and strict:
        raise UndefinedPhase(f"endpoint overlap {abs(ov):.3g} vanishes")
    if defined:
        p_wrapped = float(wrap_phase(np.angle(ov)))
        h_wrapped = float(wrap_phase(p_wrapped - dyn))
    else:
        p_wrapped = h_wrapped = float("nan")
    return PhaseDecomposition(
        pancharatnam_wrapped=p_wrapped,
        pancharatnam_unwrapped=lifted,
        dynamical=dyn,
        holonomic_wrapped=h_wrapped,
        holonomic_unwrapped=lifted - dyn,
        overlap_magnitude=float(abs(ov)),
        endpoint_defined=bool(defined),
        zero_passages=passes,
    )


def entanglement_phase_closed(tangle):
    """-2pi (1 - sqrt(1 - T)), the holonomic phase of a full Schmidt evolution."""
    if not 0.0 <= tangle <= 1.0:
        raise InvalidTangle(f"tangle must lie in [0, 1], got {tangle!r}")
    return float(-2 * np.pi * (1 - np.sqrt(1 - tangle))) + 0.0


def experiment_overlap(alpha, s):
    """<psi|U(s) (x) U(s)|psi> = cos 2s - i cos(alpha) sin 2s for the prepared state."""
    c = np.cos(alpha)
    if abs(c) < 1e-15:
        c = 0.0
    return complex(np.cos(2 * s), -c * np.sin(2 * s))


def experiment_phase_closed(alpha, s):
    """Two-argument arctangent form of the wave-plate holonomic phase.

    Returns atan2(-cos(alpha) sin 2s, cos 2s) in (-pi, pi]. For a maximally
    entangled input this is exactly 0 or pi.

    Raises
    ------
    UndefinedPhase
        At alpha = pi/2, s = pi/4 where the overlap vanishes.
    """
    ov = experiment_overlap(alpha, s)
    if abs(ov) < OVERLAP_TOL:
        raise UndefinedPhase(f"zero overlap at alpha={alpha!r}, s={s!r}")
    re = ov.real if abs(ov.real) >= 1e-15 else 0.0
    im = ov.imag if abs(ov.imag) >= 1e-15 else 0.0
    return float(wrap_phase(np.arctan2(im, re)))


def schmidt_overlap(alpha, theta):
    """<psi(0)|psi(theta)> = cos theta - i |cos alpha| sin theta for a Schmidt rotation."""
    return complex(np.cos(theta), -abs(np.cos(alpha)) * np.sin(theta))
