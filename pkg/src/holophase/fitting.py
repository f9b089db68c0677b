"""Sinusoidal fits of coincidence fringes and phase calibration.

The fringe model A + B cos 2phi + C sin 2phi is linear in (A, B, C), so the
fit is a plain least-squares solve followed by one Poisson-weighted pass.
"""

import csv
from dataclasses import dataclass, field

import numpy as np

from .core import wrap_phase
from .errors import DegenerateGrid, NoReference, PhaseUndetermined

MIN_POINTS = 5
MIN_CONTRAST = 1e-6
# distinct points always give full rank, so degeneracy is numerical conditioning
MAX_CONDITION = 1e8


@dataclass
class FringeData:
    phi: np.ndarray
    counts: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.phi = np.asarray(self.phi, dtype=float)
        self.counts = np.asarray(self.counts, dtype=float)
        if self.phi.shape != self.counts.shape or self.phi.ndim != 1:
            raise ValueError("phi and counts must be 1-D arrays of equal length")
        if self.phi.size < MIN_POINTS:
            raise ValueError(f"a fringe needs at least {MIN_POINTS} points")
        if np.any(self.counts < 0):
            raise ValueError("counts must be non-negative")
        folded = np.sort(np.mod(self.phi, np.pi))
        gaps = np.diff(np.concatenate([folded, [folded[0] + np.pi]]))
        if np.any(gaps < 1e-12):
            raise ValueError("phi values must be distinct modulo pi")


@dataclass(frozen=True)
class FitResult:
    baseline: float
    amplitude: float
    phase: float
    residual_rms: float
    phase_stderr: float
    metadata: dict = field(default_factory=dict)

    @property
    def visibility(self):
        return self.amplitude / self.baseline


def _design(phi):
    return np.column_stack([np.ones_like(phi), np.cos(2 * phi), np.sin(2 * phi)])


def fit_sinusoid(data):
    """Fit ``A + B cos 2phi + C sin 2phi`` and return offset and contrast.

    The phase is atan2(C, B), so a fringe peaking at 2phi = Phi reports Phi.
    Counts are first fit by ordinary least squares; the fitted curve then sets
    Poisson weights (variance = model counts) for a single weighted pass,
    whose covariance gives ``phase_stderr``.

    Raises
    ------
    DegenerateGrid
        The phi grid cannot separate the three basis functions.
    PhaseUndetermined
        Contrast B_mag / A below 1e-6, e.g. a flat fringe at zero visibility.
    """
    x = _design(data.phi)
    y = data.counts
    if np.linalg.cond(x) > MAX_CONDITION:
        raise DegenerateGrid("phi grid is degenerate for a 2phi sinusoid")
    coef, *_ = np.linalg.lstsq(x, y, rcond=None)
    mu = np.clip(x @ coef, 1.0, None)
    w = 1.0 / mu
    xtw = x.T * w
    cov = np.linalg.inv(xtw @ x)
    coef = cov @ (xtw @ y)

    a, b, c = coef
    bmag = float(np.hypot(b, c))
    if a <= 0 or bmag / a < MIN_CONTRAST:
        raise PhaseUndetermined(f"fringe contrast {bmag / a if a > 0 else 0.0:.3g} too small")
    phase = float(wrap_phase(np.arctan2(c, b)))
    grad = np.array([0.0, -c, b]) / bmag ** 2
    stderr = float(np.sqrt(grad @ cov @ grad))
    resid = y - x @ coef
    return FitResult(baseline=float(a), amplitude=bmag, phase=phase,
                     residual_rms=float(np.sqrt(np.mean(resid ** 2))),
                     phase_stderr=stderr, metadata=dict(data.metadata))


def circular_mean(phases):
    phases = np.asarray(phases, dtype=float)
    return float(np.arctan2(np.sin(phases).sum(), np.cos(phases).sum()))


def calibrate_reference(runs):
    """Phase origin from s = 0 fits: the circular mean of their fitted phases.

    Raises
    ------
    NoReference
        If ``runs`` is empty.
    ValueError
        If a run's metadata records a nonzero ``s``.
    """
    runs = list(runs)
    if not runs:
        raise NoReference("no reference fringes supplied")
    for r in runs:
        if r.metadata.get("s", 0.0) != 0.0:
            raise ValueError(f"reference runs need s = 0, got s = {r.metadata['s']}")
    return circular_mean([r.phase for r in runs])


def extract_holonomic(fit, reference):
    """Fitted offset relative to the calibrated origin, wrapped to (-pi, pi]."""
    return float(wrap_phase(fit.phase - reference))


def write_fringe_csv(data, fh):
    """Write ``phi_rad,counts`` rows with a header."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["phi_rad", "counts"])
    integral = np.all(data.counts == np.round(data.counts))
    for p, c in zip(data.phi, data.counts):
        w.writerow([repr(float(p)), int(c) if integral else repr(float(c))])


def read_fringe_csv(fh, metadata=None):
    rows = list(csv.DictReader(fh))
    phi = [float(r["phi_rad"]) for r in rows]
    counts = [float(r["counts"]) for r in rows]
    return FringeData(np.array(phi), np.array(counts), dict(metadata or {}))
