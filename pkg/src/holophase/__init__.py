"""Holonomic phases of two-qubit pure states.

Numerical Pancharatnam / dynamical / holonomic phase decomposition along
bilocal evolutions, closed forms for Schmidt and wave-plate evolutions, the
coincidence-fringe measurement chain with Poisson counts and sinusoidal fits,
and border-crossing counts of maximally entangled paths in the SO(3) ball.
"""

from .core import kron, su2_exp, unwrap_phases, wrap_phase
from .errors import *  # noqa: F401,F403
from .evolutions import (Segment, Trajectory, experiment_trajectory, experiment_unitary,
                         sample, schmidt_evolution)
from .fitting import FitResult, FringeData, calibrate_reference, extract_holonomic, fit_sinusoid
from .optics import (CoincidenceModel, WavePlate, arm_unitaries, expected_counts,
                     experimental_visibility, jones_matrix, sample_counts,
                     verify_plate_decomposition, visibility_theory)
from .phases import (PhaseDecomposition, dynamical_phase, entanglement_phase_closed,
                     experiment_phase_closed, holonomic_phase, pancharatnam)
from .states import (SchmidtForm, preferred_direction, prepared_state, reduced_bloch,
                     schmidt_decompose, tangle)
from .topology import (BallPoint, HomotopyRecord, export_ball_path, mes_to_ball,
                       trace_ball)

__version__ = "0.1.0"
