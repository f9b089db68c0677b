"""Maximally entangled paths in the SO(3) ball.

A maximally entangled state is (I (x) V)|Phi+> for a rotation V; tracing V
along the evolution gives a path in the ball of radius pi whose antipodal
border points are identified. Each pass through the border adds pi to the
phase, which is why the MES phase can only take the values 0 and pi.
"""

import numpy as np

from holophase import experiment_phase_closed, experiment_trajectory, holonomic_phase, trace_ball
from holophase.evolutions import schmidt_evolution
from holophase.states import schmidt_decompose

phi_plus = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)

loop = schmidt_evolution(schmidt_decompose(phi_plus), eta=1, initial=phi_plus)
rec = trace_ball(loop)
print(f"Schmidt loop: {rec.crossings} crossings at t = "
      f"{np.round(rec.t[rec.crossing_indices], 4).tolist()}, phase {rec.topological_phase:.4f}")

print(f"\n{'s / (pi/2)':>10} {'crossings':>9} {'grazing':>8} {'l pi':>7} {'holonomic':>10} {'closed':>8}")
for frac in (0.1, 0.3, 0.45, 0.55, 0.7, 0.9):
    s = frac * np.pi / 2
    traj = experiment_trajectory(phi_plus, s)
    rec = trace_ball(traj)
    d = holonomic_phase(traj)
    print(f"{frac:10.2f} {rec.crossings:9d} {rec.grazing:8d} {rec.topological_phase:7.4f} "
          f"{d.holonomic_wrapped:10.4f} {experiment_phase_closed(np.pi / 2, s):8.4f}")

rec = trace_ball(experiment_trajectory(phi_plus, np.pi / 4))
print(f"\ns = pi/4 ends on the border: {rec.ends_on_border} "
      f"(final radius {rec.path_points[-1].radius:.6f})")
