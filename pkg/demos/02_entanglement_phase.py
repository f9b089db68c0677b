"""Holonomic phase of a full Schmidt loop as a function of the tangle.

Each qubit is rotated by 2pi about its own Schmidt axis. For a product state
this is a trivial loop; for a maximally entangled state the phase reaches
-2pi. In between it follows -2pi (1 - sqrt(1 - T)).
"""

import numpy as np

from holophase import entanglement_phase_closed, holonomic_phase, prepared_state, schmidt_decompose
from holophase.evolutions import schmidt_evolution

print(f"{'T':>5} {'numeric':>12} {'closed':>12} {'dynamical':>11}")
for t in np.linspace(0, 1, 11):
    psi = prepared_state(float(np.arcsin(np.sqrt(t))))
    form = schmidt_decompose(psi)
    # at T = 1 the Schmidt axes are a free choice; pick eta = +1 on the pinned basis
    traj = schmidt_evolution(form, eta=1 if form.degenerate else None, initial=psi)
    d = holonomic_phase(traj)
    print(f"{t:5.2f} {d.holonomic_unwrapped:12.8f} {entanglement_phase_closed(t):12.8f} {d.dynamical:11.6f}")

print("\nthe dynamical part is -2pi |cos a|; it shrinks to zero as T -> 1")
