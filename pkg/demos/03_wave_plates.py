"""Wave-plate realisations of U(s) in Jones calculus.

The retarder convention is R(t) diag(e^{-i d/2}, e^{i d/2}) R(-t). Under it
the three-plate stack Q(-pi/4) H(pi/4 - s/2) Q(-pi/4) and the arm product
U_hat^dagger U_breve reproduce U(s) with no leftover global phase, so the
plates add nothing to the measured fringe offset.
"""

import numpy as np

from holophase.optics import (experimental_visibility, verify_arm_decomposition,
                              verify_plate_decomposition, visibility_theory)

print(f"{'s':>7} {'plate res':>10} {'arm res':>10} {'gamma':>10} {'gamma arm':>10}")
for s in np.linspace(0, np.pi / 2, 7):
    p, a = verify_plate_decomposition(s), verify_arm_decomposition(s)
    print(f"{s:7.4f} {p.residual:10.1e} {a.residual:10.1e} {p.global_phase:10.1e} {a.global_phase:10.1e}")

print("\ntheoretical visibility |<psi|U (x) U|psi>| for the MES:")
for s in (0.0, np.pi / 8, np.pi / 4, 3 * np.pi / 8):
    print(f"  s = {s:.4f}: {visibility_theory(np.pi / 2, s):.4f}")

inside = experimental_visibility(1.0, 11911, 1616)
outside = experimental_visibility(1.0, 10000, 5068)
print(f"\nreference visibility inside the HOM dip {inside:.4f}, outside {outside:.4f}, "
      f"ratio {outside / inside:.3f}")
