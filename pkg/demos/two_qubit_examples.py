"""Local coherence under an energy-preserving exchange of two qubits."""

import numpy as np

from cohamp.benchlab import (
    ThetaFamilyParams,
    coherence_ratios,
    degenerate_hamiltonian,
    delta_c_curve,
    delta_c_root,
    example_states,
    stage_diagram,
    theta_unitary,
)

rho_a, rho_b = example_states(0.35)
d = stage_diagram(rho_a, rho_b, theta_unitary(np.pi / 4), degenerate_hamiltonian())
print("stage  label            C        A")
for stage, label, c, a in d.rows():
    print(f"{stage:5d}  {label:15s} {c:.5f}  {a:.5f}")

print(f"\nlocal coherence gain is positive up to c = {delta_c_root():.5f}")
for c in (0.1, 0.3, 0.45, 0.5):
    print(f"  c = {c:.2f}: dC = {delta_c_curve(c):+.5f}")

print("\nratios for an inverted qubit next to a ground-biased one:")
for theta in np.linspace(0, np.pi / 2, 7):
    ra, rb = coherence_ratios(ThetaFamilyParams(-0.9, 0.8, 1.0, np.pi / 2, theta))
    print(f"  theta = {theta:.3f}: {ra:.4f} {rb:.4f}")
