"""Atoms crossing a long array of identical machines.

Every atom ends at the incoherent Gibbs state of the virtual qubit, but
coherent atoms may first gain coherence on the way. With the bath
temperatures swapped the virtual qubit is cold, and some atoms are cooled
and amplified at the same time.
"""

import numpy as np

from cohamp import MachineParams, converge, fixed_point, propagate, qubit_state

hot = MachineParams(beta2=0.12)
print(f"beta_v = {hot.beta_v:.3f}; fixed point z = {np.real(np.diag(fixed_point(hot)) @ [-1, 1]):.4f}")

for delta, c in [(-0.3, 0.3), (0.0, 0.45), (-0.8, 0.0)]:
    traj = converge(qubit_state(delta, c), hot, tol=1e-6)
    coh = traj.coherences
    print(
        f"start (delta={delta:+.1f}, c={c:.2f}): {traj.stages_run:6d} stages, "
        f"peak |c| {coh.max():.4f} at stage {int(np.argmax(coh))}, converged={traj.converged}"
    )

cold = hot.swapped_temperatures()
traj = propagate(qubit_state(0.8, 0.1), cold, 300)
print(f"\nswapped machine, beta_v = {cold.beta_v:.2f}")
print(f"excited population {traj.states[0][1, 1].real:.3f} -> {traj.final[1, 1].real:.3f}")
print(f"|c|                {traj.coherences[0]:.3f} -> {traj.coherences[-1]:.3f}")
