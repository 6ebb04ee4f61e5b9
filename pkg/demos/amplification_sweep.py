"""Where does a single stationary machine amplify atomic coherence?

Sweeps the hot-bath temperature for an atom below the equator, then scans
the Bloch disk at fixed temperatures. Prints a coarse text picture instead of
plotting.
"""

import numpy as np

from cohamp import MachineParams, flow_report, qubit_state

p = MachineParams()  # beta1 = 1.2, beta2 = 0.24, phi = 0.02, r = 2
atom = qubit_state(-0.6, 0.2)

print("beta2/beta1   Cdot_a/phi^2   Cdot_max/phi^2   Sdot_tot/phi^2")
for b in np.linspace(0.05, 1.0, 20):
    f = flow_report(p.with_(beta2=b * p.beta1), atom)
    print(f"{b:10.3f} {f.Cdot_a / p.phi**2:14.4f} {f.Cdot_max / p.phi**2:16.4f} {f.Sdot_tot / p.phi**2:16.4f}")

# Cdot_max only changes sign where the excitation current reverses
print("\nBloch disk, '+' where Cdot_a > 0 (x to the right, z upwards):")
for z in np.linspace(0.9, -0.9, 13):
    line = ""
    for x in np.linspace(-0.9, 0.9, 37):
        if x * x + z * z >= 0.98:
            line += " "
        elif abs(x) < 1e-9:
            line += "|"
        else:
            line += "+" if flow_report(p, qubit_state(z, x / 2)).Cdot_a > 0 else "."
    print(line)
