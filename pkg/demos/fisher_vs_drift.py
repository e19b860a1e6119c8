"""How the drift velocity changes the information left in the detector state.

Evaluates the phase, polar-angle and temperature Fisher informations as w
grows, each by two independent routes.
"""
import math

import numpy as np

from relqfi import compute_qfi

a, tau = math.pi, 1.0
print(f"{'w':>5} {'F_phi':>10} {'F_theta':>10} {'F_beta':>10} {'max route gap':>14}")
for w in np.linspace(0.0, 0.1, 6):
    row, gap = [], 0.0
    for param, theta in (("phi", math.pi / 2), ("theta", 0.0), ("beta", math.pi)):
        f1 = compute_qfi(param, theta, tau, a=a, w=w, method="bloch-derivative").fisher
        f2 = compute_qfi(param, theta, tau, a=a, w=w, method="sld-oracle").fisher
        row.append(f1)
        gap = max(gap, abs(f1 - f2) / f1)
    print(f"{w:5.2f} {row[0]:10.6f} {row[1]:10.6f} {row[2]:10.6f} {gap:14.2e}")
