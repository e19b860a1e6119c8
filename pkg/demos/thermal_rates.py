"""Excitation and decay rates of an accelerated detector.

Compares the closed-form rates with the numeric quadrature of the field
correlator along the worldline, and shows the thermal ratio exp(-2 pi / a).
"""
import math

from relqfi import DetectorParams, Trajectory, rates_nonrel, rates_numeric

p = DetectorParams(omega0=1.0, mu=0.1)

print(f"{'a':>6} {'g+/g- closed':>14} {'g+/g- numeric':>14} {'exp(-2pi/a)':>12}")
for a in (0.5, 1.0, math.pi, 10.0):
    closed = rates_nonrel(p, a, 0.0)
    num = rates_numeric(Trajectory.uniform(a), p)
    print(f"{a:6.3f} {closed.gamma_plus / closed.gamma_minus:14.6e} "
          f"{num.gamma_plus / num.gamma_minus:14.6e} {math.exp(-2 * math.pi / a):12.6e}")

# a small transverse drift adds an order-w^2 correction to the total rate
print("\nA / gamma0 at a = pi")
for w in (0.0, 0.02, 0.05, 0.1):
    closed = rates_nonrel(p, math.pi, w)
    num = rates_numeric(Trajectory.drifted(math.pi, w), p)
    print(f"  w = {w:4.2f}: expansion {closed.A / p.gamma0:.8f}, exact {num.A / p.gamma0:.8f}")
