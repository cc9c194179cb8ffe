#!/usr/bin/env python3
"""Sudden death of entanglement and the disentangling distance.

For each filling fraction there is a finite separation beyond which every
orbital pair is exactly separable.  The scan locates it from the
separability inequality and compares with the analytic dilute-limit
estimate sqrt(2)/(pi eta (1 - eta)).
"""

from orbent import dmin_asymptotic, dmin_exact, separable

print(f"{'eta':>6} {'d_min exact':>12} {'estimate':>10} {'rel err':>9}")
for eta in (0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.3, 0.5):
    exact = dmin_exact(eta).value
    asym = dmin_asymptotic(eta)
    print(f"{eta:>6} {exact:>12d} {asym:>10.3f} {abs(exact - asym) / asym:>8.2%}")

eta = 0.02
exact = dmin_exact(eta).value
print(f"\nboundary witness at eta = {eta}: separation {exact - 1} is entangled,"
      f" everything from {exact} on is separable")
print("  separable(d_min - 1):", separable(eta, exact - 1))
print("  separable(d_min)    :", separable(eta, exact))
print("  separable(3 d_min)  :", separable(eta, 3 * exact))

print("\nnote the kernel oscillates in d, so individual separations below"
      "\nd_min can already be separable:")
eta = 0.1
flags = [(d, not separable(eta, d)) for d in range(1, dmin_exact(eta).value + 1)]
print("  eta = 0.1, entangled separations:", [d for d, ent in flags if ent])
