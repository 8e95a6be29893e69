#!/usr/bin/env python3
"""Tour of the SO(3) kernels: hat/vee, Cayley, exp/log.

Everything the integrator does to attitudes goes through these maps, and none
of them ever projects back onto the rotation group: the outputs are orthogonal
to round-off by construction. This script shows the identities they satisfy.
"""

import numpy as np

from stringpend import cayley, cayley_inv, exp_so3, hat, log_so3, orthogonality_error, vee

rng = np.random.default_rng(7)

print("hat/vee: the skew matrix of v acts as the cross product")
v = np.array([1.0, 2.0, 3.0])
w = np.array([4.0, 5.0, 6.0])
print("  hat(v) @ w =", hat(v) @ w, " np.cross(v, w) =", np.cross(v, w))
print("  vee(hat(v)) =", vee(hat(v)))

print("\nCayley transform: rational map to rotations, exact inverse")
x = np.array([0.1, -0.2, 0.3])
R = cayley(x)
print("  cayley(x) orthogonality error:", orthogonality_error(R))
print("  cayley_inv(cayley(x)) - x =", cayley_inv(R) - x)
print("  cay(e1) turns 90 degrees about e1: cay(e1) @ e2 =", cayley([1, 0, 0]) @ [0, 1, 0])

print("\nexp/log: Rodrigues formula and its inverse")
v = np.array([0.3, -0.7, 0.2])
print("  log(exp(v)) - v =", log_so3(exp_so3(v)) - v)

print("\nworst orthogonality error over 10000 random Cayley/exp outputs:")
worst = 0.0
for _ in range(10_000):
    y = rng.standard_normal(3) * rng.uniform(0.0, 3.0)
    worst = max(worst, orthogonality_error(cayley(y)), orthogonality_error(exp_so3(y)))
print(f"  {worst:.3e}  (never re-projected)")

print("\nexp(v) and cay(v/2) agree to third order (same axis, angle gap |v|^3/12):")
v = np.array([0.8, 0.1, -0.4])
for k in range(4):
    w = v / 2.0**k
    gap = np.linalg.norm(exp_so3(w) - cayley(w / 2.0))
    print(f"  |v| = {np.linalg.norm(w):.4f}: |exp(v) - cay(v/2)| = {gap:.3e}")
