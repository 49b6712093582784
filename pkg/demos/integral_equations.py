"""
Integral equations of the second kind
=====================================

A rank-one kernel shows both sides of the Fredholm alternative; a Gaussian
kernel shows how fast the spectrum of a smooth operator decays.
"""

import math

import numpy as np

from anacalc import KERNELS, FredholmAlternative, KernelOperator, minimax_bounds, nystrom_solve, uryshon_fixed_point

K, a, b = KERNELS["sinsin"]

# away from 2/pi the solution of u - lam T u = sin is (1 + lam c) sin
for lam in (0.1, 0.5, 0.6):
    sol = nystrom_solve(KernelOperator(K, a, b, lam), np.sin)
    c = (math.pi / 2) / (1 - lam * math.pi / 2)
    print(f"lam={lam}: u(pi/2) = {float(sol(math.pi / 2)[0]):.12f}, closed form {1 + lam * c:.12f}")

# at lam = 2/pi the homogeneous equation has the solution sin x
try:
    nystrom_solve(KernelOperator(K, a, b, 2 / math.pi), np.cos)
except FredholmAlternative as alt:
    v = alt.basis[0]
    print(f"alternative: cond={alt.cond:.1e}, kernel dimension {len(alt.basis)}, "
          f"v/sin ratio spread {np.ptp(v / np.sin(alt.nodes)):.1e}")

# the minimax bounds bracket the spectrum
for name in KERNELS:
    Kn, an, bn = KERNELS[name]
    op = KernelOperator(Kn, an, bn)
    lo, hi = minimax_bounds(op)
    s = np.linalg.svd(op.symmetrized(), compute_uv=False)
    print(f"{name:7s} lambda- {lo:+.3e}  lambda+ {hi:.6f}  s_20/s_1 {s[19] / s[0]:.1e}")

# a nonlinear equation u(t) = 0.1 int_0^1 (cos u(s) + t s) ds
u = uryshon_fixed_point(lambda t, s, v: np.cos(v) + t * s, 0.1, 1.0)
print("uryshon: u(0) =", u(0.0), " u(1) =", u(1.0))
