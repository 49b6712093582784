"""
Fourier series, jumps and the heat equation
===========================================

Coefficients of a few model functions, the behaviour of partial sums at a
jump, and the smoothing of a square wave by the heat flow.
"""

import math
import os
from pathlib import Path

import numpy as np

from anacalc import fourier_coefficients, heat_solve, partial_sum
from anacalc.cli import emit_plot
from anacalc.realfun import GridFunction

out = Path(os.environ.get("ANACALC_OUT", "."))
grid = lambda f, n=2**14: GridFunction.from_callable(f, -math.pi, math.pi, n)  # noqa: E731

# x has b_k = (-1)^(k+1) 2/k and no cosine part
s = fourier_coefficients(grid(lambda x: x), 8)
print("b_k of x:", np.round(s.b, 6))

# x^2 at x = pi: the partial sums recover the Basel sum
s2 = fourier_coefficients(grid(lambda x: x**2, 2**15), 2000)
basel = (partial_sum(s2, math.pi) - s2.a0 / 2) / 4
print(f"sum 1/k^2 from the series: {basel:.6f}   pi^2/6 = {math.pi**2 / 6:.6f}")

# the square wave: S_N(0) sits at the midpoint of the jump, while the
# overshoot next to the jump does not shrink (Gibbs)
sq = fourier_coefficients(grid(np.sign, 2**15), 2000)
for n in (10, 100, 1000):
    x = np.linspace(1e-4, 0.5, 5000)
    print(f"N={n:4d}  S_N(0)={float(partial_sum(sq, 0.0, n)):+.1e}  max S_N near 0+ = "
          f"{float(np.max(partial_sum(sq, x, n))):.4f}")

# heat flow: mode k decays like exp(-k^2 t)
heat = heat_solve(grid(np.sign, 4096), 1.0, 64)
x = np.linspace(-math.pi, math.pi, 801)
curves = [GridFunction(-math.pi, math.pi, heat(x, t), label=f"t={t}") for t in (0.0, 0.01, 0.1, 1.0)]
emit_plot(curves, out / "heat.svg", title="heat flow of sgn x")
print("sup at t=1:", float(np.max(curves[-1].values)), " 4/pi e^-1 =", 4 / math.pi * math.exp(-1))
