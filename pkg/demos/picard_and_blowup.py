"""
Picard iterates, Euler polygons and blow-up
===========================================

Three ways of looking at the same initial value problems: successive
approximations, the explicit polygon and its continuation up to the edge of
the maximal interval.
"""

import math
import os
from pathlib import Path

import numpy as np

from anacalc import IvpSpec, continue_maximal, peano_polygon, picard_solve
from anacalc.cli import emit_plot
from anacalc.realfun import GridFunction

out = Path(os.environ.get("ANACALC_OUT", "."))

# u' = u, u(0) = 1 on [0, 1/2]: each Picard sweep adds one Taylor term,
# so the sup error falls like 0.5^n / n!
ivp = IvpSpec(lambda t, u: u, 0.0, 1.0, (0.0, 0.5))
for n in (1, 2, 4, 8, 16):
    sol = picard_solve(ivp, n)
    print(f"picard n={n:2d}  sup error {np.max(np.abs(sol.u[:, 0] - np.exp(sol.t))):.3e}")

# The Euler polygon is first order: doubling the steps halves the error at t=1
for m in (250, 500, 1000, 2000):
    e = peano_polygon(IvpSpec(lambda t, u: u, 0.0, 1.0, (0.0, 1.0)), m).u[-1, 0] - math.e
    print(f"euler m={m:4d}  error {abs(e):.4e}")

# u' = 2 t u^2 has u = u0 / (1 - u0 t^2).  For u0 = 1 the solution escapes
# at t = 1; for u0 = -1 it exists for all t.
riccati = lambda t, u: 2 * t * u * u  # noqa: E731
up = continue_maximal(IvpSpec(riccati, 0.0, 1.0, (-3.0, 3.0)), 1e-4)
down = continue_maximal(IvpSpec(riccati, 0.0, -1.0, (-3.0, 3.0)), 1e-4)
print("u0 = 1 :", up.status, "t_escape =", up.t_escape)
print("u0 = -1:", down.status, "max |u| =", float(np.max(np.abs(down.u))))

# plot the bounded branch against the closed form
t = down.t
curves = [GridFunction(t[0], t[-1], down.u[:, 0], label="euler"),
          GridFunction(t[0], t[-1], -1 / (1 + t**2), label="exact")]
emit_plot(curves, out / "riccati.svg", title="u' = 2tu^2, u(0) = -1")
