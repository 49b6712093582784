"""
Weak solutions with hat functions
=================================

Piecewise-linear Galerkin approximations of two-point boundary problems,
the observed second-order convergence, and Poincare's inequality.
"""

import math
import os
from pathlib import Path

import numpy as np

from anacalc import BilinearFormSpec, Mesh1D, poincare_check, solve_weak
from anacalc.cli import emit_plot
from anacalc.realfun import GridFunction

out = Path(os.environ.get("ANACALC_OUT", "."))

# -u'' + u = f with u* = sin(pi x)(1 + x)
u_star = lambda x: np.sin(math.pi * x) * (1 + x)  # noqa: E731
f = lambda x: (math.pi**2 + 1) * u_star(x) - 2 * math.pi * np.cos(math.pi * x)  # noqa: E731
prev = None
for M in (10, 20, 40, 80, 160):
    sol = solve_weak(f, BilinearFormSpec.dirichlet(), Mesh1D.uniform(0, 1, M))
    err = np.max(np.abs(sol.nodal - u_star(sol.mesh.nodes)))
    rate = "" if prev is None else f"  order {math.log2(prev / err):.3f}"
    print(f"M={M:4d}  max nodal error {err:.3e}{rate}")
    prev = err

# variable coefficients: -((1+x) u')' + u = 1
sl = solve_weak(1.0, BilinearFormSpec.sturm_liouville(lambda x: 1 + x, 1.0), Mesh1D.uniform(0, 1, 100))
print("report:", sl.report_json())

# Poincare: int |u|^2 <= (b-a)^2 int |u'|^2 for the computed solution
rep = poincare_check(sl, 2)
print(f"Poincare: {rep.lhs:.4e} <= {rep.rhs:.4e}")

emit_plot([GridFunction(0, 1, sl.nodal, label="u_h")], out / "sturm_liouville.svg",
          title="-((1+x)u')' + u = 1")
