"""
Convolution and mollifiers
==========================

Smoothing a hat function with two families of approximate identities and
watching the L1 error shrink.
"""

import os
from pathlib import Path

import numpy as np

from anacalc import Mollifier, check_young, convolve, mollify, mollify_convergence
from anacalc.cli import emit_plot
from anacalc.realfun import GridFunction

out = Path(os.environ.get("ANACALC_OUT", "."))
hat = GridFunction.from_callable(lambda x: np.maximum(0.0, 1 - np.abs(x)), -1.5, 1.5, 3072, label="hat")

for family in ("bump", "gaussian"):
    errs = mollify_convergence(hat, family, 1, [1, 2, 4, 8, 16, 32, 64])
    print(family.ljust(8), " ".join(f"{e:.2e}" for e in errs))

# the smoothed copies
smooth = [mollify(hat, Mollifier("bump", n)) for n in (2, 8)]
curves = [hat] + [GridFunction(c.a, c.b, c.values, label=f"n={n}") for c, n in zip(smooth, (2, 8))]
emit_plot(curves, out / "mollified_hat.svg", title="bump mollifiers")

# Young's inequality for a pair of sampled functions
h = hat.h
f = GridFunction(0, 64 * h, np.sin(np.linspace(0, np.pi, 65)) ** 2)
for p in (1, 2, np.inf):
    rep = check_young(f, hat, p)
    print(f"p={p}: ||f*g||_p = {rep.lhs:.5f} <= ||f||_1 ||g||_p = {rep.rhs:.5f}")
print("window of f*g:", (convolve(f, hat).a, convolve(f, hat).b))
