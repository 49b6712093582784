"""
Contour integrals and residues
==============================

Real integrals by closing in the upper half plane, residues at higher order
poles, and zero counting with the logarithmic derivative.
"""

import cmath
import math

import numpy as np

from anacalc.complexint import PRESETS, argument_principle, circle, real_integral_by_closure, residue

# the integral of 1/(1+x^6) over (0, inf) from three simple poles
p = PRESETS["one-over-1-plus-x6"]
res = real_integral_by_closure(p["f"], p["poles"](), p["R"], half_line=True)
print(f"int_0^inf dx/(1+x^6) = {res['value']:.15f}   pi/3 = {math.pi / 3:.15f}")
print(f"measured arc contribution at R={res['R']}: {abs(res['arc']):.1e}")

# the residue at e^{i pi/6}
r = residue(p["f"], cmath.exp(1j * math.pi / 6))
print("res at e^{i pi/6}:", r, " expected", cmath.exp(-5j * math.pi / 6) / 6)

# 1/(e^z - 1) has simple poles at 2 pi i k, each with residue 1
for k in (-1, 0, 1, 2):
    print(f"res at 2 pi i ({k:+d}):", np.round(residue(lambda z: 1 / np.expm1(z), 2j * math.pi * k), 12))

# e^z / z^3 has a pole of order 3 with residue 1/2
print("res e^z/z^3:", residue(lambda z: np.exp(z) / z**3, 0.0, 3))

# zeros minus poles inside the unit circle
f = lambda z: (z - 0.3) * (z + 0.4) / (z - 0.1)  # noqa: E731
fp = lambda z: ((2 * z + 0.1) * (z - 0.1) - (z - 0.3) * (z + 0.4)) / (z - 0.1) ** 2  # noqa: E731
print("zeros - poles:", argument_principle(f, fp, circle(0, 1)))
