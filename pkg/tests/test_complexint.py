import cmath
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from anacalc.complexint import (
    PRESETS,
    PoleReport,
    argument_principle,
    cauchy_eval,
    circle,
    contour_from_json,
    contour_integral,
    real_integral_by_closure,
    residue,
    residue_by_limit,
    residue_theorem_sum,
    segment,
    semicircle,
    upper_half_disk,
)
from anacalc.errors import (
    ArcNotNegligible,
    MissingPole,
    NonFiniteOnTrace,
    NotNearInteger,
    OrderMismatch,
    PointOnTrace,
    ZeroOnTrace,
)

TWO_PI_I = 2j * math.pi


# ---------------------------------------------------------------------------
# contours and integrals
# ---------------------------------------------------------------------------


def test_contours_join_and_close():
    assert circle(1 + 1j, 2).closed
    assert upper_half_disk(3).closed
    assert not segment(0, 1j).closed
    assert not semicircle(2).closed
    with pytest.raises(ValueError):
        segment(0, 1) + segment(2, 3)


@pytest.mark.parametrize("zeta", [0, 0.3 - 0.2j, 5 + 5j])
def test_simple_loop(zeta):
    val = contour_integral(lambda z: 1 / (z - zeta), circle(zeta, 0.7))
    assert abs(val - TWO_PI_I) < 1e-12


@pytest.mark.parametrize("n", [1, 2, 5])
def test_power_loop_vanishes(n):
    zeta = 0.2 + 0.1j
    assert abs(contour_integral(lambda z: (z - zeta) ** n, circle(zeta, 1.3))) < 1e-12
    # negative powers other than -1 vanish too
    assert abs(contour_integral(lambda z: (z - zeta) ** (-n - 1), circle(zeta, 1.3))) < 1e-11


@given(st.complex_numbers(max_magnitude=10), st.complex_numbers(max_magnitude=10))
@settings(max_examples=20)
def test_segment_of_one(z1, z2):
    assert abs(contour_integral(lambda z: np.ones_like(z), segment(z1, z2)) - (z2 - z1)) < 1e-12 * (1 + abs(z2 - z1))


def test_non_finite_on_trace():
    with pytest.raises(NonFiniteOnTrace), np.errstate(divide="ignore", invalid="ignore"):
        contour_integral(lambda z: 1 / (z - 1), circle(0, 1))


@given(st.integers(-3, 3), st.floats(0.3, 2.0))
@settings(max_examples=10)
def test_orientation_antisymmetry(n, r):
    f = lambda z: np.exp(z) * (z - 4) ** n + np.conj(z)  # noqa: E731
    for c in (circle(0.1j, r), segment(-1, 2j) + segment(2j, 3), upper_half_disk(r)):
        assert abs(contour_integral(f, c) + contour_integral(f, c.reversed())) < 1e-12


@pytest.mark.parametrize("f", [lambda z: 1 / z, lambda z: np.exp(z) / z**3, lambda z: 1 / (z * (z - 0.2))])
def test_deformation_invariance(f):
    assert abs(contour_integral(f, circle(0, 0.5)) - contour_integral(f, circle(0, 1.5))) < 1e-8


# ---------------------------------------------------------------------------
# Cauchy formula
# ---------------------------------------------------------------------------


def test_cauchy_examples():
    assert abs(cauchy_eval(np.exp, circle(0, 1), 0) - 1) < 1e-12
    assert abs(cauchy_eval(np.exp, circle(0, 1), 0, 3) - 1) < 1e-10
    assert abs(cauchy_eval(lambda z: z**2, circle(0, 2), 0.5, 1) - 1) < 1e-12


@given(st.complex_numbers(max_magnitude=0.8), st.integers(0, 4))
@settings(max_examples=20)
def test_cauchy_derivatives_of_exp(zeta, n):
    assert abs(cauchy_eval(np.exp, circle(0, 1), zeta, n) - cmath.exp(zeta)) < 1e-8 * math.factorial(n + 1)


def test_cauchy_point_on_trace():
    with pytest.raises(PointOnTrace):
        cauchy_eval(np.exp, circle(0, 1), 1j)
    with pytest.raises(ValueError):
        cauchy_eval(np.exp, segment(0, 1), 0.5j)


# ---------------------------------------------------------------------------
# residues
# ---------------------------------------------------------------------------


def test_residue_examples():
    assert abs(residue(lambda z: 1 / z, 0, 1) - 1) < 1e-12
    assert abs(residue(lambda z: 1 / np.expm1(z), 0, 1) - 1) < 1e-10
    for k in (1, -2):
        assert abs(residue(lambda z: 1 / np.expm1(z), TWO_PI_I * k, 1) - 1) < 1e-10
    r = residue(lambda z: 1 / (1 + z**6), cmath.exp(1j * math.pi / 6), 1)
    assert abs(r - oracles.RES_SIXTH_ROOT) < 1e-12


def test_higher_order_residues():
    assert abs(residue(lambda z: np.exp(z) / z**2, 0, 2) - oracles.RES_EXP_OVER_Z2_AT_0) < 1e-10
    assert abs(residue(lambda z: np.exp(z) / z**3, 0, 3) - oracles.RES_EXP_OVER_Z3_AT_0) < 1e-10
    assert abs(residue(lambda z: np.exp(z) / (z - 1) ** 2, 1, 2) - oracles.RES_EXP_OVER_ZM1_SQUARED) < 1e-10


def test_order_mismatch():
    with pytest.raises(OrderMismatch):
        residue(lambda z: np.exp(z) / z**2, 0, 1)
    with pytest.raises(OrderMismatch):
        residue(lambda z: 1 / z**5, 0, 3)
    with pytest.raises(ValueError):
        residue(lambda z: 1 / z, 0, 0)


def test_residue_matches_four_ray_limit():
    f = lambda z: np.cos(z) / (z - 0.4) / (z + 2)  # noqa: E731
    r = residue(f, 0.4, 1)
    for d in (1, -1, 1j, -1j):
        z = 0.4 + 1e-7 * d
        assert abs((z - 0.4) * f(z) - r) < 1e-6
    assert abs(residue_by_limit(f, 0.4, 1) - r) < 1e-6


def test_residue_theorem_examples():
    lhs, rhs = residue_theorem_sum(np.exp, circle(0.3, 2), [])
    assert abs(lhs) < 1e-12 and rhs == 0
    lhs, rhs = residue_theorem_sum(lambda z: 1 / z, circle(0, 1), [PoleReport(0, 1)])
    assert abs(lhs - 1) < 1e-12 and abs(rhs - 1) < 1e-12
    f = lambda z: 1 / (1 + z**6)  # noqa: E731
    poles = [PoleReport(cmath.exp(1j * math.pi * (2 * k + 1) / 6), 1) for k in range(3)]
    lhs, rhs = residue_theorem_sum(f, upper_half_disk(50), poles)
    assert abs(TWO_PI_I * rhs - 2 * math.pi / 3) < 1e-12


def test_missing_pole():
    f = lambda z: 1 / (z * (z - 0.5))  # noqa: E731
    with pytest.raises(MissingPole):
        residue_theorem_sum(f, circle(0, 1), [PoleReport(0, 1)])
    lhs, rhs = residue_theorem_sum(f, circle(0, 1), [PoleReport(0, 1), PoleReport(0.5, 1)])
    assert abs(lhs) < 1e-12 and abs(rhs) < 1e-10


def test_precomputed_residues_are_used():
    lhs, rhs = residue_theorem_sum(lambda z: 3 / z, circle(0, 1), [PoleReport(0, 1, 3.0)])
    assert rhs == 3.0


# ---------------------------------------------------------------------------
# real integrals by closure
# ---------------------------------------------------------------------------


def test_sixth_power_half_line():
    p = PRESETS["one-over-1-plus-x6"]
    out = real_integral_by_closure(p["f"], p["poles"](), 50.0, half_line=True)
    assert out["value"] == pytest.approx(oracles.INT_1_OVER_1_PLUS_X6_HALF_LINE, abs=1e-8)
    assert abs(out["arc"]) < 1e-8
    # the truncated segment misses the two tails ∫_50^∞ x^-6 dx
    assert out["value"] - out["segment"].real == pytest.approx(oracles.INT_1_OVER_1_PLUS_X6_TAIL_FROM_50, rel=1e-3)


@pytest.mark.parametrize("name,exact", [
    ("one-over-1-plus-x4", oracles.INT_1_OVER_1_PLUS_X4),
    ("one-over-1-plus-x2-squared", oracles.INT_1_OVER_1_PLUS_X2_SQUARED),
])
def test_presets(name, exact):
    p = PRESETS[name]
    out = real_integral_by_closure(p["f"], p["poles"](), p["R"], half_line=p["half_line"])
    assert out["value"] == pytest.approx(exact, abs=1e-8)


def test_arc_not_negligible():
    with pytest.raises(ArcNotNegligible):
        real_integral_by_closure(lambda z: 1 / (1 + z**2), [PoleReport(1j, 1)], 10.0)


# ---------------------------------------------------------------------------
# argument principle
# ---------------------------------------------------------------------------


def test_argument_principle_examples():
    assert argument_principle(lambda z: z**3, lambda z: 3 * z**2, circle(0, 1)) == 3
    assert argument_principle(lambda z: 1 / z, lambda z: -1 / z**2, circle(0, 1)) == -1

    def f(z):
        return (z - 0.3) * (z + 0.4) / (z - 0.1)

    def fp(z):
        return ((2 * z + 0.1) * (z - 0.1) - (z - 0.3) * (z + 0.4)) / (z - 0.1) ** 2

    assert argument_principle(f, fp, circle(0, 1)) == 1


def test_argument_principle_matches_root_count():
    rng = np.random.default_rng(5)
    for _ in range(5):
        roots = rng.uniform(-2, 2, 6) + 1j * rng.uniform(-2, 2, 6)
        r = 1.0
        if np.min(np.abs(np.abs(roots) - r)) < 0.05:
            continue
        poly = np.poly1d(np.poly(roots))
        n = argument_principle(poly, poly.deriv(), circle(0, r))
        assert n == int(np.sum(np.abs(roots) < r))


@given(st.complex_numbers(min_magnitude=1e-3, max_magnitude=1e3))
@settings(max_examples=15)
def test_argument_principle_scale_invariant(c):
    f = lambda z: c * (z - 0.2) ** 2 * (z + 3)  # noqa: E731
    fp = lambda z: c * (2 * (z - 0.2) * (z + 3) + (z - 0.2) ** 2)  # noqa: E731
    assert argument_principle(f, fp, circle(0, 1)) == 2


def test_zero_on_trace():
    with pytest.raises(ZeroOnTrace):
        argument_principle(lambda z: z - 1, lambda z: np.ones_like(z), circle(0, 1))


def test_not_near_integer():
    # a wrong derivative gives a non-integer logarithmic integral
    with pytest.raises(NotNearInteger):
        argument_principle(lambda z: z, lambda z: 0.5 * np.ones_like(z), circle(0, 1))


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------


def test_contour_json():
    c = contour_from_json(json.dumps({"pieces": [{"kind": "circle", "center": [0, 0], "radius": 1.0, "ccw": True}]}))
    assert abs(contour_integral(lambda z: 1 / z, c) - TWO_PI_I) < 1e-12
    cw = contour_from_json({"pieces": [{"kind": "circle", "radius": 1.0, "ccw": False}]})
    assert abs(contour_integral(lambda z: 1 / z, cw) + TWO_PI_I) < 1e-12
    house = contour_from_json({"pieces": [
        {"kind": "segment", "from": [-2, 0], "to": [2, 0]},
        {"kind": "semicircle", "radius": 2},
    ]})
    assert house.closed
    assert abs(contour_integral(lambda z: 1 / (z - 1j), house) - TWO_PI_I) < 1e-12


def test_contour_json_errors():
    with pytest.raises(ValueError):
        contour_from_json({"pieces": []})
    with pytest.raises(ValueError):
        contour_from_json({"pieces": [{"kind": "spiral"}]})
