import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from anacalc.errors import (
    BudgetExceeded,
    GridMismatch,
    InvalidP,
    NonFinite,
    NotProbabilityDomain,
    ThetaOutOfRange,
)
from anacalc.realfun import (
    GridFunction,
    IntervalUnion,
    QuadratureSpec,
    cantor_construction,
    cantor_measure,
    cantor_partial_measure,
    check_holder,
    check_jensen,
    cumulative_integral,
    integrate,
    integrate_to_infinity,
    lp_norm,
    outer_measure,
    simpson_weights,
)

# ---------------------------------------------------------------------------
# GridFunction
# ---------------------------------------------------------------------------


def test_grid_geometry():
    f = GridFunction.from_callable(np.sin, 0, 1, 10)
    assert f.n == 10
    assert f.h == pytest.approx(0.1)
    assert f.values.size == 11
    np.testing.assert_allclose(f.x, np.linspace(0, 1, 11))


def test_values_are_read_only():
    f = GridFunction(0, 1, [1.0, 2.0])
    with pytest.raises(ValueError):
        f.values[0] = 3.0


def test_bad_windows_rejected():
    with pytest.raises(GridMismatch):
        GridFunction(1, 0, [1.0, 2.0])
    with pytest.raises(GridMismatch):
        GridFunction(0, 1, [1.0])
    with pytest.raises(GridMismatch):
        GridFunction.from_samples([0, 0.1, 0.5], [1, 2, 3])


def test_arithmetic_requires_identical_grids():
    f = GridFunction.from_callable(np.sin, 0, 1, 10)
    g = GridFunction.from_callable(np.cos, 0, 1, 12)
    with pytest.raises(GridMismatch):
        f + g
    with pytest.raises(GridMismatch):
        f * g


def test_arithmetic_pointwise():
    f = GridFunction.from_callable(np.sin, 0, 1, 8)
    g = GridFunction.from_callable(np.cos, 0, 1, 8)
    np.testing.assert_allclose((2 * f + g * f - g).values,
                               2 * np.sin(f.x) + np.cos(f.x) * np.sin(f.x) - np.cos(f.x))
    np.testing.assert_allclose(abs(-f).values, np.abs(np.sin(f.x)))


def test_interpolation_zero_outside_window():
    f = GridFunction.from_callable(lambda x: x, 0, 1, 4)
    assert f(0.3) == pytest.approx(0.3)
    np.testing.assert_allclose(f(np.array([-0.5, 1.5])), [0.0, 0.0])


def test_scalar_only_callable_is_accepted():
    f = GridFunction.from_callable(lambda x: math.exp(x), 0, 1, 4)
    np.testing.assert_allclose(f.values, np.exp(np.linspace(0, 1, 5)))


def test_csv_round_trip_real_and_complex(tmp_path):
    f = GridFunction.from_callable(np.sin, -1, 2, 7)
    f.to_csv(tmp_path / "f.csv")
    assert (tmp_path / "f.csv").read_text().splitlines()[0] == "x,value"
    g = GridFunction.from_csv(tmp_path / "f.csv")
    assert g.a == f.a and g.b == f.b
    np.testing.assert_array_equal(g.values, f.values)

    z = GridFunction.from_callable(lambda x: np.exp(1j * x), 0, 1, 5)
    z.to_csv(tmp_path / "z.csv")
    assert (tmp_path / "z.csv").read_text().splitlines()[0] == "x,re,im"
    np.testing.assert_array_equal(GridFunction.from_csv(tmp_path / "z.csv").values, z.values)


# ---------------------------------------------------------------------------
# integrate
# ---------------------------------------------------------------------------


def test_integrate_zero_function():
    assert integrate(lambda x: 0 * x, 0, 1) == 0
    assert integrate(GridFunction(0, 1, np.zeros(9))) == 0


def test_integrate_odd_function():
    assert abs(integrate(lambda x: x, -math.pi, math.pi)) < 1e-12
    assert abs(integrate(GridFunction.from_callable(lambda x: x, -math.pi, math.pi, 64))) < 1e-12


def test_integrate_one_over_one_plus_x6_to_50():
    val = integrate(lambda x: 1 / (1 + x**6), 0, 50)
    assert abs(val - oracles.INT_1_OVER_1_PLUS_X6_HALF_LINE) < 1e-6
    # the residual is the truncated tail, not quadrature error
    assert val + oracles.INT_1_OVER_1_PLUS_X6_TAIL_FROM_50 == pytest.approx(math.pi / 3, abs=1e-12)


def test_integrate_to_infinity_doubles_until_stable():
    val, R = integrate_to_infinity(lambda x: 1 / (1 + x**6), 0, 4.0)
    assert abs(val - math.pi / 3) < 1e-9
    assert R > 4.0


@pytest.mark.parametrize("rule", ["adaptive-simpson", "gauss-legendre"])
def test_both_rules_reach_tolerance(rule):
    q = QuadratureSpec(rule=rule, abs_tol=1e-12)
    assert integrate(np.exp, 0, 1, q) == pytest.approx(math.e - 1, abs=1e-12)
    assert integrate(lambda x: np.sqrt(x), 0, 1, q) == pytest.approx(2 / 3, abs=1e-10)


def test_simpson_weights_exact_on_cubics():
    for n in (2, 3, 7, 10):
        x = np.linspace(0, 2, n + 1)
        w = simpson_weights(n, 2 / n)
        assert np.all(w > 0)
        assert w @ x**3 == pytest.approx(4.0, rel=1e-13)


def test_nonfinite_rejected():
    with pytest.raises(NonFinite):
        integrate(GridFunction(0, 1, [1.0, np.nan, 2.0]))
    with pytest.raises(NonFinite), np.errstate(divide="ignore"):
        integrate(lambda x: 1 / x, -1, 1)


def test_budget_exceeded():
    with pytest.raises(BudgetExceeded):
        integrate(lambda x: np.sin(1 / x), 1e-9, 1, QuadratureSpec(abs_tol=1e-14, max_subdivisions=64))


def test_cumulative_integral_matches_antiderivative():
    f = GridFunction.from_callable(np.cos, 0, 2, 200)
    np.testing.assert_allclose(cumulative_integral(f).values, np.sin(f.x), atol=1e-9)


# ---------------------------------------------------------------------------
# norms and inequalities
# ---------------------------------------------------------------------------


def test_lp_norm_examples():
    one = GridFunction(0, 1, np.ones(17))
    x = GridFunction.from_callable(lambda t: t, 0, 1, 64)
    assert lp_norm(one, 2) == pytest.approx(1.0, abs=1e-14)
    assert lp_norm(x, 2) == pytest.approx(1 / math.sqrt(3), abs=1e-14)
    assert lp_norm(x, math.inf) == 1.0


def test_lp_norm_rejects_p_below_one():
    with pytest.raises(InvalidP):
        lp_norm(GridFunction(0, 1, np.ones(5)), 0.5)


def test_holder_examples():
    one = GridFunction(0, 1, np.ones(33))
    rep = check_holder(one, one, 2)
    assert rep.lhs == pytest.approx(1) and rep.rhs == pytest.approx(1)
    assert abs(rep.slack) < 1e-14

    x = GridFunction.from_callable(lambda t: t, 0, 1, 64)
    one_minus_x = GridFunction.from_callable(lambda t: 1 - t, 0, 1, 64)
    assert check_holder(x, one_minus_x, 2).slack > 0
    zero = GridFunction(0, 1, np.zeros(33))
    assert check_holder(zero, one, 3).lhs == 0


def test_holder_grid_mismatch():
    with pytest.raises(GridMismatch):
        check_holder(GridFunction(0, 1, np.ones(5)), GridFunction(0, 1, np.ones(6)), 2)


def test_jensen_examples():
    c = GridFunction(0, 1, np.full(17, 0.7))
    rep = check_jensen(c, np.exp)
    assert rep.lhs == pytest.approx(rep.rhs, abs=1e-14) == pytest.approx(math.exp(0.7))

    x = GridFunction.from_callable(lambda t: t, 0, 1, 256)
    rep = check_jensen(x, np.exp)
    assert rep.lhs == pytest.approx(math.exp(0.5))
    assert rep.rhs == pytest.approx(math.e - 1, abs=1e-10)
    rep = check_jensen(x, np.square)
    assert (rep.lhs, rep.rhs) == (pytest.approx(0.25), pytest.approx(1 / 3))


def test_jensen_needs_unit_interval():
    with pytest.raises(NotProbabilityDomain):
        check_jensen(GridFunction(0, 2, np.ones(5)), np.exp)


def _random_grid(draw_values, a=0.0, b=1.0):
    return GridFunction(a, b, np.asarray(draw_values, dtype=float))


values = st.lists(st.floats(-10, 10, allow_nan=False), min_size=9, max_size=9)


@given(values, values, st.floats(-5, 5))
def test_integrate_is_linear(fv, gv, alpha):
    f, g = _random_grid(fv), _random_grid(gv)
    lhs = integrate(alpha * f + g)
    assert abs(lhs - alpha * integrate(f) - integrate(g)) <= 3e-10


@given(values, values, st.sampled_from([1, 1.5, 2, 4, math.inf]))
def test_minkowski(fv, gv, p):
    f, g = _random_grid(fv), _random_grid(gv)
    assert lp_norm(f + g, p) <= lp_norm(f, p) + lp_norm(g, p) + 1e-10


@given(values, values, st.floats(1.1, 8))
def test_holder_property(fv, gv, p):
    f, g = _random_grid(fv), _random_grid(gv)
    assert check_holder(f, g, p).holds(1e-10)


@given(values)
def test_jensen_property(fv):
    f = _random_grid(fv)
    assert check_jensen(f, np.exp).holds(1e-8 * math.exp(10))


def test_lp_norm_tends_to_sup_norm():
    f = GridFunction.from_callable(lambda t: np.sin(3 * t) * np.exp(t), 0, 1, 4096)
    norms = [lp_norm(f, p) for p in (2, 8, 32, 128)]
    sup = lp_norm(f, math.inf)
    assert all(b >= a - 1e-12 for a, b in zip(norms, norms[1:]))
    assert abs(norms[-1] - sup) / sup < 0.05


# ---------------------------------------------------------------------------
# measure
# ---------------------------------------------------------------------------


def test_outer_measure_examples():
    assert outer_measure([(0, 1)]) == 1
    assert outer_measure([(0, 1), (0.5, 2)]) == 2
    assert outer_measure([(0, 1), (2, 3)]) == 2
    assert outer_measure([]) == 0


def test_touching_intervals_merge():
    assert IntervalUnion(((0, 1), (1, 2))).normalized().intervals == ((0.0, 2.0),)


intervals = st.lists(
    st.tuples(st.floats(-50, 50), st.floats(0.01, 10)).map(lambda t: (t[0], t[0] + t[1])),
    min_size=1, max_size=8,
)


@given(intervals, intervals, st.floats(-100, 100))
def test_outer_measure_monotone_and_translation_invariant(a, b, c):
    A, B = IntervalUnion(tuple(a)), IntervalUnion(tuple(b))
    assert outer_measure(A.union(B)) >= outer_measure(A) - 1e-12
    assert outer_measure(A.translated(c)) == pytest.approx(outer_measure(A), abs=1e-9)


@given(intervals)
def test_normalization_is_disjoint_sorted(a):
    ivs = IntervalUnion(tuple(a)).normalized().intervals
    assert all(r1 < l2 for (_, r1), (l2, _) in zip(ivs, ivs[1:]))


@pytest.mark.parametrize("theta,expected", sorted(oracles.CANTOR.items()))
def test_cantor_closed_form(theta, expected):
    assert cantor_measure(theta) == pytest.approx(expected, abs=1e-15)


def test_cantor_theta_range():
    for bad in (0, -0.1, 0.4):
        with pytest.raises(ThetaOutOfRange):
            cantor_measure(bad)


@pytest.mark.parametrize("theta", [0.2, 0.25, 0.3, 1 / 3])
def test_cantor_literal_construction_matches_partial_sum(theta):
    for k in (1, 5, 12):
        assert outer_measure(cantor_construction(theta, k)) == pytest.approx(
            cantor_partial_measure(theta, k), abs=1e-12)


def test_cantor_partial_sum_tail_is_geometric():
    # tail after k steps is (1/2)(2θ)^{k+1}/(1-2θ)
    for theta in (0.25, 0.3):
        for k in (10, 20, 40):
            tail = 0.5 * (2 * theta) ** (k + 1) / (1 - 2 * theta)
            assert cantor_partial_measure(theta, k) - cantor_measure(theta) == pytest.approx(tail, rel=1e-6)
