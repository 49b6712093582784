"""Grid functions, quadrature, Lp norms and interval measure.

This module is the numerical substrate of the package: every other module
samples its functions into a :class:`GridFunction` and integrates with the
rules defined here.

Conventions
-----------
* A grid function on ``[a, b]`` with ``n`` intervals carries ``n + 1`` samples
  at the equispaced nodes ``a + k h``, ``h = (b - a) / n``.
* Integrals of grid functions use composite Simpson weights on the fixed grid
  (Simpson 3/8 closes an odd number of intervals).  All weights are positive,
  so the discrete Hölder, Minkowski and Jensen inequalities hold exactly.
* ``p = inf`` norms are the maximum over the samples, not an essential
  supremum; grid density is the caller's responsibility.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.integrate import cumulative_simpson

from .errors import (
    BudgetExceeded,
    GridMismatch,
    InvalidP,
    NonFinite,
    NotProbabilityDomain,
    ThetaOutOfRange,
)

__all__ = [
    "GridFunction",
    "IntervalUnion",
    "QuadratureSpec",
    "InequalityReport",
    "simpson_weights",
    "cumulative_integral",
    "integrate",
    "integrate_to_infinity",
    "lp_norm",
    "check_holder",
    "check_jensen",
    "outer_measure",
    "cantor_measure",
    "cantor_partial_measure",
    "cantor_construction",
]

_UNIFORM_RTOL = 1e-9


# ---------------------------------------------------------------------------
# GridFunction
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Samples of a real or complex function on a uniform grid of ``[a, b]``.

    Parameters
    ----------
    a, b : float
        Window endpoints, ``b > a``.
    values : array_like, shape (n + 1,)
        Samples at the nodes ``linspace(a, b, n + 1)``; ``n >= 1``.
    label : str, optional
        Free-form name used by plots and CSV consumers.
    """

    a: float
    b: float
    values: np.ndarray
    label: str = field(default="", compare=False)

    def __post_init__(self):
        a, b = float(self.a), float(self.b)
        if not b > a:
            raise GridMismatch(f"window must satisfy b > a, got [{a}, {b}]")
        vals = np.array(self.values, copy=True)
        if vals.ndim != 1 or vals.size < 2:
            raise GridMismatch("values must be a 1D array with at least two samples")
        if not np.iscomplexobj(vals):
            vals = vals.astype(float)
        vals.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "values", vals)

    # construction -----------------------------------------------------------

    @classmethod
    def from_callable(cls, f: Callable, a: float, b: float, n: int, label: str = "") -> "GridFunction":
        """Sample a vectorized callable on ``n`` equal intervals of ``[a, b]``."""
        x = np.linspace(a, b, int(n) + 1)
        return cls(a, b, _call_vectorized(f, x), label)

    @classmethod
    def from_samples(cls, x, values, label: str = "") -> "GridFunction":
        """Wrap samples taken at the nodes ``x``, which must be equispaced."""
        x = np.asarray(x, dtype=float)
        if x.ndim != 1 or x.size < 2:
            raise GridMismatch("need at least two nodes")
        dx = np.diff(x)
        h = (x[-1] - x[0]) / (x.size - 1)
        if h <= 0 or np.max(np.abs(dx - h)) > _UNIFORM_RTOL * max(1.0, abs(x[-1] - x[0])):
            raise GridMismatch("nodes are not uniformly spaced")
        return cls(x[0], x[-1], values, label)

    @classmethod
    def zeros_like(cls, other: "GridFunction") -> "GridFunction":
        return cls(other.a, other.b, np.zeros_like(other.values))

    # grid geometry ----------------------------------------------------------

    @property
    def n(self) -> int:
        return self.values.size - 1

    @property
    def h(self) -> float:
        return (self.b - self.a) / self.n

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.a, self.b, self.n + 1)

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.values)

    def same_grid(self, other: "GridFunction") -> bool:
        return (
            self.n == other.n
            and math.isclose(self.a, other.a, rel_tol=0, abs_tol=1e-12 * (self.b - self.a))
            and math.isclose(self.b, other.b, rel_tol=0, abs_tol=1e-12 * (self.b - self.a))
        )

    def _check_grid(self, other: "GridFunction"):
        if not self.same_grid(other):
            raise GridMismatch(
                f"grids differ: [{self.a}, {self.b}]/{self.n} vs [{other.a}, {other.b}]/{other.n}"
            )

    def with_values(self, values, label: str | None = None) -> "GridFunction":
        return GridFunction(self.a, self.b, values, self.label if label is None else label)

    def __call__(self, x):
        """Piecewise-linear interpolation; zero outside the window."""
        x = np.asarray(x, dtype=float)
        if self.is_complex:
            re = np.interp(x, self.x, self.values.real, left=0.0, right=0.0)
            im = np.interp(x, self.x, self.values.imag, left=0.0, right=0.0)
            return re + 1j * im
        return np.interp(x, self.x, self.values, left=0.0, right=0.0)

    # arithmetic -------------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, GridFunction):
            self._check_grid(other)
            return self.with_values(self.values + other.values)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, GridFunction):
            self._check_grid(other)
            return self.with_values(self.values - other.values)
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, GridFunction):
            self._check_grid(other)
            return self.with_values(self.values * other.values)
        if np.isscalar(other):
            return self.with_values(self.values * other)
        return NotImplemented

    __rmul__ = __mul__

    def __neg__(self):
        return self.with_values(-self.values)

    def __abs__(self):
        return self.with_values(np.abs(self.values))

    def apply(self, phi: Callable) -> "GridFunction":
        """Pointwise composition ``phi(f(x))``."""
        return self.with_values(_call_vectorized(phi, self.values))

    # serialization ----------------------------------------------------------

    def to_csv(self, path) -> None:
        """Write ``x,value`` (real) or ``x,re,im`` (complex), 17 significant digits."""
        if self.is_complex:
            data = np.column_stack([self.x, self.values.real, self.values.imag])
            header = "x,re,im"
        else:
            data = np.column_stack([self.x, self.values])
            header = "x,value"
        np.savetxt(path, data, delimiter=",", header=header, comments="", fmt="%.17g")

    @classmethod
    def from_csv(cls, path, label: str = "") -> "GridFunction":
        with open(path) as fh:
            header = fh.readline().strip().split(",")
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        if header == ["x", "value"]:
            return cls.from_samples(data[:, 0], data[:, 1], label)
        if header == ["x", "re", "im"]:
            return cls.from_samples(data[:, 0], data[:, 1] + 1j * data[:, 2], label)
        raise GridMismatch(f"unrecognized CSV header {header!r}")

    def __repr__(self):
        kind = "complex" if self.is_complex else "real"
        return f"GridFunction([{self.a:g}, {self.b:g}], n={self.n}, {kind})"


def _call_vectorized(f: Callable, x: np.ndarray) -> np.ndarray:
    """Evaluate ``f`` on an array, falling back to a Python loop for scalar-only callables."""
    x = np.asarray(x)
    try:
        y = np.asarray(f(x))
    except (TypeError, ValueError):
        y = None
    if y is None or y.shape != x.shape:
        if y is not None and y.ndim == 0:
            return np.full(x.shape, y[()], dtype=np.result_type(y, float))
        y = np.array([f(xi) for xi in x.ravel()]).reshape(x.shape)
    return y


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuadratureSpec:
    """Quadrature rule selection for callable integrands.

    ``rule`` is ``"adaptive-simpson"`` or ``"gauss-legendre"``; ``order`` is
    the number of Gauss points per panel (ignored by Simpson).
    """

    rule: str = "adaptive-simpson"
    abs_tol: float = 1e-10
    max_subdivisions: int = 2**20
    order: int = 16

    def __post_init__(self):
        if self.rule not in ("adaptive-simpson", "gauss-legendre"):
            raise ValueError(f"unknown quadrature rule {self.rule!r}")
        if not self.abs_tol > 0:
            raise ValueError("abs_tol must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")
        if self.order < 1:
            raise ValueError("order must be >= 1")


DEFAULT_QUADRATURE = QuadratureSpec()


def simpson_weights(n: int, h: float) -> np.ndarray:
    """Composite Simpson weights for ``n`` equal intervals of width ``h``.

    Odd ``n >= 3`` closes the last three intervals with Simpson's 3/8 rule;
    ``n == 1`` degenerates to the trapezoid rule.
    """
    if n < 1:
        raise GridMismatch("need at least one interval")
    w = np.zeros(n + 1)
    if n == 1:
        w[:] = h / 2
        return w
    m = n if n % 2 == 0 else n - 3
    if m > 0:
        w[0:m + 1:2] += 2 * h / 3
        w[1:m:2] += 4 * h / 3
        w[0] -= h / 3
        w[m] -= h / 3
    if n % 2 == 1:
        w[m:m + 4] += 3 * h / 8 * np.array([1.0, 3.0, 3.0, 1.0])
    return w


def cumulative_integral(f: GridFunction) -> GridFunction:
    """Running integral ``F(x) = ∫_a^x f`` on the grid of ``f`` (cumulative Simpson)."""
    _require_finite(f.values)
    if f.n < 2:
        vals = np.concatenate([[0.0], np.cumsum((f.values[1:] + f.values[:-1]) * f.h / 2)])
    else:
        vals = cumulative_simpson(f.values, dx=f.h, initial=0)
    return f.with_values(vals)


def _require_finite(values):
    if not np.all(np.isfinite(values)):
        raise NonFinite("integrand has NaN or infinite samples")


def integrate(f, a: float | None = None, b: float | None = None,
              q: QuadratureSpec = DEFAULT_QUADRATURE):
    """Integrate a grid function, or a callable over ``[a, b]``.

    Grid functions use composite Simpson on their own grid.  Callables must
    accept numpy arrays; they are integrated adaptively per ``q`` and the
    result carries an estimated error below ``q.abs_tol``.

    Raises
    ------
    NonFinite
        A sample or function value is NaN or infinite.
    BudgetExceeded
        ``q.max_subdivisions`` was reached before the tolerance.
    """
    if isinstance(f, GridFunction):
        _require_finite(f.values)
        return _scalar(np.dot(simpson_weights(f.n, f.h), f.values))
    if a is None or b is None:
        raise TypeError("integrating a callable requires both endpoints a and b")
    a, b = float(a), float(b)
    if a == b:
        return 0.0
    if b < a:
        return -integrate(f, b, a, q)
    if q.rule == "gauss-legendre":
        return _adaptive_gauss(f, a, b, q)
    return _adaptive_simpson(f, a, b, q)


def _scalar(v):
    v = complex(v) if np.iscomplexobj(v) else float(v)
    return v


def _eval(f, x):
    y = _call_vectorized(f, x)
    if not np.all(np.isfinite(y)):
        raise NonFinite("integrand is NaN or infinite inside the interval")
    return y


def _adaptive_simpson(f, a, b, q):
    # Breadth-first: every pass refines all unresolved panels with one
    # vectorized evaluation of f.
    n0 = 8
    edges = np.linspace(a, b, n0 + 1)
    mids = (edges[:-1] + edges[1:]) / 2
    vals = _eval(f, np.concatenate([edges, mids]))
    lo, hi = edges[:-1], edges[1:]
    flo, fhi, fmid = vals[:n0], vals[1:n0 + 1], vals[n0 + 1:]
    whole = (hi - lo) / 6 * (flo + 4 * fmid + fhi)
    total = []
    nsub = n0
    span = b - a
    while lo.size:
        m = (lo + hi) / 2
        fl_r = _eval(f, np.concatenate([(lo + m) / 2, (m + hi) / 2]))
        flm, frm = fl_r[:lo.size], fl_r[lo.size:]
        left = (m - lo) / 6 * (flo + 4 * flm + fmid)
        right = (hi - m) / 6 * (fmid + 4 * frm + fhi)
        delta = left + right - whole
        eps = q.abs_tol * (hi - lo) / span
        tiny = (hi - lo) <= 64 * np.finfo(float).eps * max(abs(a), abs(b), 1.0)
        # below this the difference is rounding noise, not truncation error
        noise = 64 * np.finfo(float).eps * (np.abs(left) + np.abs(right))
        ok = (np.abs(delta) <= np.maximum(15 * eps, noise)) | tiny
        if np.any(ok):
            total.append(np.sum((left + right + delta / 15)[ok]))
        bad = ~ok
        nbad = int(np.count_nonzero(bad))
        if nbad == 0:
            break
        nsub += nbad
        if nsub > q.max_subdivisions:
            raise BudgetExceeded(
                f"adaptive Simpson exceeded {q.max_subdivisions} subdivisions on [{a}, {b}]"
            )
        lo_b, m_b, hi_b = lo[bad], m[bad], hi[bad]
        lo = np.concatenate([lo_b, m_b])
        hi = np.concatenate([m_b, hi_b])
        flo = np.concatenate([flo[bad], fmid[bad]])
        fhi = np.concatenate([fmid[bad], fhi[bad]])
        fmid = np.concatenate([flm[bad], frm[bad]])
        whole = np.concatenate([left[bad], right[bad]])
    return _fsum(total)


def _gauss_panels(f, lo, hi, nodes, weights):
    half = (hi - lo)[:, None] / 2
    x = (lo + hi)[:, None] / 2 + half * nodes[None, :]
    y = _eval(f, x.ravel()).reshape(x.shape)
    return np.sum(y * weights[None, :] * half, axis=1)


def _adaptive_gauss(f, a, b, q):
    nodes, weights = np.polynomial.legendre.leggauss(q.order)
    lo, hi = np.array([a]), np.array([b])
    whole = _gauss_panels(f, lo, hi, nodes, weights)
    total = []
    nsub = 1
    span = b - a
    while lo.size:
        m = (lo + hi) / 2
        halves = _gauss_panels(f, np.concatenate([lo, m]), np.concatenate([m, hi]), nodes, weights)
        left, right = halves[:lo.size], halves[lo.size:]
        delta = left + right - whole
        noise = 64 * np.finfo(float).eps * (np.abs(left) + np.abs(right))
        ok = np.abs(delta) <= np.maximum(q.abs_tol * (hi - lo) / span, noise)
        if np.any(ok):
            total.append(np.sum((left + right)[ok]))
        bad = ~ok
        nbad = int(np.count_nonzero(bad))
        if nbad == 0:
            break
        nsub += nbad
        if nsub > q.max_subdivisions:
            raise BudgetExceeded(
                f"Gauss-Legendre exceeded {q.max_subdivisions} subdivisions on [{a}, {b}]"
            )
        lo, hi = np.concatenate([lo[bad], m[bad]]), np.concatenate([m[bad], hi[bad]])
        whole = np.concatenate([left[bad], right[bad]])
    return _fsum(total)


def _fsum(parts):
    parts = np.asarray(parts)
    if np.iscomplexobj(parts):
        return complex(math.fsum(parts.real), math.fsum(parts.imag))
    return math.fsum(parts)


def integrate_to_infinity(f: Callable, a: float, R: float,
                          q: QuadratureSpec = DEFAULT_QUADRATURE, max_doublings: int = 16):
    """Approximate ``∫_a^∞ f`` by truncation at ``R``, doubling ``R`` until
    two successive values differ by less than ``q.abs_tol``.

    Returns ``(value, R_used)``.  Raises :class:`BudgetExceeded` after
    ``max_doublings`` doublings without stabilizing.
    """
    if R <= a:
        raise ValueError("truncation point R must exceed a")
    prev = integrate(f, a, R, q)
    for _ in range(max_doublings):
        R2 = a + 2 * (R - a)
        cur = prev + integrate(f, R, R2, q)
        if abs(cur - prev) < q.abs_tol:
            return cur, R2
        prev, R = cur, R2
    raise BudgetExceeded(f"improper integral did not stabilize up to R = {R}")


# ---------------------------------------------------------------------------
# Norms and inequalities
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InequalityReport:
    """Both sides of an inequality ``lhs <= rhs``; ``slack = rhs - lhs``."""

    lhs: float
    rhs: float

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    def holds(self, tol: float = 1e-10) -> bool:
        return self.slack >= -tol

    def as_dict(self) -> dict:
        return {"lhs": self.lhs, "rhs": self.rhs, "slack": self.slack}


def lp_norm(f: GridFunction, p: float) -> float:
    """``(∫|f|^p)^(1/p)``, or ``max |f|`` over the samples for ``p = inf``."""
    p = float(p)
    if math.isnan(p) or p < 1:
        raise InvalidP(f"p must be >= 1 or inf, got {p}")
    _require_finite(f.values)
    mag = np.abs(f.values)
    if math.isinf(p):
        return float(mag.max())
    peak = mag.max()
    if peak == 0:
        return 0.0
    # scale by the peak to keep |f|^p representable for large p
    s = integrate(f.with_values((mag / peak) ** p))
    return float(peak * max(s, 0.0) ** (1.0 / p))


def conjugate_exponent(p: float) -> float:
    if p == 1:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1)


def check_holder(f: GridFunction, g: GridFunction, p: float) -> InequalityReport:
    """Compare ``∫|fg|`` against ``‖f‖_p ‖g‖_q`` with ``1/p + 1/q = 1``."""
    f._check_grid(g)
    if not (1 < p < math.inf):
        raise InvalidP("Hölder check needs 1 < p < inf")
    q = conjugate_exponent(p)
    lhs = integrate(abs(f * g))
    return InequalityReport(float(lhs), lp_norm(f, p) * lp_norm(g, q))


def check_jensen(f: GridFunction, phi: Callable) -> InequalityReport:
    """Compare ``phi(∫f)`` against ``∫ phi∘f`` on the probability space ``[0, 1]``."""
    if not (math.isclose(f.a, 0.0, abs_tol=1e-12) and math.isclose(f.b, 1.0, abs_tol=1e-12)):
        raise NotProbabilityDomain(f"Jensen check needs the window [0, 1], got [{f.a}, {f.b}]")
    mean = integrate(f)
    lhs = float(np.asarray(phi(mean)))
    rhs = integrate(f.apply(phi))
    return InequalityReport(lhs, float(rhs))


# ---------------------------------------------------------------------------
# Interval measure
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IntervalUnion:
    """Finite union of intervals given as ``(left, right)`` pairs."""

    intervals: tuple = ()

    def __post_init__(self):
        ivs = tuple((float(l), float(r)) for l, r in self.intervals)
        for l, r in ivs:
            if not l < r:
                raise ValueError(f"interval ({l}, {r}) must have left < right")
        object.__setattr__(self, "intervals", ivs)

    def normalized(self) -> "IntervalUnion":
        """Sorted, pairwise disjoint equivalent; touching intervals are merged."""
        merged: list[list[float]] = []
        for l, r in sorted(self.intervals):
            if merged and l <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], r)
            else:
                merged.append([l, r])
        return IntervalUnion(tuple(map(tuple, merged)))

    def translated(self, c: float) -> "IntervalUnion":
        return IntervalUnion(tuple((l + c, r + c) for l, r in self.intervals))

    def union(self, other: "IntervalUnion") -> "IntervalUnion":
        return IntervalUnion(self.intervals + other.intervals)

    def __len__(self):
        return len(self.intervals)


def outer_measure(cover: IntervalUnion | Iterable[Sequence[float]]) -> float:
    """Total length of a finite interval union (the infimum over covers is
    attained by its disjoint normalization).  The empty union has measure 0."""
    if not isinstance(cover, IntervalUnion):
        cover = IntervalUnion(tuple(cover))
    return math.fsum(r - l for l, r in cover.normalized().intervals)


def _check_theta(theta):
    if not (0 < theta <= 1 / 3 + 1e-15):
        raise ThetaOutOfRange(f"theta must lie in (0, 1/3], got {theta}")


def cantor_measure(theta: float) -> float:
    """Measure ``(1 - 3θ)/(1 - 2θ)`` of the fat Cantor set with removal ratio θ."""
    _check_theta(theta)
    return max((1 - 3 * theta) / (1 - 2 * theta), 0.0)


def cantor_partial_measure(theta: float, k: int) -> float:
    """Measure left after ``k`` removal steps: ``1 - Σ_{j<=k} 2^(j-1) θ^j``."""
    _check_theta(theta)
    return 1.0 - math.fsum(2.0 ** (j - 1) * theta**j for j in range(1, k + 1))


def cantor_construction(theta: float, k: int) -> IntervalUnion:
    """The ``2^k`` closed intervals remaining after ``k`` literal removal steps.

    Exponential in ``k``; intended for cross-checks with ``k`` up to about 20.
    """
    _check_theta(theta)
    if k > 24:
        raise ValueError("literal construction is limited to k <= 24")
    pieces = [(0.0, 1.0)]
    for j in range(1, k + 1):
        gap = theta**j
        nxt = []
        for l, r in pieces:
            c = (l + r) / 2
            nxt.append((l, c - gap / 2))
            nxt.append((c + gap / 2, r))
        pieces = nxt
    return IntervalUnion(tuple(pieces))
