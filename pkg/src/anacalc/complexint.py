"""Contour integrals, Cauchy's formula, residues and the argument principle.

A :class:`Contour` is a chain of pieces, each a parametrization ``[0, 1] -> C``
with its derivative.  Integrals are sums of adaptive quadratures over the
pieces.  Residues are normalized as ``res = (1/2πi) ∮ f`` around the pole.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import (
    ArcNotNegligible,
    MissingPole,
    NonFinite,
    NonFiniteOnTrace,
    NotNearInteger,
    OrderMismatch,
    PointOnTrace,
    ZeroOnTrace,
)
from .realfun import QuadratureSpec, integrate

__all__ = [
    "Piece",
    "Contour",
    "PoleReport",
    "circle",
    "segment",
    "arc",
    "semicircle",
    "upper_half_disk",
    "contour_from_json",
    "contour_integral",
    "cauchy_eval",
    "residue",
    "residue_by_limit",
    "residue_theorem_sum",
    "real_integral_by_closure",
    "argument_principle",
]

JOIN_TOL = 1e-12
CONTOUR_QUADRATURE = QuadratureSpec(abs_tol=1e-12)
TRACE_SAMPLES = 2048


@dataclass(frozen=True)
class Piece:
    """One smooth piece: ``z = map(t)``, ``dz/dt = derivative(t)``, ``t in [0, 1]``."""

    map: Callable
    derivative: Callable

    def start(self) -> complex:
        return complex(np.asarray(self.map(np.array([0.0])))[0])

    def end(self) -> complex:
        return complex(np.asarray(self.map(np.array([1.0])))[0])

    def reversed(self) -> "Piece":
        m, d = self.map, self.derivative
        return Piece(lambda t: m(1 - np.asarray(t)), lambda t: -d(1 - np.asarray(t)))


@dataclass(frozen=True)
class Contour:
    """Ordered chain of pieces; consecutive pieces must join within 1e-12."""

    pieces: tuple

    def __post_init__(self):
        pieces = tuple(self.pieces)
        if not pieces:
            raise ValueError("a contour needs at least one piece")
        for i in range(len(pieces) - 1):
            gap = abs(pieces[i].end() - pieces[i + 1].start())
            if gap > JOIN_TOL * max(1.0, abs(pieces[i].end())):
                raise ValueError(f"pieces {i} and {i + 1} do not join (gap {gap:.3g})")
        object.__setattr__(self, "pieces", pieces)

    @property
    def closed(self) -> bool:
        a, b = self.pieces[0].start(), self.pieces[-1].end()
        return abs(a - b) <= JOIN_TOL * max(1.0, abs(a))

    def reversed(self) -> "Contour":
        return Contour(tuple(p.reversed() for p in reversed(self.pieces)))

    def __add__(self, other: "Contour") -> "Contour":
        return Contour(self.pieces + other.pieces)

    def trace(self, samples_per_piece: int = TRACE_SAMPLES) -> np.ndarray:
        t = np.linspace(0.0, 1.0, samples_per_piece + 1)
        return np.concatenate([np.asarray(p.map(t), dtype=complex) for p in self.pieces])


def circle(center: complex = 0.0, radius: float = 1.0, ccw: bool = True) -> Contour:
    """Full circle starting at ``center + radius``."""
    s = 2 * math.pi if ccw else -2 * math.pi
    c = complex(center)
    return Contour((Piece(lambda t: c + radius * np.exp(1j * s * np.asarray(t)),
                          lambda t: 1j * s * radius * np.exp(1j * s * np.asarray(t))),))


def arc(center: complex, radius: float, theta0: float, theta1: float) -> Contour:
    """Circular arc from angle ``theta0`` to ``theta1`` (either direction)."""
    c, d = complex(center), theta1 - theta0

    def m(t):
        return c + radius * np.exp(1j * (theta0 + d * np.asarray(t)))

    def dm(t):
        return 1j * d * radius * np.exp(1j * (theta0 + d * np.asarray(t)))

    return Contour((Piece(m, dm),))


def semicircle(radius: float, center: complex = 0.0, upper: bool = True) -> Contour:
    """Half circle from ``center + radius`` to ``center - radius`` through the
    upper (or lower) half plane."""
    return arc(center, radius, 0.0, math.pi if upper else -math.pi)


def segment(z1: complex, z2: complex) -> Contour:
    z1, z2 = complex(z1), complex(z2)
    dz = z2 - z1
    return Contour((Piece(lambda t: z1 + dz * np.asarray(t, dtype=float),
                          lambda t: np.full(np.shape(t), dz, dtype=complex)),))


def upper_half_disk(radius: float) -> Contour:
    """Segment ``[-R, R]`` followed by the upper semicircle back to ``-R``."""
    return segment(-radius, radius) + semicircle(radius)


def contour_from_json(spec: str | dict) -> Contour:
    """Build a contour from ``{"pieces": [...]}``.

    Piece kinds: ``circle`` (center [x, y], radius, ccw), ``segment``
    (from [x, y], to [x, y]), ``semicircle`` (center, radius, upper) and
    ``arc`` (center, radius, theta0, theta1).
    """
    if isinstance(spec, str):
        spec = json.loads(spec)

    def pt(v):
        return complex(v[0], v[1]) if isinstance(v, (list, tuple)) else complex(v)

    out = None
    for p in spec["pieces"]:
        kind = p["kind"]
        if kind == "circle":
            c = circle(pt(p.get("center", [0, 0])), float(p["radius"]), bool(p.get("ccw", True)))
        elif kind == "segment":
            c = segment(pt(p["from"]), pt(p["to"]))
        elif kind == "semicircle":
            c = semicircle(float(p["radius"]), pt(p.get("center", [0, 0])), bool(p.get("upper", True)))
        elif kind == "arc":
            c = arc(pt(p.get("center", [0, 0])), float(p["radius"]), float(p["theta0"]), float(p["theta1"]))
        else:
            raise ValueError(f"unknown contour piece kind {kind!r}")
        out = c if out is None else out + c
    if out is None:
        raise ValueError("contour JSON has no pieces")
    return out


# ---------------------------------------------------------------------------
# Integration
# ---------------------------------------------------------------------------


def _fvals(f, z):
    w = np.asarray(f(z), dtype=complex)
    if w.shape != np.shape(z):
        w = np.broadcast_to(w, np.shape(z)).astype(complex)
    return w


def contour_integral(f: Callable, c: Contour, q: QuadratureSpec = CONTOUR_QUADRATURE) -> complex:
    """``∫_c f(z) dz = Σ_pieces ∫_0^1 f(γ(t)) γ'(t) dt``.

    ``f`` must accept complex numpy arrays.  Raises
    :class:`NonFiniteOnTrace` if ``f`` is not finite somewhere it is sampled.
    """
    total = 0j
    for p in c.pieces:
        def integrand(t, p=p):
            return _fvals(f, p.map(t)) * p.derivative(t)
        try:
            total += integrate(integrand, 0.0, 1.0, q)
        except NonFinite as exc:
            raise NonFiniteOnTrace(str(exc)) from None
    return total


def _distance_to_trace(c: Contour, z: complex) -> float:
    return float(np.min(np.abs(c.trace() - z)))


def cauchy_eval(f: Callable, c: Contour, zeta: complex, n: int = 0,
                q: QuadratureSpec = CONTOUR_QUADRATURE) -> complex:
    """``f^(n)(ζ) = n!/(2πi) ∮ f(z) / (z - ζ)^{n+1} dz`` for ``ζ`` inside ``c``."""
    if not c.closed:
        raise ValueError("Cauchy's formula needs a closed contour")
    if n < 0:
        raise ValueError("derivative order must be >= 0")
    if _distance_to_trace(c, zeta) < 1e-9:
        raise PointOnTrace(f"ζ = {zeta} lies on the contour")
    val = contour_integral(lambda z: _fvals(f, z) / (z - zeta) ** (n + 1), c, q)
    return math.factorial(n) * val / (2j * math.pi)


@dataclass(frozen=True)
class PoleReport:
    location: complex
    order: int
    residue: complex | None = None


def residue(f: Callable, zeta: complex, order: int = 1, radius: float = 1e-2,
            cross_check: bool = True, rtol: float = 1e-6) -> complex:
    """Residue of ``f`` at the pole ``ζ`` of the declared ``order``.

    Computed as ``(1/2πi) ∮ f`` over a circle of ``radius`` around ``ζ``
    (no other singularity may lie within it).  For ``order <= 3`` the value
    is cross-checked against ``lim d^{n-1}/dz^{n-1} [(z-ζ)^n f(z)] / (n-1)!``
    by finite differences; disagreement beyond ``rtol`` raises
    :class:`OrderMismatch`.
    """
    if order < 1:
        raise ValueError("pole order must be >= 1")
    zeta = complex(zeta)
    res = contour_integral(f, circle(zeta, radius)) / (2j * math.pi)
    if cross_check:
        _check_order(f, zeta, order)
    if cross_check and order <= 3:
        lim = residue_by_limit(f, zeta, order)
        if abs(lim - res) > rtol * max(1.0, abs(res)):
            raise OrderMismatch(
                f"contour residue {res:.10g} and limit formula {lim:.10g} disagree; "
                f"is ζ = {zeta} really a pole of order {order}?"
            )
    return res


def _check_order(f, zeta, order):
    # (z-ζ)^n f must stay bounded: sampled on four rays at two radii a decade
    # apart it should barely move, while an extra Laurent term z^-k grows 10^k
    rays = np.array([1, 1j, -1, -1j])
    near = (1e-6 * rays) ** order * _fvals(f, zeta + 1e-6 * rays)
    far = (1e-5 * rays) ** order * _fvals(f, zeta + 1e-5 * rays)
    if not np.all(np.isfinite(near)) or np.max(np.abs(near - far)) > 0.1 * max(1.0, np.max(np.abs(far))):
        raise OrderMismatch(f"(z - ζ)^{order} f is unbounded near ζ = {zeta}; the pole order is higher")


def residue_by_limit(f: Callable, zeta: complex, order: int) -> complex:
    """``g^{(n-1)}(ζ)/(n-1)!`` with ``g = (z-ζ)^n f`` by stencils that avoid ζ.

    Orders 1 and 2 use central differences with step 1e-5; order 3 uses the
    four-point rotated stencil with step 1e-3 to limit cancellation.
    """
    zeta = complex(zeta)

    def g(z):
        z = np.asarray(z, dtype=complex)
        return (z - zeta) ** order * _fvals(f, z)

    if order == 1:
        d = 1e-5
        v = g(zeta + np.array([d, -d, 1j * d, -1j * d]))
        return complex(np.mean(v))
    if order == 2:
        d = 1e-5
        v = g(zeta + np.array([d, -d]))
        return complex((v[0] - v[1]) / (2 * d))
    if order == 3:
        d = 1e-3
        v = g(zeta + np.array([d, -d, 1j * d, -1j * d]))
        # Σ (-1)^m g(ζ + i^m d) = 4 c_2 d² + O(d^6)
        return complex((v[0] + v[1] - v[2] - v[3]) / (4 * d * d))
    raise ValueError("limit formula implemented for orders 1-3 only")


def residue_theorem_sum(f: Callable, c: Contour, poles: Sequence[PoleReport],
                        tol: float = 1e-8) -> tuple[complex, complex]:
    """``((1/2πi) ∮_c f, Σ residues)``; :class:`MissingPole` if they differ by more than ``tol``."""
    if not c.closed:
        raise ValueError("the residue theorem needs a closed contour")
    lhs = contour_integral(f, c) / (2j * math.pi)
    rhs = 0j
    for p in poles:
        r = p.residue if p.residue is not None else residue(f, p.location, p.order)
        rhs += r
    if abs(lhs - rhs) > tol * max(1.0, abs(rhs)):
        raise MissingPole(f"(1/2πi)∮f = {lhs:.12g} but Σ res = {rhs:.12g}")
    return lhs, rhs


def real_integral_by_closure(f: Callable, poles: Sequence[PoleReport], R: float,
                             half_line: bool = False, arc_tol: float = 1e-6) -> dict:
    """``∫_R f(x) dx`` from the residues in the upper half plane.

    The contour ``[-R, R]`` plus the upper semicircle is integrated directly;
    the arc contribution is measured and must be below ``arc_tol``.
    ``half_line`` halves the result (``∫_0^∞`` of an even integrand).

    Returns a dict with ``value`` (``2πi Σ res``, halved if requested),
    ``segment`` (the truncated real integral), ``arc`` and ``residue_sum``.
    """
    arc_val = contour_integral(f, semicircle(R))
    if abs(arc_val) > arc_tol:
        raise ArcNotNegligible(f"|∫_arc f| = {abs(arc_val):.3g} exceeds {arc_tol} at R = {R}")
    inside = [p for p in poles if abs(p.location) < R and p.location.imag > 0]
    _, res_sum = residue_theorem_sum(f, upper_half_disk(R), inside)
    seg = contour_integral(f, segment(-R, R))
    value = 2j * math.pi * res_sum
    scale = 0.5 if half_line else 1.0
    return {
        "value": scale * value.real if abs(value.imag) < 1e-12 * max(1.0, abs(value)) else scale * value,
        "segment": scale * seg,
        "arc": arc_val,
        "residue_sum": res_sum,
        "R": R,
    }


def argument_principle(f: Callable, f_prime: Callable, c: Contour, min_modulus: float = 1e-8) -> int:
    """Zeros minus poles of ``f`` inside ``c``, counted with multiplicity.

    Raises :class:`ZeroOnTrace` when ``|f|`` drops below ``min_modulus`` on
    the sampled trace and :class:`NotNearInteger` when the logarithmic
    integral is 0.1 or more away from an integer.
    """
    if not c.closed:
        raise ValueError("the argument principle needs a closed contour")
    with np.errstate(divide="ignore", invalid="ignore"):
        mod = np.abs(_fvals(f, c.trace()))
    if not np.all(np.isfinite(mod)) or np.min(mod) < min_modulus:
        raise ZeroOnTrace("f has a zero or pole on (or too near) the contour")
    val = contour_integral(lambda z: _fvals(f_prime, z) / _fvals(f, z), c) / (2j * math.pi)
    k = round(val.real)
    if abs(val - k) >= 0.1:
        raise NotNearInteger(f"logarithmic integral {val:.6g} is not near an integer")
    return int(k)


# preset integrands with their upper-half-plane poles
def _sixth_root_poles():
    return [PoleReport(cmath.exp(1j * math.pi * (2 * k + 1) / 6), 1) for k in range(3)]


PRESETS = {
    "one-over-1-plus-x6": {
        "f": lambda z: 1.0 / (1.0 + z**6),
        "poles": _sixth_root_poles,
        "half_line": True,
        "R": 50.0,
    },
    "one-over-1-plus-x4": {
        "f": lambda z: 1.0 / (1.0 + z**4),
        "poles": lambda: [PoleReport(cmath.exp(1j * math.pi / 4), 1), PoleReport(cmath.exp(3j * math.pi / 4), 1)],
        "half_line": False,
        "R": 200.0,
    },
    "one-over-1-plus-x2-squared": {
        "f": lambda z: 1.0 / (1.0 + z**2) ** 2,
        "poles": lambda: [PoleReport(1j, 2)],
        "half_line": False,
        "R": 200.0,
    },
}
