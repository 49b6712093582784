"""Convolution of grid functions and mollifier families.

Inputs are treated as zero outside their windows.  The convolution of a
function on ``[a_f, b_f]`` with one on ``[a_g, b_g]`` (same spacing ``h``)
lives on ``[a_f + a_g, b_f + b_g]``; each output sample is the trapezoid
rule over the overlap of the two supports, which makes the discrete product
exactly commutative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad
from scipy.signal import fftconvolve

from .errors import GridTooNarrow, InvalidP, SpacingMismatch, UnsupportedP
from .realfun import GridFunction, InequalityReport, integrate, lp_norm

__all__ = [
    "Mollifier",
    "convolve",
    "check_young",
    "trapezoid_norm",
    "total_variation",
    "mollifier_samples",
    "mollify",
    "mollify_convergence",
    "bump_norm",
]

_SPACING_RTOL = 1e-9
GAUSSIAN_HALF_WIDTH = 8.0  # standard deviations covered by a gaussian grid


def _check_spacing(f: GridFunction, g: GridFunction) -> float:
    if not math.isclose(f.h, g.h, rel_tol=_SPACING_RTOL):
        raise SpacingMismatch(f"grid spacings differ: {f.h} vs {g.h}")
    return f.h


def convolve(f: GridFunction, g: GridFunction, use_fft: bool = False) -> GridFunction:
    """``(f*g)(x) = ∫ f(x - y) g(y) dy`` on ``[a_f + a_g, b_f + b_g]``.

    Direct O(n m) summation by default; ``use_fft`` switches to an FFT
    product with the same end corrections (agrees to rounding).
    """
    h = _check_spacing(f, g)
    fv, gv = f.values, g.values
    nf, ng = f.n, g.n
    full = fftconvolve(fv, gv) if use_fft else np.convolve(fv, gv)
    if use_fft and not (f.is_complex or g.is_complex):
        full = full.real
    k = np.arange(nf + ng + 1)
    lo = np.maximum(0, k - nf)  # first overlapping index of g
    hi = np.minimum(ng, k)      # last overlapping index of g
    # trapezoid: halve the two end terms of each overlap sum
    end_lo = fv[k - lo] * gv[lo]
    end_hi = fv[k - hi] * gv[hi]
    vals = h * (full - 0.5 * (end_lo + end_hi))
    return GridFunction(f.a + g.a, f.b + g.b, vals, label=f"{f.label}*{g.label}".strip("*"))


def trapezoid_norm(f: GridFunction, p: float) -> float:
    """``‖f‖_p`` by the trapezoid rule; ``p = inf`` is the sample maximum."""
    if p < 1:
        raise InvalidP(f"p must be >= 1, got {p}")
    v = np.abs(f.values)
    if math.isinf(p):
        return float(np.max(v))
    scale = float(np.max(v))
    if scale == 0:
        return 0.0
    w = np.full(v.size, f.h)
    w[[0, -1]] /= 2
    return scale * float(np.sum(w * (v / scale) ** p)) ** (1.0 / p)


def check_young(f: GridFunction, g: GridFunction, p: float,
                conv: GridFunction | None = None) -> InequalityReport:
    """``‖f*g‖_p`` against ``‖f‖_1 ‖g‖_p``.

    All three norms use the trapezoid rule that :func:`convolve` is built
    on.  For inputs vanishing at their window ends both sides are then plain
    lattice sums and the inequality holds exactly up to rounding, whatever
    the smoothness of the data.
    """
    if conv is None:
        conv = convolve(f, g)
    return InequalityReport(trapezoid_norm(conv, p), trapezoid_norm(f, 1) * trapezoid_norm(g, p))


def total_variation(f: GridFunction) -> float:
    """Discrete total variation, including the jumps to zero outside the window."""
    v = np.concatenate([[0.0], f.values, [0.0]])
    return float(np.sum(np.abs(np.diff(v))))


# ---------------------------------------------------------------------------
# Mollifiers
# ---------------------------------------------------------------------------


def _bump(x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    inside = np.abs(x) < 1
    out[inside] = np.exp(1.0 / (x[inside] ** 2 - 1.0))
    return out


@lru_cache(maxsize=None)
def bump_norm() -> float:
    """``∫_{-1}^{1} exp(1/(x²-1)) dx``, computed once per process."""
    val, _ = quad(lambda x: math.exp(1.0 / (x * x - 1.0)), -1.0, 1.0, epsabs=1e-14, epsrel=1e-14)
    return val


@dataclass(frozen=True)
class Mollifier:
    """``rho_n(x) = n rho(n x)`` for a unit-mass profile ``rho``.

    ``family`` is ``"gaussian"`` (standard normal density, unbounded support)
    or ``"bump"`` (normalized ``exp(1/(x²-1))``, support ``[-1/n, 1/n]``).
    """

    family: str = "bump"
    n: int = 1

    def __post_init__(self):
        if self.family not in ("gaussian", "bump"):
            raise ValueError(f"unknown mollifier family {self.family!r}")
        if int(self.n) < 1:
            raise ValueError("mollifier index n must be >= 1")

    @property
    def half_width(self) -> float:
        """Half-width of the sampled window: the support, or 8 standard deviations."""
        return (GAUSSIAN_HALF_WIDTH if self.family == "gaussian" else 1.0) / self.n

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        n = self.n
        if self.family == "gaussian":
            return n * np.exp(-0.5 * (n * x) ** 2) / math.sqrt(2 * math.pi)
        return n * _bump(n * x) / bump_norm()


def mollifier_samples(m: Mollifier, a: float, b: float, n: int) -> GridFunction:
    """Sample ``m`` on ``n`` equal intervals of ``[a, b]``.

    Raises :class:`GridTooNarrow` unless the window contains the support
    (bump) or ``±8`` standard deviations (gaussian).
    """
    w = m.half_width
    if a > -w + 1e-12 * w or b < w - 1e-12 * w:
        raise GridTooNarrow(f"window [{a}, {b}] does not cover [-{w}, {w}]")
    return GridFunction.from_callable(m, a, b, n, label=f"rho_{m.n}")


def _centered_samples(m: Mollifier, h: float) -> GridFunction:
    k = max(int(math.ceil(m.half_width / h - 1e-9)), 2)
    return mollifier_samples(m, -k * h, k * h, 2 * k)


def _pad_to(g: GridFunction, a: float, b: float) -> np.ndarray:
    """Values of ``g`` on the aligned grid ``[a, b]``, zero outside its window."""
    left = int(round((g.a - a) / g.h))
    right = int(round((b - g.b) / g.h))
    return np.concatenate([np.zeros(left), g.values, np.zeros(right)])


def mollify(g: GridFunction, m: Mollifier, use_fft: bool = False) -> GridFunction:
    """``rho_n * g`` on the window of ``g`` widened by the mollifier support.

    The sampled kernel is rescaled to unit trapezoid mass so that constants
    are reproduced exactly even when the support spans only a few nodes.
    """
    rho = _centered_samples(m, g.h)
    mass = g.h * (np.sum(rho.values) - 0.5 * (rho.values[0] + rho.values[-1]))
    return convolve(rho * (1.0 / mass), g, use_fft=use_fft)


def mollify_convergence(g: GridFunction, family: str, p: float, n_list) -> list[float]:
    """``‖rho_n * g - g‖_p`` for each ``n`` in ``n_list``.

    ``g`` is extended by zero, so it should vanish at its window edges.
    ``p = inf`` is refused: uniform convergence needs continuity that a
    sampled generator cannot certify.
    """
    if math.isinf(p):
        raise UnsupportedP("p = inf is not supported for mollifier convergence")
    out = []
    for n in n_list:
        sm = mollify(g, Mollifier(family, int(n)))
        diff = sm.values - _pad_to(g, sm.a, sm.b)
        out.append(lp_norm(sm.with_values(diff), p))
    return out


def unit_mass_error(m: Mollifier, h: float) -> float:
    """``|∫ rho_n - 1|`` on a grid of spacing ``h``."""
    return abs(integrate(_centered_samples(m, h)) - 1.0)
