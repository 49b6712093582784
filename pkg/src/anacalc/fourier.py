"""Fourier series on [-π, π], the heat equation, and integral transforms.

Conventions::

    a_k = (1/π) ∫ f(x) cos(kx) dx,   b_k = (1/π) ∫ f(x) sin(kx) dx
    S_n(x) = a_0/2 + Σ_{k<=n} (a_k cos kx + b_k sin kx)
    f̂(x)  = (2π)^{-1/2} ∫ f(t) e^{ixt} dt
    f(t)  = (2π)^{-1/2} ∫ f̂(x) e^{-ixt} dx
    Lf(x) = ∫_0^∞ e^{-xt} f(t) dt

All integrals are composite Simpson on the sample grid of the input.  A
series of order ``N`` needs at least ``16 N`` grid intervals.

The discrete transform on the circle with frequencies in Z is the complex
form of the same series: ``c_k = (a_k - i b_k)/2``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import GridMismatch, GridTooCoarse, NegativeX, NotDecayed, OmegaZero, OrderExceeded
from .realfun import GridFunction, InequalityReport, integrate, simpson_weights

__all__ = [
    "FourierSeries",
    "HeatSolution",
    "fourier_coefficients",
    "partial_sum",
    "dirichlet_kernel",
    "heat_solve",
    "bessel_check",
    "fourier_transform",
    "inverse_transform",
    "laplace_transform",
    "transform_values",
]

SAMPLES_PER_MODE = 16
DECAY_TOL = 1e-12
_CHUNK = 1 << 21  # max matrix entries per vectorized block


@dataclass(frozen=True)
class FourierSeries:
    """Real trigonometric series ``a0/2 + Σ a_k cos kx + b_k sin kx``, k = 1..N."""

    a0: float
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        b = np.asarray(self.b, dtype=float)
        if a.shape != b.shape or a.ndim != 1:
            raise ValueError("cosine and sine coefficient arrays must have equal length")
        object.__setattr__(self, "a0", float(self.a0))
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def order(self) -> int:
        return self.a.size

    def to_json(self) -> str:
        return json.dumps({"a0": self.a0, "a": self.a.tolist(), "b": self.b.tolist()})

    @classmethod
    def from_json(cls, text: str) -> "FourierSeries":
        d = json.loads(text)
        return cls(d["a0"], d["a"], d["b"])

    def __call__(self, x, n: int | None = None):
        return partial_sum(self, x, n)


def _check_periodic_window(f: GridFunction):
    if not (math.isclose(f.a, -math.pi, abs_tol=1e-12) and math.isclose(f.b, math.pi, abs_tol=1e-12)):
        raise GridMismatch(f"series analysis needs the window [-π, π], got [{f.a}, {f.b}]")


def _chunks(total: int, width: int):
    step = max(1, _CHUNK // max(width, 1))
    for start in range(0, total, step):
        yield start, min(total, start + step)


def fourier_coefficients(f: GridFunction, N: int) -> FourierSeries:
    """Coefficients ``a_0 .. a_N`` and ``b_1 .. b_N`` of ``f`` on ``[-π, π]``.

    Raises :class:`GridTooCoarse` when ``N > n / 16`` for a grid of ``n``
    intervals.
    """
    _check_periodic_window(f)
    if N < 1:
        raise OrderExceeded("series order must be >= 1")
    if N * SAMPLES_PER_MODE > f.n:
        raise GridTooCoarse(f"order {N} needs at least {SAMPLES_PER_MODE * N} intervals, grid has {f.n}")
    if f.is_complex:
        raise GridMismatch("real series need a real-valued generator")
    wf = simpson_weights(f.n, f.h) * f.values / math.pi
    # x_j = -π + 2πj/n, so Σ_j wf_j e^{-ik x_j} = (-1)^k DFT(wf)_k once the
    # sample at x_n = π is folded onto x_0 = -π.
    folded = wf[:-1].copy()
    folded[0] += wf[-1]
    c = np.fft.fft(folded)[1:N + 1]
    c *= np.where(np.arange(1, N + 1) % 2 == 0, 1.0, -1.0)
    a, b = c.real.copy(), -c.imag.copy()
    return FourierSeries(float(np.sum(wf)), a, b)


def partial_sum(s: FourierSeries, x, n: int | None = None):
    """``S_n(x)``; ``n`` defaults to the full order.  Vectorized in ``x``."""
    if n is None:
        n = s.order
    if n > s.order or n < 0:
        raise OrderExceeded(f"requested order {n} but the series has {s.order} terms")
    x = np.asarray(x, dtype=float)
    flat = x.ravel()
    out = np.full(flat.shape, s.a0 / 2)
    if n:
        k = np.arange(1, n + 1)
        for lo, hi in _chunks(flat.size, n):
            kx = flat[lo:hi, None] * k[None, :]
            out[lo:hi] += np.cos(kx) @ s.a[:n] + np.sin(kx) @ s.b[:n]
    out = out.reshape(x.shape)
    return float(out) if out.ndim == 0 else out


def dirichlet_kernel(n: int, y):
    """``sin((n + 1/2) y) / (2 sin(y/2))``, equal to ``1/2 + Σ_{k<=n} cos ky``.

    The removable singularity at ``y ≡ 0 (mod 2π)`` is filled with ``n + 1/2``.
    """
    y = np.asarray(y, dtype=float)
    s = np.sin(y / 2)
    small = np.abs(s) < 1e-12
    safe = np.where(small, 1.0, s)
    # every y ≡ 0 (mod 2π) has the limit n + 1/2 since cos(k y) = 1 there
    out = np.where(small, n + 0.5, np.sin((n + 0.5) * y) / (2 * safe))
    return float(out) if out.ndim == 0 else out


def bessel_check(s: FourierSeries, f: GridFunction) -> InequalityReport:
    """``a0²/2 + Σ (a_k² + b_k²)`` against ``(1/π) ∫ f²``."""
    lhs = s.a0**2 / 2 + float(np.sum(s.a**2 + s.b**2))
    return InequalityReport(lhs, integrate(f * f) / math.pi)


# ---------------------------------------------------------------------------
# Heat equation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HeatSolution:
    """Series solution of ``u_t = omega² u_xx`` on ``[-π, π]`` (periodic)."""

    series: FourierSeries
    omega: float

    def damping(self, t: float) -> np.ndarray:
        k = np.arange(1, self.series.order + 1)
        return np.exp(-(k**2) * self.omega**2 * t)

    def coefficients_at(self, t: float) -> FourierSeries:
        d = self.damping(t)
        return FourierSeries(self.series.a0, self.series.a * d, self.series.b * d)

    def __call__(self, x, t: float):
        return partial_sum(self.coefficients_at(t), x)

    evaluate = __call__


def heat_solve(f: GridFunction, omega: float, N: int) -> HeatSolution:
    """Damp mode ``k`` of the initial datum ``f`` by ``exp(-k² omega² t)``."""
    if omega == 0:
        raise OmegaZero("diffusivity parameter omega must be nonzero")
    return HeatSolution(fourier_coefficients(f, N), float(omega))


# ---------------------------------------------------------------------------
# Transforms
# ---------------------------------------------------------------------------


def _check_decay(f: GridFunction, what: str):
    edge = max(abs(f.values[0]), abs(f.values[-1]))
    if edge > DECAY_TOL:
        raise NotDecayed(f"{what} is {edge:.3g} at the window edge (> {DECAY_TOL})")


def transform_values(f: GridFunction, x, sign: int = 1) -> np.ndarray:
    """``(2π)^{-1/2} Σ_j w_j f(t_j) e^{sign·i x t_j}`` at the points ``x``."""
    t = f.x
    wf = simpson_weights(f.n, f.h) * f.values
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty(x.size, dtype=complex)
    for lo, hi in _chunks(x.size, t.size):
        out[lo:hi] = np.exp(sign * 1j * np.outer(x[lo:hi], t)) @ wf
    return out / math.sqrt(2 * math.pi)


def _grid_result(x, vals, label):
    x = np.asarray(x, dtype=float)
    return GridFunction.from_samples(x, vals, label=label)


def fourier_transform(f: GridFunction, x_grid) -> GridFunction:
    """``f̂`` on the uniform grid ``x_grid`` (complex-valued).

    ``f`` must have decayed below ``1e-12`` at both window edges.
    """
    _check_decay(f, "f")
    return _grid_result(x_grid, transform_values(f, x_grid, +1), "fhat")


def inverse_transform(fhat: GridFunction, t_grid) -> GridFunction:
    """``(2π)^{-1/2} ∫ f̂(x) e^{-ixt} dx`` on the uniform grid ``t_grid``."""
    _check_decay(fhat, "fhat")
    return _grid_result(t_grid, transform_values(fhat, t_grid, -1), "f")


def laplace_transform(f: GridFunction, x_grid) -> GridFunction:
    """``Lf(x) = ∫ e^{-xt} f(t) dt`` for ``f`` supported in its window ``[a, R]``, ``a >= 0``."""
    x = np.asarray(x_grid, dtype=float)
    if np.any(x < 0):
        raise NegativeX("Laplace transform evaluated only for x >= 0")
    if f.a < 0:
        raise GridMismatch("Laplace transform needs a window inside [0, ∞)")
    t = f.x
    wf = simpson_weights(f.n, f.h) * f.values
    vals = np.empty(x.size, dtype=np.result_type(wf, float))
    flat = x.ravel()
    for lo, hi in _chunks(flat.size, t.size):
        vals[lo:hi] = np.exp(-np.outer(flat[lo:hi], t)) @ wf
    return _grid_result(x, vals, "Lf")
