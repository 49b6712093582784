"""Second-kind integral equations.

The discrete operator is ``(T u)(x_i) = Σ_j w_j K(x_i, x_j) u_j`` on a
quadrature rule over ``[a, b]`` (Gauss–Legendre by default).  For a
symmetric kernel the similar matrix ``S = W^{1/2} K W^{1/2}`` is symmetric,
and the weighted Rayleigh quotient ``(u, Tu)_w / (u, u)_w`` of ``u`` equals the
Euclidean one of ``W^{1/2} u`` under ``S``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np
from scipy.linalg import eigh

from .errors import (
    BoundViolated,
    FredholmAlternative,
    MaxIter,
    NotSymmetric,
    ZeroFunction,
)
from .realfun import GridFunction, simpson_weights

__all__ = [
    "KernelOperator",
    "NystromSolution",
    "nystrom_solve",
    "volterra_eigencheck",
    "uryshon_fixed_point",
    "minimax_bounds",
    "rayleigh_quotient",
    "power_iteration",
    "KERNELS",
]

ALTERNATIVE_COND = 1e12


def _gauss_rule(a, b, n):
    t, w = np.polynomial.legendre.leggauss(n)
    return (b - a) / 2 * t + (a + b) / 2, (b - a) / 2 * w


def _trapezoid_rule(a, b, n):
    x = np.linspace(a, b, n)
    w = np.full(n, (b - a) / (n - 1))
    w[[0, -1]] /= 2
    return x, w


@dataclass(frozen=True, eq=False)
class KernelOperator:
    """``lam * T_K`` discretized on ``n`` quadrature nodes of ``[a, b]``.

    ``rule`` is ``"gauss"`` or ``"trapezoid"``.  ``K`` must accept numpy
    arrays (it is called on a meshgrid).
    """

    K: Callable
    a: float
    b: float
    lam: float = 1.0
    n: int = 64
    rule: str = "gauss"

    def __post_init__(self):
        if not self.b > self.a:
            raise ValueError("need b > a")
        if self.rule not in ("gauss", "trapezoid"):
            raise ValueError(f"unknown rule {self.rule!r}")

    @cached_property
    def _rule(self):
        if self.rule == "gauss":
            return _gauss_rule(self.a, self.b, self.n)
        return _trapezoid_rule(self.a, self.b, self.n)

    @property
    def nodes(self) -> np.ndarray:
        return self._rule[0]

    @property
    def weights(self) -> np.ndarray:
        return self._rule[1]

    @cached_property
    def kernel_matrix(self) -> np.ndarray:
        X, Y = np.meshgrid(self.nodes, self.nodes, indexing="ij")
        Km = np.asarray(self.K(X, Y), dtype=float)
        Km = np.broadcast_to(Km, X.shape).copy()
        if not np.all(np.isfinite(Km)):
            raise ValueError("kernel is not finite on the quadrature nodes")
        return Km

    @property
    def matrix(self) -> np.ndarray:
        """``T[i, j] = w_j K(x_i, x_j)`` (without ``lam``)."""
        return self.kernel_matrix * self.weights[None, :]

    @property
    def is_symmetric(self) -> bool:
        Km = self.kernel_matrix
        return bool(np.max(np.abs(Km - Km.T)) <= 1e-12 * max(1.0, np.max(np.abs(Km))))

    def symmetrized(self) -> np.ndarray:
        s = np.sqrt(self.weights)
        S = s[:, None] * self.kernel_matrix * s[None, :]
        return (S + S.T) / 2

    def apply(self, u) -> np.ndarray:
        """``T u`` on the nodes for nodal values or a callable ``u``."""
        return self.matrix @ self._nodal(u)

    def _nodal(self, u) -> np.ndarray:
        if callable(u):
            return np.asarray(u(self.nodes), dtype=float)
        u = np.asarray(u, dtype=float)
        if u.shape != (self.n,):
            raise ValueError(f"expected {self.n} nodal values, got shape {u.shape}")
        return u

    def scaled(self, c: float) -> "KernelOperator":
        K = self.K
        return KernelOperator(lambda x, y: c * K(x, y), self.a, self.b, self.lam, self.n, self.rule)


@dataclass(frozen=True)
class NystromSolution:
    """Nodal solution of ``u - lam T u = f`` with Nyström interpolation."""

    op: KernelOperator
    f: Callable
    values: np.ndarray

    @property
    def nodes(self) -> np.ndarray:
        return self.op.nodes

    def __call__(self, x):
        """``u(x) = f(x) + lam Σ_j w_j K(x, x_j) u_j`` at arbitrary points."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        X, Y = np.meshgrid(x, self.op.nodes, indexing="ij")
        Kx = np.broadcast_to(np.asarray(self.op.K(X, Y), dtype=float), X.shape)
        return np.asarray(self.f(x), dtype=float) + self.op.lam * (Kx * self.op.weights) @ self.values


def _as_callable(f):
    if callable(f):
        return f
    c = float(f)
    return lambda x: np.full(np.shape(x), c)


def nystrom_solve(op: KernelOperator, f) -> NystromSolution:
    """Solve ``(I - lam T) u = f`` on the quadrature nodes.

    ``f`` is a vectorized callable, a :class:`GridFunction` (interpolated)
    or a constant.

    Raises
    ------
    FredholmAlternative
        ``cond(I - lam T) > 1e12``: the homogeneous equation has (numerically)
        nontrivial solutions.  The exception carries a basis of the discrete
        kernel from the right singular vectors with singular value below
        ``1e-12`` times the largest.
    """
    f = _as_callable(f)
    A = np.eye(op.n) - op.lam * op.matrix
    _, s, vt = np.linalg.svd(A)
    cond = s[0] / s[-1] if s[-1] > 0 else math.inf
    if cond > ALTERNATIVE_COND:
        small = s <= s[0] / ALTERNATIVE_COND
        basis = vt[small]
        # fix the sign so that the largest entry is positive
        idx = np.argmax(np.abs(basis), axis=1)
        basis = basis * np.sign(basis[np.arange(len(basis)), idx])[:, None]
        raise FredholmAlternative(basis, op.nodes.copy(), cond)
    u = np.linalg.solve(A, np.asarray(f(op.nodes), dtype=float))
    return NystromSolution(op, f, u)


def volterra_eigencheck(op: KernelOperator, lam: float, u) -> float:
    """Relative eigen-residual ``‖lam u - T u‖_∞ / ‖u‖_∞`` on the nodes."""
    uv = op._nodal(u)
    norm = float(np.max(np.abs(uv)))
    if norm == 0:
        raise ZeroFunction("eigen-residual needs a nonzero function")
    return float(np.max(np.abs(lam * uv - op.matrix @ uv))) / norm


def uryshon_fixed_point(phi: Callable, lam: float, r: float, a: float = 0.0, b: float = 1.0,
                        n: int = 256, tol: float = 1e-12, max_iter: int = 500) -> GridFunction:
    """Solve ``u(t) = lam ∫_a^b phi(t, s, u(s)) ds`` by iteration from ``u ≡ 0``.

    ``phi`` is sampled on ``[a, b]² × [-r, r]`` to estimate ``‖phi‖_∞``; the
    iteration is only started when ``|lam| <= r / (‖phi‖_∞ (b - a))``, which
    keeps every iterate in the ball of radius ``r``.  Integrals use Simpson
    weights on ``n`` equal intervals.

    Raises :class:`BoundViolated` when the smallness condition fails and
    :class:`MaxIter` when the sup-change does not drop below ``tol``.
    """
    t = np.linspace(a, b, n + 1)
    w = simpson_weights(n, (b - a) / n)
    probe_t = np.linspace(a, b, 17)
    T3, S3, U3 = np.meshgrid(probe_t, probe_t, np.linspace(-r, r, 17), indexing="ij")
    sup_phi = float(np.max(np.abs(phi(T3, S3, U3))))
    if sup_phi > 0 and abs(lam) > r / (sup_phi * (b - a)):
        raise BoundViolated(
            f"|lam| = {abs(lam):.4g} exceeds r/(‖phi‖∞ (b-a)) = {r / (sup_phi * (b - a)):.4g}"
        )
    Tm, Sm = np.meshgrid(t, t, indexing="ij")
    u = np.zeros(n + 1)
    for _ in range(max_iter):
        new = lam * (phi(Tm, Sm, np.broadcast_to(u[None, :], Tm.shape)) @ w)
        change = float(np.max(np.abs(new - u)))
        u = new
        if change < tol:
            return GridFunction(a, b, u, label="uryshon")
    raise MaxIter(f"Uryshon iteration did not converge in {max_iter} iterations")


def rayleigh_quotient(S: np.ndarray, v: np.ndarray) -> float:
    return float(v @ S @ v / (v @ v))


def power_iteration(S: np.ndarray, iters: int = 500, tol: float = 1e-12,
                    seed: int | None = 0) -> tuple[float, np.ndarray]:
    """Dominant eigenpair of a positive semidefinite symmetric matrix."""
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(S.shape[0])
    v /= np.linalg.norm(v)
    rq = rayleigh_quotient(S, v)
    for _ in range(iters):
        w = S @ v
        nw = np.linalg.norm(w)
        if nw == 0:
            return 0.0, v
        v = w / nw
        new = rayleigh_quotient(S, v)
        if abs(new - rq) < tol * max(1.0, abs(new)):
            rq = new
            break
        rq = new
    return rq, v


def minimax_bounds(op: KernelOperator, method: str = "eigh", iters: int = 500,
                   tol: float = 1e-12) -> tuple[float, float]:
    """``(lam_minus, lam_plus)``: extreme Rayleigh quotients of the discrete operator.

    ``method="eigh"`` takes the two end eigenvalues of the symmetrized
    matrix from a symmetric eigensolver.  ``method="power"`` runs power
    iteration on ``S + σI`` and ``σI - S`` (``σ`` the row-sum bound, so both
    are positive semidefinite); it is cheap but stalls when the spectrum
    clusters at an end, which smooth kernels do at 0.  ``lam`` of the
    operator is ignored.
    """
    if not op.is_symmetric:
        raise NotSymmetric("minimax bounds need a symmetric kernel")
    if method not in ("eigh", "power"):
        raise ValueError(f"unknown method {method!r}")
    S = op.symmetrized()
    sigma = float(np.max(np.sum(np.abs(S), axis=1)))
    if sigma == 0:
        return 0.0, 0.0
    if method == "eigh":
        m = S.shape[0]
        lo = eigh(S, eigvals_only=True, subset_by_index=[0, 0])[0]
        hi = eigh(S, eigvals_only=True, subset_by_index=[m - 1, m - 1])[0]
        return float(lo), float(hi)
    eye = np.eye(S.shape[0])
    _, v_top = power_iteration(S + sigma * eye, iters, tol)
    _, v_bot = power_iteration(sigma * eye - S, iters, tol)
    # report the Rayleigh quotients of S itself at the converged vectors
    return rayleigh_quotient(S, v_bot), rayleigh_quotient(S, v_top)


KERNELS = {
    "sinsin": (lambda x, y: np.sin(x) * np.sin(y), 0.0, math.pi),
    "xy": (lambda x, y: x * y, 0.0, 1.0),
    "gauss": (lambda x, y: np.exp(-((x - y) ** 2)), 0.0, 1.0),
}
