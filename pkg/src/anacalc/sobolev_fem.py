"""Weak derivatives and piecewise-linear Galerkin solutions in one dimension.

The bilinear form is ``A(u, v) = ∫ p u'v' + q u v`` on ``(a, b)`` and the
load is ``F(v) = ∫ f v``.  Three problem kinds are supported:

``dirichlet``
    ``-u'' + u = f`` (``p = q = 1``), ``u(a), u(b)`` prescribed (default 0).
``sturm_liouville``
    ``-(p u')' + q u = f`` with ``p >= alpha > 0``, ``q >= 0``, ``u = 0`` at both ends.
``neumann``
    ``-(p u')' + q u = f`` with ``u'(a) = u'(b) = 0``; ``q`` defaults to 1 so
    no compatibility condition arises.

Hat functions on a 1D mesh give a tridiagonal system, solved by the Thomas
algorithm.  Element integrals use 3-point Gauss quadrature.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import (
    DegenerateInterval,
    GridMismatch,
    NotCoercive,
    NotZeroBoundary,
    SingularSystem,
)
from .realfun import GridFunction, InequalityReport, integrate, lp_norm

__all__ = [
    "Mesh1D",
    "BilinearFormSpec",
    "FemSolution",
    "assemble",
    "thomas_solve",
    "solve_weak",
    "weak_derivative_check",
    "poincare_check",
    "piecewise_linear_lp",
    "euler_lagrange_quadratic",
    "dirichlet_energy",
    "check_minimizer",
]

_GAUSS3_X = np.array([-math.sqrt(3 / 5), 0.0, math.sqrt(3 / 5)])
_GAUSS3_W = np.array([5 / 9, 8 / 9, 5 / 9])


@dataclass(frozen=True)
class Mesh1D:
    """Strictly increasing nodes ``a = x_0 < ... < x_M = b``."""

    nodes: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.nodes, dtype=float).copy()
        if x.ndim != 1 or x.size < 2:
            raise DegenerateInterval("a mesh needs at least two nodes")
        if np.any(np.diff(x) <= 0):
            raise DegenerateInterval("mesh nodes must be strictly increasing")
        x.setflags(write=False)
        object.__setattr__(self, "nodes", x)

    @classmethod
    def uniform(cls, a: float, b: float, M: int) -> "Mesh1D":
        return cls(np.linspace(a, b, M + 1))

    @property
    def a(self) -> float:
        return float(self.nodes[0])

    @property
    def b(self) -> float:
        return float(self.nodes[-1])

    @property
    def M(self) -> int:
        return self.nodes.size - 1

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.nodes)


def _const(c):
    return lambda x: np.full(np.shape(x), float(c))


@dataclass(frozen=True)
class BilinearFormSpec:
    """Coefficients ``p`` (of ``u'v'``) and ``q`` (of ``uv``) plus the problem kind.

    ``boundary`` holds ``(g_a, g_b)`` for the Dirichlet kind.  Constant
    coefficients may be given as numbers.
    """

    p: Callable | float = 1.0
    q: Callable | float = 1.0
    kind: str = "dirichlet"
    boundary: tuple = (0.0, 0.0)

    def __post_init__(self):
        if self.kind not in ("dirichlet", "sturm_liouville", "neumann"):
            raise ValueError(f"unknown problem kind {self.kind!r}")
        for name in ("p", "q"):
            v = getattr(self, name)
            if not callable(v):
                object.__setattr__(self, name, _const(v))
        if self.kind != "dirichlet" and tuple(self.boundary) != (0.0, 0.0):
            raise ValueError("boundary values apply to the dirichlet kind only")

    @classmethod
    def dirichlet(cls, g_a: float = 0.0, g_b: float = 0.0) -> "BilinearFormSpec":
        return cls(1.0, 1.0, "dirichlet", (float(g_a), float(g_b)))

    @classmethod
    def sturm_liouville(cls, p, q) -> "BilinearFormSpec":
        return cls(p, q, "sturm_liouville")

    @classmethod
    def neumann(cls, p=1.0, q=1.0) -> "BilinearFormSpec":
        return cls(p, q, "neumann")


@dataclass
class FemSolution:
    mesh: Mesh1D
    nodal: np.ndarray
    bc: str
    report: dict = field(default_factory=dict)

    def __call__(self, x):
        return np.interp(x, self.mesh.nodes, self.nodal)

    @property
    def slopes(self) -> np.ndarray:
        return np.diff(self.nodal) / self.mesh.widths

    def to_csv(self, path) -> None:
        np.savetxt(path, np.column_stack([self.mesh.nodes, self.nodal]), delimiter=",",
                   header="x,u", comments="", fmt="%.17g")

    def report_json(self) -> str:
        h = self.mesh.widths
        return json.dumps({
            "alpha": self.report.get("coercivity_alpha"),
            "residual": self.report.get("residual"),
            "energy": self.report.get("energy"),
            "h": float(h.max()),
            "bc": self.bc,
        })


# ---------------------------------------------------------------------------
# Assembly and solve
# ---------------------------------------------------------------------------


def _gauss_points(mesh: Mesh1D):
    h = mesh.widths
    mid = (mesh.nodes[:-1] + mesh.nodes[1:]) / 2
    x = mid[:, None] + (h / 2)[:, None] * _GAUSS3_X[None, :]
    w = (h / 2)[:, None] * _GAUSS3_W[None, :]
    # hat values at the Gauss points: left node, right node
    lam = (x - mesh.nodes[:-1, None]) / h[:, None]
    return x, w, 1 - lam, lam


def _eval_coeff(c, x):
    v = np.asarray(c(x), dtype=float)
    return np.broadcast_to(v, x.shape) if v.shape != x.shape else v


def assemble(form: BilinearFormSpec, mesh: Mesh1D, f) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Full tridiagonal system over all ``M + 1`` hat functions.

    Returns ``(lower, diag, upper, load)`` with ``lower[i] = A(φ_{i+1}, φ_i)``
    and ``upper[i] = A(φ_i, φ_{i+1})``.
    """
    x, w, phi_l, phi_r = _gauss_points(mesh)
    h = mesh.widths
    p = _eval_coeff(form.p, x)
    q = _eval_coeff(form.q, x)
    fx = _eval_coeff(f if callable(f) else _const(f), x)
    # φ_l' = -1/h, φ_r' = 1/h on each element
    pint = np.sum(p * w, axis=1) / h**2
    k_ll = pint + np.sum(q * phi_l * phi_l * w, axis=1)
    k_rr = pint + np.sum(q * phi_r * phi_r * w, axis=1)
    k_lr = -pint + np.sum(q * phi_l * phi_r * w, axis=1)
    f_l = np.sum(fx * phi_l * w, axis=1)
    f_r = np.sum(fx * phi_r * w, axis=1)

    n = mesh.M + 1
    diag = np.zeros(n)
    diag[:-1] += k_ll
    diag[1:] += k_rr
    load = np.zeros(n)
    load[:-1] += f_l
    load[1:] += f_r
    return k_lr.copy(), diag, k_lr.copy(), load


def thomas_solve(lower, diag, upper, rhs) -> np.ndarray:
    """Solve a tridiagonal system by forward elimination and back substitution.

    ``lower`` and ``upper`` have length ``n - 1``.  Raises
    :class:`SingularSystem` on a vanishing pivot.
    """
    n = len(diag)
    c = np.empty(max(n - 1, 0))
    d = np.empty(n)
    scale = float(np.max(np.abs(diag))) or 1.0
    piv = diag[0]
    if abs(piv) <= 1e-14 * scale:
        raise SingularSystem("zero pivot at row 0")
    if n > 1:
        c[0] = upper[0] / piv
    d[0] = rhs[0] / piv
    for i in range(1, n):
        piv = diag[i] - lower[i - 1] * c[i - 1]
        if abs(piv) <= 1e-14 * scale:
            raise SingularSystem(f"zero pivot at row {i}")
        if i < n - 1:
            c[i] = upper[i] / piv
        d[i] = (rhs[i] - lower[i - 1] * d[i - 1]) / piv
    x = np.empty(n)
    x[-1] = d[-1]
    for i in range(n - 2, -1, -1):
        x[i] = d[i] - c[i] * x[i + 1]
    return x


def _tri_matvec(lower, diag, upper, u):
    out = diag * u
    out[:-1] += upper * u[1:]
    out[1:] += lower * u[:-1]
    return out


def _check_coefficients(form: BilinearFormSpec, mesh: Mesh1D):
    x, _, _, _ = _gauss_points(mesh)
    p = _eval_coeff(form.p, x)
    q = _eval_coeff(form.q, x)
    if form.kind == "sturm_liouville":
        if np.min(p) <= 0:
            raise NotCoercive(f"p must be bounded below by a positive constant (min p = {np.min(p):.3g})")
        if np.min(q) < 0:
            raise NotCoercive(f"q must be nonnegative (min q = {np.min(q):.3g})")
    return float(np.min(p)), float(np.min(q))


def solve_weak(f, form: BilinearFormSpec, mesh: Mesh1D) -> FemSolution:
    """Galerkin solution in the hat-function space of ``mesh``.

    ``f`` is a vectorized callable, a :class:`GridFunction` (interpolated
    linearly) or a constant.  Nonzero Dirichlet data is handled by lifting
    with the affine interpolant of the boundary values.

    The report holds ``coercivity_alpha`` (``min A(φ, φ)/‖φ‖²_{H¹}`` over the
    free hat functions), ``residual`` (``‖K u - F‖_∞`` on the free rows),
    ``energy`` (``½A(u,u) - F(u)``) and ``min_p``.

    Raises
    ------
    NotCoercive
        Coefficient hypotheses fail or the estimated constant is not positive.
    SingularSystem
        The elimination hits a zero pivot.
    """
    if not callable(f):
        f = _const(f)
    min_p, _ = _check_coefficients(form, mesh)
    lower, diag, upper, load = assemble(form, mesh, f)
    n = mesh.M + 1
    u = np.zeros(n)

    if form.kind == "neumann":
        free = slice(0, n)
        bc = "neumann"
    else:
        free = slice(1, n - 1)
        g_a, g_b = form.boundary
        u[0], u[-1] = g_a, g_b
        bc = "dirichlet0" if (g_a == 0 and g_b == 0) else "dirichlet"
        if n < 3:
            raise SingularSystem("no interior nodes")

    idx = np.arange(n)[free]
    lo, di, up = lower[idx[:-1]], diag[idx], upper[idx[:-1]]
    rhs = load[idx].copy()
    if form.kind != "neumann":
        # lifting: move the known boundary columns to the right-hand side
        rhs[0] -= lower[0] * u[0]
        rhs[-1] -= upper[-1] * u[-1]

    # coercivity on the discrete space: A(φ_i, φ_i) / ‖φ_i‖²_{H¹}
    h = mesh.widths
    hl = np.concatenate([[np.inf], h])[idx]
    hr = np.concatenate([h, [np.inf]])[idx]
    h1 = (np.where(np.isfinite(hl), 1 / hl, 0) + np.where(np.isfinite(hr), 1 / hr, 0)
          + (np.where(np.isfinite(hl), hl, 0) + np.where(np.isfinite(hr), hr, 0)) / 3)
    alpha = float(np.min(di / h1))
    if not alpha > 0:
        raise NotCoercive(f"estimated coercivity constant {alpha:.3g} is not positive")

    u[idx] = thomas_solve(lo, di, up, rhs)
    residual = float(np.max(np.abs(_tri_matvec(lo, di, up, u[idx]) - rhs)))
    full_Au = _tri_matvec(lower, diag, upper, u)
    energy = float(0.5 * u @ full_Au - load @ u)
    report = {
        "coercivity_alpha": alpha,
        "residual": residual,
        "energy": energy,
        "min_p": min_p,
    }
    return FemSolution(mesh, u, bc, report)


# ---------------------------------------------------------------------------
# Weak derivatives, Poincaré, Euler–Lagrange
# ---------------------------------------------------------------------------


def _test_bump(c, r):
    def phi(x):
        s = (np.asarray(x) - c) / r
        out = np.zeros_like(s)
        m = np.abs(s) < 1
        out[m] = np.exp(1.0 / (s[m] ** 2 - 1.0))
        return out

    def dphi(x):
        s = (np.asarray(x) - c) / r
        out = np.zeros_like(s)
        m = np.abs(s) < 1
        sm = s[m]
        out[m] = np.exp(1.0 / (sm**2 - 1.0)) * (-2 * sm / (sm**2 - 1.0) ** 2) / r
        return out

    return phi, dphi


def weak_derivative_check(u: GridFunction, du: GridFunction, test_count: int = 20,
                          tol: float = 1e-6, seed: int | None = 0) -> dict:
    """Test ``∫ du φ = -∫ u φ'`` against ``test_count`` random smooth bumps
    compactly supported inside the window.

    Returns ``{"violation", "threshold", "passes", "worst_center", "worst_radius"}``
    where ``threshold = tol (‖u‖_2 + ‖du‖_2)``.
    """
    if not u.same_grid(du):
        raise GridMismatch("u and its candidate derivative must share a grid")
    rng = np.random.default_rng(seed)
    x = u.x
    L = u.b - u.a
    worst, worst_c, worst_r = 0.0, None, None
    for _ in range(test_count):
        r = rng.uniform(0.1, 0.45) * L
        c = rng.uniform(u.a + r, u.b - r)
        phi, dphi = _test_bump(c, r)
        val = abs(integrate(du.with_values(du.values * phi(x))) + integrate(u.with_values(u.values * dphi(x))))
        if val > worst:
            worst, worst_c, worst_r = val, c, r
    threshold = tol * (lp_norm(u, 2) + lp_norm(du, 2))
    return {
        "violation": worst,
        "threshold": threshold,
        "passes": bool(worst <= threshold),
        "worst_center": worst_c,
        "worst_radius": worst_r,
    }


def piecewise_linear_lp(nodes, values, p: float) -> float:
    """Exact ``∫ |u|^p`` for the piecewise-linear interpolant of ``values``."""
    x = np.asarray(nodes, dtype=float)
    v = np.asarray(values, dtype=float)
    h = np.diff(x)
    u0, u1 = v[:-1], v[1:]
    total = 0.0
    for hk, a, b in zip(h, u0, u1):
        total += _segment_abs_power(hk, a, b, p)
    return total


def _segment_abs_power(h, a, b, p):
    # ∫_0^h |a + (b - a) s/h|^p ds
    if a * b < 0:
        z = h * abs(a) / (abs(a) + abs(b))  # zero crossing
        return (z * abs(a) ** p + (h - z) * abs(b) ** p) / (p + 1)
    a, b = abs(a), abs(b)
    if math.isclose(a, b, rel_tol=1e-12, abs_tol=0.0):
        return h * a**p
    return h * (b ** (p + 1) - a ** (p + 1)) / ((p + 1) * (b - a))


def poincare_check(u: FemSolution, p: float = 2.0, tol: float = 1e-12) -> InequalityReport:
    """``∫|u|^p`` against ``(b-a)^p ∫|u'|^p`` for ``u`` vanishing at both ends.

    Both sides are integrated exactly for the piecewise-linear ``u``.
    """
    nodal = u.nodal
    scale = max(1.0, float(np.max(np.abs(nodal))))
    if abs(nodal[0]) > tol * scale or abs(nodal[-1]) > tol * scale:
        raise NotZeroBoundary("Poincaré inequality needs u(a) = u(b) = 0")
    mesh = u.mesh
    lhs = piecewise_linear_lp(mesh.nodes, nodal, p)
    rhs = (mesh.b - mesh.a) ** p * float(np.sum(np.abs(u.slopes) ** p * mesh.widths))
    return InequalityReport(lhs, rhs)


def euler_lagrange_quadratic(L_target: float, a: float, b: float) -> Callable:
    """Minimizer ``u(t) = L (t - a)/(b - a)`` of ``∫_a^b u'²`` with ``u(a) = 0``, ``u(b) = L``."""
    if not b > a:
        raise DegenerateInterval(f"need b > a, got ({a}, {b})")
    slope = L_target / (b - a)

    def u(t):
        return slope * (np.asarray(t, dtype=float) - a)

    u.slope = slope
    return u


def dirichlet_energy(du: Callable, a: float, b: float, n: int = 2048) -> float:
    """``∫_a^b du(t)² dt`` for the derivative ``du`` (Simpson on ``n`` intervals)."""
    g = GridFunction.from_callable(lambda t: np.asarray(du(t), dtype=float) ** 2, a, b, n)
    return integrate(g)


def check_minimizer(L_target: float, a: float, b: float, n_perturb: int = 10,
                    eps: float = 1e-2, seed: int | None = 0) -> dict:
    """Energy of the affine minimizer versus ``n_perturb`` perturbations
    ``u + eps φ`` with ``φ(t) = c sin(kπ(t-a)/(b-a))``, ``φ(a) = φ(b) = 0``."""
    u = euler_lagrange_quadratic(L_target, a, b)
    slope = u.slope
    base = dirichlet_energy(lambda t: np.full(np.shape(t), slope), a, b)
    rng = np.random.default_rng(seed)
    perturbed = []
    for _ in range(n_perturb):
        k = int(rng.integers(1, 6))
        c = rng.uniform(-1, 1) or 1.0
        w = k * math.pi / (b - a)

        def du(t, k=k, c=c, w=w):
            return slope + eps * c * w * np.cos(w * (np.asarray(t) - a))

        perturbed.append(dirichlet_energy(du, a, b))
    return {
        "energy": base,
        "perturbed": perturbed,
        "is_minimum": bool(all(e >= base for e in perturbed)),
    }
