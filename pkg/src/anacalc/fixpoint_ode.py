"""Fixed points of contractions and initial-value problems.

Solvers
-------
solve_contraction
    Banach iteration with a-priori and a-posteriori error bounds.
picard_solve
    Successive approximations ``y_{k+1}(t) = u0 + ∫_{t0}^t f(s, y_k(s)) ds``
    on a fixed grid (cumulative Simpson).
peano_polygon
    Explicit Euler polygon with ``m`` steps on each side of ``t0``.
continue_maximal
    Euler marching to the ends of the horizon with blow-up detection.

Vector norms are Euclidean throughout.  Euler is the only marching scheme.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from .errors import (
    BetaNonPositive,
    GridMismatch,
    LNonPositive,
    MaxIter,
    NonFinite,
    NotContracting,
    StepNonPositive,
    WindowTooLarge,
)
from .realfun import GridFunction, InequalityReport, cumulative_integral

__all__ = [
    "ContractionProblem",
    "ContractionResult",
    "IvpSpec",
    "OdeSolution",
    "solve_contraction",
    "picard_solve",
    "peano_polygon",
    "continue_maximal",
    "gronwall_bound",
    "check_below",
    "dependence_certificate",
    "verify_dependence",
    "estimate_lipschitz",
    "DEFAULT_BLOWUP_THRESHOLD",
]

DEFAULT_BLOWUP_THRESHOLD = 1e8


# ---------------------------------------------------------------------------
# Contractions
# ---------------------------------------------------------------------------


def _euclid(x, y) -> float:
    return float(np.linalg.norm(np.asarray(x) - np.asarray(y)))


@dataclass(frozen=True)
class ContractionProblem:
    """A map ``T`` with contraction constant ``alpha`` in the metric ``metric``."""

    map: Callable
    alpha: float
    x0: Any
    metric: Callable = _euclid

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise NotContracting(f"contraction constant must lie in (0, 1), got {self.alpha}")


@dataclass(frozen=True)
class ContractionResult:
    state: Any
    iterations: int
    apriori_bound: float
    aposteriori_bound: float
    steps: tuple = ()  # d(x_{k+1}, x_k) for k = 0 .. iterations-1
    max_ratio: float = 0.0


def solve_contraction(p: ContractionProblem, tol: float = 1e-12, max_iter: int = 1000) -> ContractionResult:
    """Iterate ``x_{k+1} = T x_k`` until ``d(x_n, T x_n) <= tol``.

    Returns the last iterate ``x_n`` together with

    * ``apriori_bound = alpha^n d(x_1, x_0) / (1 - alpha)``, known before
      iterating, and
    * ``aposteriori_bound = alpha d(x_n, x_{n-1}) / (1 - alpha)``,

    both upper bounds for ``d(x_n, x*)``.

    Raises
    ------
    NotContracting
        Two consecutive steps grew (observed ratio above 1).
    MaxIter
        ``max_iter`` iterations without reaching ``tol``.
    """
    T, d, alpha = p.map, p.metric, p.alpha
    x_prev = p.x0
    x = T(x_prev)
    d0 = d(x, x_prev)
    steps = [d0]
    max_ratio = 0.0
    n = 1
    while True:
        tx = T(x)
        step = d(tx, x)
        if step <= tol:
            break
        if steps[-1] > 0:
            ratio = step / steps[-1]
            max_ratio = max(max_ratio, ratio)
            if ratio > 1:
                raise NotContracting(
                    f"iterates separated at step {n}: ratio {ratio:.4g} > 1"
                )
        if n >= max_iter:
            raise MaxIter(f"no convergence to {tol} within {max_iter} iterations (last step {step:.3g})")
        steps.append(step)
        x_prev, x = x, tx
        n += 1
    return ContractionResult(
        state=x,
        iterations=n,
        apriori_bound=alpha**n * d0 / (1 - alpha),
        aposteriori_bound=alpha * steps[-1] / (1 - alpha),
        steps=tuple(steps),
        max_ratio=max_ratio,
    )


# ---------------------------------------------------------------------------
# Initial-value problems
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IvpSpec:
    """``u' = f(t, u)``, ``u(t0) = u0`` on the horizon ``[t_min, t_max]``.

    ``f`` maps ``(t, u)`` with ``u`` a 1D array to an array of the same shape.
    A scalar ``u0`` is promoted to a length-1 vector.  ``lipschitz`` and
    ``sup_bound`` are the optional constants L and M of the local existence
    theorem.
    """

    f: Callable
    t0: float
    u0: Any
    horizon: tuple
    lipschitz: float | None = None
    sup_bound: float | None = None

    def __post_init__(self):
        u0 = np.atleast_1d(np.asarray(self.u0, dtype=float)).copy()
        u0.setflags(write=False)
        object.__setattr__(self, "u0", u0)
        t_min, t_max = map(float, self.horizon)
        object.__setattr__(self, "horizon", (t_min, t_max))
        if not t_min <= self.t0 <= t_max:
            raise ValueError(f"t0 = {self.t0} outside horizon [{t_min}, {t_max}]")
        if self.lipschitz is not None and self.lipschitz < 0:
            raise ValueError("Lipschitz constant must be nonnegative")
        if self.sup_bound is not None and self.sup_bound < 0:
            raise ValueError("sup bound must be nonnegative")

    @property
    def dim(self) -> int:
        return self.u0.size

    def rhs(self, t, u) -> np.ndarray:
        return np.atleast_1d(np.asarray(self.f(t, u), dtype=float))


@dataclass
class OdeSolution:
    """Sampled trajectory plus solve status.

    ``status`` is ``"completed"``, ``"blew_up"`` or ``"budget"``.  For
    ``blew_up``, ``t_escape`` is the midpoint of the step on which ``|u|``
    first exceeded the threshold (forward direction takes precedence).
    ``interval`` is the estimated maximal existence interval within the
    horizon; it is step-limited, not a proof.
    """

    t: np.ndarray
    u: np.ndarray  # shape (len(t), dim)
    status: str = "completed"
    t_escape: float | None = None
    max_step_error: float = 0.0
    interval: tuple | None = None
    bounds: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.u.shape[1]

    def component(self, i: int = 0) -> GridFunction:
        """Component ``i`` as a :class:`GridFunction`; needs a uniform time grid."""
        return GridFunction.from_samples(self.t, self.u[:, i], label=f"u{i + 1}")

    def at(self, t) -> np.ndarray:
        """Linear interpolation of all components at time(s) ``t``."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        return np.stack([np.interp(t, self.t, self.u[:, i]) for i in range(self.dim)], axis=-1)

    def report(self) -> dict:
        out = {"status": self.status, "max_step_error": self.max_step_error}
        if self.t_escape is not None:
            out["t_escape"] = self.t_escape
        if self.interval is not None:
            out["interval"] = list(self.interval)
        out["bounds"] = self.bounds
        return out

    def to_csv(self, path) -> None:
        header = ",".join(["t"] + [f"u{i + 1}" for i in range(self.dim)])
        np.savetxt(path, np.column_stack([self.t, self.u]), delimiter=",",
                   header=header, comments="", fmt="%.17g")

    def to_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.report(), fh, indent=2)


def _split_counts(ivp: IvpSpec, total: int) -> tuple[int, int]:
    t_min, t_max = ivp.horizon
    back, fwd = ivp.t0 - t_min, t_max - ivp.t0
    span = back + fwd
    if span == 0:
        return 0, 0
    n_b = int(round(total * back / span)) if back > 0 else 0
    if back > 0:
        n_b = max(n_b, 2)
    n_f = max(total - n_b, 2) if fwd > 0 else 0
    return n_b, n_f


def picard_solve(ivp: IvpSpec, n_iter: int, grid_n: int = 1024) -> OdeSolution:
    """Peano–Picard successive approximations on ``grid_n + 1`` nodes.

    Starts from ``y_0 ≡ u0``.  The integral is the cumulative Simpson rule on
    the grid, run outward from ``t0`` on each side of the horizon.
    ``max_step_error`` is the sup distance between the last two iterates.

    Raises :class:`WindowTooLarge` when a Lipschitz constant is supplied and
    ``L * max|t - t0| >= 1``.
    """
    t_min, t_max = ivp.horizon
    window = max(t_max - ivp.t0, ivp.t0 - t_min)
    if ivp.lipschitz is not None and ivp.lipschitz * window >= 1:
        raise WindowTooLarge(
            f"L * window = {ivp.lipschitz * window:.4g} >= 1; shrink the horizon"
        )
    n_b, n_f = _split_counts(ivp, grid_n)
    sides = []
    if n_b:
        sides.append(np.linspace(ivp.t0, t_min, n_b + 1))
    if n_f:
        sides.append(np.linspace(ivp.t0, t_max, n_f + 1))

    dim = ivp.dim
    iterates = [np.tile(ivp.u0, (len(s), 1)) for s in sides]
    change = 0.0
    for _ in range(n_iter):
        change = 0.0
        nxt = []
        for s, y in zip(sides, iterates):
            fy = np.array([ivp.rhs(ti, yi) for ti, yi in zip(s, y)])
            if not np.all(np.isfinite(fy)):
                raise NonFinite("right-hand side returned a non-finite value")
            h = s[1] - s[0]  # negative on the backward side
            ynew = np.empty_like(y)
            for c in range(dim):
                run = cumulative_integral(GridFunction(0.0, abs(h) * (len(s) - 1), fy[:, c])).values
                ynew[:, c] = ivp.u0[c] + np.sign(h) * run
            change = max(change, float(np.max(np.linalg.norm(ynew - y, axis=1))))
            nxt.append(ynew)
        iterates = nxt

    t, u = _merge_sides(sides, iterates, n_b)
    return OdeSolution(t, u, "completed", max_step_error=change,
                       interval=(t[0], t[-1]), bounds={"picard_change": change})


def _merge_sides(sides, values, n_b):
    if n_b and len(sides) == 2:
        t = np.concatenate([sides[0][::-1], sides[1][1:]])
        u = np.concatenate([values[0][::-1], values[1][1:]])
    elif n_b:
        t, u = sides[0][::-1], values[0][::-1]
    else:
        t, u = sides[0], values[0]
    return t, u


def _euler_march(ivp: IvpSpec, t_end: float, h: float, threshold: float,
                 steps: int | None = None):
    """March Euler from t0 towards t_end (either side) with |step| = h.

    Returns (t, u, escaped_at or None, local_error_sum).
    """
    direction = 1.0 if t_end >= ivp.t0 else -1.0
    span = abs(t_end - ivp.t0)
    if steps is None:
        steps = int(math.ceil(span / h - 1e-9)) if span > 0 else 0
    if steps == 0:
        return np.array([ivp.t0]), ivp.u0[None, :].copy(), None, 0.0
    dt = direction * span / steps
    ts = ivp.t0 + dt * np.arange(steps + 1)
    ts[-1] = t_end
    us = np.empty((steps + 1, ivp.dim))
    u = ivp.u0.astype(float).copy()
    us[0] = u
    f = ivp.f
    f_prev = ivp.rhs(ivp.t0, u)
    half_dt = 0.5 * abs(dt)
    err = 0.0
    escaped = None
    thr2 = threshold * threshold
    isfinite = math.isfinite
    k = 0
    for k in range(steps):
        u = u + dt * f_prev
        us[k + 1] = u
        n2 = float(u @ u)
        if not isfinite(n2) or n2 > thr2:
            escaped = 0.5 * (ts[k] + ts[k + 1])
            break
        f_new = f(ts[k + 1], u)
        if type(f_new) is not np.ndarray or f_new.shape != u.shape:
            f_new = ivp.rhs(ts[k + 1], u)
        diff = f_new - f_prev
        d2 = float(diff @ diff)
        if not isfinite(d2):
            raise NonFinite(f"right-hand side is not finite at t = {ts[k + 1]}")
        # Euler local error ~ |dt|/2 * |f_{k+1} - f_k|
        err += half_dt * math.sqrt(d2)
        f_prev = f_new
    if escaped is not None:
        return ts[:k + 2], us[:k + 2], escaped, err
    return ts, us, None, err


def peano_polygon(ivp: IvpSpec, m: int) -> OdeSolution:
    """Explicit Euler polygon with ``m`` equal steps from ``t0`` to each end
    of the horizon.

    ``max_step_error`` is the accumulated local-error estimate
    ``Σ |dt|/2 |f(t_{k+1}, u_{k+1}) - f(t_k, u_k)|`` of the worse side.
    """
    if m < 1:
        raise StepNonPositive("m must be >= 1")
    t_min, t_max = ivp.horizon
    sides, vals, errs = [], [], []
    n_b = 0
    for end in (t_min, t_max):
        if end == ivp.t0:
            continue
        t, u, _, err = _euler_march(ivp, end, abs(end - ivp.t0) / m, math.inf, steps=m)
        sides.append(t)
        vals.append(u)
        errs.append(err)
        if end < ivp.t0:
            n_b = m
    if not sides:
        return OdeSolution(np.array([ivp.t0]), ivp.u0[None, :].copy())
    t, u = _merge_sides(sides, vals, n_b)
    return OdeSolution(t, u, "completed", max_step_error=max(errs), interval=(t[0], t[-1]))


def continue_maximal(ivp: IvpSpec, step: float,
                     blowup_threshold: float = DEFAULT_BLOWUP_THRESHOLD,
                     growth: tuple[float, float] | None = None) -> OdeSolution:
    """March with Euler steps of size ``step`` from ``t0`` to both ends of the
    horizon, stopping a side when ``|u|`` exceeds ``blowup_threshold``.

    Parameters
    ----------
    growth : (eps, L), optional
        Constants for the linear-growth hypothesis ``|u'| <= eps + L |u|``.
        When given, the a-priori bound ``(eps/L + |u(t0)|) e^{L |t - t0|}``
        is evaluated along the trajectory and stored in ``bounds``
        (``growth_bound_ok`` records whether the trajectory stayed below it;
        under the hypothesis no blow-up can occur).
    """
    if not step > 0:
        raise StepNonPositive(f"step must be positive, got {step}")
    if not blowup_threshold > 0:
        raise StepNonPositive("blowup_threshold must be positive")
    t_min, t_max = ivp.horizon
    fwd = _euler_march(ivp, t_max, step, blowup_threshold)
    back = _euler_march(ivp, t_min, step, blowup_threshold)
    t = np.concatenate([back[0][::-1], fwd[0][1:]])
    u = np.concatenate([back[1][::-1], fwd[1][1:]])
    esc_f, esc_b = fwd[2], back[2]
    status = "blew_up" if (esc_f is not None or esc_b is not None) else "completed"
    t_escape = esc_f if esc_f is not None else esc_b
    interval = (esc_b if esc_b is not None else t_min, esc_f if esc_f is not None else t_max)
    bounds: dict = {}
    if esc_b is not None:
        bounds["t_escape_backward"] = esc_b
    if esc_f is not None:
        bounds["t_escape_forward"] = esc_f
    if growth is not None:
        eps, L = growth
        if not L > 0:
            raise LNonPositive("growth constant L must be positive")
        curve = (eps / L + float(np.linalg.norm(ivp.u0))) * np.exp(L * np.abs(t - ivp.t0))
        excess = float(np.max(np.linalg.norm(u, axis=1) - curve))
        bounds.update(growth_eps=eps, growth_L=L, growth_bound_max_excess=excess,
                      growth_bound_ok=bool(excess <= 1e-9 * max(1.0, float(np.max(curve))))
                      and status == "completed")
    return OdeSolution(t, u, status, t_escape=t_escape, max_step_error=max(fwd[3], back[3]),
                       interval=interval, bounds=bounds)


# ---------------------------------------------------------------------------
# Gronwall and continuous dependence
# ---------------------------------------------------------------------------


def _as_grid(t) -> np.ndarray:
    if isinstance(t, GridFunction):
        return t.x
    return np.asarray(t, dtype=float)


def _wrap(t, values, label):
    try:
        return GridFunction.from_samples(t, values, label=label)
    except GridMismatch:
        raise GridMismatch("time grid must be uniform with at least two nodes")


def gronwall_bound(alpha: float, beta: float, gamma: float, t) -> GridFunction:
    """``alpha e^{beta t} + gamma/beta (e^{beta t} - 1)`` on the time grid ``t >= 0``."""
    if not beta > 0:
        raise BetaNonPositive(f"beta must be positive, got {beta}")
    t = _as_grid(t)
    if np.any(t < 0):
        raise ValueError("Gronwall bound is stated for t >= 0")
    e = np.exp(beta * t)
    return _wrap(t, alpha * e + gamma / beta * np.expm1(beta * t), "gronwall")


def check_below(trajectory: GridFunction, bound: GridFunction) -> InequalityReport:
    """``lhs = max(trajectory - bound)`` against ``rhs = 0``; holds when slack >= -tol."""
    trajectory._check_grid(bound)
    return InequalityReport(float(np.max(trajectory.values - bound.values)), 0.0)


def dependence_certificate(ivp1: IvpSpec, ivp2: IvpSpec, L: float, M: float, t_grid) -> GridFunction:
    """Separation bound ``|x - y| e^{L(t-t0)} + M/L (e^{L(t-t0)} - 1)``.

    ``M`` must bound ``|f - g|`` on the region visited; that is the caller's
    responsibility.
    """
    if not L > 0:
        raise LNonPositive(f"L must be positive, got {L}")
    if ivp1.t0 != ivp2.t0:
        raise ValueError("both problems must share t0")
    t = _as_grid(t_grid)
    s = t - ivp1.t0
    d0 = float(np.linalg.norm(ivp1.u0 - ivp2.u0))
    return _wrap(t, d0 * np.exp(L * s) + M / L * np.expm1(L * s), "dependence")


def verify_dependence(ivp1: IvpSpec, ivp2: IvpSpec, L: float, M: float, t_grid,
                      steps_per_interval: int = 64) -> InequalityReport:
    """Integrate both problems with Euler on ``t_grid`` (refined by
    ``steps_per_interval``) and compare the separation with the certificate."""
    bound = dependence_certificate(ivp1, ivp2, L, M, t_grid)
    t = bound.x
    m = steps_per_interval * (len(t) - 1)
    sols = []
    for ivp in (ivp1, ivp2):
        spec = IvpSpec(ivp.f, ivp.t0, ivp.u0, (min(ivp.t0, t[0]), max(ivp.t0, t[-1])))
        sols.append(peano_polygon(spec, m).at(t))
    sep = np.linalg.norm(sols[0] - sols[1], axis=1)
    return InequalityReport(float(np.max(sep - bound.values)), 0.0)


def estimate_lipschitz(f: Callable, t_range: tuple, box: tuple, samples: int = 1000,
                       seed: int | None = 0) -> float:
    """Sampled estimate of ``sup |f(t,u) - f(t,v)| / |u - v|`` over random
    pairs in ``box`` (a pair of lower/upper corner arrays).

    An estimate only: never sufficient to certify uniqueness.
    """
    rng = np.random.default_rng(seed)
    lo, hi = (np.atleast_1d(np.asarray(c, dtype=float)) for c in box)
    best = 0.0
    for _ in range(samples):
        t = rng.uniform(*t_range)
        u, v = rng.uniform(lo, hi), rng.uniform(lo, hi)
        d = np.linalg.norm(u - v)
        if d == 0:
            continue
        diff = np.linalg.norm(np.atleast_1d(f(t, u)) - np.atleast_1d(f(t, v)))
        best = max(best, float(diff / d))
    return best
