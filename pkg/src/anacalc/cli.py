"""Batch command line: ``anacalc <module> <operation> [flags]``.

Every run prints a one-line JSON summary on stdout and writes its artifacts
(CSV tables, JSON reports, optional SVG plot) to the output directory.
Exit status is 0 on success, 2 when the computation raises a domain error and
1 on usage errors.

Inputs come from named presets; functions and kernels may also be given as
CSV sample files (``x,value`` for functions, a square table for kernels).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Callable
from xml.sax.saxutils import escape

import numpy as np

from . import complexint, convolution, fixpoint_ode, fourier, integral_eq, realfun, sobolev_fem
from .errors import AnacalcError, EmptyInput, FredholmAlternative
from .realfun import GridFunction, QuadratureSpec

__all__ = ["RunConfig", "ConfigError", "dispatch", "emit_plot", "main", "load_config"]

GRAMMAR = """\
anacalc <module> <operation> [flags]

  realfun  integrate | cantor | lp-norm
  ode      picard | euler | maximal | contraction
  conv     young | mollify
  fourier  series | heat | transform | laplace
  residue  real-integral | contour | argument
  fem      dirichlet | sturm-liouville | neumann | poincare
  inteq    solve | minimax | uryshon

common flags: --config FILE --out DIR --format {csv,json,both} --plot
              --seed N --abs-tol TOL --grid-n N
"""


class ConfigError(ValueError):
    """Invalid run configuration (reported as a usage error)."""


@dataclass(frozen=True)
class RunConfig:
    abs_tol: float = 1e-10
    grid_n: int = 1024
    output_dir: Path = Path(".")
    format: str = "both"
    plot: bool = False
    seed: int = 0

    def __post_init__(self):
        if not (self.abs_tol > 0):
            raise ConfigError(f"abs_tol must be > 0, got {self.abs_tol}")
        if self.grid_n < 16:
            raise ConfigError(f"grid_n must be >= 16, got {self.grid_n}")
        if self.format not in ("csv", "json", "both"):
            raise ConfigError(f"format must be csv, json or both, got {self.format!r}")
        object.__setattr__(self, "output_dir", Path(self.output_dir))

    @property
    def quadrature(self) -> QuadratureSpec:
        return QuadratureSpec(abs_tol=self.abs_tol)

    @property
    def want_csv(self) -> bool:
        return self.format in ("csv", "both")

    @property
    def want_json(self) -> bool:
        return self.format in ("json", "both")


_CONFIG_KEYS = {
    "abs_tol": float,
    "grid_n": int,
    "output_dir": Path,
    "format": str,
    "plot": lambda s: s.strip().lower() in ("1", "true", "yes", "on"),
    "seed": int,
}


def load_config(path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment, quotes are stripped."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line or line.startswith("["):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        value = value.strip("\"'")
        try:
            out[key] = _CONFIG_KEYS[key](value)
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {value!r}") from exc
    return out


def build_config(args: argparse.Namespace, env=None) -> RunConfig:
    """Defaults < config file < ANACALC_OUT < explicit flags."""
    env = os.environ if env is None else env
    values = {}
    if args.config:
        values.update(load_config(args.config))
    if env.get("ANACALC_OUT"):
        values["output_dir"] = Path(env["ANACALC_OUT"])
    for key, attr in (("abs_tol", "abs_tol"), ("grid_n", "grid_n"), ("output_dir", "out"),
                      ("format", "format"), ("seed", "seed")):
        v = getattr(args, attr)
        if v is not None:
            values[key] = v
    if args.plot:
        values["plot"] = True
    return RunConfig(**values)


# ---------------------------------------------------------------------------
# SVG plots
# ---------------------------------------------------------------------------

_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"]


def emit_plot(curves, path, width: int = 640, height: int = 400, title: str = "") -> Path:
    """Write a standalone SVG with axes, one polyline per curve and a legend.

    Complex curves are drawn by their real part.
    """
    curves = list(curves)
    if not curves:
        raise EmptyInput("emit_plot needs at least one curve")
    xs = [c.x for c in curves]
    ys = [np.real(c.values) for c in curves]
    x_lo, x_hi = min(x[0] for x in xs), max(x[-1] for x in xs)
    y_lo = min(float(np.min(y)) for y in ys)
    y_hi = max(float(np.max(y)) for y in ys)
    if y_hi - y_lo < 1e-300:
        y_lo, y_hi = y_lo - 1.0, y_hi + 1.0
    pad = 50
    sx = (width - 2 * pad) / (x_hi - x_lo)
    sy = (height - 2 * pad) / (y_hi - y_lo)

    def px(x):
        return pad + (x - x_lo) * sx

    def py(y):
        return height - pad - (y - y_lo) * sy

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>',
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>',
        f'<text x="{pad}" y="{height - pad + 16}" font-size="11">{x_lo:.4g}</text>',
        f'<text x="{width - pad}" y="{height - pad + 16}" font-size="11" text-anchor="end">{x_hi:.4g}</text>',
        f'<text x="{pad - 4}" y="{height - pad}" font-size="11" text-anchor="end">{y_lo:.4g}</text>',
        f'<text x="{pad - 4}" y="{pad + 4}" font-size="11" text-anchor="end">{y_hi:.4g}</text>',
    ]
    if title:
        parts.append(f'<text x="{width / 2}" y="{pad / 2}" font-size="13" text-anchor="middle">'
                     f'{escape(title)}</text>')
    for i, (x, y, c) in enumerate(zip(xs, ys, curves)):
        # thin very dense curves to ~2000 vertices; the plot is for inspection
        stride = max(1, x.size // 2000)
        idx = np.r_[np.arange(0, x.size, stride), x.size - 1] if stride > 1 else np.arange(x.size)
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x[idx], y[idx]))
        color = _COLORS[i % len(_COLORS)]
        parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
    parts.append('<g class="legend" font-size="12">')
    for i, c in enumerate(curves):
        color = _COLORS[i % len(_COLORS)]
        y0 = pad + 16 * i
        label = escape(c.label or f"curve {i + 1}")
        parts.append(f'<rect x="{width - pad - 120}" y="{y0}" width="10" height="10" fill="{color}"/>'
                     f'<text x="{width - pad - 105}" y="{y0 + 9}">{label}</text>')
    parts.append("</g></svg>")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(parts) + "\n")
    return path


# ---------------------------------------------------------------------------
# preset registries
# ---------------------------------------------------------------------------


def _lorenz(t, u, sigma=10.0, rho=28.0, beta=8.0 / 3.0):
    x, y, z = u
    return np.array([sigma * (y - x), x * (rho - z) - y, x * y - beta * z])


RHS_PRESETS: dict[str, tuple[Callable, float | None]] = {
    # name: (f(t, u), Lipschitz constant when global)
    "exp-growth": (lambda t, u: u, 1.0),
    "decay": (lambda t, u: -u, 1.0),
    "quadratic": (lambda t, u: u * u, None),
    "riccati": (lambda t, u: 2 * t * u * u, None),
    "lorenz": (_lorenz, None),
}

FUNCTION_PRESETS: dict[str, Callable] = {
    "x": lambda x: np.asarray(x, dtype=float),
    "x2": lambda x: np.asarray(x, dtype=float) ** 2,
    "sgn": np.sign,
    "abs": np.abs,
    "sin": np.sin,
    "cos": np.cos,
    "gaussian": lambda x: np.exp(-np.asarray(x, dtype=float) ** 2 / 2),
    "hat": lambda x: np.maximum(0.0, 1.0 - np.abs(x)),
    "bump": lambda x: convolution._bump(x),
    "one": lambda x: np.ones_like(np.asarray(x, dtype=float)),
    "exp-decay": lambda x: np.exp(-np.asarray(x, dtype=float)),
    "sin-pi": lambda x: np.sin(np.pi * np.asarray(x, dtype=float)),
}

MAP_PRESETS: dict[str, tuple[Callable, float, float]] = {
    # name: (T, contraction factor, default start)
    "half": (lambda x: x / 2, 0.5, 1.0),
    "cos": (np.cos, math.sin(1.0), 1.0),
}

CONTOUR_FUNCTIONS: dict[str, tuple[Callable, Callable | None]] = {
    # name: (f, f')
    "inv-z": (lambda z: 1 / z, lambda z: -1 / z**2),
    "z3": (lambda z: z**3, lambda z: 3 * z**2),
    "exp-over-z2": (lambda z: np.exp(z) / z**2, None),
    "inv-expm1": (lambda z: 1 / np.expm1(z), None),
    "inv-1-plus-z6": (lambda z: 1 / (1 + z**6), None),
    "z-over-z-minus-half": (lambda z: z / (z - 0.5), lambda z: -0.5 / (z - 0.5) ** 2),
}


def resolve_function(spec: str) -> Callable:
    """A number (constant), a preset name or the path of an ``x,value`` CSV."""
    try:
        c = float(spec)
    except ValueError:
        pass
    else:
        return lambda x: np.full(np.shape(x), c)
    if spec in FUNCTION_PRESETS:
        return FUNCTION_PRESETS[spec]
    if Path(spec).is_file():
        return GridFunction.from_csv(spec, label=Path(spec).stem)
    raise ConfigError(f"unknown function {spec!r}: use a number, a CSV file or one of "
                      f"{', '.join(sorted(FUNCTION_PRESETS))}")


def resolve_kernel(name: str, a: float | None, b: float | None):
    """Builtin kernel name or a CSV table of ``K(x_i, y_j)`` on a uniform grid of ``[a, b]``."""
    if name in integral_eq.KERNELS:
        K, ka, kb = integral_eq.KERNELS[name]
        return K, ka if a is None else a, kb if b is None else b
    if Path(name).is_file():
        from scipy.interpolate import RegularGridInterpolator

        table = np.loadtxt(name, delimiter=",", ndmin=2)
        if table.shape[0] != table.shape[1]:
            raise ConfigError(f"kernel table must be square, got {table.shape}")
        lo, hi = (0.0 if a is None else a), (1.0 if b is None else b)
        grid = np.linspace(lo, hi, table.shape[0])
        interp = RegularGridInterpolator((grid, grid), table)

        def K(x, y):
            x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
            pts = np.column_stack([np.clip(x.ravel(), lo, hi), np.clip(y.ravel(), lo, hi)])
            return interp(pts).reshape(x.shape)

        return K, lo, hi
    raise ConfigError(f"unknown kernel {name!r}: use sinsin, xy, gauss or a CSV table")


def _floats(text: str) -> list[float]:
    return [float(s) for s in text.split(",") if s.strip()]


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return _jsonable(v.tolist())
    if isinstance(v, (complex, np.complexfloating)):
        return {"re": float(v.real), "im": float(v.imag)}
    if isinstance(v, np.generic):
        return v.item()
    if isinstance(v, Path):
        return str(v)
    return v


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


class _Run:
    """Artifact bookkeeping shared by all operations."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.artifacts: list[str] = []
        self.curves: list[GridFunction] = []

    def path(self, name: str) -> Path:
        self.cfg.output_dir.mkdir(parents=True, exist_ok=True)
        p = self.cfg.output_dir / name
        self.artifacts.append(str(p))
        return p

    def csv(self, name: str, writer: Callable) -> None:
        if self.cfg.want_csv:
            writer(self.path(name))

    def json(self, name: str, payload) -> None:
        if self.cfg.want_json:
            self.path(name).write_text(json.dumps(_jsonable(payload), indent=2) + "\n")

    def plot(self, *curves: GridFunction) -> None:
        self.curves.extend(curves)

    def finish(self, summary: dict) -> dict:
        if self.cfg.plot and self.curves:
            emit_plot(self.curves, self.path("plot.svg"))
        summary = dict(summary)
        summary["artifacts"] = self.artifacts
        return summary


def _realfun(op, args, run: _Run) -> dict:
    cfg = run.cfg
    if op == "integrate":
        if args.preset == "one-over-1-plus-x6":
            f = lambda x: 1.0 / (1.0 + x**6)  # noqa: E731
        else:
            f = resolve_function(args.function)
        if args.to_infinity:
            value, R = realfun.integrate_to_infinity(f, args.a, args.b, cfg.quadrature)
            result = {"value": value, "R": R}
        else:
            result = {"value": realfun.integrate(f, args.a, args.b, cfg.quadrature)}
        run.json("result.json", result)
        return result
    if op == "cantor":
        th, k = args.theta, args.steps
        result = {"theta": th, "steps": k, "measure": realfun.cantor_measure(th),
                  "partial_measure": realfun.cantor_partial_measure(th, k)}
        if k <= 24:
            result["construction_measure"] = realfun.outer_measure(realfun.cantor_construction(th, k))
        run.json("result.json", result)
        return result
    if op == "lp-norm":
        g = GridFunction.from_csv(args.csv, label=Path(args.csv).stem)
        p = math.inf if args.p in ("inf", "∞") else float(args.p)
        result = {"p": args.p, "norm": realfun.lp_norm(g, p)}
        run.json("result.json", result)
        run.plot(g)
        return result
    raise AssertionError(op)


def _ivp(args, cfg: RunConfig) -> fixpoint_ode.IvpSpec:
    f, L = RHS_PRESETS[args.rhs]
    u0 = _floats(args.u0)
    t_start = args.t0 if args.t_start is None else args.t_start
    return fixpoint_ode.IvpSpec(f, args.t0, u0, (t_start, args.t_end), lipschitz=L)


def _ode_outputs(sol: fixpoint_ode.OdeSolution, run: _Run) -> dict:
    run.csv("solution.csv", sol.to_csv)
    if run.cfg.want_json:
        sol.to_json(run.path("report.json"))
    for i in range(sol.dim):
        try:
            run.plot(sol.component(i))
        except (AnacalcError, ValueError):
            pass  # non-uniform time grids are not plotted
    out = sol.report()
    out["t_final"] = float(sol.t[-1])
    out["u_final"] = sol.u[-1].tolist()
    return out


def _ode(op, args, run: _Run) -> dict:
    cfg = run.cfg
    if op == "contraction":
        T, alpha, x0 = MAP_PRESETS[args.map]
        res = fixpoint_ode.solve_contraction(
            fixpoint_ode.ContractionProblem(T, alpha, x0 if args.x0 is None else args.x0),
            tol=args.tol)
        result = {"state": float(np.asarray(res.state).ravel()[0]), "iterations": res.iterations,
                  "apriori_bound": res.apriori_bound, "aposteriori_bound": res.aposteriori_bound}
        run.json("result.json", result)
        return result
    ivp = _ivp(args, cfg)
    if op == "picard":
        return _ode_outputs(fixpoint_ode.picard_solve(ivp, args.iters, grid_n=cfg.grid_n), run)
    if op == "euler":
        return _ode_outputs(fixpoint_ode.peano_polygon(ivp, args.steps), run)
    if op == "maximal":
        return _ode_outputs(fixpoint_ode.continue_maximal(ivp, args.step, args.threshold), run)
    raise AssertionError(op)


def _random_compact(rng, h: float) -> GridFunction:
    a = rng.uniform(-2, 0)
    n = int(rng.integers(64, 256))
    x = a + h * np.arange(n + 1)
    c, w = x[n // 2], h * n / 2
    v = np.maximum(0.0, 1 - ((x - c) / w) ** 2) * rng.uniform(-2, 2) + \
        rng.normal(size=n + 1) * np.sin(np.pi * (x - a) / (h * n)) * 0.3
    v[[0, -1]] = 0.0
    return GridFunction(float(x[0]), float(x[-1]), v)


def _conv(op, args, run: _Run) -> dict:
    cfg = run.cfg
    rng = np.random.default_rng(cfg.seed)
    if op == "young":
        h = 1.0 / 128
        ps = [1.0, 2.0, math.inf]
        worst, violations = -math.inf, 0
        rows = []
        for i in range(args.pairs):
            f, g = _random_compact(rng, h), _random_compact(rng, h)
            conv = convolution.convolve(f, g)
            for p in ps:
                rep = convolution.check_young(f, g, p, conv)
                gap = rep.lhs - rep.rhs
                worst = max(worst, gap)
                violations += gap > 1e-8
                rows.append((i, p, rep.lhs, rep.rhs))
        run.csv("young.csv", lambda path: np.savetxt(
            path, np.array(rows), delimiter=",", header="pair,p,lhs,rhs", comments="", fmt="%.17g"))
        result = {"pairs": args.pairs, "violations": int(violations), "max_gap": worst}
        run.json("result.json", result)
        return result
    if op == "mollify":
        g = resolve_function(args.function)
        gf = GridFunction.from_callable(g, args.a, args.b, cfg.grid_n, label=args.function)
        ns = list(range(1, args.n_max + 1))
        p = float(args.p)
        errs = convolution.mollify_convergence(gf, args.family, p, ns)
        run.csv("convergence.csv", lambda path: np.savetxt(
            path, np.column_stack([ns, errs]), delimiter=",", header="n,error", comments="", fmt="%.17g"))
        run.plot(gf, convolution.mollify(gf, convolution.Mollifier(args.family, args.n_max)))
        result = {"family": args.family, "p": p, "final_error": errs[-1],
                  "decreasing_after_2": bool(np.all(np.diff(errs[1:]) < 0))}
        run.json("result.json", result)
        return result
    raise AssertionError(op)


def _fourier(op, args, run: _Run) -> dict:
    cfg = run.cfg
    if op in ("series", "heat"):
        f = resolve_function(args.function)
        n = max(cfg.grid_n, 16 * args.order)
        gf = GridFunction.from_callable(f, -math.pi, math.pi, n, label=args.function)
        if op == "series":
            s = fourier.fourier_coefficients(gf, args.order)
            curve = gf.with_values(s(gf.x), label=f"S_{args.order}")
            summary = {"order": args.order, "a0": s.a0,
                       "bessel_gap": fourier.bessel_check(s, gf).slack}
            if args.at is not None:
                summary["partial_sum"] = s(args.at)
        else:
            sol = fourier.heat_solve(gf, args.omega, args.order)
            s = sol.coefficients_at(args.t)
            curve = gf.with_values(sol(gf.x, args.t), label=f"u(t={args.t:g})")
            summary = {"order": args.order, "omega": args.omega, "t": args.t,
                       "max_abs": float(np.max(np.abs(curve.values)))}
        if cfg.want_json:
            run.path("coefficients.json").write_text(s.to_json() + "\n")
        run.csv("partial_sum.csv", curve.to_csv)
        run.plot(gf, curve)
        run.json("result.json", summary)
        return summary
    if op == "transform":
        f = resolve_function(args.function)
        L = args.window
        gf = GridFunction.from_callable(f, -L, L, cfg.grid_n, label=args.function)
        xs = np.linspace(-args.x_max, args.x_max, args.points)
        fhat = fourier.fourier_transform(gf, xs)
        run.csv("fhat.csv", fhat.to_csv)
        run.plot(gf, fhat)
        result = {"l2_f": realfun.lp_norm(gf, 2), "l2_fhat": realfun.lp_norm(fhat, 2),
                  "fhat0": complex(fhat.values[np.argmin(np.abs(xs))])}
        run.json("result.json", result)
        return result
    if op == "laplace":
        f = resolve_function(args.function)
        gf = GridFunction.from_callable(f, 0.0, args.R, cfg.grid_n, label=args.function)
        xs = np.linspace(args.x_min, args.x_max, args.points)
        Lf = fourier.laplace_transform(gf, xs)
        run.csv("laplace.csv", Lf.to_csv)
        run.plot(Lf)
        result = {"x_min": args.x_min, "Lf_at_x_min": float(np.real(Lf.values[0]))}
        run.json("result.json", result)
        return result
    raise AssertionError(op)


def _contour_arg(args) -> complexint.Contour:
    spec = args.contour
    if Path(spec).is_file():
        spec = Path(spec).read_text()
    return complexint.contour_from_json(spec)


def _residue(op, args, run: _Run) -> dict:
    if op == "real-integral":
        pre = complexint.PRESETS[args.preset]
        R = pre["R"] if args.R is None else args.R
        res = complexint.real_integral_by_closure(pre["f"], pre["poles"](), R, pre["half_line"])
        run.json("result.json", res)
        return {"value": res["value"], "segment": res["segment"], "arc": abs(res["arc"]), "R": R}
    f, fp = CONTOUR_FUNCTIONS[args.function]
    c = _contour_arg(args)
    if op == "contour":
        result = {"integral": complexint.contour_integral(f, c)}
    elif op == "argument":
        if fp is None:
            raise ConfigError(f"function {args.function!r} has no registered derivative")
        result = {"zeros_minus_poles": complexint.argument_principle(f, fp, c)}
    else:
        raise AssertionError(op)
    run.json("result.json", result)
    return result


def _fem(op, args, run: _Run) -> dict:
    cfg = run.cfg
    mesh = sobolev_fem.Mesh1D.uniform(args.a, args.b, args.nodes)
    if op == "poincare":
        rng = np.random.default_rng(cfg.seed)
        worst, violations = -math.inf, 0
        for _ in range(args.samples):
            vals = np.concatenate([[0.0], rng.normal(size=args.nodes - 1), [0.0]])
            u = sobolev_fem.FemSolution(mesh, vals, "dirichlet0")
            for p in (1.0, 2.0):
                rep = sobolev_fem.poincare_check(u, p)
                worst = max(worst, rep.lhs - rep.rhs)
                violations += not rep.holds(1e-12)
        result = {"samples": args.samples, "violations": int(violations), "max_gap": worst}
        run.json("result.json", result)
        return result
    f = resolve_function(args.f)
    if op == "dirichlet":
        form = sobolev_fem.BilinearFormSpec.dirichlet(args.g_a, args.g_b)
    elif op == "sturm-liouville":
        form = sobolev_fem.BilinearFormSpec.sturm_liouville(resolve_function(args.p), resolve_function(args.q))
    elif op == "neumann":
        form = sobolev_fem.BilinearFormSpec.neumann(resolve_function(args.p), resolve_function(args.q))
    else:
        raise AssertionError(op)
    sol = sobolev_fem.solve_weak(f, form, mesh)
    run.csv("u.csv", sol.to_csv)
    if cfg.want_json:
        run.path("report.json").write_text(sol.report_json() + "\n")
    run.plot(GridFunction(args.a, args.b, sol.nodal, label="u"))
    out = json.loads(sol.report_json())
    out["u_mid"] = float(sol(0.5 * (args.a + args.b)))
    return out


def _inteq(op, args, run: _Run) -> dict:
    cfg = run.cfg
    if op == "uryshon":
        phi = lambda t, s, u: np.cos(u) + t * s  # noqa: E731
        u = integral_eq.uryshon_fixed_point(phi, args.lam, args.r, n=cfg.grid_n)
        run.csv("u.csv", u.to_csv)
        run.plot(u)
        result = {"lam": args.lam, "sup": float(np.max(np.abs(u.values)))}
        run.json("result.json", result)
        return result
    K, a, b = resolve_kernel(args.kernel, args.a, args.b)
    op_ = integral_eq.KernelOperator(K, a, b, args.lam, args.n, args.rule)
    if op == "solve":
        f = resolve_function(args.f)
        try:
            sol = integral_eq.nystrom_solve(op_, f)
        except FredholmAlternative as alt:
            run.csv("kernel_basis.csv", lambda path: np.savetxt(
                path, np.column_stack([alt.nodes, alt.basis.T]), delimiter=",",
                header=",".join(["x"] + [f"v{i + 1}" for i in range(len(alt.basis))]),
                comments="", fmt="%.17g"))
            raise
        xs = np.linspace(a, b, cfg.grid_n + 1)
        u = GridFunction(a, b, sol(xs), label="u")
        run.csv("u.csv", u.to_csv)
        run.plot(u)
        result = {"lam": args.lam, "sup": float(np.max(np.abs(u.values)))}
        run.json("result.json", result)
        return result
    if op == "minimax":
        lo, hi = integral_eq.minimax_bounds(op_)
        S = op_.symmetrized()
        rng = np.random.default_rng(cfg.seed)
        rq = [integral_eq.rayleigh_quotient(S, rng.normal(size=S.shape[0])) for _ in range(args.samples)]
        outside = sum(not (lo - 1e-9 <= r <= hi + 1e-9) for r in rq)
        result = {"lambda_minus": lo, "lambda_plus": hi, "samples": args.samples, "outside": int(outside)}
        run.json("result.json", result)
        return result
    raise AssertionError(op)


HANDLERS = {
    "realfun": _realfun,
    "ode": _ode,
    "conv": _conv,
    "fourier": _fourier,
    "residue": _residue,
    "fem": _fem,
    "inteq": _inteq,
}


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with status 1 and show the full grammar."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n\n{GRAMMAR}")
        self.exit(1)


def _common(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("run configuration")
    g.add_argument("--config", help="key = value file (abs_tol, grid_n, output_dir, format, plot, seed)")
    g.add_argument("--out", type=Path, help="output directory (overrides ANACALC_OUT and --config)")
    g.add_argument("--format", choices=["csv", "json", "both"], help="artifacts to write (default both)")
    g.add_argument("--plot", action="store_true", help="also write plot.svg")
    g.add_argument("--seed", type=int, help="seed for randomized checks (default 0)")
    g.add_argument("--abs-tol", type=float, help="absolute quadrature tolerance (default 1e-10)")
    g.add_argument("--grid-n", type=int, help="grid intervals for sampled functions (default 1024)")


def _add(sub, name: str, help_: str) -> argparse.ArgumentParser:
    p = sub.add_parser(name, help=help_, description=help_)
    _common(p)
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="anacalc", description="Numerical classical-analysis toolkit.",
                     epilog=GRAMMAR, formatter_class=argparse.RawDescriptionHelpFormatter)
    modules = parser.add_subparsers(dest="module", metavar="<module>", parser_class=_Parser)
    modules.required = True

    def module(name, help_):
        m = modules.add_parser(name, help=help_, description=help_)
        ops = m.add_subparsers(dest="op", metavar="<operation>", parser_class=_Parser)
        ops.required = True
        return ops

    ops = module("realfun", "quadrature, Lp norms, Cantor measures")
    p = _add(ops, "integrate", "integrate a preset function over [a, b]")
    p.add_argument("--function", default="gaussian", help="number, preset or x,value CSV")
    p.add_argument("--preset", choices=["one-over-1-plus-x6"], help="named integrand")
    p.add_argument("--a", type=float, default=0.0)
    p.add_argument("--b", type=float, default=1.0)
    p.add_argument("--to-infinity", action="store_true", help="treat b as a starting cutoff and double it")
    p = _add(ops, "cantor", "measure of the generalized Cantor set")
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--steps", type=int, default=20)
    p = _add(ops, "lp-norm", "Lp norm of sampled data")
    p.add_argument("--csv", required=True, help="x,value CSV")
    p.add_argument("--p", default="2", help="exponent >= 1 or inf")

    ops = module("ode", "fixed points and initial-value problems")
    p = _add(ops, "contraction", "iterate a contraction to its fixed point")
    p.add_argument("--map", choices=sorted(MAP_PRESETS), default="cos")
    p.add_argument("--x0", type=float)
    p.add_argument("--tol", type=float, default=1e-12)
    for name, help_ in (("picard", "Picard iteration on a short window"),
                        ("euler", "explicit Euler polygon"),
                        ("maximal", "continue until blow-up or the horizon")):
        p = _add(ops, name, help_)
        p.add_argument("--rhs", choices=sorted(RHS_PRESETS), required=True)
        p.add_argument("--t0", type=float, default=0.0)
        p.add_argument("--u0", default="1", help="initial value, comma separated for systems")
        p.add_argument("--t-start", type=float, help="left end of the horizon (default t0)")
        p.add_argument("--t-end", type=float, required=True)
        if name == "picard":
            p.add_argument("--iters", type=int, default=20)
        elif name == "euler":
            p.add_argument("--steps", type=int, default=1000, help="Euler steps on each side of t0")
        else:
            p.add_argument("--step", type=float, default=1e-4)
            p.add_argument("--threshold", type=float, default=fixpoint_ode.DEFAULT_BLOWUP_THRESHOLD)

    ops = module("conv", "convolution and mollifiers")
    p = _add(ops, "young", "Young inequality on random compactly supported pairs")
    p.add_argument("--pairs", type=int, default=50)
    p = _add(ops, "mollify", "Lp convergence of mollified functions")
    p.add_argument("--function", default="hat")
    p.add_argument("--family", choices=["bump", "gaussian"], default="bump")
    p.add_argument("--p", default="1")
    p.add_argument("--n-max", type=int, default=64)
    p.add_argument("--a", type=float, default=-1.5)
    p.add_argument("--b", type=float, default=1.5)

    ops = module("fourier", "Fourier series, heat equation, transforms")
    p = _add(ops, "series", "Fourier coefficients on [-pi, pi]")
    p.add_argument("--function", default="x")
    p.add_argument("--order", type=int, default=32)
    p.add_argument("--at", type=float, help="evaluate the partial sum at this point")
    p = _add(ops, "heat", "periodic heat equation by mode damping")
    p.add_argument("--function", default="sgn")
    p.add_argument("--order", type=int, default=32)
    p.add_argument("--omega", type=float, default=1.0)
    p.add_argument("--t", type=float, default=0.1)
    p = _add(ops, "transform", "Fourier transform of a decaying function")
    p.add_argument("--function", default="gaussian")
    p.add_argument("--window", type=float, default=12.0, help="samples on [-window, window]")
    p.add_argument("--x-max", type=float, default=8.0)
    p.add_argument("--points", type=int, default=257)
    p = _add(ops, "laplace", "Laplace transform on [x-min, x-max]")
    p.add_argument("--function", default="one")
    p.add_argument("--R", type=float, default=60.0, help="truncation of the time axis")
    p.add_argument("--x-min", type=float, default=1.0)
    p.add_argument("--x-max", type=float, default=4.0)
    p.add_argument("--points", type=int, default=31)

    ops = module("residue", "contour integrals and residues")
    p = _add(ops, "real-integral", "real integral by closing in the upper half plane")
    p.add_argument("--preset", choices=sorted(complexint.PRESETS), required=True)
    p.add_argument("--R", type=float, help="closing radius (preset default)")
    for name, help_ in (("contour", "integrate a preset function over a JSON contour"),
                        ("argument", "zeros minus poles inside a JSON contour")):
        p = _add(ops, name, help_)
        p.add_argument("--function", choices=sorted(CONTOUR_FUNCTIONS), required=True)
        p.add_argument("--contour", default='{"pieces":[{"kind":"circle","center":[0,0],"radius":1.0}]}',
                       help="contour JSON text or file")

    ops = module("fem", "1D weak solutions with P1 elements")
    for name, help_ in (("dirichlet", "-u'' + u = f with Dirichlet data"),
                        ("sturm-liouville", "-(p u')' + q u = f, u = 0 at both ends"),
                        ("neumann", "-(p u')' + q u = f with natural boundary conditions"),
                        ("poincare", "Poincare inequality on random H1_0 functions")):
        p = _add(ops, name, help_)
        p.add_argument("--a", type=float, default=0.0)
        p.add_argument("--b", type=float, default=1.0)
        p.add_argument("--nodes", type=int, default=100, help="number of elements")
        if name == "poincare":
            p.add_argument("--samples", type=int, default=200)
            continue
        p.add_argument("--f", default="1", help="load: number, preset or CSV")
        if name == "dirichlet":
            p.add_argument("--g-a", type=float, default=0.0)
            p.add_argument("--g-b", type=float, default=0.0)
        else:
            p.add_argument("--p", default="1")
            p.add_argument("--q", default="0" if name == "sturm-liouville" else "1")

    ops = module("inteq", "second-kind integral equations")
    for name, help_ in (("solve", "Nystrom solve of u - lam T u = f"),
                        ("minimax", "extreme Rayleigh quotients of a symmetric kernel")):
        p = _add(ops, name, help_)
        p.add_argument("--kernel", default="sinsin", help="sinsin, xy, gauss or a square CSV table")
        p.add_argument("--a", type=float)
        p.add_argument("--b", type=float)
        p.add_argument("--lam", type=float, default=0.5)
        p.add_argument("--n", type=int, default=64, help="quadrature nodes")
        p.add_argument("--rule", choices=["gauss", "trapezoid"], default="gauss")
        if name == "solve":
            p.add_argument("--f", default="sin")
        else:
            p.add_argument("--samples", type=int, default=100)
    p = _add(ops, "uryshon", "u(t) = lam * int_0^1 (cos u(s) + t s) ds by iteration")
    p.add_argument("--lam", type=float, default=0.1)
    p.add_argument("--r", type=float, default=1.0)
    return parser


def dispatch(argv=None, env=None, stdout=None) -> int:
    """Run one command; returns the exit status."""
    stdout = sys.stdout if stdout is None else stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # --help (0) or usage error (1)
        return int(exc.code or 0)
    try:
        cfg = build_config(args, env)
        run = _Run(cfg)
        summary = HANDLERS[args.module](args.op, args, run)
        summary = run.finish(summary)
    except ConfigError as exc:
        sys.stderr.write(f"anacalc: {exc}\n\n{GRAMMAR}")
        return 1
    except FredholmAlternative as exc:
        print(json.dumps({"error": "FredholmAlternative", "cond": exc.cond,
                          "kernel_dimension": len(exc.basis)}), file=stdout)
        return 2
    except AnacalcError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=stdout)
        return 2
    print(json.dumps(_jsonable({"module": args.module, "operation": args.op, **summary})), file=stdout)
    return 0


def main(argv=None) -> None:
    sys.exit(dispatch(argv))


if __name__ == "__main__":
    main()
