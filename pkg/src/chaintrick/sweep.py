"""Parameter-space scans: bifurcation curves, the (alpha, g) surface of
critical delays, and the per-order table of growth-rate Hopf points.

Grid cells are independent pure evaluations; a thread pool sized by the
``CHAINTRICK_THREADS`` environment variable (0 or unset = auto, 1 =
serial) may evaluate them in any order.  Results are assembled by grid
index, so output is deterministic regardless of worker count.  Cells with
no Hopf point carry NaN internally and the ``NA`` sentinel in CSV; a
critical delay of exactly zero is meaningful (the all-T instability
threshold) and is never used as a gap marker.
"""

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from ._version import __version__
from .errors import (
    GrowthOutOfRange,
    NoHopf,
    NonPositiveEquilibrium,
    NoStableRegime,
)
from .hopf_locator import critical_delays, hopf_in_g


@dataclass(frozen=True)
class FitResult:
    """Least-squares fit of a bifurcation curve on a fixed basis."""

    model: str
    coefficients: tuple
    residual_norm: float
    relative_residual: float
    threshold_alpha: float | None = None


@dataclass(frozen=True)
class BifurcationCurve:
    """Critical delay T_bi sampled along one parameter axis.

    ``t_bi`` holds NaN where no Hopf point exists.  ``fit`` is None when
    fewer points than basis functions are available.
    """

    parameter: str
    values: np.ndarray
    t_bi: np.ndarray
    m: int
    fixed: dict
    fit: FitResult | None


@dataclass(frozen=True)
class SurfaceResult:
    """Critical delay on an (alpha, g) grid; NaN marks no-Hopf cells."""

    alphas: np.ndarray
    gs: np.ndarray
    t_bi: np.ndarray  # shape (len(alphas), len(gs))
    m: int
    fixed: dict


def _worker_count():
    raw = os.environ.get("CHAINTRICK_THREADS", "0").strip()
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n <= 0:
        n = os.cpu_count() or 1
    return n


def _map_cells(fn, items):
    """Evaluate fn over items, preserving input order."""
    workers = _worker_count()
    if workers == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def smallest_critical_delay(p, inv, m=None):
    """First positive critical delay (the boundary of the small-T stable
    region), or NaN when the cell has no Hopf point."""
    try:
        points = critical_delays(p, inv, m=m)
    except (NoHopf, NoStableRegime, NonPositiveEquilibrium, GrowthOutOfRange):
        return math.nan
    return min(h.value for h in points)


def curve_T_vs_alpha(p, inv, m, alphas):
    """Critical delay versus adjustment speed at fixed g, with the
    hyperbolic fit T_bi = c0 + c1 / alpha.

    The fit's alpha intercept (where T_bi reaches zero) estimates the
    threshold above which no delay stabilizes the equilibrium.
    """
    alphas = np.asarray(alphas, dtype=float)
    tb = np.array(
        _map_cells(
            lambda al: smallest_critical_delay(p.replace(alpha=float(al)), inv, m=m),
            list(alphas),
        )
    )
    fit = _fit(np.column_stack([np.ones_like(alphas), 1.0 / alphas]), tb,
               model="c0 + c1/alpha")
    if fit is not None and fit.coefficients[0] != 0.0:
        fit = FitResult(
            model=fit.model,
            coefficients=fit.coefficients,
            residual_norm=fit.residual_norm,
            relative_residual=fit.relative_residual,
            threshold_alpha=-fit.coefficients[1] / fit.coefficients[0],
        )
    fixed = {"g": p.g, "gamma": p.gamma, "delta": p.delta, "G0": p.G0}
    return BifurcationCurve(
        parameter="alpha", values=alphas, t_bi=tb, m=m or p.m, fixed=fixed, fit=fit
    )


def curve_T_vs_g(p, inv, m, gs):
    """Critical delay versus growth rate at fixed alpha, with the quadratic
    fit T_bi = a0 + a1 g + a2 g^2."""
    gs = np.asarray(gs, dtype=float)
    tb = np.array(
        _map_cells(
            lambda g: smallest_critical_delay(p.replace(g=float(g)), inv, m=m),
            list(gs),
        )
    )
    fit = _fit(np.column_stack([np.ones_like(gs), gs, gs**2]), tb,
               model="a0 + a1*g + a2*g^2")
    fixed = {"alpha": p.alpha, "gamma": p.gamma, "delta": p.delta, "G0": p.G0}
    return BifurcationCurve(
        parameter="g", values=gs, t_bi=tb, m=m or p.m, fixed=fixed, fit=fit
    )


def _fit(basis, tb, model):
    mask = np.isfinite(tb)
    if mask.sum() < basis.shape[1]:
        return None
    coef, *_ = np.linalg.lstsq(basis[mask], tb[mask], rcond=None)
    resid = tb[mask] - basis[mask] @ coef
    norm = float(np.linalg.norm(resid))
    denom = float(np.linalg.norm(tb[mask]))
    return FitResult(
        model=model,
        coefficients=tuple(float(cc) for cc in coef),
        residual_norm=norm,
        relative_residual=norm / denom if denom > 0 else math.nan,
    )


def surface_T(p, inv, m, alphas, gs):
    """Critical delay on the (alpha, g) grid.

    Cells reuse :func:`smallest_critical_delay`, so any slice agrees with
    the corresponding curve operation exactly.
    """
    alphas = np.asarray(alphas, dtype=float)
    gs = np.asarray(gs, dtype=float)
    if len(alphas) < 16 or len(gs) < 16:
        raise ValueError("surface grids need at least 16 points per axis")
    cells = [(float(al), float(g)) for al in alphas for g in gs]
    flat = _map_cells(
        lambda cell: smallest_critical_delay(
            p.replace(alpha=cell[0], g=cell[1]), inv, m=m
        ),
        cells,
    )
    grid = np.array(flat).reshape(len(alphas), len(gs))
    fixed = {"gamma": p.gamma, "delta": p.delta, "G0": p.G0}
    return SurfaceResult(alphas=alphas, gs=gs, t_bi=grid, m=m or p.m, fixed=fixed)


def table_g_bifurcations(p, inv, m_list):
    """Rows (m, g_bi1, g_bi2) of the growth-rate Hopf points per kernel
    order; NaN when a crossing is absent."""
    def row(m):
        report = hopf_in_g(p, inv, m=m)
        return (
            m,
            report.g1_hopf if report.g1_hopf is not None else math.nan,
            report.g2_hopf if report.g2_hopf is not None else math.nan,
        )

    return _map_cells(row, list(m_list))


# ---------------------------------------------------------------------------
# CSV / JSON export


def _fmt(x):
    if isinstance(x, float) and math.isnan(x):
        return "NA"
    return f"{x:.17g}"


def _write_lines(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(_fmt(x) for x in row) + "\n")


def sidecar_path(path):
    base, _ = os.path.splitext(str(path))
    return base + ".meta.json"


def _write_sidecar(path, payload):
    payload = dict(payload)
    payload["version"] = __version__
    with open(sidecar_path(path), "w", encoding="utf-8", newline="") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_curve_csv(curve, path):
    """CSV `param,T_bi` plus a JSON metadata sidecar."""
    _write_lines(path, "param,T_bi", zip(curve.values, curve.t_bi))
    _write_sidecar(
        path,
        {
            "kind": "curve",
            "parameter": curve.parameter,
            "m": curve.m,
            "fixed": curve.fixed,
            "grid": {
                "lo": float(curve.values[0]),
                "hi": float(curve.values[-1]),
                "count": int(len(curve.values)),
            },
            "fit": asdict(curve.fit) if curve.fit is not None else None,
        },
    )


def write_surface_csv(surface, path):
    """CSV `alpha,g,T_bi` in row-major (alpha outer) order plus sidecar."""
    rows = (
        (al, g, surface.t_bi[i, j])
        for i, al in enumerate(surface.alphas)
        for j, g in enumerate(surface.gs)
    )
    _write_lines(path, "alpha,g,T_bi", rows)
    _write_sidecar(
        path,
        {
            "kind": "surface",
            "m": surface.m,
            "fixed": surface.fixed,
            "grid": {
                "alpha": [float(surface.alphas[0]), float(surface.alphas[-1]),
                          int(len(surface.alphas))],
                "g": [float(surface.gs[0]), float(surface.gs[-1]),
                      int(len(surface.gs))],
            },
            "fit": None,
        },
    )


def write_table_csv(rows, path, fixed=None):
    """CSV `m,g_bi1,g_bi2` plus sidecar."""
    _write_lines(path, "m,g_bi1,g_bi2", rows)
    _write_sidecar(
        path,
        {"kind": "table", "fixed": fixed or {}, "grid": None, "fit": None},
    )
