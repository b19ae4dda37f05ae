"""Box-counting bounds for the graph of a sampled bivariate function.

The graph of f over a rectangle is covered by delta-cubes.  Splitting
the rectangle into a delta-grid of closed cells, the number of cubes
needed over one cell is controlled by the oscillation R of f there:
between max(R/delta, 1) and R/delta + 2.  Summing over cells brackets
the full count:

    sum max(R/delta, 1)  <=  N(delta)  <=  2 m n + sum R/delta

with m, n the cell counts per side.  On a grid of samples the
oscillation is taken over the sample values falling in each closed cell
(cells share their edges, so boundary nodes count for both neighbours),
which is exact for the piecewise-bilinear interpolant whenever the cell
edges align with sample lines.

``boxcount_bruteforce_3d`` recounts small cases directly from the
bilinear interpolant: for each cell column it stacks the minimal run of
z-cubes covering the interpolant's range there.  Cut cells are handled
by evaluating the interpolant on the cell boundary as well, which can
only widen the range; with aligned cell edges the ranges coincide with
the sampled oscillations and the count sits inside the bracket above.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    GridSamples,
    ParameterError,
    ResolutionError,
    SampledSource,
    SizeError,
    stable_sum,
)

__all__ = [
    "BoxCount",
    "DimensionFit",
    "oscillation_counts",
    "boxcount_bruteforce_3d",
    "dimension_fit",
    "fit_loglog",
    "default_deltas",
]

_BRUTE_CELL_LIMIT = 2**14
_EDGE_TOL = 1e-9


@dataclass(frozen=True)
class BoxCount:
    """Lower and upper bounds on the delta-cube count of a graph.

    m and n are the number of delta-cells per side; each satisfies
    side/delta <= count <= 1 + side/delta (the last cell may be short).
    """

    delta: float
    n_lower: int
    n_upper: int
    m: int
    n: int

    def __post_init__(self):
        if not (self.delta > 0 and math.isfinite(self.delta)):
            raise ParameterError("delta must be positive and finite", parameter="delta")
        if self.m < 1 or self.n < 1:
            raise ParameterError("cell counts must be positive")
        if self.n_lower > self.n_upper:
            raise ParameterError("count bounds out of order")


@dataclass(frozen=True)
class DimensionFit:
    """Least-squares slope of log(count) against log(1/delta).

    ``points`` holds (delta, count) pairs sorted by descending delta;
    ``dropped`` lists deltas rejected as unusable for the source grid.
    """

    points: tuple[tuple[float, int], ...]
    slope: float
    intercept: float
    r_squared: float
    which: str
    dropped: tuple[float, ...] = ()

    def __post_init__(self):
        if self.which not in ("lower", "upper", "oracle"):
            raise ParameterError("which must be lower, upper, or oracle", parameter="which")
        if len(self.points) < 3:
            raise ResolutionError("a dimension fit needs at least 3 points")
        ds = [p[0] for p in self.points]
        if any(b >= a for a, b in zip(ds, ds[1:])):
            raise ParameterError("points must be sorted by strictly descending delta")


def _cells_1d(lo: float, hi: float, delta: float) -> int:
    # ceil with dust guard so an exact divisor yields exactly side/delta cells
    return int(math.ceil((hi - lo) / delta - _EDGE_TOL))


def _window_bounds(coords: np.ndarray, lo: float, count: int, delta: float, hi: float) -> tuple[np.ndarray, np.ndarray]:
    """Half-open index ranges [start, stop) of samples in each closed cell."""
    edges_lo = lo + delta * np.arange(count)
    edges_hi = np.minimum(edges_lo + delta, hi)
    slack = _EDGE_TOL * delta
    starts = np.searchsorted(coords, edges_lo - slack, side="left")
    stops = np.searchsorted(coords, edges_hi + slack, side="right")
    return starts.astype(np.int64), stops.astype(np.int64)


def _strip_reduce(mat: np.ndarray, starts: np.ndarray, stops: np.ndarray, op) -> np.ndarray:
    out = np.empty((starts.size,) + mat.shape[1:], dtype=np.float64)
    for k in range(starts.size):
        out[k] = op(mat[starts[k] : stops[k]], axis=0)
    return out


def oscillation_counts(g: GridSamples, delta: float) -> BoxCount:
    """Oscillation-based cube-count bracket at mesh size ``delta``.

    Every closed cell must contain at least a 2 x 2 block of sample
    nodes, otherwise the grid cannot resolve the cell oscillation and a
    ResolutionError is raised.  ``delta`` at or above the short side of
    the rectangle is likewise rejected.
    """
    if not isinstance(g, GridSamples):
        raise ParameterError("expected GridSamples")
    delta = float(delta)
    if not (delta > 0 and math.isfinite(delta)):
        raise ParameterError("delta must be positive and finite", parameter="delta")
    box = g.spec.rect
    if delta >= min(box.width, box.height):
        raise ResolutionError(f"delta={delta:g} does not split the rectangle")
    mc = _cells_1d(box.a, box.b, delta)
    nc = _cells_1d(box.c, box.d, delta)
    xs, ys = g.spec.xs(), g.spec.ys()
    xst, xsp = _window_bounds(xs, box.a, mc, delta, box.b)
    yst, ysp = _window_bounds(ys, box.c, nc, delta, box.d)
    if np.any(xsp - xst < 2) or np.any(ysp - yst < 2):
        raise ResolutionError(
            f"delta={delta:g} leaves a cell with fewer than 2x2 sample nodes on a {g.spec.m}x{g.spec.n} grid"
        )
    mat = g.matrix
    col_max = _strip_reduce(mat, xst, xsp, np.max)
    col_min = _strip_reduce(mat, xst, xsp, np.min)
    cell_max = _strip_reduce(col_max.T, yst, ysp, np.max).T
    cell_min = _strip_reduce(col_min.T, yst, ysp, np.min).T
    osc = (cell_max - cell_min) / delta
    s_low = float(np.sum(np.maximum(osc, 1.0)))
    s_high = 2.0 * mc * nc + float(np.sum(osc))
    guard_lo = _EDGE_TOL * (1.0 + abs(s_low))
    guard_hi = _EDGE_TOL * (1.0 + abs(s_high))
    return BoxCount(
        delta=delta,
        n_lower=int(math.ceil(s_low - guard_lo)),
        n_upper=int(math.floor(s_high + guard_hi)),
        m=mc,
        n=nc,
    )


def boxcount_bruteforce_3d(g: GridSamples, delta: float) -> int:
    """Delta-cube count of the bilinear graph, cell column by cell column.

    For each closed delta-cell the bilinear interpolant's range is taken
    over every candidate extremum: sample nodes inside the cell and the
    interpolant restricted to the cell edges.  The count for the column
    is the minimal number of stacked delta-cubes covering that range
    (at least one).  Limited to small cell grids.
    """
    if not isinstance(g, GridSamples):
        raise ParameterError("expected GridSamples")
    delta = float(delta)
    if not (delta > 0 and math.isfinite(delta)):
        raise ParameterError("delta must be positive and finite", parameter="delta")
    box = g.spec.rect
    if delta >= min(box.width, box.height):
        raise ResolutionError(f"delta={delta:g} does not split the rectangle")
    mc = _cells_1d(box.a, box.b, delta)
    nc = _cells_1d(box.c, box.d, delta)
    if mc * nc > _BRUTE_CELL_LIMIT:
        raise SizeError(f"brute-force count limited to {_BRUTE_CELL_LIMIT} cells, got {mc}x{nc}")
    xs, ys = g.spec.xs(), g.spec.ys()
    xst, xsp = _window_bounds(xs, box.a, mc, delta, box.b)
    yst, ysp = _window_bounds(ys, box.c, nc, delta, box.d)
    if np.any(xsp - xst < 2) or np.any(ysp - yst < 2):
        raise ResolutionError(
            f"delta={delta:g} leaves a cell with fewer than 2x2 sample nodes on a {g.spec.m}x{g.spec.n} grid"
        )
    interp = SampledSource(g, name="boxcount-interpolant")
    total = 0
    for i in range(mc):
        x0 = box.a + i * delta
        x1 = min(x0 + delta, box.b)
        cand_x = np.unique(np.concatenate((xs[xst[i] : xsp[i]], [x0, x1])).clip(box.a, box.b))
        for j in range(nc):
            y0 = box.c + j * delta
            y1 = min(y0 + delta, box.d)
            cand_y = np.unique(np.concatenate((ys[yst[j] : ysp[j]], [y0, y1])).clip(box.c, box.d))
            patch = interp.eval(cand_x[:, None], cand_y[None, :])
            rng = (float(np.max(patch)) - float(np.min(patch))) / delta
            total += max(int(math.ceil(rng - _EDGE_TOL * (1.0 + rng))), 1)
    return total


def fit_loglog(points, which: str = "lower", dropped=()) -> DimensionFit:
    """Fit log(count) = slope * log(1/delta) + intercept by least squares."""
    pts = sorted(((float(d), int(c)) for d, c in points), key=lambda p: -p[0])
    if len(pts) < 3:
        raise ResolutionError(f"need at least 3 usable deltas, got {len(pts)}")
    seen = [p[0] for p in pts]
    if any(a == b for a, b in zip(seen, seen[1:])):
        raise ParameterError("deltas must be distinct", parameter="deltas")
    if any(c < 1 for _, c in pts):
        raise ParameterError("counts must be positive", parameter="counts")
    xv = [-math.log(d) for d, _ in pts]
    yv = [math.log(c) for _, c in pts]
    k = float(len(pts))
    sx = stable_sum(xv)
    sy = stable_sum(yv)
    sxx = stable_sum(x * x for x in xv)
    sxy = stable_sum(x * y for x, y in zip(xv, yv))
    den = k * sxx - sx * sx
    if den <= 0:
        raise ParameterError("degenerate delta spread", parameter="deltas")
    slope = (k * sxy - sx * sy) / den
    intercept = (sy - slope * sx) / k
    ss_res = stable_sum((y - (slope * x + intercept)) ** 2 for x, y in zip(xv, yv))
    ss_tot = stable_sum((y - sy / k) ** 2 for y in yv)
    r2 = 1.0 if ss_tot <= 0 else max(0.0, 1.0 - ss_res / ss_tot)
    return DimensionFit(
        points=tuple(pts),
        slope=float(slope),
        intercept=float(intercept),
        r_squared=float(r2),
        which=which,
        dropped=tuple(float(d) for d in dropped),
    )


def dimension_fit(g: GridSamples, deltas, which: str = "lower") -> DimensionFit:
    """Box-dimension estimate from oscillation counts across ``deltas``.

    Deltas the grid cannot support (too coarse for the rectangle or too
    fine for the sample spacing) are dropped and reported; fewer than 3
    usable deltas is a ResolutionError.
    """
    if which not in ("lower", "upper"):
        raise ParameterError("which must be lower or upper", parameter="which")
    usable: list[tuple[float, int]] = []
    dropped: list[float] = []
    for d in deltas:
        try:
            bc = oscillation_counts(g, float(d))
        except ResolutionError:
            dropped.append(float(d))
            continue
        usable.append((bc.delta, bc.n_lower if which == "lower" else bc.n_upper))
    if len(usable) < 3:
        raise ResolutionError(f"need at least 3 usable deltas, got {len(usable)} (dropped {len(dropped)})")
    return fit_loglog(usable, which=which, dropped=dropped)


def default_deltas(spec) -> list[float]:
    """Halving ladder from a quarter of the short side down to 8 grid steps."""
    box = spec.rect
    start = min(box.width, box.height) / 4.0
    floor = 8.0 * max(spec.hx, spec.hy)
    out = []
    d = start
    while d >= floor * (1.0 - 1e-12):
        out.append(d)
        d *= 0.5
    return out
