"""Shared domain types, uniform-grid sampling, and accumulation primitives.

The rest of the library speaks three small data structures defined here:
closed boxes, uniform endpoint-inclusive grids over them, and row-major
sample containers.  Bivariate functions enter through ``FunctionSource``,
which wraps anything evaluatable on a box (builtin formulas, piecewise
constructions, bilinear interpolation of sampled data) behind one pure,
numpy-broadcastable ``eval``.

Determinism notes: every reduction in this package either runs through
``stable_sum`` (Neumaier-compensated, fixed order) or through numpy core
loops whose result depends only on operand values and shapes.  Optional
thread parallelism partitions index space into contiguous blocks that
write disjoint output slots, so threaded and sequential runs produce
bit-identical arrays.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

__all__ = [
    "DomainError",
    "ParameterError",
    "NumericError",
    "ResolutionError",
    "SizeError",
    "VerificationError",
    "CatalogError",
    "Box",
    "Rectangle",
    "FracOrder",
    "GridSpec",
    "GridSamples",
    "FunctionSource",
    "CallableSource",
    "SampledSource",
    "ShiftedSource",
    "sample",
    "stable_sum",
    "worker_count",
    "row_blocks",
    "write_samples_csv",
    "read_samples_csv",
    "write_samples_json",
    "read_samples_json",
]


class DomainError(ValueError):
    """A point or rectangle lies outside the region where evaluation is defined."""


class ParameterError(ValueError):
    """A numeric parameter violates its documented precondition."""

    def __init__(self, message: str, parameter: str | None = None):
        super().__init__(message)
        self.parameter = parameter


class NumericError(ArithmeticError):
    """A computation produced or consumed a non-finite value."""


class ResolutionError(RuntimeError):
    """Grid too coarse (or mesh size out of range) for the requested quantity."""


class SizeError(RuntimeError):
    """Input too large for an intentionally small exhaustive algorithm."""


class VerificationError(RuntimeError):
    """A certified inequality or named verification check failed."""


class CatalogError(KeyError):
    """Unknown catalog entry or malformed catalog parameters."""

    def __str__(self) -> str:  # KeyError wraps its message in quotes
        return self.args[0] if self.args else ""


# ---------------------------------------------------------------------------
# domains


@dataclass(frozen=True)
class Box:
    """Closed axis-aligned rectangle [a, b] x [c, d] with a < b and c < d."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        for name in ("a", "b", "c", "d"):
            v = getattr(self, name)
            try:
                v = float(v)
            except (TypeError, ValueError):
                raise ParameterError(f"box coordinate {name} must be a real number", parameter=name)
            if not math.isfinite(v):
                raise ParameterError(f"box coordinate {name} must be finite", parameter=name)
            object.__setattr__(self, name, v)
        if not self.a < self.b:
            raise ParameterError(f"box requires a < b, got a={self.a}, b={self.b}", parameter="b")
        if not self.c < self.d:
            raise ParameterError(f"box requires c < d, got c={self.c}, d={self.d}", parameter="d")

    @property
    def width(self) -> float:
        return self.b - self.a

    @property
    def height(self) -> float:
        return self.d - self.c

    def covers(self, other: "Box", tol: float = 1e-9) -> bool:
        """True when ``other`` sits inside this box, up to relative slack."""
        sx = tol * max(1.0, abs(self.a), abs(self.b))
        sy = tol * max(1.0, abs(self.c), abs(self.d))
        return (
            other.a >= self.a - sx
            and other.b <= self.b + sx
            and other.c >= self.c - sy
            and other.d <= self.d + sy
        )

    def shifted(self, dx: float, dy: float) -> "Box":
        return Box(self.a + dx, self.b + dx, self.c + dy, self.d + dy)

    def __str__(self) -> str:
        return f"[{self.a:g},{self.b:g}]x[{self.c:g},{self.d:g}]"


@dataclass(frozen=True)
class Rectangle(Box):
    """Operator domain: a box that additionally satisfies 0 < a and 0 < c.

    The fractional-integral kernels involve powers and logarithms of the
    coordinates, so the operators only accept rectangles bounded away from
    the axes.  Constructions and plain sampling work on any ``Box``.
    """

    def __post_init__(self):
        super().__post_init__()
        if self.a <= 0.0:
            raise ParameterError(f"rectangle requires a > 0, got a={self.a}", parameter="a")
        if self.c <= 0.0:
            raise ParameterError(f"rectangle requires c > 0, got c={self.c}", parameter="c")


@dataclass(frozen=True)
class FracOrder:
    """Fractional orders (alpha, beta) and power weights (p, q).

    Requires alpha > 0, beta > 0 and p > -1, q > -1.  The p, q -> -1 limit
    is served by the separate Hadamard operator, not by this type.
    """

    alpha: float
    beta: float
    p: float = 0.0
    q: float = 0.0

    def __post_init__(self):
        for name in ("alpha", "beta", "p", "q"):
            v = getattr(self, name)
            try:
                v = float(v)
            except (TypeError, ValueError):
                raise ParameterError(f"{name} must be a real number", parameter=name)
            if not math.isfinite(v):
                raise ParameterError(f"{name} must be finite", parameter=name)
            object.__setattr__(self, name, v)
        if self.alpha <= 0.0:
            raise ParameterError(f"alpha must be positive, got {self.alpha}", parameter="alpha")
        if self.beta <= 0.0:
            raise ParameterError(f"beta must be positive, got {self.beta}", parameter="beta")
        if self.p <= -1.0:
            raise ParameterError(f"p must exceed -1, got {self.p}", parameter="p")
        if self.q <= -1.0:
            raise ParameterError(f"q must exceed -1, got {self.q}", parameter="q")


# ---------------------------------------------------------------------------
# grids


@dataclass(frozen=True)
class GridSpec:
    """Uniform, endpoint-inclusive grid over a box.

    Node (i, j) sits at (a + i*(b-a)/(m-1), c + j*(d-c)/(n-1)); both
    endpoints are grid nodes.
    """

    rect: Box
    m: int
    n: int

    def __post_init__(self):
        for name in ("m", "n"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or isinstance(v, bool):
                raise ParameterError(f"{name} must be an integer", parameter=name)
            object.__setattr__(self, name, int(v))
        if self.m < 2 or self.n < 2:
            raise ParameterError(f"grid needs at least 2 nodes per axis, got {self.m}x{self.n}", parameter="m")
        if not isinstance(self.rect, Box):
            raise ParameterError("rect must be a Box", parameter="rect")

    def xs(self) -> np.ndarray:
        return np.linspace(self.rect.a, self.rect.b, self.m)

    def ys(self) -> np.ndarray:
        return np.linspace(self.rect.c, self.rect.d, self.n)

    @property
    def hx(self) -> float:
        return self.rect.width / (self.m - 1)

    @property
    def hy(self) -> float:
        return self.rect.height / (self.n - 1)

    def node(self, i: int, j: int) -> tuple[float, float]:
        return float(self.xs()[i]), float(self.ys()[j])


@dataclass(frozen=True, eq=False)
class GridSamples:
    """Row-major (x-index major) samples on a ``GridSpec``.

    ``values[i*n + j]`` is the sample at node (i, j).  Values are float64,
    finite, and frozen after construction.
    """

    spec: GridSpec
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64).reshape(-1)
        want = self.spec.m * self.spec.n
        if v.size != want:
            raise ParameterError(f"expected {want} values for a {self.spec.m}x{self.spec.n} grid, got {v.size}")
        if not np.all(np.isfinite(v)):
            raise NumericError("grid samples must be finite")
        v = np.array(v, copy=True)
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def matrix(self) -> np.ndarray:
        """(m, n) read-only view, first axis indexes x."""
        return self.values.reshape(self.spec.m, self.spec.n)

    def value(self, i: int, j: int) -> float:
        return float(self.values[i * self.spec.n + j])

    @staticmethod
    def from_matrix(spec: GridSpec, matrix: np.ndarray) -> "GridSamples":
        return GridSamples(spec, np.asarray(matrix, dtype=np.float64).reshape(-1))


# ---------------------------------------------------------------------------
# function sources


class FunctionSource:
    """A pure bivariate function on a declared closed box.

    ``eval(x, y)`` must accept scalars or broadcastable numpy arrays and be
    point-wise pure (same floats in, same floats out, no state).  ``domain``
    is the box where evaluation is defined; ``None`` means unrestricted.
    ``xy_split()`` optionally exposes an additive split f(x, y) = g(x) + h(y)
    used by separable fast paths; sources without one return ``None``.
    """

    name: str = "source"
    domain: Box | None = None
    sup_bound: Callable[[Box], float] | None = None

    def eval(self, x, y):
        raise NotImplementedError

    def __call__(self, x, y):
        out = np.asarray(self.eval(x, y), dtype=np.float64)
        if out.shape == ():
            return float(out)
        return out

    def xy_split(self) -> tuple[Callable, Callable] | None:
        return None

    def covers(self, rect: Box) -> bool:
        return self.domain is None or self.domain.covers(rect)


class CallableSource(FunctionSource):
    """FunctionSource over a plain numpy-broadcastable callable."""

    def __init__(
        self,
        fn: Callable,
        name: str = "callable",
        domain: Box | None = None,
        split: tuple[Callable, Callable] | None = None,
        sup_bound: Callable[[Box], float] | None = None,
    ):
        self._fn = fn
        self.name = name
        self.domain = domain
        self._split = split
        self.sup_bound = sup_bound

    def eval(self, x, y):
        return self._fn(np.asarray(x, dtype=np.float64), np.asarray(y, dtype=np.float64))

    def xy_split(self):
        return self._split


class SampledSource(FunctionSource):
    """Bilinear interpolation of grid samples.

    Exact at the grid nodes: querying a node coordinate reproduces the
    stored sample bit for bit.  Queries outside the grid's box (beyond a
    relative slack of 1e-9) raise ``DomainError``.
    """

    def __init__(self, samples: GridSamples, name: str = "sampled"):
        self.samples = samples
        self.name = name
        self.domain = samples.spec.rect
        self._xs = samples.spec.xs()
        self._ys = samples.spec.ys()

    def eval(self, x, y):
        xb, yb = np.broadcast_arrays(np.asarray(x, dtype=np.float64), np.asarray(y, dtype=np.float64))
        shape = xb.shape
        xf = xb.reshape(-1)
        yf = yb.reshape(-1)
        r = self.domain
        tx = 1e-9 * max(1.0, abs(r.a), abs(r.b))
        ty = 1e-9 * max(1.0, abs(r.c), abs(r.d))
        if xf.size and (xf.min() < r.a - tx or xf.max() > r.b + tx or yf.min() < r.c - ty or yf.max() > r.d + ty):
            raise DomainError("query outside the sampled box")
        xf = np.clip(xf, r.a, r.b)
        yf = np.clip(yf, r.c, r.d)
        m, n = self.samples.spec.m, self.samples.spec.n
        i = np.clip(np.searchsorted(self._xs, xf, side="right") - 1, 0, m - 2)
        j = np.clip(np.searchsorted(self._ys, yf, side="right") - 1, 0, n - 2)
        fx = (xf - self._xs[i]) / (self._xs[i + 1] - self._xs[i])
        fy = (yf - self._ys[j]) / (self._ys[j + 1] - self._ys[j])
        v = self.samples.matrix
        out = (
            (1.0 - fx) * (1.0 - fy) * v[i, j]
            + fx * (1.0 - fy) * v[i + 1, j]
            + (1.0 - fx) * fy * v[i, j + 1]
            + fx * fy * v[i + 1, j + 1]
        )
        return out.reshape(shape)


class ShiftedSource(FunctionSource):
    """Translate a source: eval(x, y) = base(x - dx, y - dy)."""

    def __init__(self, base: FunctionSource, dx: float, dy: float):
        self.base = base
        self.dx = float(dx)
        self.dy = float(dy)
        self.name = f"{base.name}@shift({self.dx:g},{self.dy:g})"
        self.domain = None if base.domain is None else base.domain.shifted(self.dx, self.dy)
        if base.sup_bound is not None:
            self.sup_bound = lambda box: base.sup_bound(box.shifted(-self.dx, -self.dy))

    def eval(self, x, y):
        return self.base.eval(np.asarray(x, dtype=np.float64) - self.dx, np.asarray(y, dtype=np.float64) - self.dy)

    def xy_split(self):
        split = self.base.xy_split()
        if split is None:
            return None
        g, h = split
        dx, dy = self.dx, self.dy
        return (lambda x: g(np.asarray(x, dtype=np.float64) - dx), lambda y: h(np.asarray(y, dtype=np.float64) - dy))


# ---------------------------------------------------------------------------
# sampling


def worker_count(override: int | None = None) -> int:
    """Worker count for block-parallel loops.

    Resolution order: explicit override, then FRACDIM2D_THREADS (0 = auto,
    meaning cpu_count), else 1.  Thread count never changes computed values,
    only wall time.
    """
    if override is not None:
        k = int(override)
        return max(1, (os.cpu_count() or 1) if k == 0 else k)
    env = os.environ.get("FRACDIM2D_THREADS", "").strip()
    if not env:
        return 1
    try:
        k = int(env)
    except ValueError:
        raise ParameterError(f"FRACDIM2D_THREADS must be an integer, got {env!r}", parameter="FRACDIM2D_THREADS")
    if k == 0:
        return os.cpu_count() or 1
    return max(1, k)


def row_blocks(count: int, workers: int) -> list[range]:
    """Split range(count) into contiguous blocks, one per worker at most."""
    workers = max(1, min(workers, count))
    step = (count + workers - 1) // workers
    return [range(lo, min(lo + step, count)) for lo in range(0, count, step)]


def sample(src: FunctionSource, spec: GridSpec, threads: int | None = None) -> GridSamples:
    """Evaluate ``src`` at every grid node of ``spec``, row-major.

    The grid box must sit inside the source's declared domain.  With more
    than one worker the rows are split into contiguous blocks evaluated
    concurrently; block results are written to disjoint slots, so the
    output is bit-identical to a sequential run.
    """
    if not src.covers(spec.rect):
        raise DomainError(f"grid box {spec.rect} is not inside the domain of source {src.name!r}")
    xs = spec.xs()
    ys = spec.ys()
    workers = worker_count(threads)
    if workers <= 1 or spec.m < 2 * workers:
        vals = np.broadcast_to(np.asarray(src.eval(xs[:, None], ys[None, :]), dtype=np.float64), (spec.m, spec.n))
        return GridSamples(spec, np.array(vals).reshape(-1))
    out = np.empty((spec.m, spec.n), dtype=np.float64)

    def run(block: range) -> None:
        sub = np.asarray(src.eval(xs[block.start : block.stop, None], ys[None, :]), dtype=np.float64)
        out[block.start : block.stop, :] = np.broadcast_to(sub, (block.stop - block.start, spec.n))

    with ThreadPoolExecutor(max_workers=workers) as pool:
        list(pool.map(run, row_blocks(spec.m, workers)))
    return GridSamples(spec, out.reshape(-1))


# ---------------------------------------------------------------------------
# compensated accumulation


def stable_sum(terms: Iterable[float] | np.ndarray) -> float:
    """Neumaier-compensated sum of ``terms`` in the given order.

    Keeps a single running compensation term, so low-order bits survive
    catastrophic intermediate cancellation: stable_sum([1e16, 1.0, -1e16])
    is exactly 1.0.  Deterministic for a fixed input order; permutations
    agree to within a few ulp for mildly conditioned inputs.
    """
    if isinstance(terms, np.ndarray):
        it = terms.reshape(-1).tolist()
    else:
        it = terms
    s = 0.0
    comp = 0.0
    for x in it:
        x = float(x)
        if not math.isfinite(x):
            raise NumericError("stable_sum term is not finite")
        t = s + x
        if abs(s) >= abs(x):
            comp += (s - t) + x
        else:
            comp += (x - t) + s
        s = t
    out = s + comp
    if not math.isfinite(out):
        raise NumericError("stable_sum overflowed")
    return out


# ---------------------------------------------------------------------------
# file formats


def write_samples_csv(gs: GridSamples, path: str) -> None:
    """CSV with header ``x,y,value``, rows in row-major grid order.

    Floats are written with 17 significant digits, enough to round-trip
    float64 exactly.
    """
    xs = gs.spec.xs()
    ys = gs.spec.ys()
    m, n = gs.spec.m, gs.spec.n
    cols = np.empty((m * n, 3), dtype=np.float64)
    cols[:, 0] = np.repeat(xs, n)
    cols[:, 1] = np.tile(ys, m)
    cols[:, 2] = gs.values
    with open(path, "w", newline="\n") as fh:
        fh.write("x,y,value\n")
        np.savetxt(fh, cols, fmt="%.17g", delimiter=",", newline="\n")


def read_samples_csv(path: str) -> GridSamples:
    """Read a CSV produced by ``write_samples_csv``.

    Grid shape is inferred from the row-major ordering: the leading run of
    equal x entries gives n, the total row count gives m.  Values survive
    the round trip exactly.
    """
    data = np.loadtxt(path, delimiter=",", skiprows=1, dtype=np.float64, ndmin=2)
    if data.ndim != 2 or data.shape[1] != 3 or data.shape[0] < 4:
        raise ParameterError(f"{path}: expected rows of x,y,value with at least a 2x2 grid")
    x, y, v = data[:, 0], data[:, 1], data[:, 2]
    changes = np.nonzero(x != x[0])[0]
    n = int(changes[0]) if changes.size else data.shape[0]
    if n < 2 or data.shape[0] % n != 0:
        raise ParameterError(f"{path}: rows are not in row-major grid order")
    m = data.shape[0] // n
    if m < 2:
        raise ParameterError(f"{path}: need at least 2 grid rows")
    rect = Box(float(x[0]), float(x[-1]), float(y[0]), float(y[n - 1]))
    spec = GridSpec(rect, m, n)
    gx = np.repeat(spec.xs(), n)
    gy = np.tile(spec.ys(), m)
    tol = 1e-9 * max(1.0, float(np.max(np.abs(data[:, :2]))))
    if np.max(np.abs(gx - x)) > tol or np.max(np.abs(gy - y)) > tol:
        raise ParameterError(f"{path}: node coordinates are not a uniform grid")
    return GridSamples(spec, v)


def write_samples_json(gs: GridSamples, path: str) -> None:
    doc = {
        "rect": {"a": gs.spec.rect.a, "b": gs.spec.rect.b, "c": gs.spec.rect.c, "d": gs.spec.rect.d},
        "m": gs.spec.m,
        "n": gs.spec.n,
        "values": gs.values.tolist(),
    }
    with open(path, "w", newline="\n") as fh:
        json.dump(doc, fh)
        fh.write("\n")


def read_samples_json(path: str) -> GridSamples:
    with open(path) as fh:
        doc = json.load(fh)
    try:
        rect = Box(doc["rect"]["a"], doc["rect"]["b"], doc["rect"]["c"], doc["rect"]["d"])
        spec = GridSpec(rect, int(doc["m"]), int(doc["n"]))
        values = doc["values"]
    except (KeyError, TypeError):
        raise ParameterError(f"{path}: expected keys rect{{a,b,c,d}}, m, n, values")
    return GridSamples(spec, np.asarray(values, dtype=np.float64))
