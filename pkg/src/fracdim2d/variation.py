"""Bivariate variation on grids, in the two-coordinate monotone sense.

The variation of samples on a grid is the largest sum of absolute jumps
along a monotone chain: a sequence of nodes nondecreasing in both
indices.  Refining a chain never lowers its sum (triangle inequality),
so the supremum is attained by a saturated chain stepping to an adjacent
node each time, and dynamic programming over the three predecessors
(left, down, diagonal) computes the exact grid value.

Chains may start and end anywhere; since extending a chain backward to
the lower-left corner or forward to the upper-right corner only adds
nonnegative terms, the unrestricted maximum coincides with the
corner-to-corner value.  The ``pinned`` flag selects the corner-to-corner
reported path for callers that want the fixed-endpoint form.

A brute-force enumerator over all monotone chains (saturated or not, any
start and end) serves as the oracle on small grids.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    Box,
    FunctionSource,
    GridSamples,
    GridSpec,
    NumericError,
    ParameterError,
    SizeError,
    sample,
)

__all__ = [
    "VariationResult",
    "arzela_variation",
    "arzela_variation_bruteforce",
    "variation_trend",
]

_BRUTE_LIMIT = 16


@dataclass(frozen=True)
class VariationResult:
    """Grid variation value plus one monotone chain attaining it.

    ``argpath`` is a saturated chain: consecutive nodes differ by one step
    in i, in j, or in both, never decreasing.  The value is the sum of
    absolute sample differences along it.
    """

    value: float
    argpath: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if not (np.isfinite(self.value) and self.value >= 0.0):
            raise ParameterError("variation value must be finite and nonnegative", parameter="value")
        path = tuple((int(i), int(j)) for i, j in self.argpath)
        if not path:
            raise ParameterError("argpath must contain at least one node", parameter="argpath")
        for (i0, j0), (i1, j1) in zip(path, path[1:]):
            if (i1 - i0, j1 - j0) not in ((1, 0), (0, 1), (1, 1)):
                raise ParameterError("argpath must be a saturated monotone chain", parameter="argpath")
        object.__setattr__(self, "argpath", path)


def _as_matrix(g) -> np.ndarray:
    if isinstance(g, GridSamples):
        return g.matrix
    mat = np.asarray(g, dtype=np.float64)
    if mat.ndim != 2 or mat.size == 0:
        raise ParameterError("expected GridSamples or a nonempty 2-D array")
    if not np.all(np.isfinite(mat)):
        raise NumericError("grid values must be finite")
    return mat


def _dp_tables(mat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Best chain sum ending at each node, plus traceback choices.

    choice codes: 0 chain starts here, 1 from (i-1,j), 2 from (i,j-1),
    3 from (i-1,j-1).  Ties prefer the lowest code, i.e. left, then down,
    then diagonal.  The anti-diagonal sweep only touches finished entries,
    so the result is identical to the sequential recurrence.
    """
    m, n = mat.shape
    best = np.zeros((m, n), dtype=np.float64)
    choice = np.zeros((m, n), dtype=np.uint8)
    if n > 1:
        best[0, 1:] = np.cumsum(np.abs(np.diff(mat[0, :])))
        choice[0, 1:] = 2
    if m > 1:
        best[1:, 0] = np.cumsum(np.abs(np.diff(mat[:, 0])))
        choice[1:, 0] = 1
    for d in range(2, m + n - 1):
        i0 = max(1, d - (n - 1))
        i1 = min(m - 1, d - 1)
        if i0 > i1:
            continue
        ii = np.arange(i0, i1 + 1)
        jj = d - ii
        cur = mat[ii, jj]
        cands = np.stack(
            (
                best[ii - 1, jj] + np.abs(cur - mat[ii - 1, jj]),
                best[ii, jj - 1] + np.abs(cur - mat[ii, jj - 1]),
                best[ii - 1, jj - 1] + np.abs(cur - mat[ii - 1, jj - 1]),
            )
        )
        pick = np.argmax(cands, axis=0)
        best[ii, jj] = cands[pick, np.arange(ii.size)]
        choice[ii, jj] = (pick + 1).astype(np.uint8)
    return best, choice


def _traceback(choice: np.ndarray, i: int, j: int) -> tuple[tuple[int, int], ...]:
    path = [(i, j)]
    while choice[i, j]:
        c = int(choice[i, j])
        if c == 1:
            i -= 1
        elif c == 2:
            j -= 1
        else:
            i -= 1
            j -= 1
        path.append((i, j))
    path.reverse()
    return tuple(path)


def arzela_variation(g, pinned: bool = False) -> VariationResult:
    """Exact grid variation over monotone chains, with an attaining path.

    ``g`` is a GridSamples or any 2-D array (degenerate 1 x k and 1 x 1
    shapes reduce to univariate variation and 0).  With ``pinned`` the
    reported path runs corner to corner; the value is the same either way
    because extending a chain to the corners never lowers its sum.
    """
    mat = _as_matrix(g)
    m, n = mat.shape
    best, choice = _dp_tables(mat)
    if pinned:
        i, j = m - 1, n - 1
    else:
        i, j = divmod(int(np.argmax(best)), n)
    return VariationResult(value=float(best[i, j]), argpath=_traceback(choice, i, j))


def arzela_variation_bruteforce(g) -> float:
    """Maximum of sum |df| over ALL monotone chains, by plain enumeration.

    Chains may jump several rows or columns per step and start or end
    anywhere; this is the definition-level supremum on the grid, used as
    the oracle for the saturated-chain dynamic program.  Grids beyond
    16 nodes are rejected.
    """
    mat = _as_matrix(g)
    m, n = mat.shape
    if m * n > _BRUTE_LIMIT:
        raise SizeError(f"brute force limited to {_BRUTE_LIMIT} nodes, got {m}x{n}")
    vals = mat.reshape(-1).tolist()
    succs: list[list[int]] = []
    for i in range(m):
        for j in range(n):
            acc = []
            for i2 in range(i, m):
                for j2 in range(j if i2 > i else j + 1, n):
                    acc.append(i2 * n + j2)
            succs.append(acc)
    best = 0.0

    def walk(k: int, run: float) -> None:
        nonlocal best
        if run > best:
            best = run
        vk = vals[k]
        for t in succs[k]:
            walk(t, run + abs(vals[t] - vk))

    for k in range(m * n):
        walk(k, 0.0)
    return best


def variation_trend(src: FunctionSource, rect: Box, levels, threads: int | None = None) -> list[tuple[int, float]]:
    """Grid variation of ``src`` on square grids of increasing size.

    ``levels`` must be strictly increasing integers, each at least 2.  The
    returned (level, value) series diverges for functions of unbounded
    variation and saturates for functions of bounded variation.
    """
    lv = [int(x) for x in levels]
    if not lv or any(x < 2 for x in lv) or any(b <= a for a, b in zip(lv, lv[1:])):
        raise ParameterError("levels must be strictly increasing integers >= 2", parameter="levels")
    out = []
    for level in lv:
        gs = sample(src, GridSpec(rect, level, level), threads=threads)
        out.append((level, arzela_variation(gs).value))
    return out
