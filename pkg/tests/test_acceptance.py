"""Acceptance gate: one test per shipping criterion, one pass/fail line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the criterion
lines; the suite is intentionally heavier than the unit tests (a couple
of minutes on one core).
"""
import math
import time

import numpy as np

import fracdim2d.cli as cli
from fracdim2d import (
    Box,
    FracOrder,
    GridSpec,
    QuadratureSpec,
    ShiftedSource,
    arzela_variation,
    arzela_variation_bruteforce,
    boundedness_certificate,
    boxcount_bruteforce_3d,
    catalog_entry,
    catalog_names,
    compose_semigroup,
    default_box,
    default_deltas,
    dimension_fit,
    hadamard_2d,
    katugampola_1d,
    katugampola_2d,
    katugampola_2d_grid,
    make_source,
    oscillation_counts,
    riemann_liouville_2d,
    sample,
    variation_trend,
)
from fracdim2d.core import Rectangle

UNIT_SQUARE = Box(1.0, 2.0, 1.0, 2.0)
HALF = FracOrder(0.5, 0.5)

# closed forms frozen from 40-digit arithmetic
REF_CONST_HALF = 4.0 / math.pi
REF_CONST_HALF_P1 = 1.5593936024673522158


def _report(num: int, ok: bool, detail: str) -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] criterion {num:2d}: {detail}")
    assert ok, f"criterion {num}: {detail}"


def _positive(name: str):
    """Catalog source shifted so its box sits in the operator domain."""
    src = make_source(name)
    box = src.domain if src.domain is not None else default_box(name)
    dx = 1.0 - box.a if box.a <= 0 else 0.0
    dy = 1.0 - box.c if box.c <= 0 else 0.0
    if dx or dy:
        src = ShiftedSource(src, dx, dy)
        box = box.shifted(dx, dy)
    return src, box


def _smooth_names():
    return [
        n
        for n in catalog_names()
        if catalog_entry(n).quadrature_safe and catalog_entry(n).bounded_variation
    ]


def test_criterion_01_closed_form_operator_values():
    one = make_source("constant:1")
    quad = QuadratureSpec(panels=256)
    t0 = time.perf_counter()
    v0 = katugampola_2d(one, UNIT_SQUARE, 2.0, 2.0, HALF, quad)
    v1 = katugampola_2d(one, UNIT_SQUARE, 2.0, 2.0, FracOrder(0.5, 0.5, 1.0, 0.0), quad)
    elapsed = time.perf_counter() - t0
    e0 = abs(v0 - REF_CONST_HALF) / REF_CONST_HALF
    e1 = abs(v1 - REF_CONST_HALF_P1) / REF_CONST_HALF_P1
    ok = e0 <= 1e-6 and e1 <= 1e-6 and elapsed < 1.0
    _report(1, ok, f"f=1 closed forms rel err {e0:.2e} (p=0), {e1:.2e} (p=1) in {elapsed:.3f}s")


def test_criterion_02_classical_special_cases():
    quad = QuadratureSpec(panels=128)
    worst = 0.0
    for name in _smooth_names():
        src, box = _positive(name)
        spec = GridSpec(box, 17, 17)
        gk = katugampola_2d_grid(src, spec, HALF, quad)
        for i, x in enumerate(spec.xs()):
            for j, y in enumerate(spec.ys()):
                rl = riemann_liouville_2d(src, box, float(x), float(y), 0.5, 0.5, quad)
                worst = max(worst, abs(gk.value(i, j) - rl))
    rect = Rectangle(1.0, math.e, 1.0, math.e)
    one = make_source("constant:1")
    near = katugampola_2d(one, rect, math.e, math.e, FracOrder(0.5, 0.5, -1.0 + 1e-4, -1.0 + 1e-4))
    had = hadamard_2d(one, rect, math.e, math.e, 0.5, 0.5)
    lim = abs(near - had) / abs(had)
    ok = worst <= 1e-6 and lim <= 1e-2
    _report(2, ok, f"max |katugampola - riemann-liouville| {worst:.2e} on 17x17; hadamard limit rel gap {lim:.2e}")


def test_criterion_03_semigroup_composition():
    spec = GridSpec(UNIT_SQUARE, 33, 33)
    worst_gap = 0.0
    worst_shrink = math.inf
    for name in ("constant:1", "plane", "sinxy"):
        src = make_source(name)
        gaps = []
        for panels in (128, 256):
            lhs, rhs = compose_semigroup(src, spec, HALF, HALF, QuadratureSpec(panels=panels))
            gaps.append(float(np.max(np.abs(lhs.values - rhs.values))))
        worst_gap = max(worst_gap, gaps[0])
        worst_shrink = min(worst_shrink, gaps[0] / gaps[1])
    ok = worst_gap <= 1e-3 and worst_shrink >= 2.0
    _report(3, ok, f"sup gap {worst_gap:.2e} at panels=128 (<= 1e-3); doubling shrinks >= {worst_shrink:.2f}x")


def test_criterion_04_separable_reduction():
    rng = np.random.default_rng(42)
    pts = rng.uniform(1.0, 2.0, size=(50, 2))
    order = FracOrder(0.7, 1.0, 0.4, 0.0)
    worst = 0.0
    for g in (lambda t: np.ones_like(t), lambda t: t, np.sin):
        f2d = lambda x, y, g=g: g(x) * np.ones_like(y)
        for x, y in pts:
            full = katugampola_2d(f2d, UNIT_SQUARE, float(x), float(y), order)
            reduced = (y - 1.0) * katugampola_1d(g, 1.0, float(x), 0.7, 0.4)
            scale = max(abs(reduced), 1e-30)
            worst = max(worst, abs(full - reduced) / scale)
    ok = worst <= 1e-8
    _report(4, ok, f"2-D vs (y-c)*1-D rel gap {worst:.2e} over 150 random evaluations")


def test_criterion_05_boundedness_certificates():
    certified = 0
    for name in catalog_names():
        src, box = _positive(name)
        boundedness_certificate(src, GridSpec(box, 9, 9), HALF)  # raises on violation
        certified += 1
    cert = boundedness_certificate(make_source("constant:1"), GridSpec(UNIT_SQUARE, 9, 9), HALF)
    attained_gap = abs(cert.sup_abs_observed - cert.bound) / cert.bound
    ok = certified == len(catalog_names()) and attained_gap <= 1e-6 and cert.attained_at == (2.0, 2.0)
    _report(5, ok, f"{certified} catalog certificates hold; f=1 attains its bound within {attained_gap:.2e}")


def test_criterion_06_variation_dp_equals_bruteforce():
    shapes = [(m, n) for m in range(2, 7) for n in range(2, 7) if m * n <= 12]
    t0 = time.perf_counter()
    mismatches = 0
    for seed in range(500):
        rng = np.random.default_rng(seed)
        m, n = shapes[rng.integers(len(shapes))]
        mat = rng.integers(-128, 129, size=(m, n)) / 16.0
        if arzela_variation(mat).value != arzela_variation_bruteforce(mat):
            mismatches += 1
    elapsed = time.perf_counter() - t0
    ok = mismatches == 0 and elapsed < 10.0
    _report(6, ok, f"dp == brute force on 500 random grids (mismatches {mismatches}) in {elapsed:.2f}s")


def test_criterion_07_integral_variation_saturates():
    src = make_source("plane")
    vals = []
    for level in (128, 256):
        g = katugampola_2d_grid(
            src, GridSpec(UNIT_SQUARE, level, level), HALF, QuadratureSpec(panels=48), method="separable"
        )
        vals.append(arzela_variation(g).value)
    drift = abs(vals[1] - vals[0]) / vals[0]
    ok = drift <= 0.05
    _report(7, ok, f"variation of integrated plane drifts {drift:.2e} from level 128 to 256 (<= 5%)")


def test_criterion_08_staircase_variation_diverges():
    src = make_source("t-parabola-sine")
    levels = (16, 32, 64, 128, 256, 512, 1024)
    trend = variation_trend(src, default_box("t-parabola-sine"), levels)
    vals = [v for _, v in trend]
    increasing = all(b > a for a, b in zip(vals, vals[1:]))
    slope = float(np.polyfit(np.log([lv for lv, _ in trend]), vals, 1)[0])
    ok = increasing and slope > 0.0
    _report(8, ok, f"grid variation strictly increases over levels 16..1024, slope {slope:.4f} vs log level")


def test_criterion_09_bounded_variation_graphs_have_dimension_two():
    src = make_source("plane")
    spec = GridSpec(UNIT_SQUARE, 1025, 1025)
    results = []
    for label, grid in (
        ("raw", lambda: sample(src, spec)),
        ("integral", lambda: katugampola_2d_grid(src, spec, HALF, QuadratureSpec(panels=64), method="separable")),
    ):
        t0 = time.perf_counter()
        fit = dimension_fit(grid(), default_deltas(spec), "lower")
        elapsed = time.perf_counter() - t0
        results.append((label, fit.slope, fit.r_squared, elapsed))
    ok = all(1.9 <= s <= 2.1 and r2 >= 0.98 and t < 60.0 for _, s, r2, t in results)
    detail = "; ".join(f"{lb} slope {s:.4f} (r2 {r2:.4f}, {t:.1f}s)" for lb, s, r2, t in results)
    _report(9, ok, detail)


def test_criterion_10_staircase_graph_has_dimension_two():
    src = make_source("t-parabola-sine")
    spec = GridSpec(default_box("t-parabola-sine"), 1025, 1025)
    fit = dimension_fit(sample(src, spec), default_deltas(spec), "lower")
    ok = 1.85 <= fit.slope <= 2.15
    _report(10, ok, f"staircase construction slope {fit.slope:.4f} in [1.85, 2.15]")


def test_criterion_11_integration_never_raises_dimension():
    raw_spec = GridSpec(default_box("weierstrass"), 1025, 1025)
    raw = dimension_fit(sample(make_source("weierstrass"), raw_spec), default_deltas(raw_spec), "lower").slope
    src, box = _positive("weierstrass")
    spec = GridSpec(box, 1025, 1025)
    gi = katugampola_2d_grid(src, spec, HALF, QuadratureSpec(panels=16384), method="separable")
    smoothed = dimension_fit(gi, default_deltas(spec), "lower").slope
    ok = smoothed <= 2.7 and smoothed <= raw
    _report(11, ok, f"integral slope {smoothed:.4f} <= 2.7 and <= raw slope {raw:.4f}")


def test_criterion_12_box_count_sandwich():
    violations = 0
    for name in catalog_names():
        src = make_source(name)
        box = src.domain if src.domain is not None else default_box(name)
        g = sample(src, GridSpec(box, 65, 65))
        side = min(box.width, box.height)
        for k in (4, 8, 16, 32):
            b = oscillation_counts(g, side / k)
            n = boxcount_bruteforce_3d(g, side / k)
            if not (b.n_lower <= n <= b.n_upper):
                violations += 1
    ok = violations == 0
    _report(12, ok, f"n_lower <= brute count <= n_upper for {len(catalog_names())} functions x 4 deltas ({violations} violations)")


def test_criterion_13_deterministic_cli_artifacts(tmp_path, monkeypatch, capsys):
    jobs = {
        "integrate": ["integrate", "--fn", "sinxy", "--alpha", ".5", "--beta", ".5", "--grid", "17,17", "--panels", "32"],
        "dimension": ["dimension", "--fn", "plane", "--grid", "129,129"],
        "variation": ["variation", "--fn", "t-parabola-sine", "--grid", "33,33"],
        "construct": ["construct", "--fn", "t-sine-parabola", "--grid", "33,17"],
        "verify": ["verify", "separable", "--g", "identity"],
    }
    stable = True
    for sub, argv in jobs.items():
        blobs = []
        for run, threads in enumerate(("8", "8", "1")):
            monkeypatch.setenv("FRACDIM2D_THREADS", threads)
            out = tmp_path / f"{sub}-{run}.out"
            full = argv + ["--out", str(out)]
            if sub == "dimension":
                full += ["--fit-out", str(tmp_path / f"{sub}-{run}.fit")]
            assert cli.main(full) == 0, sub
            blob = out.read_bytes()
            if sub == "dimension":
                blob += (tmp_path / f"{sub}-{run}.fit").read_bytes()
            blobs.append(blob)
        stable = stable and blobs[0] == blobs[1] == blobs[2]
    capsys.readouterr()
    ok = stable
    _report(13, ok, f"{len(jobs)} subcommand artifacts byte-identical across reruns and thread counts")
