#!/usr/bin/env python3
"""Grid-variation trends: bounded sources saturate, the staircase diverges.

Prints the maximal monotone-path variation of each surface on square
grids of doubling size.  The plane and its half-order integral settle
immediately (the integral of a nonnegative function is coordinatewise
monotone, so every level telescopes to the far-corner value); the
staircase construction keeps climbing because each refinement sees one
more affine copy of the seed.
"""
import argparse
import csv
import sys

from fracdim2d import (
    FracOrder,
    GridSpec,
    QuadratureSpec,
    arzela_variation,
    default_box,
    katugampola_2d_grid,
    make_source,
    variation_trend,
)


def integral_trend(name, levels, panels):
    """Variation of the half-order integral, quadrature run per level."""
    src = make_source(name)
    box = src.domain if src.domain is not None else default_box(name)
    out = []
    for level in levels:
        g = katugampola_2d_grid(
            src, GridSpec(box, level, level), FracOrder(0.5, 0.5), QuadratureSpec(panels=panels), method="separable"
        )
        out.append((level, arzela_variation(g).value))
    return out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--levels", default="16,32,64,128,256,512,1024", help="comma-separated grid sizes")
    ap.add_argument("--panels", type=int, default=48, help="quadrature panels for the integral column")
    ap.add_argument("--out", help="also write the table to this CSV file")
    args = ap.parse_args(argv)
    levels = [int(tok) for tok in args.levels.split(",")]

    columns = {}
    for name in ("plane", "sinxy", "t-parabola-sine", "t-sine-parabola"):
        src = make_source(name)
        box = src.domain if src.domain is not None else default_box(name)
        columns[name] = variation_trend(src, box, levels)
    columns["plane (integrated)"] = integral_trend("plane", levels, args.panels)

    names = list(columns)
    print("level  " + "  ".join(f"{n:>20}" for n in names))
    for i, level in enumerate(levels):
        cells = "  ".join(f"{columns[n][i][1]:>20.10f}" for n in names)
        print(f"{level:>5}  {cells}")
    if args.out:
        with open(args.out, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["level"] + names)
            for i, level in enumerate(levels):
                w.writerow([level] + [columns[n][i][1] for n in names])
        print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
