"""Overlay of the equilibrium density and the sampled empirical histogram."""
from __future__ import annotations

import sys

import numpy as np

from .io import numeric, read_csv, read_equilibrium, run_file
from .render import cli_main, new_figure, save


def render(run_dir, out_path):
    eq = read_equilibrium(run_dir)
    extent = eq["grid"]["extent"]
    h = float(eq["grid"]["h"])
    density = np.asarray(eq["density"], dtype=float)
    d = len(extent)

    fig, ax = new_figure()
    if d == 1:
        lo, hi = extent[0]
        x = lo + (np.arange(len(density)) + 0.5) * h
        ax.plot(x, density, lw=1.8, label="equilibrium density")
        samples_path = run_file(run_dir, "samples.csv")
        cols = read_csv(samples_path, required_columns=("x1",))
        xs = numeric(cols, "x1", "samples.csv")
        if len(xs) > 0:
            bins = np.linspace(lo, hi, 121)
            ax.hist(xs, bins=bins, density=True, alpha=0.45,
                    label=f"samples (n={len(xs)})")
        else:
            print("warning: samples.csv has no rows; plotting density alone",
                  file=sys.stderr)
        ax.set_xlim(lo, hi)
        ax.set_xlabel("x")
        ax.set_ylabel("density")
    else:
        n = int(round(len(density) ** 0.5))
        img = density.reshape(n, n)
        ax.imshow(img.T, origin="lower",
                  extent=(extent[0][0], extent[0][1], extent[1][0], extent[1][1]))
        ax.set_xlabel("x1")
        ax.set_ylabel("x2")
    ax.set_title("equilibrium measure vs samples")
    if d == 1:
        ax.legend(loc="upper right", fontsize=8)
    save(fig, out_path)


def main():
    return cli_main(render, "density overlay figure")


if __name__ == "__main__":
    raise SystemExit(main())
