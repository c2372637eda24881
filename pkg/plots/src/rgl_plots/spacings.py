"""Bulk nearest-neighbour spacing histogram."""
from __future__ import annotations

import numpy as np

from .io import numeric, read_csv, run_file
from .render import cli_main, new_figure, save


def render(run_dir, out_path):
    path = run_file(run_dir, "spacing.csv")
    cols = read_csv(path, required_columns=("bin_lo", "bin_hi", "count",
                                            "density"))
    lo = numeric(cols, "bin_lo", "spacing.csv")
    hi = numeric(cols, "bin_hi", "spacing.csv")
    dens = numeric(cols, "density", "spacing.csv")

    fig, ax = new_figure()
    if len(lo):
        ax.bar(lo, dens, width=hi - lo, align="edge", alpha=0.6,
               label="measured spacings")
        s = np.linspace(0.0, float(hi[-1]), 240)
        ax.plot(s, np.exp(-s), "k--", lw=1.0, label="Exp(1) (Poisson)")
        ax.set_xlim(0.0, float(hi[-1]))
    ax.set_xlabel("gap / mean gap")
    ax.set_ylabel("probability density")
    ax.set_title("bulk spacing distribution")
    ax.legend(loc="upper right", fontsize=8)
    save(fig, out_path)


def main():
    return cli_main(render, "spacing histogram figure")


if __name__ == "__main__":
    raise SystemExit(main())
