"""Free-energy expansion coefficient a_N against N."""
from __future__ import annotations

from .io import PlotInputError, numeric, read_csv, run_file
from .render import cli_main, new_figure, save


def render(run_dir, out_path):
    path = run_file(run_dir, "expansion.csv")
    cols = read_csv(path, required_columns=("N", "a_N", "stderr"))
    N = numeric(cols, "N", "expansion.csv")
    a = numeric(cols, "a_N", "expansion.csv")
    se = numeric(cols, "stderr", "expansion.csv")
    if len(N) == 0:
        raise PlotInputError("expansion.csv: no rows")

    fig, ax = new_figure()
    ax.errorbar(N, a, yerr=se, fmt="s-", capsize=3)
    ax.set_xscale("log", base=2)
    ax.set_xlabel("N")
    ax.set_ylabel("a_N")
    ax.set_title("free-energy expansion: order-N coefficient")
    save(fig, out_path)


def main():
    return cli_main(render, "free-energy expansion figure")


if __name__ == "__main__":
    raise SystemExit(main())
