"""Number variance vs window size, log-log, with the Poisson slope-1 line."""
from __future__ import annotations

from .io import PlotInputError, numeric, read_csv, run_file
from .render import cli_main, new_figure, save


def render(run_dir, out_path):
    path = run_file(run_dir, "number_variance.csv")
    cols = read_csv(path, required_columns=("R", "var", "stderr"))
    R = numeric(cols, "R", "number_variance.csv")
    var = numeric(cols, "var", "number_variance.csv")
    se = numeric(cols, "stderr", "number_variance.csv")
    if len(R) == 0:
        raise PlotInputError("number_variance.csv: no rows")

    fig, ax = new_figure()
    ax.errorbar(R, var, yerr=se, fmt="o-", capsize=3, label="Var[D(R)]")
    ax.plot(R, R, "k--", lw=1.0, label="Poisson: Var = R^d")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("R")
    ax.set_ylabel("number variance")
    ax.set_title("number variance (hyperuniformity)")
    ax.legend(loc="upper left", fontsize=8)
    save(fig, out_path)


def main():
    return cli_main(render, "number variance figure")


if __name__ == "__main__":
    raise SystemExit(main())
