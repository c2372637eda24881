"""Energy traces along the chain: H_N and the next-order W_N."""
from __future__ import annotations

from .io import PlotInputError, numeric, read_csv, run_file
from .render import cli_main, new_figure, save


def render(run_dir, out_path):
    path = run_file(run_dir, "energy_trace.csv")
    cols = read_csv(path, required_columns=("sweep", "H_N", "W_N"))
    sweep = numeric(cols, "sweep", "energy_trace.csv")
    H = numeric(cols, "H_N", "energy_trace.csv")
    W = numeric(cols, "W_N", "energy_trace.csv")
    if len(sweep) == 0:
        raise PlotInputError("energy_trace.csv: no rows")

    fig, ax = new_figure()
    ax.plot(sweep, H, lw=0.9, color="tab:blue")
    ax.set_xlabel("sweep")
    ax.set_ylabel("H_N", color="tab:blue")
    ax2 = ax.twinx()
    ax2.plot(sweep, W, lw=0.9, color="tab:red")
    ax2.set_ylabel("W_N", color="tab:red")
    ax.set_title("energy trace")
    save(fig, out_path)


def main():
    return cli_main(render, "energy trace figure")


if __name__ == "__main__":
    raise SystemExit(main())
