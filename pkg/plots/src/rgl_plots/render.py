"""Shared figure plumbing: fixed canvas, deterministic output, CLI glue."""
from __future__ import annotations

import argparse
import sys

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .io import PlotInputError  # noqa: E402

FIGSIZE = (6.4, 4.2)
DPI = 120


def new_figure():
    fig, ax = plt.subplots(figsize=FIGSIZE, dpi=DPI)
    return fig, ax


def save(fig, out_path):
    out_path = str(out_path)
    if not (out_path.endswith(".png") or out_path.endswith(".svg")):
        raise PlotInputError(f"output must be .png or .svg, got {out_path}")
    # strip volatile metadata so reruns are stable
    meta = {"Date": None} if out_path.endswith(".svg") else None
    fig.savefig(out_path, metadata=meta)
    plt.close(fig)


def cli_main(render_fn, description):
    ap = argparse.ArgumentParser(description=description)
    ap.add_argument("--run", required=True, help="run directory")
    ap.add_argument("--out", required=True, help="output image (.png or .svg)")
    args = ap.parse_args()
    try:
        render_fn(args.run, args.out)
    except PlotInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0
