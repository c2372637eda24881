"""Schema-validated readers for the run directory's CSV/JSON files."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np


class PlotInputError(RuntimeError):
    """Missing or malformed input; message names the file/row/column."""


def run_file(run_dir, name, required=True):
    path = Path(run_dir) / name
    if not path.exists():
        if required:
            raise PlotInputError(f"missing input file: {path}")
        return None
    return path


def read_csv(path, required_columns=()):
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines:
        raise PlotInputError(f"{path.name}: empty file")
    header = lines[0].split(",")
    for col in required_columns:
        if col not in header:
            raise PlotInputError(f"{path.name}: missing column {col!r}")
    columns = {h: [] for h in header}
    for ln, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != len(header):
            raise PlotInputError(f"{path.name}: row {ln} has {len(parts)} "
                                 f"fields, expected {len(header)}")
        for h, v in zip(header, parts):
            columns[h].append(v)
    return columns


def numeric(columns, name, path_name="csv"):
    try:
        return np.array([float(v) for v in columns[name]])
    except ValueError as exc:
        raise PlotInputError(f"{path_name}: column {name!r}: {exc}") from exc


def read_equilibrium(run_dir):
    path = run_file(run_dir, "equilibrium.json")
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise PlotInputError(f"equilibrium.json: {exc}") from exc
    for key in ("grid", "density", "kernel"):
        if key not in doc:
            raise PlotInputError(f"equilibrium.json: missing key {key!r}")
    return doc
