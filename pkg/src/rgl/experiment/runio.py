"""Run-directory I/O: CSV writing with fixed float formatting, manifests."""
from __future__ import annotations

import hashlib
import json
import time
from pathlib import Path

from .. import __version__

MANIFEST_NAME = "manifest.json"


def fmt(value):
    """Decimal rendering with 17 significant digits (round-trip exact)."""
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def write_csv(path, header, rows):
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")
    return path


def read_csv(path):
    """Rows as dicts of strings; raises naming the offending row on ragged input."""
    path = Path(path)
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ValueError(f"{path.name}: empty file")
    header = lines[0].split(",")
    rows = []
    for ln, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != len(header):
            raise ValueError(f"{path.name}: row {ln} has {len(parts)} fields, "
                             f"expected {len(header)}")
        rows.append(dict(zip(header, parts)))
    return header, rows


def write_json(path, obj):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(obj, fh, indent=1, sort_keys=True)
        fh.write("\n")


def sha256_file(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


class RunDirectory:
    """One directory per run; the manifest is written last, so a directory
    without one is incomplete by definition."""

    def __init__(self, root, run_id, config=None):
        self.path = Path(root) / run_id
        self.run_id = run_id
        self.config = config
        self.t0 = time.time()
        self.path.mkdir(parents=True, exist_ok=True)
        if config is not None:
            existing = self.path / "config.toml"
            if not existing.exists():
                with open(existing, "wb") as fh:
                    fh.write(config.text)

    def file(self, name):
        return self.path / name

    def write_manifest(self, seeds=()):
        files = {}
        for p in sorted(self.path.rglob("*")):
            if p.is_file() and p.name != MANIFEST_NAME:
                files[str(p.relative_to(self.path))] = sha256_file(p)
        manifest = {
            "config_sha256": self.config.sha256() if self.config else None,
            "code_version": __version__,
            "seeds": list(seeds),
            "wall_clock_s": time.time() - self.t0,
            "files": files,
        }
        write_json(self.file(MANIFEST_NAME), manifest)
        return manifest

    def is_complete(self):
        return self.file(MANIFEST_NAME).exists()
