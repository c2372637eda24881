"""Experiment configuration: a TOML document with nested tables, validated
against a closed schema (unknown keys are rejected so typos cannot silently
change a run)."""
from __future__ import annotations

import hashlib
from dataclasses import dataclass

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from ..equilibrium import GridSpec, PotentialSpec, SolverOpts
from ..kernels import LOG, KernelSpec


class ConfigError(ValueError):
    """Invalid experiment configuration; message carries the field path."""


_SCHEMA = {
    "kernel": {"d": int, "s": (int, float, str)},
    "potential": {"kind": str, "a": (int, float)},
    "grid": {"extent": list, "h": (int, float)},
    "model": {"N": int, "beta": (int, float), "beta_ladder": list},
    "sampler": {"n_burn": int, "n_sweeps": int, "thin": (int, float, str),
                "seed": int, "step_size": (int, float)},
    "analysis": {"n_tags": int, "R_w": (int, float), "R_list": list,
                 "cell": (int, float), "bulk_fraction": (int, float),
                 "r_max": (int, float), "n_r_bins": int},
    "free_energy": {"N_list": list, "lambda_grid": list, "n_lambda": int,
                    "n_burn": int, "n_sweeps": int, "thin": int},
    "reference": {"generator": str, "n_draws": int, "intensity": (int, float),
                  "window_side": (int, float), "lattice_kind": str,
                  "density": (int, float)},
    "solver": {"tolerance": (int, float), "max_iter": int},
    "output": {"directory": str, "run_id": str},
}

_REQUIRED = {
    "kernel": ("d", "s"),
    "potential": ("kind",),
    "grid": ("extent", "h"),
    "model": ("N",),
    "sampler": ("n_burn", "n_sweeps", "thin", "seed"),
    "output": ("directory",),
}

_OPTIONAL_SECTIONS = ("analysis", "free_energy", "reference", "solver")


def _check_section(name, table):
    if name not in _SCHEMA:
        raise ConfigError(f"unknown config section [{name}]")
    schema = _SCHEMA[name]
    for key, value in table.items():
        if key not in schema:
            raise ConfigError(f"unknown key {name}.{key}")
        want = schema[key]
        if not isinstance(value, want if isinstance(want, tuple) else (want,)):
            raise ConfigError(f"{name}.{key} has wrong type "
                              f"{type(value).__name__}")
    return table


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated configuration plus the raw bytes it was parsed from."""

    raw: dict
    text: bytes = b""

    @staticmethod
    def from_path(path):
        with open(path, "rb") as fh:
            data = fh.read()
        return ExperimentConfig.from_bytes(data)

    @staticmethod
    def from_bytes(data: bytes):
        try:
            doc = tomllib.loads(data.decode("utf-8"))
        except Exception as exc:
            raise ConfigError(f"config parse error: {exc}") from exc
        for name, table in doc.items():
            if not isinstance(table, dict):
                raise ConfigError(f"top-level key {name} must be a table")
            _check_section(name, table)
        for name, keys in _REQUIRED.items():
            if name not in doc:
                raise ConfigError(f"missing config section [{name}]")
            for key in keys:
                if key not in doc[name]:
                    raise ConfigError(f"missing key {name}.{key}")
        if "beta" not in doc["model"] and "beta_ladder" not in doc["model"]:
            raise ConfigError("missing key model.beta (or model.beta_ladder)")
        cfg = ExperimentConfig(raw=doc, text=data)
        cfg.kernel()
        cfg.potential()
        cfg.grid()
        return cfg

    def sha256(self):
        return hashlib.sha256(self.text).hexdigest()

    # --- typed accessors -----------------------------------------------
    def kernel(self) -> KernelSpec:
        kc = self.raw["kernel"]
        s = kc["s"]
        if isinstance(s, str):
            if s.lower() != "log":
                raise ConfigError(f"kernel.s string must be 'log', got {s!r}")
            s = LOG
        try:
            return KernelSpec(d=int(kc["d"]), s=s)
        except ValueError as exc:
            raise ConfigError(f"kernel: {exc}") from exc

    def potential(self) -> PotentialSpec:
        pc = self.raw["potential"]
        if pc["kind"] != "quadratic":
            raise ConfigError("config potentials support kind = 'quadratic' "
                              "(tabulated potentials are API-only)")
        try:
            return PotentialSpec(kind="quadratic", a=float(pc.get("a", 0.5)))
        except ValueError as exc:
            raise ConfigError(f"potential: {exc}") from exc

    def grid(self) -> GridSpec:
        gc = self.raw["grid"]
        extent = gc["extent"]
        if extent and not isinstance(extent[0], list):
            extent = [extent]
        try:
            return GridSpec(extent=tuple(tuple(map(float, e)) for e in extent),
                            h=float(gc["h"]))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"grid: {exc}") from exc

    def solver_opts(self) -> SolverOpts:
        sc = self.raw.get("solver", {})
        return SolverOpts(tolerance=float(sc.get("tolerance", 5e-3)),
                          max_iter=int(sc.get("max_iter", 20000)))

    def betas(self):
        mc = self.raw["model"]
        if "beta_ladder" in mc:
            ladder = [float(b) for b in mc["beta_ladder"]]
            if any(b2 <= b1 for b1, b2 in zip(ladder, ladder[1:])):
                raise ConfigError("model.beta_ladder must be strictly increasing")
            return ladder
        return [float(mc["beta"])]

    @property
    def N(self):
        return int(self.raw["model"]["N"])

    def sampler_params(self, seed_override=None):
        sc = self.raw["sampler"]
        thin = sc["thin"]
        if isinstance(thin, str):
            if thin.lower() not in ("inf", "none"):
                raise ConfigError(f"sampler.thin string must be 'inf', got {thin!r}")
            thin = None
        seed = int(seed_override) if seed_override is not None else int(sc["seed"])
        return {
            "n_burn": int(sc["n_burn"]),
            "n_sweeps": int(sc["n_sweeps"]),
            "thin": thin,
            "seed": seed,
            "step_size": float(sc["step_size"]) if "step_size" in sc else None,
        }

    def analysis_params(self):
        ac = self.raw.get("analysis", {})
        return {
            "n_tags": int(ac.get("n_tags", 200)),
            "R_w": float(ac.get("R_w", 8.0)),
            "R_list": [float(r) for r in ac.get("R_list", [2.0, 4.0, 8.0, 16.0])],
            "cell": float(ac.get("cell", 1.0)),
            "bulk_fraction": float(ac.get("bulk_fraction", 0.5)),
            "r_max": float(ac.get("r_max", 6.0)),
            "n_r_bins": int(ac.get("n_r_bins", 30)),
        }

    def free_energy_params(self):
        fc = self.raw.get("free_energy", {})
        return {
            "N_list": [int(n) for n in fc.get("N_list", [self.N])],
            "lambda_grid": [float(l) for l in fc["lambda_grid"]]
            if "lambda_grid" in fc else None,
            "n_lambda": int(fc.get("n_lambda", 24)),
            "n_burn": int(fc.get("n_burn", 400)),
            "n_sweeps": int(fc.get("n_sweeps", 3000)),
            "thin": int(fc.get("thin", 4)),
        }

    def reference_params(self):
        rc = self.raw.get("reference", {})
        return {
            "generator": rc.get("generator", "beta_hermite"),
            "n_draws": int(rc.get("n_draws", 64)),
            "intensity": float(rc.get("intensity", 1.0)),
            "window_side": float(rc.get("window_side", 32.0)),
            "lattice_kind": rc.get("lattice_kind", "Z_1D"),
            "density": float(rc.get("density", 1.0)),
        }

    @property
    def out_directory(self):
        return self.raw["output"]["directory"]

    @property
    def run_id(self):
        return self.raw["output"].get("run_id", self.sha256()[:12])
