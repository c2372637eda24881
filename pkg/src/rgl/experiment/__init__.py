"""Config-driven reproducible experiment orchestration (CLI layer)."""

from .config import ConfigError, ExperimentConfig
from .runio import RunDirectory, read_csv, write_csv

__all__ = ["ConfigError", "ExperimentConfig", "RunDirectory", "read_csv",
           "write_csv"]
