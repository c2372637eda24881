"""Batch figure renderers for rgl run directories.

Each figure kind is one script taking --run DIR --out FILE (PNG or SVG by
extension).  Scripts only render columns that the run directory already
contains; they never recompute statistics.
"""

__version__ = "0.1.0"
