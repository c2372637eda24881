"""Interaction kernels, truncations, dimensional constants and scaling maps.

The pair interaction is either -log|x| (1D and 2D) or |x|^(-s) with
max(0, d-2) <= s < d.  The logarithmic case is carried as an explicit
kernel variant so that every downstream exponent N^(-s/d) etc. branches
exactly once, here, with the convention s = 0.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gamma as _gamma

LOG = "log"


class Scale(enum.Enum):
    MACRO = "macro"
    MICRO = "micro"


def cds_constant(d, s):
    """Constant c_{d,s} in front of the (possibly fractional) Laplacian.

    Three cases: strictly sub-Coulombic Riesz exponents, the Coulomb
    exponent s = d-2 > 0, and the logarithmic kernels (2*pi).
    """
    if s == LOG:
        if d not in (1, 2):
            raise ValueError(f"log kernel only defined for d in {{1,2}}, got d={d}")
        return 2.0 * math.pi
    d = int(d)
    s = float(s)
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    if not (max(0.0, d - 2.0) <= s < d):
        raise ValueError(f"need max(0, d-2) <= s < d, got d={d}, s={s}")
    if s == d - 2.0 and s > 0:
        return (d - 2.0) * 2.0 * math.pi ** (d / 2.0) / _gamma(d / 2.0)
    if s <= 0.0:
        # s = 0 numerically is the log convention; reject to avoid silent g == 1
        raise ValueError("s = 0 means the logarithmic kernel; pass s=LOG")
    return 2.0 * s * 2.0 * math.pi ** (d / 2.0) * _gamma((s + 2.0 - d) / 2.0) / _gamma((s + 2.0) / 2.0)


@dataclass(frozen=True)
class KernelSpec:
    """Interaction law: dimension d, exponent s (or LOG) and c_{d,s}."""

    d: int
    s: object  # float or the string LOG
    cds: float = field(default=None)

    def __post_init__(self):
        if self.d < 1 or int(self.d) != self.d:
            raise ValueError(f"d must be a positive integer, got {self.d}")
        c = cds_constant(self.d, self.s)  # validates (d, s)
        if self.cds is None:
            object.__setattr__(self, "cds", c)
        elif not math.isclose(self.cds, c, rel_tol=1e-12):
            raise ValueError(f"cds={self.cds} inconsistent with c_({self.d},{self.s})={c}")

    @property
    def is_log(self):
        return self.s == LOG

    @property
    def s_eff(self):
        """Exponent entering temperature/splitting scalings (0 in log cases)."""
        return 0.0 if self.is_log else float(self.s)


@dataclass(frozen=True)
class Configuration:
    """Ordered list of d-dimensional points with a macro/micro scale tag.

    Points are stored as an (n, d) float array.  MICRO configurations are
    MACRO ones with every coordinate multiplied by N^(1/d).
    """

    points: np.ndarray
    scale: Scale = Scale.MACRO

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        if pts.size == 0:
            pts = pts.reshape(0, max(pts.shape[-1], 1) if pts.ndim > 1 else 1)
        object.__setattr__(self, "points", pts)

    @property
    def n(self):
        return self.points.shape[0]

    @property
    def d(self):
        return self.points.shape[1]


def kernel_value(k: KernelSpec, r):
    """Evaluate g(r) for r > 0; raises on r <= 0 (coincident points)."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0.0):
        raise ValueError("kernel undefined at r <= 0 (coincident points)")
    if k.is_log:
        out = -np.log(r)
    else:
        out = r ** (-float(k.s))
    return float(out) if out.ndim == 0 else out


def truncated_kernel(k: KernelSpec, eta, r):
    """g_eta(r) = min(g(r), g(eta)): the kernel with its peak clipped at eta."""
    if not 0.0 < eta < 1.0:
        raise ValueError(f"eta must lie in (0, 1), got {eta}")
    g_eta_at = kernel_value(k, eta)
    return np.minimum(kernel_value(k, r), g_eta_at)


def truncation_excess(k: KernelSpec, eta, r):
    """f_eta(r) = (g(r) - g(eta))_+, the part clipped off by truncated_kernel."""
    if not 0.0 < eta < 1.0:
        raise ValueError(f"eta must lie in (0, 1), got {eta}")
    return np.maximum(kernel_value(k, r) - kernel_value(k, eta), 0.0)


def scale_configuration(C: Configuration, m) -> Configuration:
    """Rescale every point by m^(1/d) (the sigma_m map); keeps the scale tag."""
    if m <= 0:
        raise ValueError(f"scaling mass m must be positive, got {m}")
    factor = float(m) ** (1.0 / C.d)
    return Configuration(points=C.points * factor, scale=C.scale)


def close_pair_energy(C: Configuration, k: KernelSpec, eta):
    """Sum of g over ordered pairs closer than 2*eta (truncation-error diagnostic).

    Coincident pairs make the sum +inf (flagged, not raised) so samplers can
    treat such configurations as zero-acceptance states.
    """
    if not 0.0 < eta < 0.5:
        raise ValueError(f"eta must lie in (0, 1/2), got {eta}")
    pts = C.points
    n = pts.shape[0]
    if n < 2:
        return 0.0
    diff = pts[:, None, :] - pts[None, :, :]
    dist = np.sqrt((diff ** 2).sum(axis=-1))
    iu = np.triu_indices(n, k=1)
    dij = dist[iu]
    if np.any(dij == 0.0):
        return float("inf")
    mask = dij <= 2.0 * eta
    if not mask.any():
        return 0.0
    return float(2.0 * kernel_value(k, dij[mask]).sum())
