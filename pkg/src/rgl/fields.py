"""Microscopic statistics: empirical fields, configuration and field
distances, discrepancy and number variance, spacings, pair correlation,
a specific-relative-entropy surrogate and the rate-function assembly.

Boxes are the hypercubes C_R = [-R/2, R/2)^d (half-open, so lattice
counts match volumes exactly); a window of radius R_w is the box C_{2R_w}.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment, linprog
from scipy.stats import poisson as _poisson

from .gas import GasModel
from .kernels import Configuration, Scale

PAIR_BUDGET_ASSIGN = 2000   # max total points for the assignment route
PAIR_BUDGET_LP = 400        # max total points for the bounded-Lipschitz LP


# ----------------------------------------------------------------------------
# Empirical fields
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class EmpiricalField:
    """Finite-sample empirical field: (tag, recentred micro window) pairs."""

    tags: np.ndarray            # (n_tags, d) macro-scale tag points
    windows: tuple              # Configurations (MICRO) inside C_{2 R_w}
    window_radius: float
    N: int                      # blow-up parameter
    intensities: np.ndarray     # expected local intensity mu(tag) per window

    @property
    def n_windows(self):
        return len(self.windows)

    @property
    def d(self):
        return self.tags.shape[1]


def empirical_field(C: Configuration, model: GasModel, n_tags, R_w, seed=0) -> EmpiricalField:
    """Blow C up by N^(1/d) and cut windows around uniformly drawn tags in Sigma."""
    if R_w < 1:
        raise ValueError("window radius must be >= 1")
    if C.scale is not Scale.MACRO:
        raise ValueError("empirical_field expects a MACRO configuration")
    mu = model.mu
    mask = np.asarray(mu.support_mask)
    cells = np.flatnonzero(mask.ravel())
    if len(cells) == 0:
        raise ValueError("empty support: equilibrium measure has no support cells")
    rng = np.random.default_rng([int(seed), 0xF1E1D])
    sel = rng.choice(cells, size=int(n_tags), replace=True)
    centers = mu.grid.centers_flat()[sel]
    jitter = (rng.random((int(n_tags), mu.grid.d)) - 0.5) * mu.grid.h
    tags = centers + jitter

    scale = model.N ** (1.0 / model.kernel.d)
    micro = C.points * scale
    windows = []
    for tag in tags:
        center = tag * scale
        rel = micro - center[None, :]
        inside = np.all((rel >= -R_w) & (rel < R_w), axis=1)
        windows.append(Configuration(points=rel[inside].reshape(-1, C.d),
                                     scale=Scale.MICRO))
    intensities = np.atleast_1d(mu.density_at(tags))
    return EmpiricalField(tags=tags, windows=tuple(windows),
                          window_radius=float(R_w), N=model.N,
                          intensities=np.asarray(intensities, dtype=float))


def field_from_windows(windows, R_w, intensity, N=0, tags=None):
    """Wrap raw micro windows (e.g. Poisson or lattice draws) as a field."""
    windows = tuple(windows)
    d = windows[0].d if windows else 1
    n = len(windows)
    if tags is None:
        tags = np.zeros((n, d))
    return EmpiricalField(tags=np.asarray(tags, dtype=float), windows=windows,
                          window_radius=float(R_w), N=int(N),
                          intensities=np.full(n, float(intensity)))


# ----------------------------------------------------------------------------
# Distances
# ----------------------------------------------------------------------------

def _bounded_lipschitz_distance(P, Q):
    """sup { sum_P f - sum_Q f : |f| <= 1, Lip(f) <= 1 } for point sets P, Q.

    Equal counts reduce to optimal assignment with cost min(|x-y|, 2);
    unequal counts solve the dual linear program on the discrete support.
    """
    n, m = len(P), len(Q)
    if n == 0 and m == 0:
        return 0.0
    if n == m:
        cost = np.minimum(np.sqrt(((P[:, None, :] - Q[None, :, :]) ** 2).sum(-1)), 2.0)
        ri, ci = linear_sum_assignment(cost)
        return float(cost[ri, ci].sum())
    pts = np.concatenate([P, Q]) if n and m else (P if n else Q)
    npts = len(pts)
    if npts > PAIR_BUDGET_LP:
        raise ValueError(f"bounded-Lipschitz LP budget exceeded: {npts} points")
    sign = np.concatenate([np.ones(n), -np.ones(m)])
    # maximize sign . f  subject to  |f_i - f_j| <= d_ij, |f_i| <= 1
    dmat = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(-1))
    iu, ju = np.triu_indices(npts, k=1)
    n_pairs = len(iu)
    A = np.zeros((2 * n_pairs, npts))
    rows = np.arange(n_pairs)
    A[rows, iu] = 1.0
    A[rows, ju] = -1.0
    A[n_pairs + rows, iu] = -1.0
    A[n_pairs + rows, ju] = 1.0
    b = np.concatenate([dmat[iu, ju], dmat[iu, ju]])
    res = linprog(-sign, A_ub=A, b_ub=b, bounds=[(-1.0, 1.0)] * npts,
                  method="highs")
    if not res.success:
        raise RuntimeError(f"bounded-Lipschitz LP failed: {res.message}")
    return float(-res.fun)


def config_distance(C1: Configuration, C2: Configuration, K_max=20):
    """Distance on configurations: sum_k 2^-k min(1, d_k / ((n_k + n'_k) or 1))
    with d_k the bounded-Lipschitz distance between the restrictions to the
    cube C_k of side k."""
    if K_max < 1:
        raise ValueError("K_max must be >= 1")
    if C1.d != C2.d:
        raise ValueError("configurations live in different dimensions")
    total = 0.0
    for k in range(1, int(K_max) + 1):
        half = k / 2.0
        in1 = np.all((C1.points >= -half) & (C1.points < half), axis=1) \
            if C1.n else np.zeros(0, bool)
        in2 = np.all((C2.points >= -half) & (C2.points < half), axis=1) \
            if C2.n else np.zeros(0, bool)
        P = C1.points[in1] if C1.n else np.empty((0, C1.d))
        Q = C2.points[in2] if C2.n else np.empty((0, C2.d))
        n1, n2 = len(P), len(Q)
        if n1 + n2 > PAIR_BUDGET_ASSIGN:
            raise ValueError(f"K_max too large for point budget: cube {k} holds "
                             f"{n1 + n2} points")
        if n1 == 0 and n2 == 0:
            continue
        dk = _bounded_lipschitz_distance(P, Q)
        total += 2.0 ** (-k) * min(1.0, dk / max(n1 + n2, 1))
    return total


@dataclass(frozen=True)
class TestFunctionFamily:
    """Versioned family of local bounded test functionals on windows:
    soft point counts over shifted sub-boxes at dyadic scales."""

    __test__ = False  # not a pytest class, despite the name

    R_w: float
    version: str = "dyadic-v1"
    margin: float = 0.5
    members: tuple = field(default=None)

    def __post_init__(self):
        if self.members is None:
            scales = []
            s = 1.0
            while s <= self.R_w:
                scales.append(s)
                s *= 2.0
            members = []
            for s in scales:
                members.append((s, 0.0))
                members.append((s, s / 2.0))
            object.__setattr__(self, "members", tuple(members))

    def evaluate(self, window: Configuration):
        """Vector of member values on one window; each value lies in [0, 1]."""
        pts = window.points
        out = np.empty(len(self.members))
        for i, (s, shift) in enumerate(self.members):
            if pts.shape[0] == 0:
                out[i] = 0.0
                continue
            w = np.ones(pts.shape[0])
            for a in range(pts.shape[1]):
                c = shift if a == 0 else 0.0
                dist = np.abs(pts[:, a] - c)
                w *= np.clip((s / 2.0 + self.margin - dist) / self.margin, 0.0, 1.0)
            out[i] = min(1.0, w.sum() / s ** pts.shape[1])
        return out


def field_distance(F1: EmpiricalField, F2: EmpiricalField,
                   T: TestFunctionFamily = None):
    """max over the family of |mean over F1 - mean over F2|: a computable
    lower-bound surrogate of the Dudley distance between empirical fields."""
    if T is None:
        T = TestFunctionFamily(R_w=min(F1.window_radius, F2.window_radius))
    m1 = np.mean([T.evaluate(w) for w in F1.windows], axis=0)
    m2 = np.mean([T.evaluate(w) for w in F2.windows], axis=0)
    return float(np.max(np.abs(m1 - m2)))


# ----------------------------------------------------------------------------
# Counting statistics
# ----------------------------------------------------------------------------

def discrepancy(window: Configuration, intensity, R, window_radius=None):
    """(number of points in C_R) - intensity * R^d."""
    if window_radius is not None and R > 2.0 * window_radius:
        raise ValueError(f"R = {R} exceeds window extent {2 * window_radius}")
    pts = window.points
    half = R / 2.0
    if pts.shape[0]:
        count = int(np.sum(np.all((pts >= -half) & (pts < half), axis=1)))
        d = pts.shape[1]
    else:
        count = 0
        d = 1
    return count - intensity * R ** d


def number_variance_curve(fields: EmpiricalField, R_list):
    """Empirical Var[D(R)] across windows, with standard errors."""
    rows = []
    for R in R_list:
        if R > 2.0 * fields.window_radius:
            raise ValueError(f"R = {R} exceeds window extent "
                             f"{2 * fields.window_radius}")
        D = np.array([discrepancy(w, m, R)
                      for w, m in zip(fields.windows, fields.intensities)])
        n = len(D)
        var = float(D.var(ddof=1)) if n > 1 else float("nan")
        if n > 3:
            m4 = float(np.mean((D - D.mean()) ** 4))
            se = math.sqrt(max(m4 - (n - 3) / (n - 1) * var ** 2, 0.0) / n)
        else:
            se = float("nan")
        rows.append({"R": float(R), "var": var, "stderr": se, "n_windows": n})
    return rows


def spacing_histogram(configs, bulk_fraction=0.5, bins=40, range_max=4.0):
    """Nearest-neighbour gaps of the central bulk of 1D configurations,
    rescaled to unit mean.  Accepts a SampleSet or an iterable of
    configurations/arrays.  Returns gaps, histogram and bin edges."""
    if not 0 < bulk_fraction <= 1:
        raise ValueError("bulk_fraction must lie in (0, 1]")
    if hasattr(configs, "configs"):  # a sampler SampleSet
        configs = configs.configs
    gaps = []
    for c in configs:
        pts = c.points if isinstance(c, Configuration) else np.asarray(c)
        x = np.sort(np.ravel(pts))
        n = len(x)
        if n < 16:
            raise ValueError("need at least 16 points per configuration")
        drop = int(round(n * (1.0 - bulk_fraction) / 2.0))
        xs = x[drop: n - drop]
        if len(xs) >= 2:
            gaps.append(np.diff(xs))
    gaps = np.concatenate(gaps)
    gaps = gaps / gaps.mean()
    hist, edges = np.histogram(gaps, bins=bins, range=(0.0, range_max))
    return {"gaps": gaps, "hist": hist, "bin_edges": edges}


def pair_correlation(fields: EmpiricalField, r_bins):
    """Isotropic pair correlation normalized by intensity^2, with the
    translation (box-intersection volume) edge correction."""
    r_bins = np.asarray(r_bins, dtype=float)
    if np.any(r_bins > 2.0 * fields.window_radius):
        raise ValueError("r bins exceed the window extent")
    side = 2.0 * fields.window_radius
    d = fields.d
    acc = np.zeros(len(r_bins) - 1)
    for w, m in zip(fields.windows, fields.intensities):
        pts = w.points
        n = pts.shape[0]
        if n < 2:
            continue
        diff = pts[:, None, :] - pts[None, :, :]
        iu = np.triu_indices(n, k=1)
        v = diff[iu]
        r = np.sqrt((v ** 2).sum(axis=1))
        gamma = np.prod(np.maximum(side - np.abs(v), 0.0), axis=1)
        ok = gamma > 0
        idx = np.searchsorted(r_bins, r[ok], side="right") - 1
        good = (idx >= 0) & (idx < len(acc))
        # ordered pairs: weight each unordered pair twice
        np.add.at(acc, idx[good], 2.0 / (gamma[ok][good] * m ** 2))
    if d == 1:
        shell = 2.0 * np.diff(r_bins)
    elif d == 2:
        shell = math.pi * np.diff(r_bins ** 2)
    else:
        raise NotImplementedError("pair correlation implemented for d <= 2")
    nw = max(fields.n_windows, 1)
    g2 = acc / (shell * nw)
    mid = 0.5 * (r_bins[1:] + r_bins[:-1])
    return [{"r": float(r), "g2": float(g), "shell": float(s)}
            for r, g, s in zip(mid, g2, shell)]


# ----------------------------------------------------------------------------
# Entropy surrogate and rate function
# ----------------------------------------------------------------------------

def entropy_rate_estimate(windows, cell, window_side, min_cells=1000):
    """Factorized lower-bound surrogate of the specific relative entropy
    with respect to the unit Poisson process.

    Each window is partitioned into (L/cell)^d cells; the count law of
    every cell index is estimated across windows and compared (KL) to the
    Poisson(cell^d) reference; per-index KLs are averaged and divided by
    the cell volume.  Exact for Poisson inputs, diverging for periodic
    ones as the cell shrinks; inter-cell correlations are ignored.
    """
    if isinstance(windows, EmpiricalField):
        windows = windows.windows
    windows = list(windows)
    if not windows:
        raise ValueError("no windows supplied")
    d = windows[0].d
    n_per = round(window_side / cell)
    if abs(n_per * cell - window_side) > 1e-9 * window_side:
        raise ValueError("cell size must divide the window side")
    n_cells_per_window = n_per ** d
    total_cells = n_cells_per_window * len(windows)
    if total_cells < min_cells:
        raise ValueError(f"insufficient data: {total_cells} cells < required "
                         f"minimum {min_cells}")

    half = window_side / 2.0
    counts = np.zeros((len(windows), n_cells_per_window), dtype=np.int64)
    for wi, w in enumerate(windows):
        pts = w.points
        if pts.shape[0] == 0:
            continue
        inside = np.all((pts >= -half) & (pts < half), axis=1)
        pts = pts[inside]
        idx = np.zeros(pts.shape[0], dtype=np.int64)
        for a in range(d):
            ia = np.floor((pts[:, a] + half) / cell).astype(np.int64)
            ia = np.clip(ia, 0, n_per - 1)
            idx = idx * n_per + ia
        np.add.at(counts[wi], idx, 1)

    vol = cell ** d
    # reference support truncated at the 1 - 1e-6 quantile with tail lumping
    kmax = int(_poisson.ppf(1.0 - 1e-6, vol))
    kmax = max(kmax, int(counts.max()), 1)
    ref = _poisson.pmf(np.arange(kmax + 1), vol)
    ref[-1] = max(1.0 - ref[:-1].sum(), 1e-300)

    n_w = counts.shape[0]
    kl_sum = 0.0
    for ci in range(n_cells_per_window):
        col = np.minimum(counts[:, ci], kmax)
        freq = np.bincount(col, minlength=kmax + 1).astype(float) / n_w
        nz = freq > 0
        kl_sum += float(np.sum(freq[nz] * np.log(freq[nz] / ref[nz])))
    return max(kl_sum / n_cells_per_window / vol, 0.0)


def rate_function_estimate(W_hat, Ent_hat, beta, sigma_volume):
    """F_beta = W/2 + (Ent + 1 - |Sigma|) / beta, assembled from estimates."""
    if beta <= 0:
        raise ValueError("beta must be positive")
    for v in (W_hat, Ent_hat, sigma_volume):
        if not math.isfinite(v):
            raise ValueError("rate function inputs must be finite")
    return 0.5 * W_hat + (Ent_hat + 1.0 - sigma_volume) / beta


# ----------------------------------------------------------------------------
# Sample-law distances
# ----------------------------------------------------------------------------

def ks_two_sample(x, y):
    """Two-sample Kolmogorov-Smirnov statistic."""
    xs = np.sort(np.asarray(x, dtype=float))
    ys = np.sort(np.asarray(y, dtype=float))
    allv = np.concatenate([xs, ys])
    allv.sort(kind="mergesort")
    fx = np.searchsorted(xs, allv, side="right") / len(xs)
    fy = np.searchsorted(ys, allv, side="right") / len(ys)
    return float(np.abs(fx - fy).max())


def ks_to_cdf(x, cdf):
    """One-sample KS statistic against a callable CDF."""
    xs = np.sort(np.asarray(x, dtype=float))
    n = len(xs)
    F = np.asarray(cdf(xs), dtype=float)
    up = np.arange(1, n + 1) / n - F
    dn = F - np.arange(0, n) / n
    return float(max(up.max(), dn.max()))


def wasserstein1_to_measure(points, mu):
    """W1 distance between the empirical measure of 1D points and a solved
    1D equilibrium measure: exact integral of |F_hat - F_mu|."""
    if mu.grid.d != 1:
        raise ValueError("wasserstein1_to_measure requires d = 1")
    x = np.sort(np.ravel(np.asarray(points, dtype=float)))
    n = len(x)
    lo = mu.grid.extent[0][0]
    hi = mu.grid.extent[0][1]
    edges = np.concatenate([[lo], lo + (np.arange(len(mu.masses)) + 1) * mu.grid.h])
    cumM = np.concatenate([[0.0], np.cumsum(mu.masses)])
    cumM /= cumM[-1]

    def F_mu(t):
        return np.interp(t, edges, cumM, left=0.0, right=1.0)

    breaks = np.unique(np.concatenate([x, edges, [min(x[0], lo), max(x[-1], hi)]]))
    total = 0.0
    for a, b in zip(breaks[:-1], breaks[1:]):
        # F_hat constant on (a, b); F_mu linear
        Fh = np.searchsorted(x, a, side="right") / n
        ga = Fh - F_mu(a)
        gb = Fh - F_mu(b)
        dt = b - a
        if ga * gb >= 0:
            total += 0.5 * (abs(ga) + abs(gb)) * dt
        else:
            total += 0.5 * (ga ** 2 + gb ** 2) / (abs(ga) + abs(gb)) * dt
    return float(total)
