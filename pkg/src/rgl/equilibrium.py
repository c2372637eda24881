"""Equilibrium measure solver and Frostman certificates.

The mean-field energy I(mu) = iint g(x-y) dmu dmu + int V dmu is minimized
over probability densities on a uniform grid.  The kernel's integrable
singularity is handled by exact (1D) or semi-analytic (2D) cell-pair
averages, so the discrete functional is a faithful quadrature of I even
on the diagonal.  The minimizer is certified through the Frostman
conditions: zeta = H^mu + V/2 - c >= 0 everywhere, = 0 on the support.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import fftconvolve

from .kernels import LOG, KernelSpec


# ----------------------------------------------------------------------------
# Potentials and grids
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class PotentialSpec:
    """Confining potential.  kind 'quadratic' means V(x) = a*|x|^2."""

    kind: str = "quadratic"
    a: float = 0.5
    grid: object = None          # for kind == 'tabulated'
    values: np.ndarray = None    # for kind == 'tabulated'

    def __post_init__(self):
        if self.kind not in ("quadratic", "tabulated"):
            raise ValueError(f"unknown potential kind {self.kind!r}")
        if self.kind == "quadratic" and self.a <= 0:
            raise ValueError("quadratic coefficient must be positive")
        if self.kind == "tabulated":
            if self.grid is None or self.values is None:
                raise ValueError("tabulated potential needs grid and values")
            vals = np.asarray(self.values, dtype=float)
            if not np.all(np.isfinite(vals)):
                raise ValueError("tabulated potential must be finite on its grid")
            object.__setattr__(self, "values", vals)

    def __call__(self, x):
        """Evaluate V at points: scalar / (n,) for d = 1, or (..., d) arrays."""
        x = np.asarray(x, dtype=float)
        if self.kind == "quadratic":
            if x.ndim <= 1:
                return self.a * x ** 2
            return self.a * np.sum(x ** 2, axis=-1)
        return self.grid.interpolate(self.values, x)

    def cell_averages(self, grid):
        """Exact cell averages of V on a grid (quadratic case), else node values."""
        c = grid.centers_nd()
        if self.kind == "quadratic":
            r2 = np.sum(c ** 2, axis=-1)
            return self.a * (r2 + grid.d * grid.h ** 2 / 12.0)
        vals = self.grid.interpolate(self.values, c.reshape(-1, grid.d))
        return np.asarray(vals).reshape(grid.shape)


@dataclass(frozen=True)
class GridSpec:
    """Uniform d-dimensional grid of cubic cells (spacing h) covering a box."""

    extent: tuple   # ((lo, hi),) * d
    h: float

    def __post_init__(self):
        ext = self.extent
        if np.ndim(ext) == 1:
            ext = (tuple(ext),)
        ext = tuple(tuple(map(float, e)) for e in ext)
        if self.h <= 0:
            raise ValueError("grid spacing must be positive")
        for lo, hi in ext:
            if hi <= lo:
                raise ValueError("grid extent must have hi > lo")
        object.__setattr__(self, "extent", ext)

    @property
    def d(self):
        return len(self.extent)

    @property
    def shape(self):
        return tuple(int(round((hi - lo) / self.h)) for lo, hi in self.extent)

    def axes(self):
        """Cell-center coordinates along each axis."""
        return [lo + (np.arange(n) + 0.5) * self.h
                for (lo, hi), n in zip(self.extent, self.shape)]

    def centers_nd(self):
        """(n1, ..., nd, d) array of cell centers."""
        mesh = np.meshgrid(*self.axes(), indexing="ij")
        return np.stack(mesh, axis=-1)

    def centers_flat(self):
        return self.centers_nd().reshape(-1, self.d)

    def contains(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        ok = np.ones(x.shape[0], dtype=bool)
        for i, (lo, hi) in enumerate(self.extent):
            ok &= (x[:, i] >= lo) & (x[:, i] <= hi)
        return ok

    def interpolate(self, values, x):
        """Multilinear interpolation of a grid array at points x (clamped)."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        vals = np.asarray(values, dtype=float).reshape(self.shape)
        idx = []
        frac = []
        for i, (lo, hi) in enumerate(self.extent):
            n = self.shape[i]
            t = (x[:, i] - lo) / self.h - 0.5
            t = np.clip(t, 0.0, n - 1.0)
            i0 = np.clip(np.floor(t).astype(int), 0, n - 2) if n > 1 else np.zeros(len(t), int)
            idx.append(i0)
            frac.append(t - i0)
        if self.d == 1:
            i0, f = idx[0], frac[0]
            out = vals[i0] * (1 - f) + vals[np.minimum(i0 + 1, self.shape[0] - 1)] * f
        elif self.d == 2:
            i0, j0 = idx
            fi, fj = frac
            i1 = np.minimum(i0 + 1, self.shape[0] - 1)
            j1 = np.minimum(j0 + 1, self.shape[1] - 1)
            out = (vals[i0, j0] * (1 - fi) * (1 - fj) + vals[i1, j0] * fi * (1 - fj)
                   + vals[i0, j1] * (1 - fi) * fj + vals[i1, j1] * fi * fj)
        else:
            raise NotImplementedError("interpolation implemented for d <= 2")
        return out if out.shape[0] > 1 else float(out[0])


@dataclass(frozen=True)
class SolverOpts:
    tolerance: float = 5e-3
    max_iter: int = 20000
    density_floor: float = 1e-6   # support mask: density > floor * max density
    polish: bool = True           # active-set refinement after first-order phase
    check_every: int = 25


# ----------------------------------------------------------------------------
# Cell-averaged kernel tables
# ----------------------------------------------------------------------------

def _second_antiderivative_1d(k: KernelSpec, z):
    """G with G''(z) = g(|z|) for the 1D kernels; G(0) = 0."""
    z = np.asarray(z, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        if k.is_log:
            out = np.where(z == 0.0, 0.0, 0.75 * z ** 2 - 0.5 * z ** 2 * np.log(np.abs(z)))
        else:
            s = float(k.s)
            out = np.abs(z) ** (2.0 - s) / ((1.0 - s) * (2.0 - s))
    return out


def _pair_table_1d(k: KernelSpec, n, h):
    """Exact cell-pair averages of g for all offsets -(n-1)..(n-1)."""
    m = np.arange(-(n - 1), n)
    z = m * h
    G = _second_antiderivative_1d
    return (G(k, z + h) - 2.0 * G(k, z) + G(k, z - h)) / h ** 2


def _reduced_cell_avg_2d(k: KernelSpec, m1, m2, order=64):
    """avg of g over a unit-spacing cell pair at integer offset (m1, m2).

    Computed in reduced coordinates: int over [-1,1]^2 of the triangular
    kernel (1-|w1|)(1-|w2|) g(|w + m|).  The offset (0,0) is handled in
    polar coordinates (integrable singularity), the rest by tensor Gauss.
    """
    if m1 == 0 and m2 == 0:
        # octant decomposition: 8 * int_0^{pi/4} int_0^{1/cos t} wgt * g(r) r dr dt
        t, wt = np.polynomial.legendre.leggauss(order)
        theta = (t + 1.0) * (math.pi / 8.0)
        wq = wt * (math.pi / 8.0)
        c, s = np.cos(theta), np.sin(theta)
        R = 1.0 / c

        def mom(p):
            # int_0^R r^p dr and int_0^R r^p (-ln r) dr
            plain = R ** (p + 1) / (p + 1)
            logm = -R ** (p + 1) * np.log(R) / (p + 1) + R ** (p + 1) / (p + 1) ** 2
            return plain, logm

        if k.is_log:
            # weight (1-r c)(1-r s) = 1 - r(c+s) + r^2 c s; g = -ln r
            _, l1 = mom(1)
            _, l2 = mom(2)
            _, l3 = mom(3)
            inner = l1 - (c + s) * l2 + (c * s) * l3
            return float(8.0 * np.sum(wq * inner))
        sx = float(k.s)
        p1 = R ** (2 - sx) / (2 - sx)
        p2 = R ** (3 - sx) / (3 - sx)
        p3 = R ** (4 - sx) / (4 - sx)
        inner = p1 - (c + s) * p2 + (c * s) * p3
        return float(8.0 * np.sum(wq * inner))
    t, wt = np.polynomial.legendre.leggauss(order)
    W1, W2 = np.meshgrid(t, t, indexing="ij")
    WW = np.outer(wt, wt)
    r = np.sqrt((W1 + m1) ** 2 + (W2 + m2) ** 2)
    wgt = (1.0 - np.abs(W1)) * (1.0 - np.abs(W2))
    with np.errstate(divide="ignore"):
        g = -np.log(r) if k.is_log else r ** (-float(k.s))
    g = np.where(wgt == 0.0, 0.0, g)
    return float(np.sum(WW * wgt * g))


_REDUCED_CACHE = {}


def _pair_table_2d(k: KernelSpec, shape, h, near=2):
    """Cell-pair averages of g on a 2D grid: center values, corrected near 0."""
    n1, n2 = shape
    m1 = np.arange(-(n1 - 1), n1)
    m2 = np.arange(-(n2 - 1), n2)
    M1, M2 = np.meshgrid(m1, m2, indexing="ij")
    r = h * np.sqrt(M1.astype(float) ** 2 + M2.astype(float) ** 2)
    with np.errstate(divide="ignore"):
        tab = -np.log(r) if k.is_log else r ** (-float(k.s))
    key0 = (k.is_log, None if k.is_log else float(k.s))
    for a in range(-near, near + 1):
        for b in range(-near, near + 1):
            key = (key0, abs(a), abs(b)) if abs(a) >= abs(b) else (key0, abs(b), abs(a))
            if key not in _REDUCED_CACHE:
                _REDUCED_CACHE[key] = _reduced_cell_avg_2d(k, key[1], key[2])
            red = _REDUCED_CACHE[key]
            val = (red - math.log(h)) if k.is_log else red * h ** (-float(k.s))
            tab[n1 - 1 + a, n2 - 1 + b] = val
    return tab


def _kernel_table(k: KernelSpec, grid: GridSpec):
    if grid.d == 1:
        return _pair_table_1d(k, grid.shape[0], grid.h)
    if grid.d == 2:
        return _pair_table_2d(k, grid.shape, grid.h)
    raise NotImplementedError("equilibrium solver supports d in {1, 2}")


def _apply_kernel(table, p):
    """(table * p)_i = sum_j table[i-j] p_j via FFT convolution."""
    if p.ndim == 1:
        return fftconvolve(table, p, mode="valid") if len(p) > 1 else table[[0]] * p
    return fftconvolve(table, p, mode="valid")


# ----------------------------------------------------------------------------
# The equilibrium measure object
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class EquilibriumMeasure:
    """Solved minimizer of the mean-field functional with its certificate."""

    kernel: KernelSpec
    potential: PotentialSpec
    grid: GridSpec
    density: np.ndarray       # grid-shaped, probability per unit volume
    zeta: np.ndarray          # grid-shaped effective potential H + V/2 - c
    support_mask: np.ndarray  # grid-shaped booleans
    energy_I: float
    frostman_c: float
    tolerance: float = 5e-3
    _table: np.ndarray = field(default=None, repr=False, compare=False)

    @property
    def sigma_volume(self):
        return float(self.support_mask.sum()) * self.grid.h ** self.grid.d

    @property
    def masses(self):
        return self.density * self.grid.h ** self.grid.d

    def density_at(self, x):
        return self.grid.interpolate(self.density, x)

    def zeta_interp(self, x):
        return self.grid.interpolate(self.zeta, x)

    def cdf_inverse(self, q):
        """Inverse CDF for d = 1 (piecewise-linear within cells)."""
        if self.grid.d != 1:
            raise ValueError("cdf_inverse requires d = 1")
        h = self.grid.h
        masses = np.asarray(self.masses, dtype=float)
        edges = np.concatenate([[self.grid.extent[0][0]],
                                self.grid.extent[0][0] + (np.arange(len(masses)) + 1) * h])
        cum = np.concatenate([[0.0], np.cumsum(masses)])
        cum = cum / cum[-1]
        q = np.asarray(q, dtype=float)
        return np.interp(q, cum, edges)

    def to_json_dict(self):
        kern = {"d": self.kernel.d,
                "s": "log" if self.kernel.is_log else float(self.kernel.s),
                "cds": self.kernel.cds}
        return {
            "kernel": kern,
            "grid": {"extent": [list(e) for e in self.grid.extent], "h": self.grid.h},
            "density": np.asarray(self.density).ravel().tolist(),
            "zeta": np.asarray(self.zeta).ravel().tolist(),
            "energy_I": self.energy_I,
            "frostman_c": self.frostman_c,
            "support_mask": np.asarray(self.support_mask).ravel().astype(int).tolist(),
        }

    def to_json(self):
        return json.dumps(self.to_json_dict(), indent=1, sort_keys=True)

    @staticmethod
    def from_json_dict(doc, potential: PotentialSpec, tolerance=5e-3):
        kern = doc["kernel"]
        k = KernelSpec(d=int(kern["d"]),
                       s=LOG if kern["s"] == "log" else float(kern["s"]))
        grid = GridSpec(extent=tuple(tuple(e) for e in doc["grid"]["extent"]),
                        h=float(doc["grid"]["h"]))
        shape = grid.shape
        dens = np.asarray(doc["density"], dtype=float).reshape(shape)
        zeta = np.asarray(doc["zeta"], dtype=float).reshape(shape)
        mask = np.asarray(doc["support_mask"], dtype=int).reshape(shape).astype(bool)
        return EquilibriumMeasure(kernel=k, potential=potential, grid=grid,
                                  density=dens, zeta=zeta, support_mask=mask,
                                  energy_I=float(doc["energy_I"]),
                                  frostman_c=float(doc["frostman_c"]),
                                  tolerance=tolerance)


# ----------------------------------------------------------------------------
# Operations
# ----------------------------------------------------------------------------

def mean_field_energy(density, V: PotentialSpec, k: KernelSpec, grid: GridSpec,
                      mass_tol=1e-6):
    """I(mu) with singularity-corrected quadrature (exact cell-pair averages)."""
    dens = np.asarray(density, dtype=float).reshape(grid.shape)
    if np.any(dens < -1e-15):
        raise ValueError("density must be nonnegative")
    hv = grid.h ** grid.d
    p = dens * hv
    mass = p.sum()
    if abs(mass - 1.0) > mass_tol:
        raise ValueError(f"density not normalized: mass = {mass}")
    table = _kernel_table(k, grid)
    Kp = _apply_kernel(table, p)
    v = V.cell_averages(grid)
    return float(np.sum(p * Kp) + np.sum(v * p))


def _project_simplex(v):
    """Euclidean projection of a vector onto the probability simplex."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    ind = np.arange(1, len(u) + 1)
    cond = u - css / ind > 0
    rho = ind[cond][-1]
    tau = css[rho - 1] / rho
    return np.maximum(v - tau, 0.0)


def _lipschitz_estimate(table, shape, iters=40, seed=0):
    """Largest |eigenvalue| of the kernel operator on the zero-mean subspace."""
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(shape)
    x -= x.mean()
    x /= np.linalg.norm(x)
    lam = 1.0
    for _ in range(iters):
        y = _apply_kernel(table, x)
        y -= y.mean()
        lam = np.linalg.norm(y)
        if lam == 0:
            return 1.0
        x = y / lam
    return lam


class EquilibriumError(RuntimeError):
    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


def _residuals(zeta, p, floor_mass):
    support = p > floor_mass * p.max()
    max_negative = float(max(0.0, -zeta.min()))
    max_on_support = float(np.abs(zeta[support]).max())
    return max_negative, max_on_support, support


def _active_set_polish(table, v, p, tol, max_rounds=40, max_active=9000):
    """Solve the KKT system exactly on the current support, updating the
    active set until the Frostman conditions hold at quadrature precision."""
    shape = p.shape
    flat_table = table
    n = p.size
    pf = p.ravel()
    active = pf > 1e-12 * pf.max()
    if grid_gather_size(active) > max_active:
        return p, False

    idx_nd = np.unravel_index(np.arange(n), shape)
    for _ in range(max_rounds):
        ids = np.flatnonzero(active)
        m = len(ids)
        if m == 0 or m > max_active:
            return p, False
        # gather pairwise cell averages for active cells
        if len(shape) == 1:
            off = ids[:, None] - ids[None, :] + (shape[0] - 1)
            A = flat_table[off]
        else:
            i1 = idx_nd[0][ids]
            i2 = idx_nd[1][ids]
            o1 = i1[:, None] - i1[None, :] + (shape[0] - 1)
            o2 = i2[:, None] - i2[None, :] + (shape[1] - 1)
            A = flat_table[o1, o2]
        vb = v.ravel()[ids]
        M = np.zeros((m + 1, m + 1))
        M[:m, :m] = 2.0 * A
        M[:m, m] = -1.0
        M[m, :m] = 1.0
        rhs = np.concatenate([-vb, [1.0]])
        try:
            sol = np.linalg.solve(M, rhs)
        except np.linalg.LinAlgError:
            return p, False
        ps = sol[:m]
        if ps.min() < 0.0:
            drop = ps < 0.0
            active[ids[drop]] = False
            continue
        pf = np.zeros(n)
        pf[ids] = ps
        p_new = pf.reshape(shape)
        Kp = _apply_kernel(flat_table, p_new)
        c = float(np.sum(p_new * Kp) + np.sum(v * p_new) - np.sum(v * p_new) / 2.0)
        zeta = Kp + v / 2.0 - c
        viol = (zeta.ravel() < -0.25 * tol) & (~active)
        if viol.any():
            active[viol] = True
            continue
        return p_new, True
    return p, False


def grid_gather_size(active):
    return int(active.sum())


def solve_equilibrium(V: PotentialSpec, k: KernelSpec, grid: GridSpec,
                      opts: SolverOpts = SolverOpts()) -> EquilibriumMeasure:
    """Minimize the discretized mean-field energy over the probability simplex.

    Accelerated projected gradient (monotone FISTA with restart), warm
    started from the normalized Gibbs factor exp(-V), followed by an
    active-set refinement that solves the first-order conditions exactly
    on the discovered support.  Returns the certified measure; raises
    EquilibriumError if the residual budget cannot be met or the support
    touches the grid boundary.
    """
    table = _kernel_table(k, grid)
    v = V.cell_averages(grid)
    shape = grid.shape

    p = np.exp(-(v - v.min()))
    p = p / p.sum()

    L = 2.0 * _lipschitz_estimate(table, shape) + 1e-12
    step = 1.0 / L

    def energy(q):
        Kq = _apply_kernel(table, q)
        return float(np.sum(q * Kq) + np.sum(v * q)), Kq

    E, Kp = energy(p)
    y = p.copy()
    t_mom = 1.0
    best = (np.inf, np.inf)
    best_p = p
    stall = 0
    for it in range(opts.max_iter):
        Ky = _apply_kernel(table, y)
        grad = 2.0 * Ky + v
        q = _project_simplex((y - step * grad).ravel()).reshape(shape)
        Eq, Kq = energy(q)
        if Eq > E + 1e-15:
            # momentum restart; fall back to a plain projected-gradient step
            y = p
            t_mom = 1.0
            Ky = _apply_kernel(table, y)
            grad = 2.0 * Ky + v
            ls_step = step
            for _ in range(40):
                q = _project_simplex((y - ls_step * grad).ravel()).reshape(shape)
                Eq, Kq = energy(q)
                if Eq <= E + 1e-15:
                    break
                ls_step *= 0.5
        t_next = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * t_mom ** 2))
        y = q + ((t_mom - 1.0) / t_next) * (q - p)
        p, E, Kp, t_mom = q, Eq, Kq, t_next

        if (it + 1) % opts.check_every == 0:
            c = E - float(np.sum(v * p)) / 2.0
            zeta = Kp + v / 2.0 - c
            rneg, rsup, _ = _residuals(zeta, p, opts.density_floor)
            score = (max(rneg, rsup), E)
            if score < best:
                best = score
                best_p = p.copy()
                stall = 0
            else:
                stall += 1
            if best[0] < (0.2 * opts.tolerance if opts.polish else opts.tolerance):
                break
            if stall >= 40:
                break

    p = best_p
    polished = False
    if opts.polish:
        p, polished = _active_set_polish(table, v, p, opts.tolerance)

    p = np.maximum(p, 0.0)
    p = p / p.sum()
    Kp = _apply_kernel(table, p)
    E = float(np.sum(p * Kp) + np.sum(v * p))
    c = E - float(np.sum(v * p)) / 2.0
    zeta = Kp + v / 2.0 - c
    rneg, rsup, support = _residuals(zeta, p, opts.density_floor)
    if max(rneg, rsup) > opts.tolerance:
        raise EquilibriumError(
            f"equilibrium solver did not certify within budget: "
            f"max(-zeta) = {rneg:.3e}, max|zeta| on support = {rsup:.3e}",
            residuals=(rneg, rsup))

    # support may not touch the boundary of the computational box
    if grid.d == 1:
        touches = bool(support[0] or support[-1])
    else:
        touches = bool(support[0, :].any() or support[-1, :].any()
                       or support[:, 0].any() or support[:, -1].any())
    if touches:
        raise EquilibriumError("support touches the grid boundary: enlarge grid")

    hv = grid.h ** grid.d
    dens = p / hv
    return EquilibriumMeasure(kernel=k, potential=V, grid=grid, density=dens,
                              zeta=zeta, support_mask=support, energy_I=E,
                              frostman_c=c, tolerance=opts.tolerance,
                              _table=table)


def potential_of_measure(mu: EquilibriumMeasure, x):
    """H^mu(x) = int g(x-y) dmu(y), cell-averaged near x, centers far away."""
    grid = mu.grid
    k = mu.kernel
    x = np.atleast_2d(np.asarray(x, dtype=float))
    p = mu.masses
    out = np.empty(x.shape[0])
    if grid.d == 1:
        centers = grid.axes()[0]
        h = grid.h
        if k.is_log:
            def cell_int(z):  # int over one cell of -log|t| dt, z = x - center
                a_, b_ = z - h / 2.0, z + h / 2.0

                def F(t):
                    t = np.asarray(t, dtype=float)
                    with np.errstate(divide="ignore", invalid="ignore"):
                        r = np.where(t == 0.0, 0.0, t - t * np.log(np.abs(t)))
                    return r
                return (F(b_) - F(a_)) / h
        else:
            s = float(k.s)

            def cell_int(z):
                a_, b_ = z - h / 2.0, z + h / 2.0

                def F(t):
                    t = np.asarray(t, dtype=float)
                    return np.sign(t) * np.abs(t) ** (1.0 - s) / (1.0 - s)
                return (F(b_) - F(a_)) / h
        for i, xi in enumerate(x[:, 0]):
            out[i] = float(np.sum(p * cell_int(xi - centers)))
        return out if len(out) > 1 else float(out[0])

    centers = grid.centers_flat()
    pf = p.ravel()
    h = grid.h
    for i in range(x.shape[0]):
        dx = x[i][None, :] - centers
        r = np.sqrt((dx ** 2).sum(axis=1))
        with np.errstate(divide="ignore"):
            g = -np.log(r) if k.is_log else r ** (-float(k.s))
        near = r <= 2.5 * h
        if near.any():
            for j in np.flatnonzero(near):
                g[j] = _point_cell_avg_2d(k, dx[j], h)
        out[i] = float(np.sum(pf * g))
    return out if len(out) > 1 else float(out[0])


def _point_cell_avg_2d(k: KernelSpec, dx, h, order=24):
    """avg over a cell (centered at offset dx from x) of g(|x - y|)."""
    t, w = np.polynomial.legendre.leggauss(order)
    u = t * (h / 2.0)
    W = np.outer(w, w) * (h / 2.0) ** 2
    U1, U2 = np.meshgrid(u, u, indexing="ij")
    r = np.sqrt((dx[0] - U1) ** 2 + (dx[1] - U2) ** 2)
    r = np.maximum(r, 1e-300)
    g = -np.log(r) if k.is_log else r ** (-float(k.s))
    return float(np.sum(W * g)) / h ** 2


def zeta_value(mu: EquilibriumMeasure, x):
    """zeta(x) = H^mu(x) + V(x)/2 - c; grid interpolation inside, direct sum outside."""
    x_arr = np.atleast_2d(np.asarray(x, dtype=float))
    inside = mu.grid.contains(x_arr)
    out = np.empty(x_arr.shape[0])
    if inside.any():
        out[inside] = np.atleast_1d(mu.grid.interpolate(mu.zeta, x_arr[inside]))
    if (~inside).any():
        xs = x_arr[~inside]
        H = np.atleast_1d(potential_of_measure(mu, xs))
        Vx = np.atleast_1d(mu.potential(xs))
        out[~inside] = H + Vx / 2.0 - mu.frostman_c
    return out if out.shape[0] > 1 else float(out[0])


def frostman_residuals(mu: EquilibriumMeasure):
    """(max violation of zeta >= 0, max |zeta| on the support mask)."""
    rneg = float(max(0.0, -np.min(mu.zeta)))
    rsup = float(np.max(np.abs(mu.zeta[mu.support_mask])))
    return rneg, rsup
