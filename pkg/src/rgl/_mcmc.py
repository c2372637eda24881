"""Numba-compiled inner loops for the Metropolis sampler.

All randomness is generated outside (numpy Generator) and passed in as
arrays, so trajectories are reproducible and chain state is serializable.
The logarithmic kernel accumulates distance ratios multiplicatively and
takes a single log per proposal, which is what makes N ~ 10^2..10^3
chains with 10^5 sweeps affordable.
"""
from __future__ import annotations

import numpy as np
from numba import njit

V_QUADRATIC = 0
V_TABLE_1D = 1


@njit(cache=True)
def pair_sum(pts, is_log, s):
    """sum over unordered pairs of g(|x_i - x_j|); inf on coincidence."""
    n, d = pts.shape
    total = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            r2 = 0.0
            for a in range(d):
                dx = pts[i, a] - pts[j, a]
                r2 += dx * dx
            if r2 == 0.0:
                return np.inf
            if is_log:
                total += -0.5 * np.log(r2)
            else:
                total += r2 ** (-0.5 * s)
    return total


@njit(cache=True, inline="always")
def _potential(x, d, v_kind, v_a, vx0, vh, vtab):
    if v_kind == V_QUADRATIC:
        r2 = 0.0
        for a in range(d):
            r2 += x[a] * x[a]
        return v_a * r2
    # 1D tabulated, linear interpolation with clamped ends
    t = (x[0] - vx0) / vh
    n = vtab.shape[0]
    if t <= 0.0:
        return vtab[0]
    if t >= n - 1.0:
        return vtab[n - 1]
    i0 = int(t)
    f = t - i0
    return vtab[i0] * (1.0 - f) + vtab[i0 + 1] * f


@njit(cache=True)
def run_sweeps(pts, is_log, s, v_kind, v_a, vx0, vh, vtab, n_model,
               b_pref, lam, step, normals, uniforms, h_start, h_trace):
    """Run uniforms.shape[0] sweeps of single-particle Metropolis updates.

    Moves target exp(-b_pref * (lam * H_N + (1 - lam) * H_ref)) where
    H_ref = n_model * sum |x|^2 / 2 (thermodynamic-integration path);
    lam = 1 is the plain gas.  Returns (accepted, H_N of final state).
    h_trace[t] receives the running H_N after sweep t.
    """
    nsweep = uniforms.shape[0]
    n, d = pts.shape
    h_cur = h_start
    accepted = 0
    y = np.empty(d)
    for t in range(nsweep):
        for i in range(n):
            for a in range(d):
                y[a] = pts[i, a] + step * normals[t, i, a]
            # pair-energy change
            coincident = False
            if is_log:
                ratio = 1.0
                acc_log = 0.0
                for j in range(n):
                    if j == i:
                        continue
                    r2n = 0.0
                    r2o = 0.0
                    for a in range(d):
                        dn = y[a] - pts[j, a]
                        do = pts[i, a] - pts[j, a]
                        r2n += dn * dn
                        r2o += do * do
                    if r2n == 0.0:
                        coincident = True
                        break
                    ratio *= r2o / r2n
                    if ratio > 1e280 or ratio < 1e-280:
                        acc_log += np.log(ratio)
                        ratio = 1.0
                dpair = 0.5 * (acc_log + np.log(ratio)) if not coincident else 0.0
            else:
                dpair = 0.0
                for j in range(n):
                    if j == i:
                        continue
                    r2n = 0.0
                    r2o = 0.0
                    for a in range(d):
                        dn = y[a] - pts[j, a]
                        do = pts[i, a] - pts[j, a]
                        r2n += dn * dn
                        r2o += do * do
                    if r2n == 0.0:
                        coincident = True
                        break
                    dpair += r2n ** (-0.5 * s) - r2o ** (-0.5 * s)
            if coincident:
                continue
            dv = _potential(y, d, v_kind, v_a, vx0, vh, vtab) - \
                _potential(pts[i], d, v_kind, v_a, vx0, vh, vtab)
            dH = 2.0 * dpair + n_model * dv
            if lam == 1.0:
                dU = b_pref * dH
            else:
                r2n = 0.0
                r2o = 0.0
                for a in range(d):
                    r2n += y[a] * y[a]
                    r2o += pts[i, a] * pts[i, a]
                dref = n_model * 0.5 * (r2n - r2o)
                dU = b_pref * (lam * dH + (1.0 - lam) * dref)
            if dU <= 0.0:
                accept = True
            elif dU > 700.0:
                accept = False
            else:
                accept = uniforms[t, i] < np.exp(-dU)
            if accept:
                for a in range(d):
                    pts[i, a] = y[a]
                h_cur += dH
                accepted += 1
        h_trace[t] = h_cur
    return accepted, h_cur
