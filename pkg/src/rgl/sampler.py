"""MCMC sampling of the Gibbs measure and free-energy estimation.

Single-particle Gaussian-proposal Metropolis with acceptance
min(1, exp(-(beta/2) N^(-s/d) dH)); step size adapted toward 30%
acceptance during burn-in only, frozen afterwards.  All randomness
comes from seeded numpy Generators, one canonical draw per sweep, so
trajectories are bit-reproducible and resumable from checkpoints.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from ._mcmc import V_QUADRATIC, V_TABLE_1D, pair_sum, run_sweeps
from .gas import GasModel
from .kernels import Configuration, Scale

_SWAP_STREAM = 0x5357
_ADAPT_TARGET = 0.30


@dataclass
class ChainState:
    """One MCMC replica: configuration, cached energy, RNG, step statistics."""

    config: Configuration
    cached_energy: float
    rng: np.random.Generator
    step_size: float
    accepted: int = 0
    proposed: int = 0

    def clone_rng(self):
        g = np.random.default_rng()
        g.bit_generator.state = self.rng.bit_generator.state
        return g

    def rng_state(self):
        return self.rng.bit_generator.state


@dataclass(frozen=True)
class SampleSet:
    """Snapshots plus diagnostics from one chain."""

    model: GasModel
    configs: tuple
    sweep_indices: tuple
    diagnostics: dict = field(default_factory=dict)

    def points_array(self):
        """(n_snapshots, N, d) stack of snapshot coordinates."""
        return np.stack([c.points for c in self.configs]) if self.configs else \
            np.empty((0, self.model.N, self.model.kernel.d))


def _v_params(model: GasModel):
    pot = model.potential
    if pot.kind == "quadratic":
        return V_QUADRATIC, float(pot.a), 0.0, 1.0, np.zeros(1)
    if pot.grid.d != 1:
        raise NotImplementedError("tabulated potentials are sampled in 1D only")
    axis = pot.grid.axes()[0]
    return V_TABLE_1D, 0.0, float(axis[0]), float(pot.grid.h), \
        np.ascontiguousarray(pot.values, dtype=float)


def _initial_points(model: GasModel, rng):
    """Draw N starting points from the equilibrium measure."""
    mu = model.mu
    N = model.N
    if mu.grid.d == 1:
        return mu.cdf_inverse(rng.random(N)).reshape(N, 1)
    masses = mu.masses.ravel()
    probs = masses / masses.sum()
    cells = rng.choice(len(probs), size=N, p=probs)
    centers = mu.grid.centers_flat()[cells]
    jitter = (rng.random((N, mu.grid.d)) - 0.5) * mu.grid.h
    return centers + jitter


def _full_energy(model: GasModel, pts):
    k = model.kernel
    pe = pair_sum(np.ascontiguousarray(pts), k.is_log, k.s_eff)
    return 2.0 * pe + model.N * float(np.sum(model.potential(pts)))


def _one_sweep(model: GasModel, pts, rng, step, h_cur, lam=1.0):
    """Advance pts (in place) by one sweep; returns (accepted, new H_N)."""
    N, d = pts.shape
    vk, va, vx0, vh, vtab = _v_params(model)
    normals = rng.standard_normal((1, N, d))
    uniforms = rng.random((1, N))
    htrace = np.empty(1)
    k = model.kernel
    acc, h_new = run_sweeps(pts, k.is_log, k.s_eff, vk, va, vx0, vh, vtab,
                            float(model.N), model.temperature_prefactor,
                            float(lam), float(step), normals, uniforms,
                            float(h_cur), htrace)
    return int(acc), float(h_new)


def init_chain(model: GasModel, seed, step_size=None, stream=0) -> ChainState:
    """Fresh chain: points drawn from mu, energy cached, seeded generator."""
    rng = np.random.default_rng([int(seed), int(stream)])
    pts = np.ascontiguousarray(_initial_points(model, rng))
    step = step_size if step_size is not None else \
        0.6 * model.N ** (-1.0 / model.kernel.d) / math.sqrt(max(model.beta, 0.05))
    cfg = Configuration(points=pts, scale=Scale.MACRO)
    return ChainState(config=cfg, cached_energy=_full_energy(model, pts),
                      rng=rng, step_size=float(step))


def metropolis_sweep(state: ChainState, model: GasModel, adapt=False,
                     adapt_gain=0.05) -> ChainState:
    """One sweep of N single-particle updates; returns the advanced state.

    The input state is left untouched (its generator is cloned).  With
    adapt=True the step size is nudged toward 30% acceptance; recorded
    samples must come from adapt=False sweeps to preserve detailed balance.
    """
    rng = state.clone_rng()
    pts = np.ascontiguousarray(state.config.points.copy())
    acc, h_new = _one_sweep(model, pts, rng, state.step_size, state.cached_energy)
    step = state.step_size
    if adapt:
        rate = acc / pts.shape[0]
        step = float(np.clip(step * math.exp(adapt_gain * (rate - _ADAPT_TARGET)),
                             1e-9, 1e3))
    return ChainState(config=Configuration(points=pts, scale=Scale.MACRO),
                      cached_energy=h_new, rng=rng, step_size=step,
                      accepted=state.accepted + acc,
                      proposed=state.proposed + pts.shape[0])


@dataclass
class ChainCheckpoint:
    """Everything needed to continue a chain bit-exactly at a sweep boundary."""

    sweep: int              # production sweeps completed
    points: np.ndarray
    rng_state: dict
    step_size: float
    cached_energy: float
    accepted: int = 0

    def to_json_dict(self):
        state = self.rng_state
        return {
            "sweep": self.sweep,
            "points": np.asarray(self.points).tolist(),
            "rng_state": {
                "bit_generator": state["bit_generator"],
                "state": {"state": str(state["state"]["state"]),
                          "inc": str(state["state"]["inc"])},
                "has_uint32": state["has_uint32"],
                "uinteger": state["uinteger"],
            },
            "step_size": self.step_size,
            "cached_energy": self.cached_energy,
            "accepted": self.accepted,
        }

    @staticmethod
    def from_json_dict(doc):
        rs = doc["rng_state"]
        state = {
            "bit_generator": rs["bit_generator"],
            "state": {"state": int(rs["state"]["state"]),
                      "inc": int(rs["state"]["inc"])},
            "has_uint32": rs["has_uint32"],
            "uinteger": rs["uinteger"],
        }
        return ChainCheckpoint(sweep=int(doc["sweep"]),
                               points=np.asarray(doc["points"], dtype=float),
                               rng_state=state,
                               step_size=float(doc["step_size"]),
                               cached_energy=float(doc["cached_energy"]),
                               accepted=int(doc.get("accepted", 0)))


def run_chain(model: GasModel, n_burn, n_sweeps, thin=1, seed=0,
              step_size=None, lam=1.0, stream=0, resync_every=1000,
              initial_state: ChainState = None,
              checkpoint: ChainCheckpoint = None,
              stop_after=None) -> SampleSet:
    """Burn in (adapting), then sample; deterministic given the seed.

    thin = None or inf records no snapshots (diagnostics only).  The
    cached energy is re-synced against a full O(N^2) recomputation every
    `resync_every` sweeps to kill floating-point drift.

    Randomness is consumed one canonical block per sweep, so a run can be
    checkpointed at any production sweep boundary and continued bit-exactly:
    pass the previous run's diagnostics["checkpoint"].  stop_after halts
    after that many (total) production sweeps, leaving a resumable state.
    """
    if n_burn < 0 or n_sweeps < 0:
        raise ValueError("sweep counts must be nonnegative")
    if checkpoint is not None:
        pts = np.ascontiguousarray(np.asarray(checkpoint.points, dtype=float))
        rng = np.random.default_rng()
        rng.bit_generator.state = checkpoint.rng_state
        h_cur = checkpoint.cached_energy
        step = checkpoint.step_size
        t_start = checkpoint.sweep
        accepted = checkpoint.accepted
    else:
        state = initial_state if initial_state is not None else \
            init_chain(model, seed, step_size=step_size, stream=stream)
        rng = state.clone_rng()
        pts = np.ascontiguousarray(state.config.points.copy())
        h_cur = state.cached_energy
        step = state.step_size
        t_start = 0
        accepted = 0
        for t in range(n_burn):
            acc, h_cur = _one_sweep(model, pts, rng, step, h_cur, lam=lam)
            gain = min(0.12, 6.0 / (t + 20.0))
            step = float(np.clip(step * math.exp(gain * (acc / pts.shape[0] - _ADAPT_TARGET)),
                                 1e-9, 1e3))
            if (t + 1) % resync_every == 0 and lam == 1.0:
                h_cur = _full_energy(model, pts)

    configs = []
    sweep_idx = []
    trace = []
    k_thin = None if thin is None or (isinstance(thin, float) and math.isinf(thin)) \
        else int(thin)
    t_stop = n_sweeps if stop_after is None else min(n_sweeps, int(stop_after))
    for t in range(t_start, t_stop):
        acc, h_cur = _one_sweep(model, pts, rng, step, h_cur, lam=lam)
        accepted += acc
        if (t + 1) % resync_every == 0:
            h_cur = _full_energy(model, pts)
        trace.append(h_cur)
        if k_thin and (t + 1) % k_thin == 0:
            configs.append(Configuration(points=pts.copy(), scale=Scale.MACRO))
            sweep_idx.append(t + 1)

    trace = np.asarray(trace)
    acc_rate = accepted / max(1, t_stop * pts.shape[0])
    diagnostics = {
        "acceptance_rate": acc_rate,
        "energy_trace": trace,
        "iat": integrated_autocorrelation_time(trace) if len(trace) >= 64 else float("nan"),
        "step_size": step,
        "final_points": pts.copy(),
        "final_energy": h_cur,
        "rng_state": rng.bit_generator.state,
        "checkpoint": ChainCheckpoint(sweep=t_stop, points=pts.copy(),
                                      rng_state=rng.bit_generator.state,
                                      step_size=step, cached_energy=h_cur,
                                      accepted=accepted),
        "completed": t_stop >= n_sweeps,
    }
    return SampleSet(model=model, configs=tuple(configs),
                     sweep_indices=tuple(sweep_idx), diagnostics=diagnostics)


def integrated_autocorrelation_time(series, n_batches=32):
    """Batch-means estimate of the integrated autocorrelation time."""
    x = np.asarray(series, dtype=float)
    n = len(x)
    if n < 2 * n_batches:
        return float("nan")
    m = n // n_batches
    batches = x[: m * n_batches].reshape(n_batches, m).mean(axis=1)
    var_x = x.var(ddof=1)
    if var_x <= 1e-20 * max(1.0, float(np.mean(x)) ** 2):
        return 1.0  # constant series up to float drift
    tau = m * batches.var(ddof=1) / var_x
    return float(max(tau, 1e-3))


def geometric_ladder(beta_min, beta_max, ratio=math.sqrt(2.0)):
    """Geometric beta ladder from beta_min to beta_max (endpoints exact).

    A ratio around sqrt(2) keeps adjacent energy histograms overlapping for
    desk-scale N, which is what keeps replica-exchange acceptance usable.
    """
    if not 0 < beta_min < beta_max:
        raise ValueError("need 0 < beta_min < beta_max")
    n = max(1, int(round(math.log(beta_max / beta_min) / math.log(ratio))))
    return [beta_min * (beta_max / beta_min) ** (i / n) for i in range(n + 1)]


def parallel_tempering(models, n_burn, n_sweeps, thin=1, seed=0,
                       step_size=None, swap_every=1):
    """Replica exchange across a strictly increasing beta ladder.

    Each rung runs its own deterministic stream; adjacent-pair swaps use
    the symmetric Metropolis rule on the two Gibbs log-densities.  A
    single-rung ladder reproduces run_chain(seed) exactly.
    """
    if len(models) == 0:
        raise ValueError("empty ladder")
    base = models[0]
    betas = [m.beta for m in models]
    if any(b2 <= b1 for b1, b2 in zip(betas, betas[1:])):
        raise ValueError("beta ladder must be strictly increasing")
    for m in models[1:]:
        if (m.kernel, m.potential, m.N) != (base.kernel, base.potential, base.N) \
                or m.mu is not base.mu and m.mu != base.mu:
            raise ValueError("ladder models must share kernel, potential, mu and N")

    R = len(models)
    rngs = [np.random.default_rng([int(seed), r]) for r in range(R)]
    swap_rng = np.random.default_rng([int(seed), _SWAP_STREAM])
    pts = []
    hs = []
    steps = []
    for r, m in enumerate(models):
        p = np.ascontiguousarray(_initial_points(m, rngs[r]))
        pts.append(p)
        hs.append(_full_energy(m, p))
        steps.append(step_size if step_size is not None else
                     0.6 * m.N ** (-1.0 / m.kernel.d) / math.sqrt(max(m.beta, 0.05)))

    swap_attempts = np.zeros(max(R - 1, 1))
    swap_accepts = np.zeros(max(R - 1, 1))

    def _swap_round(t):
        if R < 2:
            return
        for lo in range(t % 2, R - 1, 2):
            hi = lo + 1
            b_lo = models[lo].temperature_prefactor
            b_hi = models[hi].temperature_prefactor
            log_ratio = (b_lo - b_hi) * (hs[lo] - hs[hi])
            swap_attempts[lo] += 1
            if math.log(max(swap_rng.random(), 1e-300)) < min(0.0, log_ratio):
                pts[lo], pts[hi] = pts[hi], pts[lo]
                hs[lo], hs[hi] = hs[hi], hs[lo]
                swap_accepts[lo] += 1

    for t in range(n_burn):
        for r, m in enumerate(models):
            acc, hs[r] = _one_sweep(m, pts[r], rngs[r], steps[r], hs[r])
            gain = min(0.12, 6.0 / (t + 20.0))
            steps[r] = float(np.clip(
                steps[r] * math.exp(gain * (acc / m.N - _ADAPT_TARGET)), 1e-9, 1e3))
        if (t + 1) % swap_every == 0:
            _swap_round(t)
        if (t + 1) % 1000 == 0:
            for r, m in enumerate(models):
                hs[r] = _full_energy(m, pts[r])

    k_thin = None if thin is None or (isinstance(thin, float) and math.isinf(thin)) \
        else int(thin)
    configs = [[] for _ in range(R)]
    sweep_idx = [[] for _ in range(R)]
    traces = [np.empty(n_sweeps) for _ in range(R)]
    accepted = [0] * R
    for t in range(n_sweeps):
        for r, m in enumerate(models):
            acc, hs[r] = _one_sweep(m, pts[r], rngs[r], steps[r], hs[r])
            accepted[r] += acc
        if (t + 1) % swap_every == 0:
            _swap_round(n_burn + t)
        if (t + 1) % 1000 == 0:
            for r, m in enumerate(models):
                hs[r] = _full_energy(m, pts[r])
        for r in range(R):
            traces[r][t] = hs[r]
            if k_thin and (t + 1) % k_thin == 0:
                configs[r].append(Configuration(points=pts[r].copy(), scale=Scale.MACRO))
                sweep_idx[r].append(t + 1)

    out = []
    with np.errstate(invalid="ignore", divide="ignore"):
        swap_rates = np.where(swap_attempts > 0, swap_accepts / np.maximum(swap_attempts, 1), np.nan)
    for r, m in enumerate(models):
        diagnostics = {
            "acceptance_rate": accepted[r] / max(1, n_sweeps * m.N),
            "energy_trace": traces[r],
            "iat": integrated_autocorrelation_time(traces[r]) if n_sweeps >= 64 else float("nan"),
            "step_size": steps[r],
            "final_points": pts[r].copy(),
            "final_energy": hs[r],
            "swap_acceptance": swap_rates.tolist(),
        }
        out.append(SampleSet(model=m, configs=tuple(configs[r]),
                             sweep_indices=tuple(sweep_idx[r]),
                             diagnostics=diagnostics))
    return out


# ----------------------------------------------------------------------------
# Free energy
# ----------------------------------------------------------------------------

def reference_hamiltonian(model: GasModel, pts):
    """H_ref = N sum_i |x_i|^2 / 2, the Gaussian interpolation endpoint."""
    return model.N * 0.5 * float(np.sum(pts ** 2))


def log_z_reference(model: GasModel):
    """Closed-form log of int exp(-(beta/2) N^(-s/d) H_ref)."""
    k = model.kernel
    alpha = model.beta * model.N ** (1.0 - k.s_eff / k.d) / 4.0
    return model.N * (k.d / 2.0) * math.log(math.pi / alpha)


class UnstableRungError(RuntimeError):
    pass


def _ti_rung(model, lam, idx, n_burn, n_sweeps, thin, seed, n_batches):
    """One thermodynamic-integration rung: (mean, stderr, tau) of H_N - H_ref."""
    rng = np.random.default_rng([int(seed), 0x7147, idx])
    # the lam-gas occupies a support that shrinks like sqrt(lam) until the
    # Gaussian reference width takes over; start the chain at that scale
    scale = math.sqrt(min(1.0, lam + 2.0 / (model.beta * model.N)))
    pts = np.ascontiguousarray(_initial_points(model, rng) * scale)
    h_cur = _full_energy(model, pts)
    step = 0.8 * scale * model.N ** (-1.0 / model.kernel.d) \
        / math.sqrt(max(model.beta * max(lam, 0.1), 0.05))
    for t in range(n_burn):
        acc, h_cur = _one_sweep(model, pts, rng, step, h_cur, lam=lam)
        gain = min(0.12, 6.0 / (t + 20.0))
        step = float(np.clip(step * math.exp(gain * (acc / model.N - _ADAPT_TARGET)),
                             1e-9, 1e3))
    vals = []
    for t in range(n_sweeps):
        _, h_cur = _one_sweep(model, pts, rng, step, h_cur, lam=lam)
        if (t + 1) % 1000 == 0:
            h_cur = _full_energy(model, pts)
        if (t + 1) % thin == 0:
            vals.append(h_cur - reference_hamiltonian(model, pts))
    vals = np.asarray(vals)
    tau = integrated_autocorrelation_time(vals, n_batches=n_batches)
    nb = min(n_batches, max(2, len(vals) // 8))
    m_b = len(vals) // nb
    bm = vals[: m_b * nb].reshape(nb, m_b).mean(axis=1)
    err = bm.std(ddof=1) / math.sqrt(nb)
    return float(vals.mean()), float(err), float(tau)


def thermo_integrate_logZ(model: GasModel, lam_grid, n_burn=500, n_sweeps=4000,
                          thin=4, seed=0, n_batches=16, workers=1):
    """log Z by thermodynamic integration along H_lam = lam H_N + (1-lam) H_ref.

    Returns a dict with the estimate, its standard error, log Z_ref and the
    per-rung integrand table E_lam[H_N - H_ref].  Rungs whose integrated
    autocorrelation time exceeds n_sweeps/50 are rejected as unstable.
    Rungs are independent; workers > 1 runs them in parallel processes
    (results are identical either way).
    """
    lam_grid = np.asarray(sorted(set(float(l) for l in lam_grid)), dtype=float)
    if lam_grid[0] != 0.0 or lam_grid[-1] != 1.0:
        raise ValueError("lambda grid must include both endpoints 0 and 1")
    b = model.temperature_prefactor
    if workers and workers > 1:
        from joblib import Parallel, delayed
        results = Parallel(n_jobs=int(workers))(
            delayed(_ti_rung)(model, lam, idx, n_burn, n_sweeps, thin, seed,
                              n_batches)
            for idx, lam in enumerate(lam_grid))
    else:
        results = [_ti_rung(model, lam, idx, n_burn, n_sweeps, thin, seed,
                            n_batches)
                   for idx, lam in enumerate(lam_grid)]
    means = np.array([r[0] for r in results])
    errs = np.array([r[1] for r in results])
    taus = np.array([r[2] for r in results])
    for lam, tau in zip(lam_grid, taus):
        if math.isfinite(tau) and tau * thin > n_sweeps / 50.0:
            raise UnstableRungError(
                f"unstable rung lambda={lam:g}: autocorrelation time "
                f"{tau * thin:.1f} sweeps exceeds budget {n_sweeps}/50")

    # trapezoid weights
    w = np.zeros(len(lam_grid))
    dl = np.diff(lam_grid)
    w[:-1] += dl / 2.0
    w[1:] += dl / 2.0
    lz_ref = log_z_reference(model)
    integral = float(np.sum(w * means))
    est = lz_ref - b * integral
    stderr = b * math.sqrt(float(np.sum((w * errs) ** 2)))
    return {
        "logZ": est,
        "stderr": stderr,
        "logZ_ref": lz_ref,
        "lambda": lam_grid,
        "integrand": means,
        "integrand_stderr": errs,
        "iat": taus,
    }


def exact_logZ_small_N(model: GasModel, budget=400_000, seed=0):
    """Brute-force log Z for N <= 4: adaptive quadrature (N <= 2 in 1D,
    N = 1 in 2D) or Gaussian importance sampling.  Returns (logZ, stderr).
    """
    N = model.N
    if N > 4:
        raise ValueError("exact_logZ_small_N refuses N > 4")
    b = model.temperature_prefactor
    k = model.kernel
    d = k.d
    pot = model.potential

    def v1(t):
        return float(np.sum(pot(np.array([[t]]))))

    if N == 1 and d == 1:
        f = lambda x: math.exp(-b * v1(x))
        val, err = integrate.quad(f, -np.inf, np.inf, limit=200)
        return math.log(val), err / val
    if N == 1 and d == 2:
        if pot.kind == "quadratic":
            # int exp(-b a |x|^2) = pi / (b a)
            return math.log(math.pi / (b * pot.a)), 0.0
        raise NotImplementedError("N=1 2D quadrature needs a quadratic potential")
    if N == 2 and d == 1:
        if pot.kind == "quadratic":
            L = math.sqrt(60.0 / (b * 2.0 * pot.a)) + 1.0
        else:
            L = max(abs(pot.grid.extent[0][0]), abs(pot.grid.extent[0][1]))

        def f(x2, x1):
            r = abs(x1 - x2)
            if r == 0.0:
                return 0.0
            g = -math.log(r) if k.is_log else r ** (-float(k.s))
            H = 2.0 * g + 2.0 * (v1(x1) + v1(x2))
            return math.exp(-b * H)

        val, err = integrate.dblquad(f, -L, L, lambda x: -L, lambda x: L,
                                     epsabs=1e-12, epsrel=1e-10)
        return math.log(val), err / val

    # Monte Carlo with a wide Gaussian proposal and importance weights
    rng = np.random.default_rng([int(seed), 0xE5A])
    if pot.kind == "quadratic":
        sigma2 = 1.0 / (b * N * pot.a)
    else:
        sigma2 = float(np.var(model.mu.grid.axes()[0])) + 1.0
    n = int(budget)
    x = rng.normal(0.0, math.sqrt(sigma2), size=(n, N, d))
    logq = -0.5 * np.sum(x ** 2, axis=(1, 2)) / sigma2 \
        - 0.5 * N * d * math.log(2 * math.pi * sigma2)
    # pairwise part
    pe = np.zeros(n)
    for i in range(N):
        for j in range(i + 1, N):
            r = np.sqrt(np.sum((x[:, i, :] - x[:, j, :]) ** 2, axis=1))
            r = np.maximum(r, 1e-300)
            pe += (-np.log(r)) if k.is_log else r ** (-k.s_eff)
    if pot.kind == "quadratic":
        vsum = pot.a * np.sum(x ** 2, axis=(1, 2))
    else:
        vsum = np.array([float(np.sum(pot(xi))) for xi in x])
    logw = -b * (2.0 * pe + N * vsum) - logq
    mx = logw.max()
    wsh = np.exp(logw - mx)
    mean = wsh.mean()
    est = mx + math.log(mean)
    stderr = wsh.std(ddof=1) / (mean * math.sqrt(n))
    return est, stderr
