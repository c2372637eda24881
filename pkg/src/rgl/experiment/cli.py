"""Command-line interface: config-driven, reproducible experiment runs.

Subcommands: equilibrium, sample, analyze, free-energy, compare, reference.
Exit codes: 0 success, 2 config error, 3 numerical failure, 4 budget exceeded.
Every run writes into <output.directory>/<run_id>/ with a manifest last;
a run directory without a manifest is incomplete.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from .. import __version__
from ..equilibrium import (EquilibriumError, EquilibriumMeasure,
                           frostman_residuals, solve_equilibrium)
from ..fields import (empirical_field, entropy_rate_estimate, field_from_windows,
                      number_variance_curve, pair_correlation,
                      rate_function_estimate, spacing_histogram,
                      wasserstein1_to_measure, ks_two_sample, field_distance,
                      TestFunctionFamily)
from ..gas import GasModel, splitting_breakdown
from ..kernels import Configuration, Scale
from ..reference import (Window, lattice_config, quantile_config,
                         sample_beta_hermite, sample_ginibre, sample_poisson)
from ..sampler import (ChainCheckpoint, UnstableRungError, exact_logZ_small_N,
                       parallel_tempering, run_chain, thermo_integrate_logZ)
from .config import ConfigError, ExperimentConfig
from .runio import RunDirectory, read_csv, write_csv, write_json

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_BUDGET = 4


def _workers(args):
    if args.workers is not None:
        return max(1, int(args.workers))
    env = os.environ.get("RGL_WORKERS")
    return max(1, int(env)) if env else 1


def _load_config(args):
    if not args.config:
        raise ConfigError("--config PATH is required")
    path = Path(args.config)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    return ExperimentConfig.from_path(path)


def _run_dir(cfg: ExperimentConfig, args) -> RunDirectory:
    root = args.out if args.out else cfg.out_directory
    return RunDirectory(root, cfg.run_id, config=cfg)


def _solve_measure(cfg: ExperimentConfig):
    return solve_equilibrium(cfg.potential(), cfg.kernel(), cfg.grid(),
                             cfg.solver_opts())


def _load_or_solve_measure(cfg: ExperimentConfig, rundir: RunDirectory):
    eq_path = rundir.file("equilibrium.json")
    if eq_path.exists():
        with open(eq_path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        return EquilibriumMeasure.from_json_dict(doc, cfg.potential(),
                                                 tolerance=cfg.solver_opts().tolerance)
    mu = _solve_measure(cfg)
    with open(eq_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(mu.to_json())
        fh.write("\n")
    return mu


# ----------------------------------------------------------------------------
# equilibrium
# ----------------------------------------------------------------------------

def cmd_equilibrium(args):
    cfg = _load_config(args)
    rundir = _run_dir(cfg, args)
    mu = _solve_measure(cfg)
    with open(rundir.file("equilibrium.json"), "w", encoding="utf-8",
              newline="\n") as fh:
        fh.write(mu.to_json())
        fh.write("\n")
    rneg, rsup = frostman_residuals(mu)
    write_csv(rundir.file("frostman_report.csv"),
              ("max_negative_zeta", "max_abs_zeta_on_support", "energy_I",
               "frostman_c", "sigma_volume"),
              [(rneg, rsup, mu.energy_I, mu.frostman_c, mu.sigma_volume)])
    rundir.write_manifest(seeds=())
    print(f"equilibrium: I={mu.energy_I:.6f} c={mu.frostman_c:.6f} "
          f"residuals=({rneg:.2e},{rsup:.2e}) -> {rundir.path}")
    return EXIT_OK


# ----------------------------------------------------------------------------
# sample
# ----------------------------------------------------------------------------

def _write_sample_files(base: Path, run_id, model, sample_set):
    d = model.kernel.d
    coord_cols = tuple(f"x{a + 1}" for a in range(d))
    rows = []
    for cfg_snap, sweep in zip(sample_set.configs, sample_set.sweep_indices):
        for idx in range(cfg_snap.n):
            rows.append((run_id, sweep, idx) + tuple(cfg_snap.points[idx]))
    write_csv(base / "samples.csv", ("run_id", "sweep", "idx") + coord_cols, rows)

    diag = sample_set.diagnostics
    acc = diag["acceptance_rate"]
    trows = []
    for cfg_snap, sweep in zip(sample_set.configs, sample_set.sweep_indices):
        bd = splitting_breakdown(cfg_snap, model)
        trows.append((sweep, bd.H_N, bd.W_N, acc))
    write_csv(base / "energy_trace.csv", ("sweep", "H_N", "W_N", "acceptance"),
              trows)
    # autocorrelation from the merged snapshot series so that resumed and
    # uninterrupted runs report identical diagnostics
    from ..sampler import integrated_autocorrelation_time
    h_series = np.array([row[1] for row in trows])
    iat = integrated_autocorrelation_time(h_series) if len(h_series) >= 64 \
        else float("nan")
    return {
        "acceptance_rate": acc,
        "iat": iat,
        "step_size": diag["step_size"],
        "n_snapshots": len(sample_set.configs),
    }


def cmd_sample(args):
    cfg = _load_config(args)
    rundir = _run_dir(cfg, args)
    mu = _load_or_solve_measure(cfg, rundir)
    params = cfg.sampler_params(seed_override=args.seed)
    betas = cfg.betas()
    kernel = cfg.kernel()
    potential = cfg.potential()
    stop_after = args.stop_after_sweeps
    diagnostics = {"run_id": cfg.run_id, "betas": betas, "N": cfg.N,
                   "seed": params["seed"], "code_version": __version__}

    if len(betas) == 1:
        model = GasModel(kernel=kernel, potential=potential, mu=mu, N=cfg.N,
                         beta=betas[0])
        ck_path = rundir.file("checkpoint.json")
        checkpoint = None
        if ck_path.exists():
            with open(ck_path, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
            if doc.get("config_sha256") != cfg.sha256():
                print("refusing to resume: config hash differs from checkpoint",
                      file=sys.stderr)
                return EXIT_CONFIG
            checkpoint = ChainCheckpoint.from_json_dict(doc)
            if checkpoint.sweep >= params["n_sweeps"]:
                checkpoint = None  # finished run; start fresh deterministic run
        ss = run_chain(model, params["n_burn"], params["n_sweeps"],
                       thin=params["thin"], seed=params["seed"],
                       step_size=params["step_size"], checkpoint=checkpoint,
                       stop_after=stop_after)
        new_ck = ss.diagnostics["checkpoint"]
        ck_doc = new_ck.to_json_dict()
        ck_doc["config_sha256"] = cfg.sha256()
        write_json(ck_path, ck_doc)
        if checkpoint is not None:
            # merge with the already-written partial sample files
            prev_rows = _read_snapshots(rundir.path, model)
            ss = _merge_sample_sets(model, prev_rows, ss)
        diagnostics["chain"] = _write_sample_files(rundir.path, cfg.run_id,
                                                   model, ss)
        if not ss.diagnostics.get("completed", True):
            write_json(rundir.file("diagnostics.json"), diagnostics)
            print(f"sample: stopped after {new_ck.sweep} sweeps (resumable)")
            return EXIT_OK
    else:
        models = [GasModel(kernel=kernel, potential=potential, mu=mu, N=cfg.N,
                           beta=b) for b in betas]
        sets = parallel_tempering(models, params["n_burn"], params["n_sweeps"],
                                  thin=params["thin"], seed=params["seed"],
                                  step_size=params["step_size"])
        diagnostics["rungs"] = []
        for r, (m, ss) in enumerate(zip(models, sets)):
            sub = rundir.path / f"rung_{r:02d}"
            sub.mkdir(exist_ok=True)
            info = _write_sample_files(sub, cfg.run_id, m, ss)
            info["beta"] = m.beta
            info["swap_acceptance"] = ss.diagnostics.get("swap_acceptance")
            diagnostics["rungs"].append(info)

    write_json(rundir.file("diagnostics.json"), diagnostics)
    rundir.write_manifest(seeds=[params["seed"]])
    print(f"sample: run {cfg.run_id} complete -> {rundir.path}")
    return EXIT_OK


def _read_snapshots(base, model):
    """Load samples.csv back into per-sweep configurations."""
    path = Path(base) / "samples.csv"
    if not path.exists():
        return []
    header, rows = read_csv(path)
    d = model.kernel.d
    coord_cols = [f"x{a + 1}" for a in range(d)]
    for col in ("run_id", "sweep", "idx", *coord_cols):
        if col not in header:
            raise ValueError(f"samples.csv: missing column {col}")
    by_sweep = {}
    for row in rows:
        sweep = int(row["sweep"])
        by_sweep.setdefault(sweep, []).append(
            (int(row["idx"]), [float(row[c]) for c in coord_cols]))
    out = []
    for sweep in sorted(by_sweep):
        pts = [xy for _, xy in sorted(by_sweep[sweep])]
        out.append((sweep, Configuration(points=np.asarray(pts),
                                         scale=Scale.MACRO)))
    return out


def _merge_sample_sets(model, prev_rows, ss):
    from ..sampler import SampleSet
    configs = [c for _, c in prev_rows] + list(ss.configs)
    sweeps = [s for s, _ in prev_rows] + list(ss.sweep_indices)
    return SampleSet(model=model, configs=tuple(configs),
                     sweep_indices=tuple(sweeps), diagnostics=ss.diagnostics)


# ----------------------------------------------------------------------------
# analyze
# ----------------------------------------------------------------------------

def _analysis_model(cfg, rundir, beta):
    mu = _load_or_solve_measure(cfg, rundir)
    return GasModel(kernel=cfg.kernel(), potential=cfg.potential(), mu=mu,
                    N=cfg.N, beta=beta)


def _analyze_one(cfg, rundir, base: Path, model, ap, seed, label=""):
    snaps = _read_snapshots(base, model)
    if not snaps:
        raise ValueError("samples.csv: no snapshots to analyze")
    configs = [c for _, c in snaps]

    rows_spacing = []
    if model.kernel.d == 1:
        sp = spacing_histogram(configs, bulk_fraction=ap["bulk_fraction"])
        widths = np.diff(sp["bin_edges"])
        dens = sp["hist"] / max(sp["hist"].sum(), 1) / widths
        for lo, hi, cnt, de in zip(sp["bin_edges"][:-1], sp["bin_edges"][1:],
                                   sp["hist"], dens):
            rows_spacing.append((lo, hi, int(cnt), de))
    write_csv(base / "spacing.csv", ("bin_lo", "bin_hi", "count", "density"),
              rows_spacing)

    # empirical field pooled over snapshots
    n_cfg = len(configs)
    per = max(1, int(math.ceil(ap["n_tags"] / n_cfg)))
    tags, wins, intens = [], [], []
    for i, c in enumerate(configs):
        f = empirical_field(c, model, per, ap["R_w"], seed=seed + i)
        tags.append(f.tags)
        wins.extend(f.windows)
        intens.append(f.intensities)
    from ..fields import EmpiricalField
    field = EmpiricalField(tags=np.concatenate(tags), windows=tuple(wins),
                           window_radius=ap["R_w"], N=model.N,
                           intensities=np.concatenate(intens))

    nv = number_variance_curve(field, [r for r in ap["R_list"]
                                       if r <= 2 * ap["R_w"]])
    write_csv(base / "number_variance.csv", ("R", "var", "stderr", "n_windows"),
              [(r["R"], r["var"], r["stderr"], r["n_windows"]) for r in nv])

    r_bins = np.linspace(0.0, min(ap["r_max"], 2 * ap["R_w"]), ap["n_r_bins"] + 1)
    pc = pair_correlation(field, r_bins)
    write_csv(base / "pair_correlation.csv", ("r", "g2", "shell"),
              [(r["r"], r["g2"], r["shell"]) for r in pc])

    ent = entropy_rate_estimate(field, cell=ap["cell"],
                                window_side=2 * ap["R_w"], min_cells=200)
    write_csv(base / "entropy.csv",
              ("cell", "window_side", "estimate", "n_windows"),
              [(ap["cell"], 2 * ap["R_w"], ent, field.n_windows)])

    _, trows = read_csv(base / "energy_trace.csv")
    wvals = np.array([float(r["W_N"]) for r in trows])
    w_mean = float(wvals.mean())
    w_se = float(wvals.std(ddof=1) / math.sqrt(len(wvals))) if len(wvals) > 1 else 0.0
    rate = rate_function_estimate(w_mean, ent, model.beta, model.mu.sigma_volume)
    write_csv(base / "rate_function.csv",
              ("beta", "W_mean", "W_stderr", "entropy", "sigma_volume", "rate"),
              [(model.beta, w_mean, w_se, ent, model.mu.sigma_volume, rate)])

    pooled = np.concatenate([c.points.ravel() for c in configs]) \
        if model.kernel.d == 1 else None
    rows = []
    if pooled is not None:
        rows.append(("wasserstein1_to_equilibrium",
                     wasserstein1_to_measure(pooled, model.mu)))
    write_csv(base / "empirical_measure_distance.csv", ("metric", "value"), rows)
    return {"beta": model.beta, "W_mean": w_mean, "entropy": ent, "rate": rate}


def _analyze_reference(cfg, rundir, ap):
    """Direct micro-scale statistics for reference-generator runs (their
    samples are windows already, no blow-up involved)."""
    header, rows = read_csv(rundir.file("samples.csv"))
    d = sum(1 for h in header if h.startswith("x"))
    coord_cols = [f"x{a + 1}" for a in range(d)]
    rp = cfg.reference_params()
    by_draw = {}
    for row in rows:
        by_draw.setdefault(int(row["sweep"]), []).append(
            [float(row[c]) for c in coord_cols])
    R_w = rp["window_side"] / 2.0
    wins = [Configuration(points=np.asarray(pts), scale=Scale.MICRO)
            for pts in by_draw.values()]
    intensity = rp["intensity"] if rp["generator"] == "poisson" else rp["density"]
    field = field_from_windows(wins, R_w, intensity)

    nv = number_variance_curve(field, [r for r in ap["R_list"] if r <= 2 * R_w])
    write_csv(rundir.file("number_variance.csv"),
              ("R", "var", "stderr", "n_windows"),
              [(r["R"], r["var"], r["stderr"], r["n_windows"]) for r in nv])
    r_bins = np.linspace(0.0, min(ap["r_max"], 2 * R_w), ap["n_r_bins"] + 1)
    pc = pair_correlation(field, r_bins)
    write_csv(rundir.file("pair_correlation.csv"), ("r", "g2", "shell"),
              [(r["r"], r["g2"], r["shell"]) for r in pc])
    ent = entropy_rate_estimate(field, cell=ap["cell"], window_side=2 * R_w,
                                min_cells=200)
    write_csv(rundir.file("entropy.csv"),
              ("cell", "window_side", "estimate", "n_windows"),
              [(ap["cell"], 2 * R_w, ent, field.n_windows)])
    rows_spacing = []
    if d == 1 and all(len(p) >= 16 for p in by_draw.values()):
        sp = spacing_histogram(wins, bulk_fraction=ap["bulk_fraction"])
        widths = np.diff(sp["bin_edges"])
        dens = sp["hist"] / max(sp["hist"].sum(), 1) / widths
        for lo, hi, cnt, de in zip(sp["bin_edges"][:-1], sp["bin_edges"][1:],
                                   sp["hist"], dens):
            rows_spacing.append((lo, hi, int(cnt), de))
    write_csv(rundir.file("spacing.csv"),
              ("bin_lo", "bin_hi", "count", "density"), rows_spacing)
    return {"entropy": ent}


def cmd_analyze(args):
    cfg = _load_config(args)
    rundir = _run_dir(cfg, args)
    ap = cfg.analysis_params()
    betas = cfg.betas()
    seed = cfg.sampler_params(seed_override=args.seed)["seed"] + 10_000
    results = []
    samples_path = rundir.file("samples.csv")
    if samples_path.exists():
        header, _ = read_csv(samples_path)
        if "source" in header:
            results.append(_analyze_reference(cfg, rundir, ap))
            rundir.write_manifest(seeds=[seed])
            print(f"analyze: reference-run statistics -> {rundir.path}")
            return EXIT_OK
    if len(betas) == 1:
        model = _analysis_model(cfg, rundir, betas[0])
        results.append(_analyze_one(cfg, rundir, rundir.path, model, ap, seed))
    else:
        for r, beta in enumerate(betas):
            model = _analysis_model(cfg, rundir, beta)
            sub = rundir.path / f"rung_{r:02d}"
            results.append(_analyze_one(cfg, rundir, sub, model, ap,
                                        seed + 1000 * r, label=f"rung {r}"))
        write_csv(rundir.file("rate_function.csv"),
                  ("beta", "W_mean", "entropy", "rate"),
                  [(r["beta"], r["W_mean"], r["entropy"], r["rate"])
                   for r in results])
    rundir.write_manifest(seeds=[seed])
    print(f"analyze: wrote statistics for {len(results)} chain(s) -> {rundir.path}")
    return EXIT_OK


# ----------------------------------------------------------------------------
# free-energy
# ----------------------------------------------------------------------------

def _default_lambda_grid(n):
    # quintic grading: the integrand E_lam[H_N - H_ref] has a boundary layer
    # of width ~1/N at lam = 0 where the pair term turns on
    u = np.linspace(0.0, 1.0, n)
    return np.unique(np.concatenate([[0.0, 1.0], u ** 5]))


def cmd_free_energy(args):
    cfg = _load_config(args)
    rundir = _run_dir(cfg, args)
    mu = _load_or_solve_measure(cfg, rundir)
    fp = cfg.free_energy_params()
    beta = cfg.betas()[0]
    seed = cfg.sampler_params(seed_override=args.seed)["seed"]
    workers = _workers(args)
    lam_grid = fp["lambda_grid"] if fp["lambda_grid"] else \
        _default_lambda_grid(fp["n_lambda"])
    kernel = cfg.kernel()
    potential = cfg.potential()

    logz_rows = []
    integrand_rows = []
    a_rows = []
    a_prev = None
    for N in fp["N_list"]:
        model = GasModel(kernel=kernel, potential=potential, mu=mu, N=N,
                         beta=beta)
        res = thermo_integrate_logZ(model, lam_grid, n_burn=fp["n_burn"],
                                    n_sweeps=fp["n_sweeps"], thin=fp["thin"],
                                    seed=seed + N, workers=workers)
        row = [N, beta, res["logZ"], res["stderr"], res["logZ_ref"],
               len(res["lambda"])]
        if N <= 4:
            ex, exerr = exact_logZ_small_N(model)
            row += [ex, exerr]
        else:
            row += [float("nan"), float("nan")]
        logz_rows.append(tuple(row))
        for lam, m, e in zip(res["lambda"], res["integrand"],
                             res["integrand_stderr"]):
            integrand_rows.append((N, lam, m, e))
        k = model.kernel
        a_N = (res["logZ"] + 0.5 * beta * N ** (2 - k.s_eff / k.d) * mu.energy_I) / N
        if k.is_log:
            a_N -= beta / (2.0 * k.d) * math.log(N)
        a_se = res["stderr"] / N
        diff = abs(a_N - a_prev[0]) if a_prev else float("nan")
        a_rows.append((N, a_N, a_se, diff))
        a_prev = (a_N, a_se)
        print(f"free-energy: N={N} logZ={res['logZ']:.4f}±{res['stderr']:.4f} "
              f"a_N={a_N:.4f}")

    write_csv(rundir.file("logZ.csv"),
              ("N", "beta", "estimate", "stderr", "logZ_ref", "n_lambda",
               "exact_oracle", "exact_oracle_stderr"), logz_rows)
    write_csv(rundir.file("integrand.csv"),
              ("N", "lambda", "mean", "stderr"), integrand_rows)
    write_csv(rundir.file("expansion.csv"),
              ("N", "a_N", "stderr", "abs_diff_prev"), a_rows)
    rundir.write_manifest(seeds=[seed])
    print(f"free-energy: wrote logZ.csv / expansion.csv -> {rundir.path}")
    return EXIT_OK


# ----------------------------------------------------------------------------
# compare
# ----------------------------------------------------------------------------

def _gaps_of_run(base, d):
    header, rows = read_csv(Path(base) / "samples.csv")
    coord_cols = [f"x{a + 1}" for a in range(d)]
    by_sweep = {}
    for row in rows:
        by_sweep.setdefault(int(row["sweep"]), []).append(
            (int(row["idx"]), [float(row[c]) for c in coord_cols]))
    configs = []
    for sweep in sorted(by_sweep):
        pts = [p for _, p in sorted(by_sweep[sweep])]
        configs.append(Configuration(points=np.asarray(pts), scale=Scale.MACRO))
    return configs


def _run_dim(base):
    header, _ = read_csv(Path(base) / "samples.csv")
    return sum(1 for h in header if h.startswith("x"))


def cmd_compare(args):
    run_a = Path(args.run_a)
    run_b = Path(args.run_b)
    for p in (run_a, run_b):
        if not (p / "samples.csv").exists():
            print(f"compare: {p} has no samples.csv", file=sys.stderr)
            return EXIT_CONFIG
    da, db = _run_dim(run_a), _run_dim(run_b)
    if da != db:
        print(f"compare: incompatible dimensions {da} vs {db}", file=sys.stderr)
        return EXIT_CONFIG
    cfgs_a = _gaps_of_run(run_a, da)
    cfgs_b = _gaps_of_run(run_b, db)
    rows = []
    if da == 1:
        ga = spacing_histogram(cfgs_a)["gaps"]
        gb = spacing_histogram(cfgs_b)["gaps"]
        rows.append(("spacing_ks", ks_two_sample(ga, gb)))
        micro_a = [Configuration(points=c.points * len(c.points), scale=Scale.MICRO)
                   for c in cfgs_a]
        micro_b = [Configuration(points=c.points * len(c.points), scale=Scale.MICRO)
                   for c in cfgs_b]
        R_w = 8.0
        fa = field_from_windows(micro_a, R_w, 1.0)
        fb = field_from_windows(micro_b, R_w, 1.0)
        rows.append(("field_distance",
                     field_distance(fa, fb, TestFunctionFamily(R_w=R_w))))

    def _w_stats(base):
        path = Path(base) / "energy_trace.csv"
        if not path.exists():
            return None
        _, trows = read_csv(path)
        w = np.array([float(r["W_N"]) for r in trows])
        return (float(w.mean()),
                float(w.std(ddof=1) / math.sqrt(len(w))) if len(w) > 1 else 0.0)

    wa, wb = _w_stats(run_a), _w_stats(run_b)
    if wa and wb:
        rows.append(("W_N_mean_a", wa[0]))
        rows.append(("W_N_stderr_a", wa[1]))
        rows.append(("W_N_mean_b", wb[0]))
        rows.append(("W_N_stderr_b", wb[1]))
        rows.append(("W_N_mean_diff", wa[0] - wb[0]))
    out = Path(args.out) if args.out else run_a
    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / "compare.csv", ("metric", "value"), rows)
    print(f"compare: wrote {out / 'compare.csv'}")
    return EXIT_OK


# ----------------------------------------------------------------------------
# reference
# ----------------------------------------------------------------------------

def cmd_reference(args):
    cfg = _load_config(args)
    rundir = _run_dir(cfg, args)
    rp = cfg.reference_params()
    seed = cfg.sampler_params(seed_override=args.seed)["seed"]
    gen = rp["generator"]
    kernel = cfg.kernel()
    d = kernel.d
    beta = cfg.betas()[0]
    a_quad = cfg.potential().a
    rows = []
    coord_cols = tuple(f"x{a + 1}" for a in range(d))
    for draw in range(rp["n_draws"]):
        if gen == "beta_hermite":
            c = sample_beta_hermite(cfg.N, beta, seed=seed + draw, a=a_quad)
        elif gen == "ginibre":
            c = sample_ginibre(cfg.N, seed=seed + draw, a=a_quad)
        elif gen == "poisson":
            w = Window(center=(0.0,) * d, sides=(rp["window_side"],) * d)
            c = sample_poisson(rp["intensity"], w, seed=seed + draw)
        elif gen == "lattice":
            w = Window(center=(0.0,) * d, sides=(rp["window_side"],) * d)
            c = lattice_config(rp["lattice_kind"], rp["density"], w)
        elif gen == "quantile":
            mu = _load_or_solve_measure(cfg, rundir)
            c = quantile_config(mu, cfg.N)
        else:
            print(f"reference: unknown generator {gen!r}", file=sys.stderr)
            return EXIT_CONFIG
        for idx in range(c.n):
            rows.append((cfg.run_id, draw, idx) + tuple(c.points[idx]) + (gen,))
        if gen in ("lattice", "quantile"):
            break  # deterministic generators need a single draw
    write_csv(rundir.file("samples.csv"),
              ("run_id", "sweep", "idx") + coord_cols + ("source",), rows)
    rundir.write_manifest(seeds=[seed])
    print(f"reference: wrote {len(rows)} rows from {gen} -> {rundir.path}")
    return EXIT_OK


# ----------------------------------------------------------------------------
# entry point
# ----------------------------------------------------------------------------

def build_parser():
    ap = argparse.ArgumentParser(
        prog="rgl",
        description="Log/Coulomb/Riesz gas simulation laboratory")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", type=str, help="TOML experiment config")
        p.add_argument("--out", type=str, default=None,
                       help="output root (overrides output.directory)")
        p.add_argument("--seed", type=int, default=None,
                       help="seed override (otherwise sampler.seed)")
        p.add_argument("--workers", type=int, default=None,
                       help="worker count (default: RGL_WORKERS or 1)")

    for name, fn in (("equilibrium", cmd_equilibrium), ("sample", cmd_sample),
                     ("analyze", cmd_analyze), ("free-energy", cmd_free_energy),
                     ("reference", cmd_reference)):
        p = sub.add_parser(name)
        common(p)
        p.set_defaults(func=fn)
        if name == "sample":
            p.add_argument("--stop-after-sweeps", type=int, default=None,
                           help="stop after this many production sweeps "
                                "(leaves a resumable checkpoint, no manifest)")

    p = sub.add_parser("compare")
    p.add_argument("run_a", type=str)
    p.add_argument("run_b", type=str)
    common(p)
    p.set_defaults(func=cmd_compare)
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, KeyError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except UnstableRungError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except MemoryError as exc:
        print(f"resource exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (EquilibriumError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
