"""Command-line harness: one entry point, one subcommand per solver.

Every subcommand reads an optional INI config (overridable with
``--set section.key=value``), writes CSV outputs with header rows into the
requested directory, and drops a ``manifest.txt`` (resolved config + seed +
version) next to them.  The ``figure`` subcommand chains solver runs into
the data behind each headline experiment (tags F1..F9) and maintains a
master manifest mapping ``<tag>.<output>`` keys to the produced files.

Exit codes: 0 success, 1 usage/config error, 2 numerical failure,
3 blow-up or non-convergence flagged.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .blowup import check_blowup_condition, scan_mu, triangular_density
from .config import ConfigError, apply_overrides, load_config, read_manifest, section_floats, write_manifest
from .evolution import evolve_density
from .fixed_point import FixedPointConfig, picard_iterate
from .lq import assemble_stationary_solution, compute_lq_coefficients
from .mfg import SpaceTimeGrid, solve_mfg, truncated_gaussian_profile
from .model import DensitySnapshot, ModelParams
from .particles import DynamicsVariant, simulate_system
from .stationary import stationary_solution

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2
EXIT_FLAGGED = 3


class _Parser(argparse.ArgumentParser):
    # usage errors must exit 1, not argparse's default 2
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit_Usage(message)


class SystemExit_Usage(Exception):
    pass


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _write_csv(path: Path, header: list[str], rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _manifest_entries(args, sections: dict, extra: dict | None = None) -> dict:
    entries = {"version": __version__, "command": args.command}
    for sec in sorted(sections):
        for key in sorted(sections[sec]):
            entries[f"{sec}.{key}"] = sections[sec][key]
    for key, value in (extra or {}).items():
        entries[key] = _fmt(value)
    return entries


def _model_params(sections: dict, **overrides) -> ModelParams:
    vals = section_floats(sections, "model")
    vals.update({k: v for k, v in overrides.items() if v is not None})
    missing = {"a", "x0"} - set(vals)
    if missing:
        raise ConfigError(f"missing required [model] keys: {sorted(missing)}")
    return ModelParams.from_mapping(vals)


# ---------------------------------------------------------------- subcommands


def cmd_simulate_particles(args, sections) -> int:
    params = _model_params(sections)
    sim = section_floats(sections, "simulation")
    n = int(args.n if args.n is not None else sim.get("n", 1000))
    T = float(args.t if args.t is not None else sim.get("t", 10.0))
    dt = float(args.dt if args.dt is not None else sim.get("dt", 1e-2))
    seed = int(args.seed if args.seed is not None else sim.get("seed", 0))
    variant = DynamicsVariant.parse(args.variant or str(sim.get("variant", "ps")))
    snaps = sim.get("snapshot_times")
    snapshot_times = [float(s) for s in str(snaps).split()] if snaps else [T]
    hist_width = float(sim.get("hist_width", 0.1))
    hist_max = float(sim.get("hist_max", 10.0))

    summary = simulate_system(
        np.full(n, params.x0), variant, params, T, dt, seed=seed,
        snapshot_times=snapshot_times, hist_width=hist_width, hist_max=hist_max,
    )
    out = Path(args.out)
    _write_csv(out / "mean.csv", ["t", "mean"], zip(summary.times, summary.mean_path))
    _write_csv(
        out / "defaults.csv",
        ["t", "rate", "cumulative"],
        zip(summary.times, summary.default_rate, summary.cumulative_defaults),
    )
    width = summary.hist_edges[1] - summary.hist_edges[0]
    for j, t_snap in enumerate(summary.snapshot_times):
        dens = summary.hist_counts[j] / (summary.n_banks * width)
        _write_csv(
            out / f"hist_{t_snap:g}.csv",
            ["bin_left", "bin_right", "density"],
            zip(summary.hist_edges[:-1], summary.hist_edges[1:], dens),
        )
    write_manifest(out / "manifest.txt", _manifest_entries(args, sections, {
        "simulation.n": n, "simulation.t": T, "simulation.dt": dt,
        "simulation.seed": seed, "simulation.variant": variant.value,
        "absorbed_at": summary.absorbed_at,
    }))
    return EXIT_OK


def cmd_fixed_point(args, sections) -> int:
    params = _model_params(sections)
    fp = section_floats(sections, "fixed_point")
    cfg = FixedPointConfig(
        a=params.a,
        x0=params.x0,
        T=float(fp.get("t", 1.0)),
        n_paths=int(fp.get("n_paths", 10_000)),
        dt=float(fp.get("dt", 1e-3)),
        max_iter=int(fp.get("max_iter", 30)),
        tol=float(fp.get("tol", 1e-3)),
        seed=int(args.seed if args.seed is not None else fp.get("seed", 0)),
        init=str(fp.get("init", "point")),
    )
    result = picard_iterate(cfg)
    out = Path(args.out)
    header = ["t"] + [f"e_{k + 1}" for k in range(len(result.iterates))]
    cols = [cfg.times] + [it.values for it in result.iterates]
    _write_csv(out / "picard_iterates.csv", header, zip(*cols))
    diag_rows = []
    for k, gap in enumerate(result.sup_gaps):
        diag_rows.append([
            k + 1,
            gap,
            result.contraction_ratios[k - 1] if 0 < k <= len(result.contraction_ratios) else "",
            result.conjecture_lhs[k - 1] if 0 < k <= len(result.conjecture_lhs) else "",
            result.conjecture_rhs[k - 1] if 0 < k <= len(result.conjecture_rhs) else "",
        ])
    _write_csv(
        out / "diagnostics.csv",
        ["iteration", "sup_gap", "contraction_ratio", "conjecture_lhs", "conjecture_rhs"],
        diag_rows,
    )
    write_manifest(out / "manifest.txt", _manifest_entries(args, sections, {
        "fixed_point.converged": result.converged,
        "fixed_point.iterations": result.n_iterations,
        "fixed_point.seed": cfg.seed,
    }))
    return EXIT_OK if result.converged else EXIT_FLAGGED


def cmd_stationary_density(args, sections) -> int:
    params = _model_params(sections, a=args.a, x0=args.x0)
    st = section_floats(sections, "stationary")
    x_max = float(st.get("x_max", params.x0 + 8.0))
    n_points = int(st.get("n_points", 1000))
    sol = stationary_solution(params.a, params.x0, sigma=params.sigma)
    x = np.linspace(0.0, x_max, n_points)
    out = Path(args.out)
    _write_csv(out / "density.csv", ["x", "p"], zip(x, sol.density(x)))
    write_manifest(out / "manifest.txt", _manifest_entries(args, sections, {
        "model.a": params.a, "model.x0": params.x0, "e0": sol.e0,
    }))
    return EXIT_OK


def cmd_e0_surface(args, sections) -> int:
    st = section_floats(sections, "stationary")
    a_lo, a_hi = _parse_range(args.a_range, st, "a", default=(0.05, 2.0))
    x_lo, x_hi = _parse_range(args.x0_range, st, "x0", default=(0.8, 3.0))
    a_steps = int(st.get("a_steps", 12))
    x_steps = int(st.get("x0_steps", 12))
    rows = []
    for a in np.linspace(a_lo, a_hi, a_steps):
        for x0 in np.linspace(x_lo, x_hi, x_steps):
            rows.append([a, x0, stationary_solution(float(a), float(x0)).e0])
    out = Path(args.out)
    _write_csv(out / "e0_surface.csv", ["a", "x0", "e0"], rows)
    write_manifest(out / "manifest.txt", _manifest_entries(args, sections))
    return EXIT_OK


def _parse_range(flag_value, st, prefix, default):
    if flag_value:
        lo, hi = (float(v) for v in flag_value.split(":"))
        return lo, hi
    return float(st.get(f"{prefix}_min", default[0])), float(st.get(f"{prefix}_max", default[1]))


def _grid_from(sections, name="grid", defaults=(10.0, 10.0, 200, 100)) -> SpaceTimeGrid:
    g = section_floats(sections, name)
    return SpaceTimeGrid(
        length=float(g.get("l", defaults[0])),
        horizon=float(g.get("t", defaults[1])),
        n_space=int(g.get("n_space", defaults[2])),
        n_time=int(g.get("n_time", defaults[3])),
    )


def cmd_evolve_fp(args, sections) -> int:
    params = _model_params(sections)
    grid = _grid_from(sections, "grid")
    bl = section_floats(sections, "blowup")
    c = bl.get("c")
    if c:
        # concentrated triangular start (the blow-up configuration)
        p0 = DensitySnapshot(triangular_density(float(c))(grid.x), grid.h)
    else:
        # default: closed-form stationary density at the model constants
        p0 = stationary_solution(params.a, params.x0, sigma=params.sigma).snapshot(
            grid.h, grid.n_space + 1
        )
    run = evolve_density(
        p0, params, grid,
        rate_ceiling=float(bl.get("rate_ceiling", 1e3)),
        mass_loss_tol=float(bl.get("mass_loss_tol", 0.01)),
    )
    out = Path(args.out)
    rows = []
    stride = max(1, run.times.size // 200)
    for k in range(0, run.times.size, stride):
        for i in range(0, grid.n_space + 1):
            rows.append([run.times[k], grid.x[i], run.density[k, i]])
    _write_csv(out / "density.csv", ["t", "x", "p"], rows)
    _write_csv(
        out / "rates.csv",
        ["t", "edot", "e", "mean", "mass"],
        zip(run.times, run.rate_path, run.cumulative_rate, run.mean_path, run.mass_path),
    )
    _write_csv(out / "flags.csv", ["flag", "value"], [
        ["breakdown", run.breakdown],
        ["reason", run.breakdown_reason or ""],
        ["time", "" if run.breakdown_time is None else run.breakdown_time],
    ])
    write_manifest(out / "manifest.txt", _manifest_entries(args, sections, {
        "breakdown": run.breakdown,
    }))
    return EXIT_FLAGGED if run.breakdown else EXIT_OK


def cmd_blowup_check(args, sections) -> int:
    params = _model_params(sections)
    bl = section_floats(sections, "blowup")
    c = float(bl.get("c", params.x0 / (2.0 * params.a))) if params.a > 0 else float(bl.get("c", params.x0 / 2))
    p0 = triangular_density(c)
    if args.scan:
        cert = scan_mu(p0, params.a, params.x0)
        if cert is None:
            print("no admissible mu triggered the concentration condition")
            return EXIT_OK
    else:
        mu = float(args.mu if args.mu is not None else bl.get("mu", max(2 * params.a * params.x0, 1.0) * 1.01))
        cert = check_blowup_condition(p0, params.a, params.x0, mu, strict=False)
    print(f"mu={cert.mu}")
    print(f"lhs={cert.lhs}")
    print(f"rhs={cert.rhs}")
    print(f"triggered={cert.triggered}")
    print(f"admissible={cert.admissible} (bound mu > {cert.mu_bound})")
    return EXIT_FLAGGED if cert.triggered else EXIT_OK


def _mfg_m0(sections, grid: SpaceTimeGrid, params: ModelParams) -> np.ndarray:
    g = section_floats(sections, "mfg")
    center = float(g.get("m0_center", params.x0))
    std = float(g.get("m0_std", 0.5))
    radius = float(g.get("m0_radius", 3.5))
    return truncated_gaussian_profile(grid, center, std=std, radius=radius)


def cmd_solve_mfg(args, sections) -> int:
    params = _model_params(sections)
    grid = _grid_from(sections, "mfg")
    g = section_floats(sections, "mfg")
    m0 = _mfg_m0(sections, grid, params)
    kwargs = {}
    if args.exit_cost == "lq":
        coef = compute_lq_coefficients(params)
        u_ans, m_ans = assemble_stationary_solution(coef, params)
        kwargs = dict(
            u_left=coef.exit_cost,
            u_right=(float(u_ans(grid.x[-2])), float(u_ans(grid.x[-1]))),
            u_terminal=u_ans(grid.x),
        )
        m0 = m_ans.snapshot(grid.h, grid.n_space + 1).values
        m0 = m0 / (grid.h * m0.sum())
    sol = solve_mfg(
        m0, grid, params,
        outer_tol=float(g.get("outer_tol", 1e-6)),
        outer_max=int(g.get("outer_max", 200)),
        newton_tol=float(g.get("newton_tol", 1e-10)),
        newton_max=int(g.get("newton_max", 50)),
        **kwargs,
    )
    out = Path(args.out)
    _write_csv(out / "u.csv", ["n", "i", "value"],
               ([n, i, sol.U[n, i]] for n in range(grid.n_time + 1) for i in range(grid.n_space + 1)))
    _write_csv(out / "m.csv", ["n", "i", "value"],
               ([n, i, sol.M[n, i]] for n in range(grid.n_time + 1) for i in range(grid.n_space + 1)))
    _write_csv(out / "summary.csv", ["t", "mean", "default_rate"],
               zip(grid.t, sol.mean_path(), sol.default_rate_path()))
    _write_csv(out / "convergence.csv", ["k", "du", "dm"],
               ([k + 1, du, dm] for k, (du, dm) in enumerate(sol.history)))
    write_manifest(out / "manifest.txt", _manifest_entries(args, sections, {
        "mfg.converged": sol.converged, "mfg.iterations": sol.n_iterations,
    }))
    return EXIT_OK if sol.converged else EXIT_FLAGGED


def cmd_lq_benchmark(args, sections) -> int:
    params = _model_params(sections)
    coef = compute_lq_coefficients(params)
    u_ans, m_ans = assemble_stationary_solution(coef, params)
    out = Path(args.out)
    _write_csv(out / "coefficients.csv", ["name", "value"], [
        ["A", coef.A], ["B", coef.B], ["C", coef.C],
        ["gamma_star", coef.gamma_star], ["gamma_exact", coef.gamma_exact],
        ["exit_cost", coef.exit_cost], ["e0_eff", coef.e0_eff],
        ["mbar", coef.mbar], ["a_eff", coef.a_eff],
    ])
    x = np.linspace(0.0, float(section_floats(sections, "mfg").get("l", 10.0)), 501)
    _write_csv(out / "u_ansatz.csv", ["x", "u"], zip(x, u_ans(x)))
    _write_csv(out / "m_ansatz.csv", ["x", "m"], zip(x, m_ans.density(x)))
    write_manifest(out / "manifest.txt", _manifest_entries(args, sections, {
        "exit_cost": coef.exit_cost, "gamma_star": coef.gamma_star,
    }))
    return EXIT_OK


# ------------------------------------------------------------------- figures


def _master_manifest_update(out_root: Path, tag: str, outputs: dict) -> None:
    path = out_root / "manifest.txt"
    entries = read_manifest(path) if path.exists() else {}
    entries["version"] = __version__
    for name, rel in outputs.items():
        entries[f"{tag}.{name}"] = rel
    write_manifest(path, entries)


def run_figure(tag: str, out_root: Path, seed: int = 0, exact_scale: bool = False,
               jobs: int | None = None) -> int:
    """Produce the CSV data behind one headline experiment tag (F1..F9)."""
    tag = tag.upper()
    out = out_root / tag
    out.mkdir(parents=True, exist_ok=True)
    n_particles = 1_000_000 if exact_scale else 10_000
    n_paths = 100_000 if exact_scale else 4_000
    outputs: dict = {}

    def particles_run(variant, a, label, T=100.0, dt=1e-2):
        params = ModelParams(a=a, x0=2.0)
        snaps = [T - 10.0 + 2.5 * j for j in range(5)]
        summary = simulate_system(np.full(n_particles, params.x0), variant, params,
                                  T, dt, seed=seed, snapshot_times=snaps)
        _write_csv(out / f"mean_{label}.csv", ["t", "mean"],
                   zip(summary.times[::10], summary.mean_path[::10]))
        _write_csv(out / f"defaults_{label}.csv", ["t", "rate", "cumulative"],
                   zip(summary.times[::10], summary.default_rate[::10],
                       summary.cumulative_defaults[::10]))
        width = summary.hist_edges[1] - summary.hist_edges[0]
        dens = summary.hist_counts.sum(axis=0) / (summary.n_banks * len(summary.snapshot_times) * width)
        _write_csv(out / f"hist_{label}.csv", ["bin_left", "bin_right", "density"],
                   zip(summary.hist_edges[:-1], summary.hist_edges[1:], dens))
        outputs[f"mean_{label}"] = f"{tag}/mean_{label}.csv"
        outputs[f"defaults_{label}"] = f"{tag}/defaults_{label}.csv"
        outputs[f"hist_{label}"] = f"{tag}/hist_{label}.csv"

    def density_csv(a, x0, label="analytic"):
        sol = stationary_solution(a, x0)
        x = np.linspace(0.0, 6.0, 601)
        _write_csv(out / f"density_{label}.csv", ["x", "p"], zip(x, sol.density(x)))
        outputs[f"density_{label}"] = f"{tag}/density_{label}.csv"

    def mfg_run(label, a=0.5, x0=2.0, r=0.5, sigma=1.0):
        params = ModelParams(a=a, x0=x0, sigma=sigma, r=r, q=0.1, epsilon=0.01)
        grid = SpaceTimeGrid(length=10.0, horizon=10.0, n_space=200, n_time=100)
        sol = solve_mfg(truncated_gaussian_profile(grid, params.x0), grid, params)
        _write_csv(out / f"summary_{label}.csv", ["t", "mean", "default_rate"],
                   zip(grid.t, sol.mean_path(), sol.default_rate_path()))
        _write_csv(out / f"m_final_{label}.csv", ["x", "m"], zip(grid.x, sol.M[-1]))
        outputs[f"summary_{label}"] = f"{tag}/summary_{label}.csv"
        outputs[f"m_final_{label}"] = f"{tag}/m_final_{label}.csv"
        return sol, grid

    if tag == "F1":
        cfg = FixedPointConfig(a=0.0, x0=2.0, T=1.8, n_paths=n_paths, dt=2e-3,
                               max_iter=21, tol=1e-300, seed=seed, init="stationary")
        result = picard_iterate(cfg)
        header = ["t"] + [f"e_{k + 1}" for k in range(len(result.iterates))]
        cols = [cfg.times] + [it.values for it in result.iterates]
        _write_csv(out / "picard_iterates.csv", header, zip(*cols))
        outputs["picard_iterates"] = f"{tag}/picard_iterates.csv"
    elif tag == "F2":
        steps = 40 if exact_scale else 10
        rows = []
        for a in np.linspace(0.05, 2.0, steps):
            for x0 in np.linspace(0.8, 3.0, steps):
                rows.append([a, x0, stationary_solution(float(a), float(x0)).e0])
        _write_csv(out / "e0_surface.csv", ["a", "x0", "e0"], rows)
        outputs["e0_surface"] = f"{tag}/e0_surface.csv"
    elif tag in ("F3", "F4"):
        a = 0.01125 if tag == "F3" else 2.0
        density_csv(a, 2.0)
        particles_run(DynamicsVariant.PS, a, "ps")
        particles_run(DynamicsVariant.MFSTA, a, "mfsta")
    elif tag == "F5":
        for a, lbl in ((0.01125, "a_small"), (2.0, "a_large")):
            particles_run(DynamicsVariant.PS, a, f"ps_{lbl}")
            particles_run(DynamicsVariant.MFSTA, a, f"mfsta_{lbl}")
    elif tag == "F6":
        particles_run(DynamicsVariant.PS, 0.01125, "ps")
        particles_run(DynamicsVariant.MFSTA, 0.01125, "mfsta")
    elif tag == "F7":
        params = ModelParams(a=0.5, x0=2.0, sigma=1.0, r=0.5, q=0.1, epsilon=0.5)
        coef = compute_lq_coefficients(params)
        params = ModelParams(a=0.5, x0=2.0, sigma=1.0, r=0.5, q=0.1, epsilon=0.5,
                             gamma=coef.gamma_star)
        u_ans, m_ans = assemble_stationary_solution(coef, params)
        grid = SpaceTimeGrid(length=8.0, horizon=1.2, n_space=320, n_time=60)
        m0 = m_ans.snapshot(grid.h, grid.n_space + 1).values
        m0 /= grid.h * m0.sum()
        sol = solve_mfg(m0, grid, params, u_left=coef.exit_cost,
                        u_right=(float(u_ans(grid.x[-2])), float(u_ans(grid.x[-1]))),
                        u_terminal=u_ans(grid.x))
        for frac, lbl in ((0.0, "t0"), (0.5, "tmid"), (1.0, "tend")):
            n = int(round(frac * grid.n_time))
            _write_csv(out / f"u_{lbl}.csv", ["x", "u_numeric", "u_ansatz"],
                       zip(grid.x, sol.U[n], u_ans(grid.x)))
            outputs[f"u_{lbl}"] = f"{tag}/u_{lbl}.csv"
        _write_csv(out / "m_final.csv", ["x", "m_numeric", "m_ansatz"],
                   zip(grid.x, sol.M[-1], m_ans.density(grid.x)))
        outputs["m_final"] = f"{tag}/m_final.csv"
    elif tag == "F8":
        sweep = [("baseline", {}), ("x0_3", {"x0": 3.0}),
                 ("a_1", {"a": 1.0}), ("sigma_08", {"sigma": 0.8})]
        if jobs and jobs > 1:
            from concurrent.futures import ThreadPoolExecutor

            with ThreadPoolExecutor(max_workers=jobs) as pool:
                list(pool.map(lambda item: mfg_run(item[0], **item[1]), sweep))
        else:
            for label, kw in sweep:
                mfg_run(label, **kw)
    elif tag == "F9":
        sol, grid = mfg_run("baseline")
        _write_csv(out / "u_surface.csv", ["n", "i", "value"],
                   ([n, i, sol.U[n, i]] for n in range(grid.n_time + 1)
                    for i in range(grid.n_space + 1)))
        _write_csv(out / "m_surface.csv", ["n", "i", "value"],
                   ([n, i, sol.M[n, i]] for n in range(grid.n_time + 1)
                    for i in range(grid.n_space + 1)))
        outputs["u_surface"] = f"{tag}/u_surface.csv"
        outputs["m_surface"] = f"{tag}/m_surface.csv"
    else:
        raise ConfigError(f"unknown figure tag {tag!r} (expected F1..F9)")

    write_manifest(out / "manifest.txt",
                   {"version": __version__, "figure": tag, "seed": seed,
                    "exact_scale": exact_scale,
                    **{f"output.{k}": v for k, v in outputs.items()}})
    _master_manifest_update(out_root, tag, outputs)
    return EXIT_OK


def cmd_figure(args, sections) -> int:
    return run_figure(args.tag, Path(args.out), seed=int(args.seed or 0),
                      exact_scale=args.exact_scale, jobs=args.jobs)


# --------------------------------------------------------------------- main


def build_parser() -> _Parser:
    parser = _Parser(prog="bankmfg", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_out=True):
        p.add_argument("--config", default=None)
        p.add_argument("--set", dest="overrides", action="append", default=[],
                       metavar="SECTION.KEY=VALUE")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--jobs", type=int, default=None)
        if needs_out:
            p.add_argument("--out", required=True)

    p = sub.add_parser("simulate-particles", help="N-bank trajectory with cascades")
    p.add_argument("--variant", choices=["ps", "psa", "psb", "mfsta"], default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--t", type=float, default=None)
    p.add_argument("--dt", type=float, default=None)
    common(p)
    p.set_defaults(func=cmd_simulate_particles)

    p = sub.add_parser("fixed-point", help="Picard iteration of the default-count map")
    common(p)
    p.set_defaults(func=cmd_fixed_point)

    p = sub.add_parser("stationary-density", help="closed-form stationary density")
    p.add_argument("--a", type=float, default=None)
    p.add_argument("--x0", type=float, default=None)
    common(p)
    p.set_defaults(func=cmd_stationary_density)

    p = sub.add_parser("e0-surface", help="stationary default rate over (a, x0)")
    p.add_argument("--a-range", default=None, metavar="LO:HI")
    p.add_argument("--x0-range", default=None, metavar="LO:HI")
    common(p)
    p.set_defaults(func=cmd_e0_surface)

    p = sub.add_parser("evolve-fp", help="evolutionary density run")
    common(p)
    p.set_defaults(func=cmd_evolve_fp)

    p = sub.add_parser("blowup-check", help="Laplace concentration certificate")
    p.add_argument("--mu", type=float, default=None)
    p.add_argument("--scan", action="store_true")
    common(p, needs_out=False)
    p.set_defaults(func=cmd_blowup_check)

    p = sub.add_parser("solve-mfg", help="coupled value/density solver")
    p.add_argument("--exit-cost", choices=["lq"], default=None)
    common(p)
    p.set_defaults(func=cmd_solve_mfg)

    p = sub.add_parser("lq-benchmark", help="quadratic-ansatz analytic benchmark")
    common(p)
    p.set_defaults(func=cmd_lq_benchmark)

    p = sub.add_parser("figure", help="data behind one headline experiment (F1..F9)")
    p.add_argument("tag")
    p.add_argument("--exact-scale", action="store_true")
    common(p)
    p.set_defaults(func=cmd_figure)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit_Usage as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        sections = apply_overrides(load_config(args.config), args.overrides)
        return args.func(args, sections)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
