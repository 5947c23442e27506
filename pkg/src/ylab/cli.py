"""Command-line driver and experiment recipes.

Subcommands: ``toy`` (closed-form cusp flow), ``shear`` (3D shear
regularity study), ``euler-run`` (one solver run persisted as a record
directory), ``diagnose`` (probes over saved snapshots), ``theorem``
(multi-resolution solver runs plus the measured regularity-index curve
against both reference curves).

Every experiment writes CSV files with 17 significant digits (identical
config and seed give byte-identical CSVs) and, unless --no-figures is
passed, matplotlib figures next to them.  Exit codes: 0 ok, 2 bad
configuration, 3 numerical failure, 4 file-format or I/O failure.
``YLAB_THREADS`` caps internal parallelism (default 1).
"""

from __future__ import annotations

import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import click
import numpy as np

from . import figures
from .data import DataSpec, classify_p0, make_data
from .diagnostics import (
    critical_index,
    fit_loss_rate,
    key_integral,
    key_residual,
    level_set_gap,
    lvlsob_lower_bound,
    reference_curve,
    regularity_monitor,
    theorem_q,
    yudovich_q,
)
from .errors import ConfigError, FieldFormatError, NumericalError
from .grid import biot_savart, fit_loglog_slope, load_field
from .models import (
    gamma_curve,
    gamma_exponent,
    model_q,
    power_law_shear,
    shear_w1p_study,
    toy_advect,
    toy_trajectory,
)
from .data import sin_2theta
from .solver import RunRecord, SolverConfig, log_lipschitz_constant, run as solver_run

SCHEMA_VERSION = 1


# ---------------------------------------------------------------------------
# configuration document


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment as a serializable tree: which recipe, its data and
    solver sections, extra per-recipe parameters, outputs and seed."""

    experiment: str = "toy"
    data: DataSpec = field(default_factory=DataSpec)
    solver: SolverConfig = field(default_factory=SolverConfig)
    diagnostics: tuple = ()
    output_dir: str = "out"
    seed: int = 0
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.experiment not in ("toy", "shear", "euler", "diagnose", "theorem"):
            raise ConfigError(f"unknown experiment '{self.experiment}'")


def serialize_config(cfg: ExperimentConfig) -> str:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "experiment": cfg.experiment,
        "data": {
            "kind": cfg.data.kind,
            "beta": cfg.data.beta,
            "gamma": cfg.data.gamma,
            "cutoff_inner": cfg.data.cutoff_inner,
            "cutoff_outer": cfg.data.cutoff_outer,
        },
        "solver": {
            "n": cfg.solver.n,
            "dt": cfg.solver.dt,
            "t_end": cfg.solver.t_end,
            "interpolation": cfg.solver.interpolation,
            "characteristic_integrator": cfg.solver.characteristic_integrator,
            "snapshot_times": list(cfg.solver.snapshot_times),
            "cfl_number": cfg.solver.cfl_number,
            "max_substeps": cfg.solver.max_substeps,
        },
        "diagnostics": list(cfg.diagnostics),
        "output_dir": cfg.output_dir,
        "seed": cfg.seed,
        "params": cfg.params,
    }
    return json.dumps(doc, indent=2, sort_keys=True)


def parse_config(text: str) -> ExperimentConfig:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {version!r}")
    d = doc.get("data", {})
    s = doc.get("solver", {})
    try:
        data = DataSpec(
            kind=d.get("kind", "theorem_beta"),
            beta=float(d.get("beta", 0.25)),
            gamma=float(d.get("gamma", 1.0)),
            cutoff_inner=float(d.get("cutoff_inner", 0.5)),
            cutoff_outer=float(d.get("cutoff_outer", 2.0 / 3.0)),
        )
        solver = SolverConfig(
            n=int(s.get("n", 256)),
            dt=float(s.get("dt", 5e-3)),
            t_end=float(s.get("t_end", 0.5)),
            interpolation=s.get("interpolation", "monotone_bicubic"),
            characteristic_integrator=s.get("characteristic_integrator", "rk2"),
            snapshot_times=tuple(s.get("snapshot_times", ())),
            cfl_number=float(s.get("cfl_number", 0.5)),
            max_substeps=int(s.get("max_substeps", 64)),
        )
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc
    return ExperimentConfig(
        experiment=doc.get("experiment", "toy"),
        data=data,
        solver=solver,
        diagnostics=tuple(doc.get("diagnostics", ())),
        output_dir=doc.get("output_dir", "out"),
        seed=int(doc.get("seed", 0)),
        params=doc.get("params", {}),
    )


def load_config(path) -> ExperimentConfig:
    return parse_config(Path(path).read_text())


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return str(v)


def write_csv(path, header, rows) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


def thread_count() -> int:
    raw = os.environ.get("YLAB_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


# ---------------------------------------------------------------------------
# experiment implementations (importable; the click layer just parses flags)


def cmd_toy(t_list, x0_list, output_dir, make_figures=True) -> None:
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    times = sorted({0.0} | {float(t) for t in t_list})
    trajs = []
    for k, x0 in enumerate(x0_list):
        pts = np.array([toy_trajectory(np.asarray(x0, float), t) for t in times])
        write_csv(
            out / f"trajectory_{k:03d}.csv",
            ("t", "x1", "x2"),
            [(t, p[0], p[1]) for t, p in zip(times, pts)],
        )
        trajs.append((np.array(times), pts))
    write_csv(
        out / "model_q.csv",
        ("t", "gamma", "q"),
        [(t, gamma_exponent(t), model_q(t)) for t in times],
    )
    curve_x = np.geomspace(0.01, 0.99, 33)
    rows = []
    for t in times:
        pts = gamma_curve(t, curve_x)
        rows.extend((t, p[0], p[1]) for p in pts)
    write_csv(out / "gamma_curves.csv", ("t", "x1", "x2"), rows)
    sample = (np.arange(16) + 0.5) / 16.0
    rows = []
    for t in times:
        for a in sample:
            for b in sample:
                rows.append((t, a, b, float(toy_advect(sin_2theta, t, np.array([a, b])))))
    write_csv(out / "advect_samples.csv", ("t", "x1", "x2", "f"), rows)
    if make_figures:
        figures.trajectory_plot(
            out / "figures" / "trajectories.png",
            trajs,
            labels=[f"x0=({x0[0]:g},{x0[1]:g})" for x0 in x0_list],
            title="closed-form trajectories of the cusp flow",
        )
        figures.line_plot(
            out / "figures" / "gamma_curves.png",
            [
                {"x": curve_x, "y": gamma_curve(t, curve_x)[:, 1], "label": f"t={t:g}"}
                for t in times
            ],
            xlabel="x1",
            ylabel="x2",
            title="image of the diagonal: x2 = x1^gamma(t)",
        )
        tt = np.linspace(0.0, max(times) or 1.0, 65)
        figures.line_plot(
            out / "figures" / "model_q.png",
            [{"x": tt, "y": model_q(tt), "label": "q(t) = 2/(2-exp(-t))"}],
            xlabel="t",
            ylabel="q",
            title="critical index of the advected scalar",
        )


def cmd_shear(p, eps, t, resolutions, norm_exponent, output_dir, make_figures=True) -> None:
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    profiles = power_law_shear(p, eps)
    est = shear_w1p_study(profiles, t, resolutions, p=norm_exponent)
    rows = [
        (p, eps, t, est.p, n, v, est.slope, est.verdict)
        for n, v in zip(est.resolutions, est.norms)
    ]
    write_csv(
        out / "study.csv",
        ("profile_p", "eps", "t", "norm_p", "n", "w1p_norm", "slope", "verdict"),
        rows,
    )
    if make_figures:
        figures.line_plot(
            out / "figures" / "shear_norms.png",
            [{"x": est.resolutions, "y": est.norms,
              "label": f"p={est.p:g}, t={t:g} ({est.verdict})", "style": "o-"}],
            xlabel="n",
            ylabel="W^{1,p} seminorm",
            xscale="log",
            yscale="log",
            title="shear-flow resolution study",
        )


def cmd_euler(data_spec: DataSpec, solver_config: SolverConfig, output_dir,
              make_figures=True) -> RunRecord:
    out = Path(output_dir)
    data = make_data(data_spec, solver_config.n)
    record = solver_run(data, solver_config, data_spec=data_spec)
    record.save(out)
    if make_figures:
        d = record.diagnostics
        figures.line_plot(
            out / "figures" / "conserved.png",
            [
                {"x": d[:, 0], "y": d[:, 1], "label": "|w|_L1"},
                {"x": d[:, 0], "y": d[:, 2], "label": "|w|_L2"},
                {"x": d[:, 0], "y": d[:, 3], "label": "|w|_Linf"},
                {"x": d[:, 0], "y": d[:, 4], "label": "energy"},
            ],
            xlabel="t",
            ylabel="value",
            title="conserved quantities along the run",
        )
        figures.field_heatmap(
            out / "figures" / "final_vorticity.png",
            record.snapshots[-1][1],
            title=f"vorticity at t={record.snapshots[-1][0]:g}",
        )
    return record


_PROBE_KINDS = ("key_integral", "key_residual", "level_gap", "critical_index")


def cmd_diagnose(snapshot_paths, probes, output_dir, make_figures=True) -> None:
    out = Path(output_dir)
    if not probes:
        out.mkdir(parents=True, exist_ok=True)
        return
    fields = {}
    for path in snapshot_paths:
        fields[Path(path).name] = load_field(path, kind="scalar")
    for probe in probes:
        kind = probe.get("kind")
        if kind not in _PROBE_KINDS:
            raise ConfigError(f"unknown probe kind '{kind}'")
        if kind == "key_integral":
            rows = []
            for name, f in fields.items():
                for x in probe.get("points", ()):
                    res = key_integral(f, x)
                    rows.append((name, x[0], x[1], res.value, res.empty_domain))
            write_csv(out / "key_integral.csv",
                      ("snapshot", "x1", "x2", "value", "empty_domain"), rows)
        elif kind == "key_residual":
            rows = []
            for name, f in fields.items():
                w = _as_vorticity(f, name)
                u = biot_savart(w)
                for x in probe.get("points", ()):
                    r = key_residual(w, u, x)
                    rows.append((name, x[0], x[1], r.key_integral, r.b1, r.b2,
                                 r.bound_ratio_1, r.bound_ratio_2))
            write_csv(
                out / "key_residual.csv",
                ("snapshot", "x1", "x2", "key_integral", "b1", "b2",
                 "bound_ratio_1", "bound_ratio_2"),
                rows,
            )
        elif kind == "level_gap":
            rows, fit_rows, bound_rows = [], [], []
            level = float(probe.get("level", 1.0))
            tol = float(probe.get("tol", 1e-3))
            axis = probe.get("from_axis", "x1")
            for name, f in fields.items():
                prof = level_set_gap(f, probe["radii"], level, tol, from_axis=axis)
                rows.extend((name, r, th) for r, th in zip(prof.radii, prof.theta_star))
                exponent = fit_loglog_slope(prof.radii, prof.theta_star)
                fit_rows.append((name, level, tol, exponent))
                bound_rows.extend(
                    (name, float(pb), lvlsob_lower_bound(prof, float(pb)))
                    for pb in probe.get("bound_p", ())
                )
                if make_figures:
                    figures.line_plot(
                        out / "figures" / f"level_gap_{name}.png",
                        [{"x": prof.radii, "y": prof.theta_star, "style": "o-",
                          "label": f"level={level:g}"}],
                        xlabel="r",
                        ylabel="theta*",
                        xscale="log",
                        yscale="log",
                        title=f"level-set gap, {name}",
                    )
            write_csv(out / "level_gap.csv", ("snapshot", "radius", "theta_star"), rows)
            write_csv(out / "level_gap_fit.csv",
                      ("snapshot", "level", "tol", "fit_exponent"), fit_rows)
            if bound_rows:
                write_csv(out / "level_sobolev_bound.csv",
                          ("snapshot", "p", "lower_bound"), bound_rows)
        elif kind == "critical_index":
            ladder = sorted(fields.values(), key=lambda f: f.n)
            by_n = {f.n: f for f in ladder}
            result = critical_index(
                lambda n: by_n[n], probe.get("p_grid", np.linspace(1.1, 2.0, 10)),
                sorted(by_n),
            )
            write_csv(out / "critical_index.csv",
                      ("p_hat", "p_lo", "p_hi"),
                      [(result.p_hat, result.p_lo, result.p_hi)])
            write_csv(
                out / "critical_index_estimates.csv",
                ("p", "slope", "verdict"),
                [(e.p, e.slope, e.verdict) for e in result.estimates],
            )
    if make_figures:
        for name, f in fields.items():
            figures.field_heatmap(out / "figures" / f"{name}.png", f, title=name)


def _as_vorticity(f, name):
    from .grid import GridField

    try:
        return GridField(f.values, kind="vorticity")
    except ValueError as exc:
        raise ConfigError(f"snapshot {name} is not usable as vorticity: {exc}") from exc


def cmd_theorem(beta, n_list, t_end, output_dir, dt: Optional[float] = None,
                snapshot_count: int = 3, seed: int = 0, make_figures=True,
                save_runs=True) -> dict:
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    spec = DataSpec(kind="theorem_beta", beta=beta)
    p0 = classify_p0(spec)
    n_list = sorted(int(n) for n in n_list)
    n_ref = n_list[-1]
    interior = np.linspace(0.0, t_end, snapshot_count + 2)[1:-1]
    if dt is None:
        u0 = biot_savart(make_data(spec, n_list[0]))
        dt = 0.5 * (2.0 / n_ref) / max(u0.max_speed(), 1e-9)
    base = SolverConfig(n=n_ref, dt=dt, t_end=t_end,
                        snapshot_times=tuple(np.round(interior, 12)))

    def run_one(n: int) -> RunRecord:
        cfg = replace(base, n=n)
        return solver_run(make_data(spec, n), cfg, data_spec=spec)

    workers = min(thread_count(), len(n_list))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = dict(zip(n_list, pool.map(run_one, n_list)))
    else:
        records = {n: run_one(n) for n in n_list}
    if save_runs:
        for n, rec in records.items():
            rec.save(out / "runs" / f"n{n}")

    p_grid = np.round(np.linspace(1.05, 2.0, 20), 10)
    curve = regularity_monitor(
        records[n_ref], p_grid, n_list, rerun=lambda n: records[n]
    )
    c_hat = log_lipschitz_constant(
        biot_savart(records[n_ref].snapshots[0][1]), 1.0, seed=seed
    )
    c0_fit = max(fit_loss_rate(curve.times, curve.q_values, p0), 1e-3)
    t_curve = curve.times
    ref_theorem = reference_curve("theorem", t_curve, theorem_q(p0, c0_fit, t_curve))
    ref_yud = reference_curve("yudovich_bound", t_curve, yudovich_q(p0, c_hat, t_curve))

    rows = []
    for c in (curve, ref_theorem, ref_yud):
        rows.extend(
            (t, q, lo, hi, c.source)
            for t, q, lo, hi in zip(c.times, c.q_values, c.q_lo, c.q_hi)
        )
    write_csv(out / "regularity.csv", ("t", "q", "q_lo", "q_hi", "source"), rows)
    write_csv(
        out / "fits.csv",
        ("p0", "c0_fit", "log_lipschitz_constant"),
        [(p0, c0_fit, c_hat)],
    )
    if make_figures:
        figures.line_plot(
            out / "figures" / "regularity.png",
            [
                {"x": curve.times, "y": curve.q_values, "lo": curve.q_lo,
                 "hi": curve.q_hi, "label": "measured", "style": "o-"},
                {"x": t_curve, "y": ref_theorem.q_values, "label": "loss reference",
                 "style": "--"},
                {"x": t_curve, "y": ref_yud.q_values, "label": "Riccati lower bound",
                 "style": ":"},
            ],
            xlabel="t",
            ylabel="critical index q",
            title=f"regularity index, beta={beta:g} (p0={p0:.4g})",
        )
        figures.field_heatmap(
            out / "figures" / "final_vorticity.png",
            records[n_ref].snapshots[-1][1],
            title=f"vorticity at t={t_end:g}, n={n_ref}",
        )
    return {"curve": curve, "p0": p0, "c0_fit": c0_fit, "log_lip": c_hat,
            "records": records}


# ---------------------------------------------------------------------------
# click layer


def _guarded(fn, *args, **kwargs):
    try:
        fn(*args, **kwargs)
    except (ConfigError, ValueError) as exc:
        click.echo(f"configuration error: {exc}", err=True)
        sys.exit(2)
    except NumericalError as exc:
        click.echo(f"numerical failure: {exc}", err=True)
        sys.exit(3)
    except (FieldFormatError, OSError) as exc:
        click.echo(f"i/o failure: {exc}", err=True)
        sys.exit(4)


def _parse_point(_ctx, _param, values):
    out = []
    for v in values:
        parts = v.split(",")
        if len(parts) != 2:
            raise click.BadParameter(f"expected 'x1,x2', got '{v}'")
        out.append((float(parts[0]), float(parts[1])))
    return tuple(out)


@click.group()
@click.version_option()
def main():
    """Numerical laboratory for bounded-vorticity 2D Euler flows."""


@main.command()
@click.option("--time", "-t", "times", type=float, multiple=True,
              default=(0.25, 0.5, 1.0), show_default=True,
              help="Evaluation times.")
@click.option("--start", "-x", "starts", callback=_parse_point, multiple=True,
              default=("0.5,0.5", "0.3,0.3", "0.7,0.7"), show_default=True,
              help="Start points 'x1,x2' in the open unit square.")
@click.option("--output-dir", "-o", default="out/toy", show_default=True)
@click.option("--figures/--no-figures", "make_figures", default=True, show_default=True)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="JSON experiment config; overrides flags.")
def toy(times, starts, output_dir, make_figures, config_path):
    """Closed-form cusp flow: trajectories, cusp curves, index q(t)."""
    if config_path:
        cfg = load_config(config_path)
        times = tuple(cfg.params.get("t_list", times))
        starts = tuple(tuple(x) for x in cfg.params.get("x0_list", starts))
        output_dir = cfg.output_dir
    _guarded(cmd_toy, times, starts, output_dir, make_figures)


@main.command()
@click.option("--profile-exponent", "-p", type=float, default=1.5, show_default=True,
              help="Sobolev exponent the profiles are built for.")
@click.option("--eps", type=float, default=0.2, show_default=True,
              help="Profile regularization exponent.")
@click.option("--time", "-t", type=float, default=0.0, show_default=True)
@click.option("--resolution", "-n", "resolutions", type=int, multiple=True,
              default=(256, 512, 1024), show_default=True)
@click.option("--norm-exponent", type=float, default=None,
              help="Exponent of the measured norm (default: profile exponent).")
@click.option("--output-dir", "-o", default="out/shear", show_default=True)
@click.option("--figures/--no-figures", "make_figures", default=True, show_default=True)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def shear(profile_exponent, eps, time, resolutions, norm_exponent, output_dir,
          make_figures, config_path):
    """Multi-resolution regularity study of the lifted shear flow."""
    if config_path:
        cfg = load_config(config_path)
        p = cfg.params
        profile_exponent = float(p.get("profile_exponent", profile_exponent))
        eps = float(p.get("eps", eps))
        time = float(p.get("t", time))
        resolutions = tuple(p.get("resolutions", resolutions))
        norm_exponent = p.get("norm_exponent", norm_exponent)
        output_dir = cfg.output_dir
    _guarded(cmd_shear, profile_exponent, eps, time, resolutions,
             norm_exponent, output_dir, make_figures)


@main.command("euler-run")
@click.option("--kind", type=click.Choice(["theorem_beta", "bahouri_chemin", "h1_log"]),
              default="theorem_beta", show_default=True)
@click.option("--beta", type=float, default=0.25, show_default=True)
@click.option("--gamma", type=float, default=1.0, show_default=True)
@click.option("--resolution", "-n", type=int, default=256, show_default=True)
@click.option("--dt", type=float, default=None, help="Time step (default: CFL-sized).")
@click.option("--t-end", type=float, default=0.5, show_default=True)
@click.option("--snapshot", "snapshots", type=float, multiple=True,
              help="Interior snapshot times (0 and t_end always included).")
@click.option("--interpolation", type=click.Choice(["bicubic", "monotone_bicubic"]),
              default="monotone_bicubic", show_default=True)
@click.option("--integrator", type=click.Choice(["rk2", "rk4"]), default="rk2",
              show_default=True)
@click.option("--output-dir", "-o", default="out/run", show_default=True)
@click.option("--figures/--no-figures", "make_figures", default=True, show_default=True)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def euler_run(kind, beta, gamma, resolution, dt, t_end, snapshots, interpolation,
              integrator, output_dir, make_figures, config_path):
    """Evolve one initial-data family and persist the run record."""

    def body():
        nonlocal dt
        if config_path:
            cfg = load_config(config_path)
            spec = cfg.data
            solver_cfg = cfg.solver
            outdir = cfg.output_dir
        else:
            spec = DataSpec(kind=kind, beta=beta, gamma=gamma)
            if dt is None:
                u0 = biot_savart(make_data(spec, resolution))
                dt = min(
                    0.5 * (2.0 / resolution) / max(u0.max_speed(), 1e-9), t_end
                )
            solver_cfg = SolverConfig(
                n=resolution, dt=dt, t_end=t_end, interpolation=interpolation,
                characteristic_integrator=integrator,
                snapshot_times=tuple(snapshots),
            )
            outdir = output_dir
        cmd_euler(spec, solver_cfg, outdir, make_figures)

    _guarded(body)


@main.command()
@click.argument("snapshots", nargs=-1, type=click.Path(exists=True))
@click.option("--probes", "probes_path", type=click.Path(exists=True), default=None,
              help="JSON list of probe specs.")
@click.option("--output-dir", "-o", default="out/diagnose", show_default=True)
@click.option("--figures/--no-figures", "make_figures", default=True, show_default=True)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def diagnose(snapshots, probes_path, output_dir, make_figures, config_path):
    """Run diagnostics probes over saved field snapshots."""

    def body():
        probes = ()
        outdir = output_dir
        if config_path:
            cfg = load_config(config_path)
            probes = cfg.diagnostics
            outdir = cfg.output_dir
        if probes_path:
            probes = tuple(json.loads(Path(probes_path).read_text()))
        cmd_diagnose(snapshots, probes, outdir, make_figures)

    _guarded(body)


@main.command()
@click.option("--beta", type=float, default=0.25, show_default=True)
@click.option("--resolution", "-n", "n_list", type=int, multiple=True,
              default=(256, 512, 1024), show_default=True,
              help="Resolution ladder (each entry doubles the previous).")
@click.option("--t-end", type=float, default=0.25, show_default=True)
@click.option("--dt", type=float, default=None, help="Time step (default: CFL-sized).")
@click.option("--snapshot-count", type=int, default=3, show_default=True,
              help="Interior snapshot times between 0 and t_end.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--output-dir", "-o", default="out/theorem", show_default=True)
@click.option("--save-runs/--no-save-runs", default=True, show_default=True)
@click.option("--figures/--no-figures", "make_figures", default=True, show_default=True)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def theorem(beta, n_list, t_end, dt, snapshot_count, seed, output_dir, save_runs,
            make_figures, config_path):
    """Measured regularity-index decay against both reference curves."""
    if config_path:
        cfg = load_config(config_path)
        beta = cfg.data.beta
        p = cfg.params
        n_list = tuple(p.get("n_list", n_list))
        t_end = float(p.get("t_end", cfg.solver.t_end))
        dt = p.get("dt", dt)
        snapshot_count = int(p.get("snapshot_count", snapshot_count))
        seed = cfg.seed
        output_dir = cfg.output_dir
    _guarded(cmd_theorem, beta, n_list, t_end, output_dir, dt=dt,
             snapshot_count=snapshot_count, seed=seed, make_figures=make_figures,
             save_runs=save_runs)


if __name__ == "__main__":
    main()
