"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines as they complete.
"""

import time

import numpy as np
import pytest

from ylab.cli import cmd_theorem
from ylab.data import DataSpec, classify_p0, make_data, odd_odd_extend, sin_2theta
from ylab.diagnostics import critical_index, indicator_key_integral, key_integral, yudovich_q
from ylab.grid import GridField, biot_savart, fit_loglog_slope, mesh
from ylab.models import (
    cutoff_sin_2theta,
    gamma_exponent,
    model_q,
    origin_gradient_estimate,
    power_law_shear,
    rk4_trajectory,
    shear_w1p_study,
    toy_advect,
    toy_trajectory,
    toy_velocity,
)
from ylab.solver import SolverConfig, flow_map, run, step


def report(num, name, ok, detail):
    print(f"\n[criterion {num:02d}] {'PASS' if ok else 'FAIL'} {name}: {detail}")
    assert ok, f"criterion {num} ({name}): {detail}"


def cfl_dt(data, number=0.5):
    u = biot_savart(data)
    return number * data.cell_size / u.max_speed()


def toy_grid_field(t, n):
    f0 = cutoff_sin_2theta()
    m = n // 2
    c = (np.arange(m) + 0.5) / m
    pts = np.stack(
        np.broadcast_arrays(
            np.broadcast_to(c[:, None], (m, m)), np.broadcast_to(c[None, :], (m, m))
        ),
        axis=-1,
    )
    return odd_odd_extend(toy_advect(f0, t, pts))


def test_criterion_01_toy_flow_exactness():
    start = time.perf_counter()
    a = np.array([0.1, 0.3, 0.5, 0.7])
    x0 = np.stack([a, a], axis=-1)
    t_grid = np.linspace(0.25, 2.0, 8)
    traj = rk4_trajectory(lambda t, x: toy_velocity(x), x0, t_grid, dt=1e-3)
    rel = 0.0
    for i, t in enumerate(t_grid):
        exact = toy_trajectory(x0, t)
        rel = max(rel, float(np.max(np.abs(traj.points[i] - exact) / np.abs(exact))))
    elapsed = time.perf_counter() - start
    report(
        1,
        "toy-flow exactness",
        rel <= 1e-7 and elapsed < 1.0,
        f"max rel err {rel:.2e} (tol 1e-7), runtime {elapsed:.2f}s (limit 1s)",
    )


def test_criterion_02_cusp_exponent():
    a = np.geomspace(0.05, 0.9, 20)
    x0 = np.stack([a, a], axis=-1)
    worst = 0.0
    for t in (0.25, 0.5, 1.0):
        traj = rk4_trajectory(lambda s, x: toy_velocity(x), x0, [t], dt=1e-3)
        pts = traj.points[0]
        fitted = np.polyfit(np.log(pts[:, 0]), np.log(pts[:, 1]), 1)[0]
        worst = max(worst, abs(fitted - gamma_exponent(t)))
    report(
        2,
        "cusp-curve exponent",
        worst <= 1e-3,
        f"max |fitted - exp(-t)/(2-exp(-t))| = {worst:.2e} (tol 1e-3)",
    )


def test_criterion_03_model_regularity_index():
    start = time.perf_counter()
    t = 0.5
    result = critical_index(
        lambda n: toy_grid_field(t, n),
        np.linspace(1.1, 2.0, 10),
        [256, 512, 1024, 2048],
    )
    q = float(model_q(t))
    err = abs(result.p_hat - q)
    elapsed = time.perf_counter() - start
    report(
        3,
        "model regularity index",
        err <= 0.05 and elapsed < 300.0,
        f"p_hat {result.p_hat:.4f} vs 2/(2-e^-1/2) = {q:.4f}, err {err:.4f} "
        f"(tol 0.05), runtime {elapsed:.0f}s (limit 300s)",
    )


def test_criterion_04_key_integral_closed_form():
    x1, x2 = mesh(256)
    field = GridField(np.sign(x1) * np.sign(x2) + 0.0, kind="vorticity")
    rel = 0.0
    for xa in np.linspace(0.05, 0.45, 10):
        for xb in np.linspace(0.05, 0.45, 10):
            got = key_integral(field, (xa, xb)).value
            ref = indicator_key_integral(xa, xb)
            rel = max(rel, abs(got - ref) / abs(ref))
    log_dev = 0.0
    for delta in (1e-2, 1e-3, 1e-4):
        got = key_integral(field, (delta, delta)).value
        log_dev = max(log_dev, abs(got - (2 / np.pi) * np.log(1 / (4 * delta))))
    report(
        4,
        "key integral closed form",
        rel <= 1e-8 and log_dev <= 0.5,
        f"max rel err {rel:.2e} (tol 1e-8), log-growth deviation {log_dev:.3f} "
        f"(tol 0.5)",
    )


def test_criterion_05_solver_conservation():
    start = time.perf_counter()
    spec = DataSpec(kind="theorem_beta", beta=0.25)
    data = make_data(spec, 512)
    cfg = SolverConfig(n=512, dt=cfl_dt(data), t_end=0.5)
    rec = run(data, cfg, data_spec=spec)
    d = rec.diagnostics
    l2 = abs(d[-1, 2] - d[0, 2]) / d[0, 2]
    en = abs(d[-1, 4] - d[0, 4]) / d[0, 4]
    linf_ok = bool(np.all(np.diff(d[:, 3]) <= 1e-14))
    v = rec.snapshots[-1][1].values
    sym = max(
        float(np.max(np.abs(v + v[::-1, :]))), float(np.max(np.abs(v + v[:, ::-1])))
    )
    elapsed = time.perf_counter() - start
    report(
        5,
        "solver conservation",
        l2 <= 0.01 and en <= 0.01 and linf_ok and sym <= 1e-12 and elapsed < 600.0,
        f"L2 drift {l2:.2e}, energy drift {en:.2e} (tol 1e-2), Linf "
        f"non-increasing {linf_ok}, odd-odd residual {sym:.2e} (tol 1e-12), "
        f"runtime {elapsed:.0f}s (limit 600s)",
    )


def test_criterion_06_taylor_green_steadiness():
    n = 128
    x1, x2 = mesh(n)
    w0 = GridField(np.sin(np.pi * x1) * np.sin(np.pi * x2), kind="vorticity")
    dt = cfl_dt(w0)
    cfg = SolverConfig(n=n, dt=dt, t_end=200 * dt, interpolation="bicubic")
    w = w0
    for _ in range(100):
        w = step(w, dt, cfg)
    err = float(np.max(np.abs(w.values - w0.values))) / w0.max_abs()
    report(
        6,
        "steady-state preservation",
        err <= 1e-4,
        f"rel sup error {err:.2e} after 100 steps at n=128 (tol 1e-4)",
    )


def test_criterion_07_initial_index():
    details = []
    ok = True
    for beta in (0.2, 0.3):
        spec = DataSpec(kind="theorem_beta", beta=beta)
        p0 = classify_p0(spec)
        result = critical_index(
            lambda n: make_data(spec, n),
            np.linspace(1.1, 2.0, 10),
            [256, 512, 1024, 2048],
        )
        err = abs(result.p_hat - p0)
        ok = ok and err <= 0.05
        details.append(f"beta={beta}: p_hat={result.p_hat:.4f} p0={p0:.4f} err={err:.4f}")
    report(7, "initial critical index", ok, "; ".join(details) + " (tol 0.05)")


def test_criterion_08_index_decay_direction():
    result = cmd_theorem(
        0.25,
        [256, 512, 1024],
        0.25,
        "out/acceptance_theorem",
        snapshot_count=3,
        make_figures=True,
        save_runs=False,
    )
    curve = result["curve"]
    p0 = result["p0"]
    non_increasing = all(
        curve.q_lo[k + 1] <= curve.q_hi[k] + 1e-12 for k in range(len(curve.times) - 1)
    )
    separated = curve.q_hi[-1] < p0
    ref = yudovich_q(p0, result["log_lip"], curve.times)
    above_riccati = bool(np.all(curve.q_values >= ref - 1e-12))
    report(
        8,
        "index decay direction",
        non_increasing and separated and above_riccati,
        f"q(t) = {np.round(curve.q_values, 4).tolist()}, final interval "
        f"[{curve.q_lo[-1]:.4f}, {curve.q_hi[-1]:.4f}] vs p0 = {p0:.4f} "
        f"(separated: {separated}), non-increasing within intervals: "
        f"{non_increasing}, above Riccati reference: {above_riccati}",
    )


def test_criterion_09_shear_classification():
    p = 1.5
    resolutions = [512, 1024, 2048]
    finite0 = shear_w1p_study(power_law_shear(p, 0.6 / p), 0.0, resolutions)
    divergent1 = shear_w1p_study(power_law_shear(p, 0.1 / (2 * p)), 1.0, resolutions)
    half = shear_w1p_study(power_law_shear(p, 0.1 / (2 * p)), 1.0, resolutions, p=p / 2)
    ok = (
        finite0.verdict == "finite"
        and divergent1.verdict == "divergent"
        and half.verdict == "finite"
    )
    report(
        9,
        "shear-flow classification",
        ok,
        f"t=0 at p: {finite0.verdict} (slope {finite0.slope:+.3f}); "
        f"t=1 at p: {divergent1.verdict} (slope {divergent1.slope:+.3f}); "
        f"t=1 at p/2: {half.verdict} (slope {half.slope:+.3f})",
    )


def test_criterion_10_origin_regularization_rate():
    ts = np.linspace(0.05, 0.5, 10)
    vals = [origin_gradient_estimate(t) for t in ts]
    slope = fit_loglog_slope(ts, vals)
    monotone = all(b < a for a, b in zip(vals, vals[1:]))
    positive = all(v > 0 for v in vals)
    report(
        10,
        "1/t regularization",
        abs(slope + 1.0) <= 0.1 and monotone and positive,
        f"log-log slope {slope:.4f} (target -1 +/- 0.1), monotone decreasing "
        f"{monotone}, positive {positive}",
    )


def test_criterion_11_radial_flow_bounds():
    spec = DataSpec(kind="theorem_beta", beta=0.25)
    n = 256
    data = make_data(spec, n)
    cfg = SolverConfig(
        n=n,
        dt=cfl_dt(data),
        t_end=0.5,
        snapshot_times=tuple(np.round(np.arange(0.05, 0.5, 0.05), 3)),
    )
    rec = run(data, cfg, data_spec=spec)
    rng = np.random.default_rng(7)
    m = 50
    r0 = np.exp(rng.uniform(np.log(0.03), np.log(0.1), m))
    ang = rng.uniform(0.05, np.pi / 2 - 0.05, m)
    starts = np.stack([r0 * np.cos(ang), r0 * np.sin(ang)], axis=-1)
    t_grid = np.round(np.linspace(0.05, 0.5, 10), 6)
    which = rng.integers(0, t_grid.size, m)
    traj = flow_map(rec, starts, t_grid, dt=2e-3)
    exponents = np.empty(m)
    times = np.empty(m)
    usable = np.ones(m, dtype=bool)
    for k in range(m):
        i = int(which[k])
        if traj.flags[i, k]:
            usable[k] = False
            continue
        p = traj.points[i, k]
        exponents[k] = np.log(np.hypot(p[0], p[1])) / np.log(r0[k])
        times[k] = t_grid[i]
    idx = np.nonzero(usable)[0]
    fit_half = idx[::2]
    check = idx
    c_fit = float(np.max(np.abs(exponents[fit_half] - 1.0) / times[fit_half]))
    c_star = 1.5 * c_fit + 0.05
    dev = np.abs(exponents[check] - 1.0)
    holds = bool(np.all(dev <= c_star * times[check]))
    report(
        11,
        "radial flow bounds",
        holds and c_fit < 3.0 and idx.size >= 45,
        f"fitted c = {c_fit:.3f} on {fit_half.size} samples; bounds |x|^(1+ct) "
        f"<= |Phi| <= |x|^(1-ct) hold with c = {c_star:.3f} on all "
        f"{check.size} usable samples: {holds}",
    )
