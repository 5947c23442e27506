"""Semi-Lagrangian time evolution of bounded vorticity on the torus.

Advection by backward characteristics with interpolation tolerates the
unbounded vorticity gradients of the rough data families (a spectral
transport scheme would ring), and with clamped interpolation it obeys a
discrete maximum principle, which is the primary fidelity criterion here
because transport conserves every L^p norm of the vorticity.

One step of size dt performs a midpoint update of the velocity field:
solve for u at the current time, advect a half step, re-solve for the
midpoint velocity, then advect the full step with it.  Characteristic feet
are traced in the frozen midpoint field with RK2 or RK4.  An adaptive CFL
guard splits steps so feet never travel more than half a cell.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .data import DataSpec, make_data
from .errors import ConfigError, NumericalError
from .grid import GridField, VelocityField, biot_savart, cell_coords, lp_norm, save_field, load_field
from .models import Trajectory

DIAGNOSTIC_COLUMNS = ("t", "l1", "l2", "linf", "energy")


def _spline_coefficients(values: np.ndarray) -> np.ndarray:
    """Periodic cubic B-spline prefilter (exact interpolation at nodes).

    The cubic B-spline sampled at integers is (1/6, 4/6, 1/6), whose
    transfer function (4 + 2 cos(2 pi k / n))/6 is strictly positive, so
    deconvolution in Fourier space is stable.
    """
    n = values.shape[0]
    t = (4.0 + 2.0 * np.cos(2.0 * np.pi * np.fft.fftfreq(n))) / 6.0
    tr = t[: n // 2 + 1]
    vhat = np.fft.rfft2(values)
    vhat /= t[:, None] * tr[None, :]
    return np.fft.irfft2(vhat, s=(n, n))


def _bspline_weights(s: np.ndarray):
    s2 = s * s
    s3 = s2 * s
    w0 = (1.0 - 3.0 * s + 3.0 * s2 - s3) / 6.0
    w1 = (4.0 - 6.0 * s2 + 3.0 * s3) / 6.0
    w2 = (1.0 + 3.0 * s + 3.0 * s2 - 3.0 * s3) / 6.0
    w3 = s3 / 6.0
    return w0, w1, w2, w3


class BicubicInterpolant:
    """Periodic bicubic sampling of grid values at arbitrary points.

    Plain mode evaluates the interpolating cubic B-spline (fourth order,
    smooth, symmetric stencil).  Clamped mode additionally limits each
    value to the range of the four surrounding samples, which enforces the
    discrete maximum principle at the cost of first-order accuracy near
    extrema.
    """

    def __init__(self, values: np.ndarray, clamp: bool = False):
        self.n = values.shape[0]
        self.coef = _spline_coefficients(values)
        self.values = values
        self.clamp = clamp

    def __call__(self, x1: np.ndarray, x2: np.ndarray) -> np.ndarray:
        n = self.n
        f1 = (np.asarray(x1) + 1.0) * (n / 2.0) - 0.5
        f2 = (np.asarray(x2) + 1.0) * (n / 2.0) - 0.5
        i0 = np.floor(f1).astype(np.int64)
        j0 = np.floor(f2).astype(np.int64)
        s1 = f1 - i0
        s2 = f2 - j0
        w1 = _bspline_weights(s1)
        w2 = _bspline_weights(s2)
        flat = self.coef.ravel()
        rows = [((i0 + a - 1) % n) * n for a in range(4)]
        cols = [(j0 + b - 1) % n for b in range(4)]
        out = np.zeros(np.broadcast_shapes(f1.shape, f2.shape))
        for a in range(4):
            acc = w2[0] * flat.take(rows[a] + cols[0])
            for b in range(1, 4):
                acc += w2[b] * flat.take(rows[a] + cols[b])
            out += w1[a] * acc
        if self.clamp:
            vflat = self.values.ravel()
            r0 = (i0 % n) * n
            r1 = ((i0 + 1) % n) * n
            v00 = vflat.take(r0 + cols[1])
            v01 = vflat.take(r0 + cols[2])
            v10 = vflat.take(r1 + cols[1])
            v11 = vflat.take(r1 + cols[2])
            lo = np.minimum(np.minimum(v00, v01), np.minimum(v10, v11))
            hi = np.maximum(np.maximum(v00, v01), np.maximum(v10, v11))
            out = np.clip(out, lo, hi)
        return out


@dataclass(frozen=True)
class SolverConfig:
    """Time-stepping parameters.

    dt is the target step; the CFL guard dt_sub * max|u| <= cfl_number *
    cell_size subdivides steps adaptively, aborting past max_substeps.
    snapshot_times always includes 0 and t_end.
    """

    n: int = 256
    dt: float = 5e-3
    t_end: float = 0.5
    interpolation: str = "monotone_bicubic"
    characteristic_integrator: str = "rk2"
    snapshot_times: tuple = ()
    cfl_number: float = 0.5
    max_substeps: int = 64

    def __post_init__(self):
        if self.dt <= 0:
            raise ConfigError(f"dt must be positive, got {self.dt}")
        if self.t_end < 0:
            raise ConfigError(f"t_end must be nonnegative, got {self.t_end}")
        if self.t_end > 0 and self.t_end < self.dt:
            raise ConfigError("t_end must be at least one step")
        if self.interpolation not in ("bicubic", "monotone_bicubic"):
            raise ConfigError(f"unknown interpolation '{self.interpolation}'")
        if self.characteristic_integrator not in ("rk2", "rk4"):
            raise ConfigError(
                f"unknown characteristic integrator '{self.characteristic_integrator}'"
            )
        object.__setattr__(
            self, "snapshot_times", tuple(float(t) for t in self.snapshot_times)
        )

    def schedule(self) -> tuple:
        times = {0.0, self.t_end}
        for t in self.snapshot_times:
            if not 0.0 <= t <= self.t_end:
                raise ConfigError(f"snapshot time {t} outside [0, {self.t_end}]")
            times.add(round(t, 12))
        return tuple(sorted(times))


def _foot_points(u: VelocityField, dt: float, integrator: str):
    """Backward characteristic feet for every grid point in the frozen
    field u (integrating dx/dt = -u for time dt)."""
    n = u.n
    c = cell_coords(n)
    X1 = np.broadcast_to(c[:, None], (n, n))
    X2 = np.broadcast_to(c[None, :], (n, n))
    i1 = BicubicInterpolant(u.u1.values)
    i2 = BicubicInterpolant(u.u2.values)

    def vel(p1, p2):
        return i1(p1, p2), i2(p1, p2)

    if integrator == "rk2":
        k1_1, k1_2 = u.u1.values, u.u2.values
        m1 = X1 - 0.5 * dt * k1_1
        m2 = X2 - 0.5 * dt * k1_2
        k2_1, k2_2 = vel(m1, m2)
        return X1 - dt * k2_1, X2 - dt * k2_2
    # rk4 on dx/dt = -u(x)
    k1_1, k1_2 = u.u1.values, u.u2.values
    k2_1, k2_2 = vel(X1 - 0.5 * dt * k1_1, X2 - 0.5 * dt * k1_2)
    k3_1, k3_2 = vel(X1 - 0.5 * dt * k2_1, X2 - 0.5 * dt * k2_2)
    k4_1, k4_2 = vel(X1 - dt * k3_1, X2 - dt * k3_2)
    f1 = X1 - dt / 6.0 * (k1_1 + 2 * k2_1 + 2 * k3_1 + k4_1)
    f2 = X2 - dt / 6.0 * (k1_2 + 2 * k2_2 + 2 * k3_2 + k4_2)
    return f1, f2


def advect(
    omega: GridField,
    u: VelocityField,
    dt: float,
    interpolation: str = "monotone_bicubic",
    integrator: str = "rk4",
) -> GridField:
    """Transport omega through the frozen velocity u for time dt."""
    f1, f2 = _foot_points(u, dt, integrator)
    interp = BicubicInterpolant(omega.values, clamp=(interpolation == "monotone_bicubic"))
    return GridField(interp(f1, f2), kind=omega.kind, meta=dict(omega.meta))


def step(
    omega: GridField,
    dt: float,
    config: SolverConfig,
    _t: float = 0.0,
    u_start: Optional[VelocityField] = None,
) -> GridField:
    """Advance the vorticity by dt with adaptive CFL substepping.

    u_start, when given, must be the velocity induced by omega; passing it
    saves one elliptic solve per step in a marching loop.
    """
    remaining = float(dt)
    nsub = 0
    h = omega.cell_size
    u_now = u_start
    while remaining > 1e-14:
        if nsub >= config.max_substeps:
            raise NumericalError(
                f"CFL guard not satisfied after {config.max_substeps} substeps "
                f"at t={_t:.6g} (remaining {remaining:.3g})"
            )
        if u_now is None:
            u_now = biot_savart(omega)
        speed = u_now.max_speed()
        allowed = config.cfl_number * h / speed if speed > 0 else remaining
        dt_sub = min(remaining, allowed)
        try:
            half = advect(omega, u_now, 0.5 * dt_sub, config.interpolation,
                          config.characteristic_integrator)
            u_mid = biot_savart(half)
            omega = advect(omega, u_mid, dt_sub, config.interpolation,
                           config.characteristic_integrator)
        except ValueError as exc:
            raise NumericalError(
                f"field update failed at t={_t + dt - remaining:.6g}: {exc}"
            ) from exc
        remaining -= dt_sub
        nsub += 1
        u_now = None
    return omega


@dataclass
class RunRecord:
    """Everything produced by one solver run.

    diagnostics rows are (t, |w|_L1, |w|_L2, |w|_Linf, kinetic energy),
    sampled at t=0 and after every step.  Snapshots are stored at the
    requested times plus the endpoints.  data_spec, when present, lets the
    regularity monitor rebuild the same initial data at other resolutions.
    """

    config: SolverConfig
    snapshots: list
    diagnostics: np.ndarray
    trajectories: Optional[list] = None
    data_spec: Optional[DataSpec] = None

    def snapshot_at(self, t: float) -> GridField:
        for ts, f in self.snapshots:
            if abs(ts - t) <= 1e-9:
                return f
        raise KeyError(f"no snapshot at t={t}")

    @property
    def snapshot_times(self) -> list:
        return [ts for ts, _ in self.snapshots]

    def save(self, directory) -> None:
        d = Path(directory)
        (d / "snapshots").mkdir(parents=True, exist_ok=True)
        cfg = {
            "schema_version": 1,
            "solver": _config_to_dict(self.config),
            "data_spec": _dataspec_to_dict(self.data_spec),
        }
        (d / "config.json").write_text(json.dumps(cfg, indent=2, sort_keys=True))
        rows = [",".join(DIAGNOSTIC_COLUMNS)]
        for row in self.diagnostics:
            rows.append(",".join(f"{v:.17g}" for v in row))
        (d / "diagnostics.csv").write_text("\n".join(rows) + "\n")
        for t, f in self.snapshots:
            save_field(d / "snapshots" / f"t_{t:.6f}.ylf", f)

    @classmethod
    def load(cls, directory) -> "RunRecord":
        d = Path(directory)
        cfg = json.loads((d / "config.json").read_text())
        config = _config_from_dict(cfg["solver"])
        data_spec = _dataspec_from_dict(cfg.get("data_spec"))
        diag = np.loadtxt(d / "diagnostics.csv", delimiter=",", skiprows=1, ndmin=2)
        snaps = []
        for p in sorted((d / "snapshots").glob("t_*.ylf")):
            t = float(p.stem[2:])
            snaps.append((t, load_field(p, kind="vorticity")))
        return cls(config=config, snapshots=snaps, diagnostics=diag, data_spec=data_spec)


def _config_to_dict(c: SolverConfig) -> dict:
    return {
        "n": c.n,
        "dt": c.dt,
        "t_end": c.t_end,
        "interpolation": c.interpolation,
        "characteristic_integrator": c.characteristic_integrator,
        "snapshot_times": list(c.snapshot_times),
        "cfl_number": c.cfl_number,
        "max_substeps": c.max_substeps,
    }


def _config_from_dict(d: dict) -> SolverConfig:
    try:
        return SolverConfig(
            n=int(d["n"]),
            dt=float(d["dt"]),
            t_end=float(d["t_end"]),
            interpolation=d.get("interpolation", "monotone_bicubic"),
            characteristic_integrator=d.get("characteristic_integrator", "rk4"),
            snapshot_times=tuple(d.get("snapshot_times", ())),
            cfl_number=float(d.get("cfl_number", 0.5)),
            max_substeps=int(d.get("max_substeps", 64)),
        )
    except KeyError as exc:
        raise ConfigError(f"solver config missing field {exc}") from exc


def _dataspec_to_dict(spec: Optional[DataSpec]) -> Optional[dict]:
    if spec is None:
        return None
    return {
        "kind": spec.kind,
        "beta": spec.beta,
        "gamma": spec.gamma,
        "cutoff_inner": spec.cutoff_inner,
        "cutoff_outer": spec.cutoff_outer,
    }


def _dataspec_from_dict(d: Optional[dict]) -> Optional[DataSpec]:
    if d is None:
        return None
    try:
        return DataSpec(
            kind=d["kind"],
            beta=float(d.get("beta", 0.25)),
            gamma=float(d.get("gamma", 1.0)),
            cutoff_inner=float(d.get("cutoff_inner", 0.5)),
            cutoff_outer=float(d.get("cutoff_outer", 2.0 / 3.0)),
        )
    except KeyError as exc:
        raise ConfigError(f"data spec missing field {exc}") from exc
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def kinetic_energy(u: VelocityField) -> float:
    cell = (2.0 / u.n) ** 2
    return 0.5 * float(np.sum(u.u1.values**2 + u.u2.values**2)) * cell


def _diagnostic_row(t: float, omega: GridField, u: VelocityField):
    return (
        t,
        lp_norm(omega, 1),
        lp_norm(omega, 2),
        omega.max_abs(),
        kinetic_energy(u),
    )


def run(data: GridField, config: SolverConfig, data_spec: Optional[DataSpec] = None) -> RunRecord:
    """March the vorticity to t_end, recording diagnostics every step."""
    if data.n != config.n:
        raise ConfigError(f"data resolution {data.n} != config resolution {config.n}")
    schedule = config.schedule()
    omega = data
    t = 0.0
    u = biot_savart(omega)
    rows = [_diagnostic_row(0.0, omega, u)]
    snaps = [(0.0, omega)]
    pending = [s for s in schedule if s > 0.0]
    step_index = 0
    while t < config.t_end - 1e-12:
        t_next = min(t + config.dt, config.t_end)
        if pending and pending[0] < t_next - 1e-12:
            t_next = pending[0]
        try:
            omega = step(omega, t_next - t, config, _t=t, u_start=u)
        except NumericalError as exc:
            raise NumericalError(f"step {step_index}: {exc}") from exc
        t = t_next
        step_index += 1
        u = biot_savart(omega)
        rows.append(_diagnostic_row(t, omega, u))
        if pending and abs(t - pending[0]) <= 1e-12:
            snaps.append((pending[0], omega))
            pending.pop(0)
    return RunRecord(
        config=config,
        snapshots=snaps,
        diagnostics=np.array(rows),
        data_spec=data_spec,
    )


class _RunVelocity:
    """Velocity (t, x) -> u from a run's snapshots, linear in time."""

    def __init__(self, record: RunRecord):
        self.times = np.array(record.snapshot_times)
        if self.times.size < 1:
            raise ValueError("run record has no snapshots")
        self.interps = []
        for _, snap in record.snapshots:
            u = biot_savart(snap)
            self.interps.append(
                (BicubicInterpolant(u.u1.values), BicubicInterpolant(u.u2.values))
            )

    def __call__(self, t: float, pts: np.ndarray) -> np.ndarray:
        ts = self.times
        j = int(np.searchsorted(ts, t, side="right"))
        j = max(1, min(j, ts.size - 1)) if ts.size > 1 else 0
        out = np.empty_like(pts)
        if ts.size == 1:
            i1, i2 = self.interps[0]
            out[..., 0] = i1(pts[..., 0], pts[..., 1])
            out[..., 1] = i2(pts[..., 0], pts[..., 1])
            return out
        t0, t1 = ts[j - 1], ts[j]
        w = 0.0 if t1 == t0 else np.clip((t - t0) / (t1 - t0), 0.0, 1.0)
        a1, a2 = self.interps[j - 1]
        b1, b2 = self.interps[j]
        out[..., 0] = (1 - w) * a1(pts[..., 0], pts[..., 1]) + w * b1(pts[..., 0], pts[..., 1])
        out[..., 1] = (1 - w) * a2(pts[..., 0], pts[..., 1]) + w * b2(pts[..., 0], pts[..., 1])
        return out


def flow_map(
    velocity_source: Union[Callable, RunRecord],
    x0,
    t_grid,
    dt: float = 1e-3,
    min_radius: Optional[float] = None,
) -> Trajectory:
    """Particle trajectories under an analytic or simulated velocity.

    velocity_source is either callable(t, points (..., 2)) -> velocities or
    a RunRecord (velocity rebuilt from snapshots, linear in time between
    them).  Trajectories entering the disc of radius min_radius around the
    origin stagnation point are flagged and reported as NaN from that time
    on rather than extrapolated; for run sources the default refusal radius
    is two cells.
    """
    if isinstance(velocity_source, RunRecord):
        vel = _RunVelocity(velocity_source)
        if min_radius is None:
            min_radius = 2.0 * 2.0 / velocity_source.config.n
    else:
        vel = velocity_source
        if min_radius is None:
            min_radius = 0.0
    t_grid = np.atleast_1d(np.asarray(t_grid, dtype=float))
    x = np.array(x0, dtype=float)
    single = x.ndim == 1
    pts = x[None, :] if single else x.copy()
    out = np.empty(t_grid.shape + pts.shape)
    flags = np.zeros(t_grid.shape + pts.shape[:-1], dtype=bool)
    dead = np.zeros(pts.shape[:-1], dtype=bool)
    t = 0.0
    for i, t_target in enumerate(t_grid):
        while t < t_target - 1e-14:
            h = min(dt, t_target - t)
            k1 = vel(t, pts)
            k2 = vel(t + h / 2, pts + h / 2 * k1)
            k3 = vel(t + h / 2, pts + h / 2 * k2)
            k4 = vel(t + h, pts + h * k3)
            pts = pts + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            t += h
            if min_radius > 0:
                dead |= np.hypot(pts[..., 0], pts[..., 1]) < min_radius
        out[i] = np.where(dead[..., None], np.nan, pts)
        flags[i] = dead
    if single:
        out = out[:, 0, :]
        flags = flags[:, 0]
    return Trajectory(t_grid, out, flags)


def log_lipschitz_constant(
    u: VelocityField,
    omega_sup: float,
    num_pairs: int = 4096,
    seed: int = 0,
) -> float:
    """Largest sampled modulus ratio |du| / (|w|_inf d log(1/d)).

    Pairs of grid points are drawn with log-uniform separations below 1/2
    (torus metric).  A uniform bound on this ratio is what makes the
    velocity of bounded vorticity log-Lipschitz.
    """
    speed = u.max_speed()
    if omega_sup == 0.0:
        if speed > 0:
            raise ValueError("zero vorticity bound with nonzero velocity")
        return 0.0
    n = u.n
    h = 2.0 / n
    rng = np.random.default_rng(seed)
    i = rng.integers(0, n, size=num_pairs)
    j = rng.integers(0, n, size=num_pairs)
    sep = np.exp(rng.uniform(np.log(2 * h), np.log(0.4), size=num_pairs))
    ang = rng.uniform(0.0, 2.0 * np.pi, size=num_pairs)
    di = np.rint(sep * np.cos(ang) / h).astype(np.int64)
    dj = np.rint(sep * np.sin(ang) / h).astype(np.int64)
    keep = (di != 0) | (dj != 0)
    i, j, di, dj = i[keep], j[keep], di[keep], dj[keep]
    i2 = (i + di) % n
    j2 = (j + dj) % n
    # actual torus separation of the snapped pair
    d1 = np.minimum(np.abs(di) * h, 2.0 - np.abs(di) * h)
    d2 = np.minimum(np.abs(dj) * h, 2.0 - np.abs(dj) * h)
    dist = np.hypot(d1, d2)
    ok = (dist > 0) & (dist < 0.5)
    du1 = u.u1.values[i, j] - u.u1.values[i2, j2]
    du2 = u.u2.values[i, j] - u.u2.values[i2, j2]
    du = np.hypot(du1, du2)[ok]
    dist = dist[ok]
    ratio = du / (omega_sup * dist * np.log(1.0 / dist))
    return float(np.max(ratio)) if ratio.size else 0.0
