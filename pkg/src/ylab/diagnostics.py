"""Quantitative probes for regularity loss.

Four instruments live here:

* the key integral I(x) = (4/pi) * int_{[2x1,1]x[2x2,1]} y1*y2/|y|^4 w(y) dy
  and the decomposition (-1)^j u_j(x)/x_j = I(x) + B_j(x) of the velocity
  gradient scale near an odd-odd stagnation point, with the remainder
  checked against its log bound;
* level-set gap extraction theta*(r) and the induced lower bound
  int r^(1-p) theta*(r)^(1-p) dr on the p-th power gradient norm;
* multi-resolution critical-index estimation: the supremum q with the
  field in W^{1,q}, located by the sign change of the extrapolated growth
  exponent of capped gradient quadratures;
* the two closed-form regularity-index reference curves (the loss curve
  1 + 1/(1/(p0-1) + c0*t) and the Riccati lower-bound curve
  p/(1 + C*M*p*t)) plus the measured curve from solver runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, NamedTuple, Optional, Sequence, Union

import numpy as np

from .grid import (
    GridField,
    SobolevEstimate,
    VelocityField,
    cell_coords,
    classify_slope,
    fit_growth_exponent,
    gradient_magnitude,
    sobolev_estimate,
)
from .solver import BicubicInterpolant, RunRecord, SolverConfig, run as solver_run
from .data import make_data

ODD_SYMMETRY_TOL = 1e-10

#: fraction of the one-cell-resolvable gradient sup|f|/h at which study
#: quadratures cap |grad f|; keeps the under-resolved core from injecting
#: lattice-alignment noise into the growth fit while preserving the
#: resolution-transient exponent that carries the classification signal
GRADIENT_CAP_FRACTION = 0.5


class KeyIntegralResult(NamedTuple):
    value: float
    empty_domain: bool


class KeyResidual(NamedTuple):
    b1: float
    b2: float
    bound_ratio_1: float
    bound_ratio_2: float
    key_integral: float


def _kernel_antiderivative(y1, y2):
    # d^2/dy1 dy2 of -log(y1^2+y2^2)/4 is y1*y2/(y1^2+y2^2)^2
    return -0.25 * np.log(y1**2 + y2**2)


def indicator_key_integral(x1: float, x2: float) -> float:
    """Closed form of the key integral for w = 1 on the quadrant:
    (1/pi) log((1+4x1^2)(1+4x2^2) / (2(4x1^2+4x2^2)))."""
    a, b = 2.0 * x1, 2.0 * x2
    return (1.0 / math.pi) * math.log(
        (1 + a * a) * (1 + b * b) / (2.0 * (a * a + b * b))
    )


def key_integral(omega: Union[GridField, Callable], x) -> KeyIntegralResult:
    """The positive log-growing part of the velocity gradient near the
    origin, integrated over [2x1,1] x [2x2,1].

    Grid fields use midpoint vorticity per cell with the kernel integrated
    exactly over each (clipped) cell via its closed-form antiderivative,
    which tames the |y|^-2 kernel scale near the inner corner.  Callables
    are integrated with adaptive quadrature.
    """
    x1, x2 = float(x[0]), float(x[1])
    if x1 <= 0 or x2 <= 0:
        raise ValueError(f"probe point must have positive coordinates, got {x}")
    a1, a2 = 2.0 * x1, 2.0 * x2
    if a1 >= 1.0 or a2 >= 1.0:
        return KeyIntegralResult(0.0, True)
    if isinstance(omega, GridField):
        value = _key_integral_grid(omega, a1, a2)
    else:
        from scipy.integrate import dblquad

        value, _ = dblquad(
            lambda y2, y1: y1 * y2 / (y1**2 + y2**2) ** 2 * omega(y1, y2),
            a1, 1.0, a2, 1.0, epsabs=1e-12, epsrel=1e-10,
        )
        value *= 4.0 / math.pi
    return KeyIntegralResult(float(value), False)


def _breakpoints(a: float, n: int):
    h = 2.0 / n
    edges = -1.0 + h * np.arange(n + 1)
    inner = edges[(edges > a + 1e-15) & (edges < 1.0 - 1e-15)]
    return np.concatenate([[a], inner, [1.0]])


def _key_integral_grid(omega: GridField, a1: float, a2: float) -> float:
    n = omega.n
    h = 2.0 / n
    b1 = _breakpoints(a1, n)
    b2 = _breakpoints(a2, n)
    F = _kernel_antiderivative(b1[:, None], b2[None, :])
    cellint = F[1:, 1:] - F[:-1, 1:] - F[1:, :-1] + F[:-1, :-1]
    mid1 = 0.5 * (b1[1:] + b1[:-1])
    mid2 = 0.5 * (b2[1:] + b2[:-1])
    i = np.floor((mid1 + 1.0) / h).astype(int)
    j = np.floor((mid2 + 1.0) / h).astype(int)
    w = omega.values[i[:, None], j[None, :]]
    return (4.0 / math.pi) * float(np.sum(w * cellint))


def _require_odd_odd(omega: GridField) -> None:
    v = omega.values
    scale = max(omega.max_abs(), 1e-300)
    r1 = float(np.max(np.abs(v + v[::-1, :]))) / scale
    r2 = float(np.max(np.abs(v + v[:, ::-1]))) / scale
    if max(r1, r2) > ODD_SYMMETRY_TOL:
        raise ValueError(
            f"field is not odd-odd symmetric (residuals {r1:.2e}, {r2:.2e}); "
            f"the gradient decomposition requires odd symmetry in both axes"
        )


def key_residual(omega: GridField, u: VelocityField, x) -> KeyResidual:
    """Remainders B_j = (-1)^j u_j(x)/x_j - I(x) and their ratios against
    the bound |w|_inf * log(10 + x_{3-j}/x_j)."""
    _require_odd_odd(omega)
    x1, x2 = float(x[0]), float(x[1])
    if not (0 < x1 <= 0.5 and 0 < x2 <= 0.5):
        raise ValueError(f"probe point must lie in (0, 1/2]^2, got {x}")
    ival = key_integral(omega, x).value
    u1 = float(BicubicInterpolant(u.u1.values)(np.array(x1), np.array(x2)))
    u2 = float(BicubicInterpolant(u.u2.values)(np.array(x1), np.array(x2)))
    b1 = -u1 / x1 - ival
    b2 = u2 / x2 - ival
    sup = max(omega.max_abs(), 1e-300)
    r1 = abs(b1) / (sup * math.log(10.0 + x2 / x1))
    r2 = abs(b2) / (sup * math.log(10.0 + x1 / x2))
    return KeyResidual(b1, b2, r1, r2, ival)


@dataclass(frozen=True)
class LevelGapProfile:
    """Angular distance theta*(r) from a zero ray to the given level.

    radii are stored in decreasing order; skipped records the radii where
    the level was never attained (or the circle left the sampled region)
    together with the reason.
    """

    radii: np.ndarray
    theta_star: np.ndarray
    level: float
    tol: float
    skipped: tuple = ()

    def __post_init__(self):
        r = np.asarray(self.radii, dtype=float)
        th = np.asarray(self.theta_star, dtype=float)
        if r.shape != th.shape:
            raise ValueError("radii and angles must align")
        if np.any(r <= 0):
            raise ValueError("radii must be positive")
        order = np.argsort(-r)
        r = r[order]
        th = th[order]
        if np.any((th <= 0) | (th > np.pi / 2 + 1e-12)):
            raise ValueError("angles must lie in (0, pi/2]")
        object.__setattr__(self, "radii", r)
        object.__setattr__(self, "theta_star", th)


def _bilinear(values: np.ndarray, x1: np.ndarray, x2: np.ndarray) -> np.ndarray:
    n = values.shape[0]
    f1 = (x1 + 1.0) * (n / 2.0) - 0.5
    f2 = (x2 + 1.0) * (n / 2.0) - 0.5
    i0 = np.floor(f1).astype(int)
    j0 = np.floor(f2).astype(int)
    s1 = f1 - i0
    s2 = f2 - j0
    i0 %= n
    j0 %= n
    i1 = (i0 + 1) % n
    j1 = (j0 + 1) % n
    return (
        values[i0, j0] * (1 - s1) * (1 - s2)
        + values[i1, j0] * s1 * (1 - s2)
        + values[i0, j1] * (1 - s1) * s2
        + values[i1, j1] * s1 * s2
    )


def level_set_gap(
    f: GridField,
    radii: Sequence[float],
    level: float,
    tol: float,
    from_axis: str = "x1",
    angular_samples: Optional[int] = None,
) -> LevelGapProfile:
    """Smallest angle from the chosen axis at which f reaches the level.

    Each probed circle is sampled with 4n bilinear interpolations across
    the quadrant arc; the crossing of level - tol is refined linearly
    between samples.  Radii below two cells (or whose circle leaves the
    sampled square) are omitted and recorded in ``skipped``.
    """
    if from_axis not in ("x1", "x2"):
        raise ValueError(f"from_axis must be 'x1' or 'x2', got '{from_axis}'")
    n = f.n
    m = angular_samples or 4 * n
    h = 2.0 / n
    psi = (np.arange(m) + 1.0) * (np.pi / 2.0) / m
    target = level - tol
    kept_r, kept_th, skipped = [], [], []
    for r in sorted((float(r) for r in radii), reverse=True):
        if r < 2 * h:
            skipped.append((r, "below grid resolution"))
            continue
        if r > 1.0 - h:
            skipped.append((r, "circle leaves the sampled quadrant"))
            continue
        if from_axis == "x1":
            p1, p2 = r * np.cos(psi), r * np.sin(psi)
        else:
            p1, p2 = r * np.sin(psi), r * np.cos(psi)
        vals = _bilinear(f.values, p1, p2)
        hits = np.nonzero(vals >= target)[0]
        if hits.size == 0:
            skipped.append((r, "level not attained"))
            continue
        k = int(hits[0])
        if k == 0:
            theta = psi[0]
        else:
            v0, v1 = vals[k - 1], vals[k]
            frac = (target - v0) / (v1 - v0) if v1 > v0 else 1.0
            theta = psi[k - 1] + frac * (psi[k] - psi[k - 1])
        kept_r.append(r)
        kept_th.append(theta)
    if not kept_r:
        raise ValueError("no probed radius attained the level")
    return LevelGapProfile(
        np.array(kept_r), np.array(kept_th), level, tol, tuple(skipped)
    )


def lvlsob_lower_bound(profile: LevelGapProfile, p: float) -> float:
    """Quadrature of int r^(1-p) theta*(r)^(1-p) dr over the profile.

    With the unspecified absolute prefactor set to 1, this is a relative
    lower bound for the p-th power of the gradient norm: meaningful in
    trends and comparisons, not as an absolute constant.
    """
    if p < 1:
        raise ValueError(f"lower bound requires p >= 1, got {p}")
    if profile.radii.size == 0:
        raise ValueError("empty level-gap profile")
    r = profile.radii[::-1]
    th = profile.theta_star[::-1]
    return float(np.trapezoid(r ** (1.0 - p) * th ** (1.0 - p), r))


@dataclass(frozen=True)
class CriticalIndexResult:
    """Located critical Sobolev index.

    p_hat is the sign change of the extrapolated growth exponent (inf when
    every probed exponent is convergent, nan when none is); (p_lo, p_hi)
    bracket it at the +/- band growth rates.  estimates holds the per-p
    studies on the probe grid.
    """

    p_hat: float
    p_lo: float
    p_hi: float
    estimates: tuple

    @property
    def interval(self):
        return (self.p_lo, self.p_hi)


def _study_powers(gm: np.ndarray, sup: float, p: float, cap_fraction: float) -> float:
    n = gm.shape[0]
    cap = cap_fraction * sup * n / 2.0
    g = np.minimum(gm, cap) if cap > 0 else gm
    return float(np.sum(g**p)) * (2.0 / n) ** 2


def critical_index(
    field_generator: Callable[[int], GridField],
    p_grid: Sequence[float],
    resolutions: Sequence[int],
    scheme: str = "central_difference",
    cap_fraction: float = GRADIENT_CAP_FRACTION,
    band: float = 0.04,
    refine_tol: float = 0.004,
) -> CriticalIndexResult:
    """Estimate sup{q : field in W^{1,q}} from a resolution ladder.

    For each exponent p the quadrature sum of |grad f|^p (gradients capped
    at cap_fraction of the one-cell-resolvable magnitude) is fitted with
    the growth-exponent model across resolutions; the critical index is
    where the fitted exponent changes sign, refined by bisection.  The
    bracket (p_lo, p_hi) holds the exponents whose fitted growth rate
    crosses -band and +band.
    """
    resolutions = sorted(int(n) for n in resolutions)
    if len(resolutions) < 3:
        raise ValueError("critical index needs at least 3 resolutions")
    for a, b in zip(resolutions, resolutions[1:]):
        if b != 2 * a:
            raise ValueError(f"resolutions must double: {a} -> {b}")
    p_grid = sorted(float(p) for p in p_grid)
    if len(p_grid) < 2:
        raise ValueError("p_grid needs at least two exponents")
    fields = {n: field_generator(n) for n in resolutions}
    gms = {n: gradient_magnitude(fields[n], scheme).values for n in resolutions}
    sups = {n: fields[n].max_abs() for n in resolutions}

    cache: dict = {}

    def exponent(p: float) -> float:
        if p not in cache:
            powers = [_study_powers(gms[n], sups[n], p, cap_fraction) for n in resolutions]
            cache[p] = fit_growth_exponent(resolutions, powers)
        return cache[p]

    estimates = []
    for p in p_grid:
        powers = [_study_powers(gms[n], sups[n], p, cap_fraction) for n in resolutions]
        cache[p] = fit_growth_exponent(resolutions, powers)
        slope = cache[p] / p
        estimates.append(
            SobolevEstimate(
                p,
                tuple(resolutions),
                tuple(s ** (1.0 / p) for s in powers),
                slope,
                classify_slope(slope),
            )
        )
    estimates = tuple(estimates)

    lo, hi = p_grid[0], p_grid[-1]

    def root_of(target: float) -> float:
        e_lo, e_hi = exponent(lo) - target, exponent(hi) - target
        if e_hi < 0:
            return math.inf
        if e_lo > 0:
            return math.nan
        a, b = lo, hi
        while b - a > refine_tol:
            mid = 0.5 * (a + b)
            if exponent(mid) < target:
                a = mid
            else:
                b = mid
        return 0.5 * (a + b)

    p_hat = root_of(0.0)
    p_lo = root_of(-band)
    p_hi = root_of(band)
    return CriticalIndexResult(p_hat, p_lo, p_hi, estimates)


def yudovich_q(p, C_times_M, t):
    """Riccati lower-bound curve q(t) = p / (1 + C*M*p*t), the closed-form
    solution of dq/dt = -C*M*q^2 with q(0) = p."""
    p = np.asarray(p, dtype=float)
    if np.any((p <= 0) | (p > 2)):
        raise ValueError("initial exponent must lie in (0, 2]")
    if np.any(np.asarray(C_times_M) < 0):
        raise ValueError("C*M must be nonnegative")
    return p / (1.0 + C_times_M * p * np.asarray(t, dtype=float))


def theorem_q(p0, c0, t):
    """Loss reference curve q(t) = 1 + 1/(1/(p0-1) + c0*t)."""
    p0 = np.asarray(p0, dtype=float)
    if np.any((p0 <= 1) | (p0 >= 2)):
        raise ValueError("p0 must lie in (1, 2)")
    if np.any(np.asarray(c0) <= 0):
        raise ValueError("c0 must be positive")
    return 1.0 + 1.0 / (1.0 / (p0 - 1.0) + c0 * np.asarray(t, dtype=float))


CURVE_SOURCES = ("theorem", "model", "yudovich_bound", "measured")


@dataclass(frozen=True)
class RegularityIndexCurve:
    """A regularity-index curve q(t) with uncertainty band."""

    times: np.ndarray
    q_values: np.ndarray
    q_lo: np.ndarray
    q_hi: np.ndarray
    source: str

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        q = np.asarray(self.q_values, dtype=float)
        lo = np.asarray(self.q_lo, dtype=float)
        hi = np.asarray(self.q_hi, dtype=float)
        if self.source not in CURVE_SOURCES:
            raise ValueError(f"unknown curve source '{self.source}'")
        if not (t.shape == q.shape == lo.shape == hi.shape):
            raise ValueError("curve columns must align")
        if np.any((q <= 1.0) | (q > 2.0)):
            raise ValueError("index values must lie in (1, 2]")
        if self.source in ("theorem", "model", "yudovich_bound"):
            if t.size > 1 and not np.all(np.diff(q) < 0):
                raise ValueError(f"{self.source} curve must be strictly decreasing")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "q_values", q)
        object.__setattr__(self, "q_lo", lo)
        object.__setattr__(self, "q_hi", hi)


def reference_curve(source: str, times, q_values) -> RegularityIndexCurve:
    q = np.asarray(q_values, dtype=float)
    return RegularityIndexCurve(np.asarray(times, float), q, q.copy(), q.copy(), source)


def fit_loss_rate(times, q_values, p0: float) -> float:
    """Least-squares rate c0 of 1/(q-1) = 1/(p0-1) + c0*t through the
    measured curve (zero-intercept fit in the transformed variable)."""
    t = np.asarray(times, dtype=float)
    q = np.asarray(q_values, dtype=float)
    y = 1.0 / (q - 1.0) - 1.0 / (p0 - 1.0)
    denom = float(np.sum(t * t))
    return float(np.sum(t * y) / denom) if denom > 0 else 0.0


def regularity_monitor(
    record: RunRecord,
    p_grid: Sequence[float],
    resolutions: Sequence[int],
    rerun: Optional[Callable[[int], RunRecord]] = None,
) -> RegularityIndexCurve:
    """Measured critical-index curve across a run's snapshot times.

    The run is repeated at every resolution in ``resolutions`` (reusing
    ``record`` for its own resolution); at each snapshot time the critical
    index is estimated from the cross-resolution ladder of snapshots.  By
    default the repeats rebuild the same initial data from the record's
    data_spec; pass ``rerun`` to supply records differently.
    """
    resolutions = sorted(int(n) for n in resolutions)
    if rerun is None:
        if record.data_spec is None:
            raise ValueError(
                "regularity monitor needs data_spec on the record (or an "
                "explicit rerun callable) to rebuild data at other resolutions"
            )

        def rerun(n: int) -> RunRecord:
            cfg = replace(record.config, n=n)
            return solver_run(make_data(record.data_spec, n), cfg,
                              data_spec=record.data_spec)

    records = {}
    for n in resolutions:
        records[n] = record if n == record.config.n else rerun(n)
    times = record.snapshot_times
    qs, los, his = [], [], []
    for t in times:
        result = critical_index(
            lambda n: records[n].snapshot_at(t), p_grid, resolutions
        )
        qs.append(result.p_hat)
        los.append(result.p_lo)
        his.append(result.p_hi)
    curve = RegularityIndexCurve(
        np.array(times), np.array(qs), np.array(los), np.array(his), "measured"
    )
    return curve
