"""Initial vorticity constructors with exact odd-odd symmetry.

Every data family is defined by a closed-form profile on the open first
quadrant and extended to the torus by odd reflection across both axes, so
the grid mean vanishes by cancellation and the origin is a hyperbolic
stagnation point of the induced velocity.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Literal, Optional

import numpy as np

from .grid import GridField

DataKind = Literal["theorem_beta", "bahouri_chemin", "h1_log", "custom"]


def smooth_cutoff(r, inner: float, outer: float):
    """Quintic smoothstep cutoff: 1 for r <= inner, 0 for r >= outer, C^2."""
    r = np.asarray(r, dtype=float)
    s = np.clip((r - inner) / (outer - inner), 0.0, 1.0)
    return 1.0 - s**3 * (10.0 + s * (-15.0 + 6.0 * s))


def sin_2theta(x1, x2):
    """sin(2*theta) evaluated as 2*x1*x2/(x1^2+x2^2) to avoid trig round-off
    near the axes; returns 0 at the origin."""
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    rsq = x1**2 + x2**2
    out = np.zeros(np.broadcast_shapes(x1.shape, x2.shape))
    np.divide(2.0 * x1 * x2, rsq, out=out, where=rsq > 0)
    return out


@dataclass(frozen=True)
class DataSpec:
    """Parameters selecting one initial-data family.

    beta is the angular wedge exponent of the power-law data (0 < beta <
    1/2); gamma is the logarithmic decay exponent of the borderline-H^1
    probe; the radial cutoff is 1 up to cutoff_inner and 0 past
    cutoff_outer.
    """

    kind: DataKind = "theorem_beta"
    beta: float = 0.25
    gamma: float = 1.0
    cutoff_inner: float = 0.5
    cutoff_outer: float = 2.0 / 3.0

    def __post_init__(self):
        if self.kind not in ("theorem_beta", "bahouri_chemin", "h1_log", "custom"):
            raise ValueError(f"unknown data kind '{self.kind}'")
        if self.kind == "theorem_beta" and not 0.0 < self.beta < 0.5:
            raise ValueError(f"beta must lie in (0, 1/2), got {self.beta}")
        if self.kind == "h1_log" and self.gamma <= 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if not 0.0 < self.cutoff_inner < self.cutoff_outer < 1.0:
            raise ValueError(
                f"cutoffs must satisfy 0 < inner < outer < 1, got "
                f"({self.cutoff_inner}, {self.cutoff_outer})"
            )


def quadrant_profile(spec: DataSpec) -> Callable:
    """Closed-form profile on the first quadrant for the given family.

    theorem_beta ramps linearly in angle within angular distance r^beta of
    each axis and saturates at 1 on the wedge between (even across the
    diagonal x1 = x2, zero on both axes); bahouri_chemin is the cutoff
    sin(2*theta); h1_log damps it by (log 1/r)^(-gamma).
    """
    inner, outer = spec.cutoff_inner, spec.cutoff_outer

    if spec.kind == "theorem_beta":
        beta = spec.beta

        def profile(x1, x2):
            x1 = np.asarray(x1, dtype=float)
            x2 = np.asarray(x2, dtype=float)
            r = np.hypot(x1, x2)
            theta = np.arctan2(x2, x1)
            gap = np.minimum(theta, np.pi / 2 - theta)
            ramp = np.zeros(np.broadcast_shapes(x1.shape, x2.shape))
            np.divide(gap, r**beta, out=ramp, where=r > 0)
            return smooth_cutoff(r, inner, outer) * np.clip(ramp, 0.0, 1.0)

        return profile

    if spec.kind == "bahouri_chemin":

        def profile(x1, x2):
            r = np.hypot(x1, x2)
            return smooth_cutoff(r, inner, outer) * sin_2theta(x1, x2)

        return profile

    if spec.kind == "h1_log":
        gamma = spec.gamma

        def profile(x1, x2):
            r = np.hypot(np.asarray(x1, dtype=float), np.asarray(x2, dtype=float))
            # below 1e-12 the log factor over/underflows; that scale sits far
            # below any grid resolution, so clamp to zero there
            amp = np.zeros(r.shape)
            ok = (r > 1e-12) & (r < outer)
            np.place(amp, ok, np.log(1.0 / r[ok]) ** (-gamma))
            return smooth_cutoff(r, inner, outer) * amp * sin_2theta(x1, x2)

        return profile

    raise ValueError("custom data requires an explicit profile function")


def odd_odd_extend(quadrant: np.ndarray, kind: str = "vorticity") -> GridField:
    """Extend first-quadrant samples to the torus by odd-odd reflection.

    ``quadrant`` holds m x m samples at the positive cell centers
    ((i+1/2)/m, (j+1/2)/m); the result is the 2m x 2m torus field with
    value(-x1, x2) = value(x1, -x2) = -value(x1, x2) exactly, hence an
    exactly cancelling grid sum.
    """
    q = np.asarray(quadrant, dtype=np.float64)
    if q.ndim != 2 or q.shape[0] != q.shape[1]:
        raise ValueError(f"quadrant samples must be square, got shape {q.shape}")
    m = q.shape[0]
    full = np.empty((2 * m, 2 * m))
    full[m:, m:] = q
    full[:m, m:] = -q[::-1, :]
    full[m:, :m] = -q[:, ::-1]
    full[:m, :m] = q[::-1, ::-1]
    return GridField(full, kind=kind)


def make_data(spec: DataSpec, n: int, custom_fn: Optional[Callable] = None) -> GridField:
    """Build initial vorticity at resolution n (power of two).

    The profile is sampled on the quadrant cell centers and reflected.  The
    sup norm of the power-law family is 1 by construction.  A meta warning
    is attached when the angular ramp is unresolved outside a substantial
    fraction of the cutoff core.
    """
    if custom_fn is not None:
        profile = custom_fn
    elif spec.kind == "custom":
        raise ValueError("custom data requires custom_fn")
    else:
        profile = quadrant_profile(spec)
    m = n // 2
    c = (np.arange(m) + 0.5) / m
    quadrant = np.broadcast_to(profile(c[:, None], c[None, :]), (m, m))
    field = odd_odd_extend(quadrant)
    meta = dict(field.meta)
    meta["spec"] = spec
    if spec.kind == "theorem_beta":
        # cells at radius below h^(1/(1+beta)) are narrower than the wedge
        resolved = (2.0 / n) ** (1.0 / (1.0 + spec.beta))
        meta["wedge_resolved_radius"] = resolved
        if resolved > spec.cutoff_inner / 4.0:
            meta["warning"] = (
                f"angular wedge unresolved down to r={resolved:.3g}; "
                f"increase the resolution"
            )
    return GridField(field.values, kind=field.kind, meta=meta)


def classify_p0(spec: DataSpec) -> float:
    """Supremum Sobolev index of the power-law data: p0 = 1 + 1/(1+beta).

    The data lies in W^{1,p} exactly for p < p0 and in no W^{1,q} with
    q >= p0, so studies must probe strictly on either side.
    """
    if spec.kind != "theorem_beta":
        raise ValueError(f"classify_p0 applies to theorem_beta data, got '{spec.kind}'")
    return 1.0 + 1.0 / (1.0 + spec.beta)
