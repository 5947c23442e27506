"""Numerical laboratory for bounded-vorticity 2D Euler flows.

Exact model flows, rough initial data, a Yudovich-class semi-Lagrangian
solver, and diagnostics that track the critical Sobolev index of the
vorticity across resolutions.
"""

from .errors import ConfigError, FieldFormatError, NumericalError, YlabError
from .grid import (
    GridField,
    SobolevEstimate,
    VelocityField,
    biot_savart,
    cell_coords,
    classify_slope,
    curl,
    fit_loglog_slope,
    gradient,
    gradient_magnitude,
    load_field,
    lp_norm,
    mesh,
    save_field,
    w1p_norm,
)
from .data import DataSpec, classify_p0, make_data, odd_odd_extend, quadrant_profile
from .models import (
    ShearProfiles,
    ToyFlowParams,
    Trajectory,
    cutoff_sin_2theta,
    gamma_curve,
    gamma_exponent,
    model_q,
    origin_gradient_estimate,
    power_law_shear,
    rk4_trajectory,
    shear_velocity,
    shear_w1p_study,
    smooth_shear,
    toy_advect,
    toy_backward,
    toy_trajectory,
    toy_velocity,
)
from .solver import (
    BicubicInterpolant,
    RunRecord,
    SolverConfig,
    advect,
    flow_map,
    kinetic_energy,
    log_lipschitz_constant,
    run,
    step,
)
from .diagnostics import (
    CriticalIndexResult,
    KeyIntegralResult,
    KeyResidual,
    LevelGapProfile,
    RegularityIndexCurve,
    critical_index,
    indicator_key_integral,
    key_integral,
    key_residual,
    level_set_gap,
    lvlsob_lower_bound,
    reference_curve,
    regularity_monitor,
    theorem_q,
    yudovich_q,
)

__version__ = "0.1.0"
