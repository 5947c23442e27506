import numpy as np
import pytest
from scipy.optimize import brentq

from ylab.data import DataSpec, classify_p0, make_data, odd_odd_extend, sin_2theta
from ylab.diagnostics import (
    CriticalIndexResult,
    LevelGapProfile,
    RegularityIndexCurve,
    critical_index,
    fit_loss_rate,
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
from ylab.grid import GridField, biot_savart, mesh, w1p_norm
from ylab.models import (
    cutoff_sin_2theta,
    gamma_exponent,
    model_q,
    toy_advect,
)
from ylab.solver import SolverConfig, run


def quadrant_sign_field(n=256):
    x1, x2 = mesh(n)
    return GridField(np.sign(x1) * np.sign(x2) + 0.0, kind="vorticity")


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


class TestKeyIntegral:
    def test_grid_indicator_matches_closed_form(self):
        f = quadrant_sign_field()
        for x1 in np.linspace(0.05, 0.45, 5):
            for x2 in np.linspace(0.05, 0.45, 5):
                got = key_integral(f, (x1, x2)).value
                assert got == pytest.approx(indicator_key_integral(x1, x2), rel=1e-12)

    def test_analytic_route_matches_closed_form(self):
        got = key_integral(lambda y1, y2: np.ones_like(y1), (0.25, 0.25)).value
        assert got == pytest.approx(indicator_key_integral(0.25, 0.25), abs=1e-10)

    def test_reference_value(self):
        # (1/pi) log(1.5625) at the quarter point
        assert indicator_key_integral(0.25, 0.25) == pytest.approx(0.14206, abs=1e-5)

    def test_empty_domain_flag(self):
        f = quadrant_sign_field(64)
        res = key_integral(f, (0.5, 0.2))
        assert res.value == 0.0 and res.empty_domain
        assert not key_integral(f, (0.2, 0.2)).empty_domain

    def test_rejects_nonpositive_point(self):
        with pytest.raises(ValueError, match="positive"):
            key_integral(quadrant_sign_field(64), (-0.1, 0.2))

    def test_linearity(self):
        rng = np.random.default_rng(3)
        n = 64
        a = odd_odd_extend(rng.normal(size=(n // 2, n // 2)))
        b = odd_odd_extend(rng.normal(size=(n // 2, n // 2)))
        combo = GridField(2.5 * a.values + b.values, kind="vorticity")
        x = (0.12, 0.2)
        lhs = key_integral(combo, x).value
        rhs = 2.5 * key_integral(a, x).value + key_integral(b, x).value
        assert lhs == pytest.approx(rhs, abs=1e-10)

    def test_sign_for_nonnegative_vorticity(self):
        f = make_data(DataSpec(kind="theorem_beta", beta=0.25), 128)
        for x in ((0.1, 0.1), (0.05, 0.2), (0.3, 0.3)):
            assert key_integral(f, x).value >= 0.0

    def test_logarithmic_growth_on_diagonal(self):
        for delta in (1e-2, 1e-3, 1e-4):
            val = indicator_key_integral(delta, delta)
            assert abs(val - (2 / np.pi) * np.log(1 / (4 * delta))) <= 0.5


class TestKeyResidual:
    def test_zero_field(self):
        w = GridField(np.zeros((64, 64)), kind="vorticity")
        r = key_residual(w, biot_savart(w), (0.1, 0.1))
        assert r.b1 == 0.0 and r.b2 == 0.0

    def test_remainder_stable_under_resolution_doubling(self):
        vals = {}
        for n in (128, 256):
            w = make_data(DataSpec(kind="theorem_beta", beta=0.25), n)
            r = key_residual(w, biot_savart(w), (0.05, 0.05))
            vals[n] = (r.bound_ratio_1, r.bound_ratio_2)
        for j in range(2):
            assert vals[256][j] == pytest.approx(vals[128][j], rel=0.2)

    def test_key_part_dominates_on_shrinking_diagonal(self):
        w = make_data(DataSpec(kind="bahouri_chemin"), 512)
        u = biot_savart(w)
        ivals, ratios = [], []
        for a in (0.2, 0.1, 0.05, 0.025):
            r = key_residual(w, u, (a, a))
            ivals.append(r.key_integral)
            ratios.append(max(r.bound_ratio_1, r.bound_ratio_2))
        assert all(b > a for a, b in zip(ivals, ivals[1:]))
        assert max(ratios) < 1.5

    def test_rejects_asymmetric_field(self):
        x1, x2 = mesh(64)
        w = GridField(np.sin(np.pi * x1) * np.cos(np.pi * x2) + 0 * x2, kind="vorticity")
        with pytest.raises(ValueError, match="odd-odd"):
            key_residual(w, biot_savart(w), (0.1, 0.1))

    def test_rejects_point_outside_quadrant_box(self):
        w = make_data(DataSpec(kind="theorem_beta", beta=0.25), 64)
        with pytest.raises(ValueError, match="probe point"):
            key_residual(w, biot_savart(w), (0.7, 0.1))


class TestLevelSetGap:
    def test_pure_angle_field_gives_diagonal(self):
        n = 256
        x1, x2 = mesh(n)
        f = GridField(np.ascontiguousarray(sin_2theta(x1, x2)))
        prof = level_set_gap(f, [0.3, 0.2, 0.1], level=1.0, tol=1e-2)
        assert np.max(np.abs(prof.theta_star - np.pi / 4)) < 0.1
        assert prof.radii[0] > prof.radii[-1]

    def test_theorem_data_branch_boundary_at_level_one(self):
        w = make_data(DataSpec(kind="theorem_beta", beta=0.25), 2048)
        radii = np.geomspace(0.03, 0.2, 8)
        prof = level_set_gap(w, radii, level=1.0, tol=1e-3)
        ratios = prof.theta_star / prof.radii**0.25
        assert np.all((ratios > 0.9) & (ratios < 1.15))

    def test_theorem_exponent_from_mid_ramp(self):
        from ylab.grid import fit_loglog_slope

        for beta in (0.2, 0.3):
            w = make_data(DataSpec(kind="theorem_beta", beta=beta), 1024)
            prof = level_set_gap(w, np.geomspace(0.02, 0.3, 10), level=0.5, tol=1e-6)
            slope = fit_loglog_slope(prof.radii, prof.theta_star)
            assert slope == pytest.approx(beta, abs=0.01)

    def test_toy_gap_matches_cusp_curve_angle(self):
        t = 0.5
        f = toy_grid_field(t, 1024)
        gam = gamma_exponent(t)
        prof = level_set_gap(f, np.geomspace(0.1, 0.3, 6), level=1 - 1e-6, tol=1e-3)
        for r, th in zip(prof.radii, prof.theta_star):
            x1 = brentq(lambda s: s**2 + s ** (2 * gam) - r**2, 1e-12, r)
            assert th == pytest.approx(np.arctan2(x1**gam, x1), rel=0.05)

    def test_skipped_radii_recorded(self):
        w = make_data(DataSpec(kind="theorem_beta", beta=0.25), 64)
        prof = level_set_gap(w, [0.2, 1e-4, 0.95], level=1.0, tol=1e-3)
        reasons = dict(prof.skipped)
        assert 1e-4 in reasons and "below grid" in reasons[1e-4]
        assert 0.95 in reasons

    def test_level_never_attained_skips(self):
        f = GridField(np.zeros((64, 64)))
        with pytest.raises(ValueError, match="no probed radius"):
            level_set_gap(f, [0.2, 0.3], level=1.0, tol=1e-3)

    def test_from_axis_x2_mirrors(self):
        w = make_data(DataSpec(kind="theorem_beta", beta=0.25), 512)
        a = level_set_gap(w, [0.1, 0.2], level=0.5, tol=1e-6, from_axis="x1")
        b = level_set_gap(w, [0.1, 0.2], level=0.5, tol=1e-6, from_axis="x2")
        # data is symmetric about the diagonal, the two scans agree
        assert np.allclose(a.theta_star, b.theta_star, rtol=1e-6)


class TestLevelSobolevBound:
    def test_p_one_gives_radial_measure(self):
        r = np.geomspace(0.01, 0.31, 200)
        prof = LevelGapProfile(r, r**0.25, 1.0, 1e-6)
        assert lvlsob_lower_bound(prof, 1.0) == pytest.approx(0.30, abs=1e-3)

    def test_power_profile_threshold(self):
        # theta* = r^beta: finite iff p < 1 + 1/(1+beta)
        beta = 0.25
        p0 = 1 + 1 / (1 + beta)
        values = {dp: [] for dp in (-0.15, 0.15)}
        for rmin in (1e-2, 1e-3, 1e-4, 1e-5):
            r = np.geomspace(rmin, 0.3, 400)
            prof = LevelGapProfile(r, r**beta, 1.0, 1e-6)
            for dp in values:
                values[dp].append(lvlsob_lower_bound(prof, p0 + dp))
        conv = values[-0.15]
        div = values[0.15]
        assert conv[-1] / conv[-2] < 1.15  # saturating
        assert all(b / a > 1.4 for a, b in zip(div, div[1:]))  # keeps growing

    def test_toy_profile_diverges_exactly_at_model_index(self):
        # gap from the vertical axis of the exact advected scalar
        t = 0.5
        q = model_q(t)
        gam = gamma_exponent(t)
        target = 1 - 1e-6

        def gap(r):
            # bracket ends on the cusp curve, where the scalar equals 1
            x1_crest = brentq(lambda s: s**2 + s ** (2 * gam) - r**2, 1e-300, r)
            psi_crest = np.arctan2(x1_crest, x1_crest**gam)

            def f_of_psi(psi):
                x = np.array([r * np.sin(psi), r * np.cos(psi)])
                return float(toy_advect(sin_2theta, t, x)) - target

            return brentq(f_of_psi, 1e-15, psi_crest)

        values = {dp: [] for dp in (-0.2, 0.2)}
        for rmin in (1e-2, 1e-3, 1e-4):
            r = np.geomspace(rmin, 0.3, 120)
            prof = LevelGapProfile(r, np.array([gap(x) for x in r]), target, 1e-9)
            for dp in values:
                values[dp].append(lvlsob_lower_bound(prof, q + dp))
        conv = values[-0.2]
        div = values[0.2]
        assert conv[-1] / conv[-2] < 1.1
        assert all(b / a > 1.5 for a, b in zip(div, div[1:]))

    def test_bound_stays_commensurate_with_norm(self):
        # c=1 bound compared with the direct quadrature; ratio stable in n
        spec = DataSpec(kind="theorem_beta", beta=0.25)
        p = 1.6
        ratios = []
        for n in (256, 512):
            w = make_data(spec, n)
            prof = level_set_gap(w, np.geomspace(0.03, 0.3, 10), level=0.5, tol=1e-6)
            bound = lvlsob_lower_bound(prof, p)
            direct = w1p_norm(w, p, "central_difference") ** p
            ratios.append(bound / direct)
        assert ratios[1] == pytest.approx(ratios[0], rel=0.25)
        assert max(ratios) < 1.0

    def test_validation(self):
        r = np.array([0.1, 0.2])
        prof = LevelGapProfile(r, r, 1.0, 1e-6)
        with pytest.raises(ValueError, match="p >= 1"):
            lvlsob_lower_bound(prof, 0.8)


class TestCriticalIndex:
    def test_wedge_data_bracket(self):
        spec = DataSpec(kind="theorem_beta", beta=0.25)
        res = critical_index(
            lambda n: make_data(spec, n), np.linspace(1.1, 2.0, 10), [128, 256, 512]
        )
        p0 = classify_p0(spec)
        assert res.p_hat == pytest.approx(p0, abs=0.08)
        assert res.p_lo < res.p_hat < res.p_hi

    def test_smooth_field_gives_infinite_sentinel(self):
        def tg(n):
            x1, x2 = mesh(n)
            return GridField(np.sin(np.pi * x1) * np.sin(np.pi * x2), kind="vorticity")

        res = critical_index(tg, np.linspace(1.1, 2.0, 5), [64, 128, 256])
        assert res.p_hat == np.inf
        assert all(e.verdict == "finite" for e in res.estimates)

    def test_resolution_ladder_validation(self):
        spec = DataSpec(kind="theorem_beta", beta=0.25)
        with pytest.raises(ValueError, match="3 resolutions"):
            critical_index(lambda n: make_data(spec, n), [1.2, 1.8], [128, 256])
        with pytest.raises(ValueError, match="double"):
            critical_index(lambda n: make_data(spec, n), [1.2, 1.8], [128, 256, 1024])

    def test_p_grid_validation(self):
        spec = DataSpec(kind="theorem_beta", beta=0.25)
        with pytest.raises(ValueError, match="p_grid"):
            critical_index(lambda n: make_data(spec, n), [1.5], [64, 128, 256])


class TestReferenceCurves:
    def test_initial_values(self):
        assert yudovich_q(1.7, 0.9, 0.0) == pytest.approx(1.7)
        assert theorem_q(1.8, 0.7, 0.0) == pytest.approx(1.8)

    def test_riccati_closed_form_value(self):
        assert yudovich_q(2.0, 1.0, 1.0) == pytest.approx(2.0 / 3.0)

    def test_loss_curve_value(self):
        assert theorem_q(1.8, 1.0, 1.0) == pytest.approx(1.0 + 1.0 / 2.25)

    def test_riccati_satisfies_its_ode(self):
        p, cm, t = 1.7, 0.8, 0.3
        d = 1e-3
        fd = (
            yudovich_q(p, cm, t - 2 * d)
            - 8 * yudovich_q(p, cm, t - d)
            + 8 * yudovich_q(p, cm, t + d)
            - yudovich_q(p, cm, t + 2 * d)
        ) / (12 * d)
        assert abs(fd + cm * yudovich_q(p, cm, t) ** 2) < 1e-10

    def test_monotonicity_identities(self):
        t = np.linspace(0.0, 1.0, 30)
        q = theorem_q(1.8, 0.5, t)
        assert np.all(np.diff(q) < 0)
        assert np.all(theorem_q(1.9, 0.5, t) > theorem_q(1.7, 0.5, t))

    def test_validation(self):
        with pytest.raises(ValueError):
            yudovich_q(2.5, 1.0, 0.1)
        with pytest.raises(ValueError):
            yudovich_q(1.5, -1.0, 0.1)
        with pytest.raises(ValueError):
            theorem_q(2.0, 1.0, 0.1)
        with pytest.raises(ValueError):
            theorem_q(1.8, 0.0, 0.1)

    def test_curve_validation(self):
        t = np.array([0.0, 0.1])
        with pytest.raises(ValueError, match="source"):
            reference_curve("mystery", t, [1.8, 1.7])
        with pytest.raises(ValueError, match="decreasing"):
            reference_curve("theorem", t, [1.7, 1.8])
        with pytest.raises(ValueError, match="\\(1, 2\\]"):
            reference_curve("theorem", t, [2.5, 1.7])

    def test_fit_loss_rate_recovers_synthetic_rate(self):
        t = np.linspace(0.0, 0.4, 9)
        q = theorem_q(1.8, 0.65, t)
        assert fit_loss_rate(t, q, 1.8) == pytest.approx(0.65, abs=1e-10)


class TestRegularityMonitor:
    def test_smoke_structure(self):
        spec = DataSpec(kind="theorem_beta", beta=0.25)
        data = make_data(spec, 256)
        u0 = biot_savart(data)
        dt = 0.5 * (2.0 / 256) / u0.max_speed()
        cfg = SolverConfig(n=256, dt=dt, t_end=0.04, snapshot_times=(0.02,))
        rec = run(data, cfg, data_spec=spec)
        curve = regularity_monitor(rec, np.linspace(1.1, 2.0, 8), [64, 128, 256])
        assert curve.source == "measured"
        assert list(curve.times) == [0.0, 0.02, 0.04]
        assert np.all((curve.q_values > 1.0) & (curve.q_values <= 2.0))
        assert np.all(curve.q_lo <= curve.q_values)
        assert np.all(curve.q_values <= curve.q_hi)
        assert curve.q_values[0] == pytest.approx(classify_p0(spec), abs=0.1)

    def test_requires_data_spec_or_rerun(self):
        data = make_data(DataSpec(kind="theorem_beta", beta=0.25), 64)
        cfg = SolverConfig(n=64, dt=0.02, t_end=0.04)
        rec = run(data, cfg)  # no data_spec attached
        with pytest.raises(ValueError, match="data_spec"):
            regularity_monitor(rec, [1.2, 1.8], [64, 128, 256])
