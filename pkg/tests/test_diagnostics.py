import math

import mpmath
import numpy as np
import pytest

from arks import diagnostics as D
from arks import grid as G
from arks import initial as I
from arks import semigroup as S
from arks import stepper as ST
from arks.errors import InvalidSeriesError
from arks.model import ModelParams, ScenarioConfig


def _params(tau=1, chi=0.5, xi=1.5):
    return ModelParams(chi, xi, 1.0, 1.0, 1.0, 0.5, tau)


def _cfg(n=2):
    return ScenarioConfig(n=n, m=1.0, r=1.5)


def _state(grid, u, v=None, w=None):
    zero = G.constant_field(grid, 0.0)
    return ST.State(0.5, u, v or zero, w or zero)


def test_entropy_of_uniform_density(unit_square_64):
    rec = D.record(_state(unit_square_64, G.constant_field(unit_square_64, 1.0)),
                   _params(), _cfg())
    assert rec.entropy == pytest.approx(0.0, abs=1e-14)
    assert rec.dirichlet_z == 0.0
    assert rec.fisher_u == 0.0


def test_homogeneous_energy_value(unit_square_64):
    # u = 2 on the unit square: entropy = 2 ln 2, gradients vanish
    params = _params()
    zeta = params.xi * 1.0 - params.chi * 1.0
    rec = D.record(_state(unit_square_64, G.constant_field(unit_square_64, 2.0)),
                   params, _cfg())
    assert rec.entropy == pytest.approx(2 * math.log(2), rel=1e-13)
    assert rec.energy_F == pytest.approx(zeta * 2 * math.log(2), rel=1e-13)


def test_entropy_against_extended_precision_oracle(unit_square_64):
    u = I.mollify_measure(
        I.MeasureSpec(atoms=((0.5, 0.5, 2.0),)), 5e-3, unit_square_64
    )
    rec = D.record(_state(unit_square_64, u), _params(), _cfg())
    with mpmath.workdps(40):
        vol = mpmath.mpf(1) / (64 * 64)
        oracle = mpmath.fsum(
            mpmath.mpf(float(x)) * mpmath.log(mpmath.mpf(float(x))) * vol
            for x in u.values.ravel()
            if x > 0
        )
    assert rec.entropy == pytest.approx(float(oracle), abs=1e-10)


def test_energy_definitional_identity(unit_square_64, rng):
    params = _params()
    u = G.Field(unit_square_64, rng.random(unit_square_64.shape) + 0.1)
    v = G.Field(unit_square_64, rng.random(unit_square_64.shape))
    w = G.Field(unit_square_64, rng.random(unit_square_64.shape))
    rec = D.record(ST.State(0.1, u, v, w), params, _cfg())
    zeta = params.xi * 1.0 - params.chi * 1.0
    assert rec.energy_F == zeta * rec.entropy + rec.dirichlet_z


def test_fisher_matches_gaussian_rate():
    # for a heat-kernel profile at scale s the Fisher information is n/s·m...
    # 2D: 4∫|∇√G|² = 1/s · (normalized), checked against the analytic value
    g = G.rectangle((1, 1), (256, 256))
    s = 0.004
    u = I.mollify_measure(I.MeasureSpec(atoms=((0.5, 0.5, 1.0),)), s, g)
    rec = D.record(_state(g, u), _params(), _cfg())
    # continuum: ∫|∇G|²/G = m·(n/2)/s with kernel variance 2s per axis
    assert rec.fisher_u == pytest.approx(1.0 / s, rel=0.05)


def test_lp_columns_default_set():
    cfg = ScenarioConfig(n=2, m=1.0, u_exponent=2.0)
    assert D.default_lp_exponents(cfg) == (1.2, 2.0, 2.5)
    cfg3 = ScenarioConfig(n=3, m=1.0, u_exponent=1.5)
    assert D.default_lp_exponents(cfg3) == (1.5, 2.0, 2.5, 3.0)


def test_admissible_lambda_range():
    for r in (1.201, 1.21, 1.25, 1.4, 1.5, 1.9, 1.99):
        lam = D.admissible_lambda(r)
        assert 0 < lam < 2.0 / 3.0
        assert lam - 2.0 / r > -1.0


def test_fit_decay_exponent_exact_power_laws():
    ts = np.geomspace(1e-4, 1e-1, 12)
    series = [(t, t**-1) for t in ts]
    assert D.fit_decay_exponent(series, (1e-4, 1e-1)) == pytest.approx(-1.0, abs=1e-12)
    series = [(t, 7.0) for t in ts]
    assert D.fit_decay_exponent(series, (1e-4, 1e-1)) == pytest.approx(0.0, abs=1e-12)


def test_fit_decay_exponent_perturbed():
    ts = np.geomspace(1e-4, 1e-1, 40)
    series = [(t, t**-0.5 * (1 + 0.01 * np.sin(np.log(t)))) for t in ts]
    assert D.fit_decay_exponent(series, (1e-4, 1e-1)) == pytest.approx(-0.5, abs=0.02)


def test_fit_decay_exponent_errors():
    ts = np.geomspace(1e-4, 1e-1, 12)
    with pytest.raises(InvalidSeriesError):
        D.fit_decay_exponent([(t, -1.0) for t in ts], (1e-4, 1e-1))
    with pytest.raises(InvalidSeriesError):
        D.fit_decay_exponent([(t, 1.0) for t in ts[:3]], (1e-4, 1e-1))


def test_decay_envelope_verdict_modes():
    ts = np.geomspace(1e-4, 1e-1, 15)
    # exactly saturating the claimed rate: both arms pass
    v = D.decay_envelope_verdict("x", [(t, 2 * t**-1.0) for t in ts], 1.0, (1e-4, 1e-1))
    assert v.passed and v.details["pass_fit"] and v.details["pass_envelope"]
    # decaying much too fast toward 0: fit fails, envelope catches divergence
    v = D.decay_envelope_verdict("x", [(t, t**-2.0) for t in ts], 1.0, (1e-4, 1e-1))
    assert not v.passed
    assert v.details["monotone_divergence"]
    # shallower than claimed: fit arm passes
    v = D.decay_envelope_verdict("x", [(t, t**-0.3) for t in ts], 1.0, (1e-4, 1e-1))
    assert v.passed and v.details["pass_fit"]


def test_cumulative_convergence_verdict():
    ts = np.geomspace(1e-5, 1e-1, 20)
    ok = D.cumulative_convergence_verdict("f", [(t, t**-0.5) for t in ts], 0.4)
    assert ok.passed  # integrand s^{-0.1}: increments shrink toward 0
    bad = D.cumulative_convergence_verdict("f", [(t, t**-1.8) for t in ts], 0.4)
    assert not bad.passed  # s^{-1.4} diverges at 0
    vac = D.cumulative_convergence_verdict("f", [(t, t**-1.8) for t in ts], 0.4, vacuous=True)
    assert vac.passed and vac.details["vacuous"]


def test_taxis_growth_verdict():
    ts = np.geomspace(1e-5, 1e-1, 25)
    v = D.taxis_growth_verdict("taxis", [(t, 1.0) for t in ts], 0.1)
    assert v.passed and v.fitted_exponent == pytest.approx(1.0, abs=0.05)
    zero = D.taxis_growth_verdict("taxis", [(t, 0.0) for t in ts], 0.1)
    assert zero.passed and zero.mode == "identically-zero"


def test_weak_continuity_verdict():
    ts = np.geomspace(1e-6, 1e-1, 12)
    series = [(t, 1.0 + 3 * t) for t in ts]
    ok = D.weak_continuity_verdict("phi", series, 1.0, tol=1e-3)
    assert ok.passed
    wobble = [(t, 1.0 + 3 * t) for t in ts]
    wobble[2] = (ts[2], 1.0 + 10.0)  # a large non-monotone excursion
    bad = D.weak_continuity_verdict("phi", wobble, 1.0, tol=1e-3)
    assert not bad.passed
    # the same excursion outside the monotone window is tolerated
    ok2 = D.weak_continuity_verdict("phi", wobble, 1.0, tol=1e-3, t_monotone=ts[1])
    assert ok2.passed


def test_series_csv_roundtrip(tmp_path, unit_square_64, rng):
    params = _params()
    cfg = _cfg()
    recs = []
    for t in (0.1, 0.2):
        u = G.Field(unit_square_64, rng.random(unit_square_64.shape) + 0.5)
        st = ST.State(t, u, u, u)
        recs.append(D.record(st, params, cfg))
    path = tmp_path / "series.csv"
    D.write_series_csv(recs, path)
    header = path.read_text().splitlines()[0].split(",")
    assert header[:14] == [
        "t", "mass_u", "mass_v", "mass_w", "linf_u", "entropy", "dirichlet_z",
        "energy_F", "fisher_u", "lap_z_sq", "grad_z_l4", "taxis_l1", "w1r_v", "w1r_w",
    ]
    assert header[14:] == ["lp_u_1.2", "lp_u_2", "lp_u_2.5"]
    data = D.read_series_csv(path)
    assert data["t"].tolist() == [0.1, 0.2]
    assert data["entropy"][0] == recs[0].entropy  # repr round-trip is exact


def test_probe_catalog_and_measure_pairing(unit_square_64):
    catalog = D.probe_functions(unit_square_64)
    assert set(catalog) == {"one", "cos-x", "cos-y", "gauss"}
    spec = I.MeasureSpec(atoms=((0.25, 0.5, 2.0),))
    fn, fld = catalog["cos-x"]
    pairing = D.measure_pairing(spec, unit_square_64, fn, fld)
    assert pairing == pytest.approx(2.0 * math.cos(np.pi * 0.25), rel=1e-12)


def test_pure_diffusion_weak_deviation_bound(unit_square_64):
    # |∫u(t)φ − ∫u0φ| <= t · m · sup|Δ_h φ| when there is no drift
    params = ModelParams(0.0, 0.0, 1.0, 1.0, 1.0, 1.0, 0)
    u0 = I.mollify_measure(I.MeasureSpec(atoms=((0.5, 0.5, 1.0),)), 1e-2, unit_square_64)
    ctrl = ST.StepControl(dt_init=1e-4, dt_max=1e-4, blowup_threshold=1e9)
    st = ST.initial_state(u0, params, ctrl)
    T = 0.02
    out = ST.run(st, params, ctrl, T, [T])
    _, phi = D.probe_functions(unit_square_64)["gauss"]
    dev = abs(
        G.integrate(G.Field(unit_square_64, out.final_state.u.values * phi.values))
        - G.integrate(G.Field(unit_square_64, u0.values * phi.values))
    )
    lap_phi = G.lp_norm(G.neumann_laplacian(phi), np.inf)
    assert dev <= T * 1.0 * lap_phi * (1 + 1e-10)


def test_check_dampened_integrals_wrapper(unit_square_64):
    params = _params()
    cfg = _cfg()
    ctrl = ST.StepControl(dt_init=1e-4, dt_max=5e-4, blowup_threshold=1e9)
    u0 = I.mollify_measure(I.MeasureSpec(atoms=((0.5, 0.5, 1.0),)), 1e-2, unit_square_64)
    v0 = G.constant_field(unit_square_64, 1.0)
    w0 = I.density_field(unit_square_64, I.DensitySpec("gaussian", amplitude=1.0, width=0.3))
    st = ST.initial_state(u0, params, ctrl, v0, w0)
    out = ST.run(st, params, ctrl, 0.1, ST.geometric_ladder(0.1, 14), scenario_cfg=cfg)
    lam = D.admissible_lambda(cfg.r)
    verdicts = D.check_dampened_integrals(out.series, lam, zeta=1.0)
    names = {v.functional for v in verdicts}
    assert names == {
        "fisher-dampened-integral",
        "lap-z-dampened-integral",
        "grad-z4-dampened-integral",
        "taxis-cumulative",
    }
    assert all(v.passed for v in verdicts)
    # zeta = 0 marks the fisher term vacuous
    vac = D.check_dampened_integrals(out.series, lam, zeta=0.0)
    fisher = [v for v in vac if v.functional == "fisher-dampened-integral"][0]
    assert fisher.passed and fisher.details["vacuous"]
