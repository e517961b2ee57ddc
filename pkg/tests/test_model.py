import pytest
from hypothesis import given
from hypothesis import strategies as st

from arks.errors import InvalidParameterError
from arks.model import (
    ModelParams,
    Scenario,
    ScenarioConfig,
    classify_scenario,
    derive,
)


def params(chi=1.0, xi=2.0, alpha=1.0, beta=1.0, gamma=1.0, delta=1.0, tau=1):
    return ModelParams(chi, xi, alpha, beta, gamma, delta, tau)


def test_derive_examples():
    assert derive(params(chi=1, xi=2, alpha=1, gamma=1, beta=1, delta=1)).zeta == 1.0
    assert derive(params(chi=1, xi=2, beta=1, delta=1)).sigma == 0.0
    d = derive(params(chi=0, xi=0, alpha=3, beta=5, gamma=1, delta=2))
    assert d.zeta == 0.0 and d.sigma == 0.0
    d = derive(params(chi=2, xi=1, alpha=3, gamma=1, beta=5, delta=2))
    assert d.zeta == -5.0 and d.sigma == 6.0


def test_parameter_validation():
    with pytest.raises(InvalidParameterError):
        params(chi=-0.1)
    with pytest.raises(InvalidParameterError):
        params(alpha=0.0)
    with pytest.raises(InvalidParameterError):
        params(tau=2)


def test_scenario_config_validation():
    with pytest.raises(InvalidParameterError):
        ScenarioConfig(n=2, m=0.0)
    with pytest.raises(InvalidParameterError):
        ScenarioConfig(n=2, m=1.0, r=1.1)
    with pytest.raises(InvalidParameterError):
        ScenarioConfig(n=2, m=1.0, u_exponent=2.5)
    with pytest.raises(InvalidParameterError):
        ScenarioConfig(n=4, m=1.0)


def test_classify_examples():
    cfg = ScenarioConfig(n=2, m=1.0)
    # tau=1, n=2, zeta=0.5
    p = params(chi=0.5, xi=1.0, tau=1)
    assert classify_scenario(p, cfg, has_density=False) is Scenario.S1
    # tau=0, n=2, zeta=-0.1, c_s2=1, m=5 so the cutoff is -0.2
    cfg5 = ScenarioConfig(n=2, m=5.0)
    p = params(chi=1.1, xi=1.0, tau=0)
    assert derive(p).zeta == pytest.approx(-0.1)
    assert classify_scenario(p, cfg5, has_density=False) is Scenario.S2
    # tau=1, n=3 is not covered
    p = params(chi=0.0, xi=1.0, tau=1)
    assert classify_scenario(p, ScenarioConfig(n=3, m=1.0), True) is Scenario.UNCLASSIFIED


def test_classify_s3_needs_density_and_exponent():
    cfg = ScenarioConfig(n=3, m=1.0, u_exponent=1.5)
    p = params(chi=0.5, xi=1.0, tau=0)
    assert classify_scenario(p, cfg, has_density=True) is Scenario.S3
    assert classify_scenario(p, cfg, has_density=False) is Scenario.UNCLASSIFIED
    cfg2 = ScenarioConfig(n=3, m=1.0, u_exponent=2.0)
    assert classify_scenario(p, cfg2, has_density=True) is Scenario.UNCLASSIFIED


def test_s2_boundary_is_mass_dependent():
    p = params(chi=1.1, xi=1.0, tau=0)  # zeta = -0.1
    tight = ScenarioConfig(n=2, m=20.0)  # cutoff -0.05 > zeta
    assert classify_scenario(p, tight, has_density=False) is Scenario.UNCLASSIFIED


@given(
    scale=st.floats(min_value=1e-3, max_value=1e3),
    chi=st.floats(min_value=0.0, max_value=10.0),
    xi=st.floats(min_value=0.0, max_value=10.0),
)
def test_zeta_sign_is_scale_consistent(scale, chi, xi):
    """Multiplying (chi, xi) by c > 0 scales zeta by c; S1 membership is stable."""
    base = params(chi=chi, xi=xi, tau=1)
    scaled = params(chi=chi * scale, xi=xi * scale, tau=1)
    z0 = derive(base).zeta
    z1 = derive(scaled).zeta
    assert z1 == pytest.approx(scale * z0, rel=1e-12, abs=1e-12)
    cfg = ScenarioConfig(n=2, m=1.0)
    assert (classify_scenario(base, cfg, False) is Scenario.S1) == (
        classify_scenario(scaled, cfg, False) is Scenario.S1
    )
