import numpy as np
import pytest

from arks import grid as G
from arks import initial as I
from arks.errors import InvalidParameterError, MisuseError
from arks.model import ModelParams


def _params(tau=1, beta=2.0, delta=1.0):
    return ModelParams(chi=1.0, xi=1.0, alpha=1.0, beta=beta, gamma=1.0, delta=delta, tau=tau)


def test_single_atom_mass_is_conserved(unit_square_64):
    spec = I.MeasureSpec(atoms=((0.5, 0.5, 1.0),))
    for eps in (1e-4, 1e-3, 1e-2, 0.1):
        f = I.mollify_measure(spec, eps, unit_square_64)
        assert G.integrate(f) == pytest.approx(1.0, rel=1e-12)
        assert np.min(f.values) >= 0.0


def test_atom_plus_density_mass(unit_square_64):
    spec = I.MeasureSpec(
        atoms=((0.25, 0.75, 2.0),),
        density=I.DensitySpec("constant", amplitude=0.5),
    )
    raw, m = I.build_raw_measure(spec, unit_square_64)
    assert m == pytest.approx(2.5, rel=1e-12)
    f = I.mollify_measure(spec, 1e-2, unit_square_64)
    assert G.integrate(f) == pytest.approx(m, rel=1e-12)


def test_density_only_l1_convergence(unit_square_64):
    spec = I.MeasureSpec(density=I.DensitySpec("gaussian", amplitude=1.0, width=0.2))
    target = I.density_field(unit_square_64, spec.density)
    dists = []
    for eps in (1e-2, 2.5e-3, 6.25e-4):
        f = I.mollify_measure(spec, eps, unit_square_64)
        dists.append(G.integrate(G.Field(unit_square_64, np.abs(f.values - target.values))))
    assert dists[0] > dists[1] > dists[2]


def test_atom_acts_like_point_evaluation():
    # pairing against a smooth probe approaches the probe value at the atom
    g = G.rectangle((1, 1), (256, 256))
    spec = I.MeasureSpec(atoms=((0.5, 0.5, 1.0),))
    f = I.mollify_measure(spec, 1e-3, g)
    x, y = g.meshgrid()
    phi = np.cos(np.pi * x) * np.cos(np.pi * y) + 2.0
    pairing = G.integrate(G.Field(g, f.values * phi))
    # cos(pi/2) terms vanish at the exact center; snapping shifts by h/2
    target = np.cos(np.pi * (0.5 + g.spacing[0] / 2)) ** 2 + 2.0
    assert pairing == pytest.approx(target, rel=0.02)


def test_weak_convergence_rate_in_eps():
    g = G.rectangle((1, 1), (128, 128))
    spec = I.MeasureSpec(atoms=((0.5, 0.5, 1.0),))
    x, y = g.meshgrid()
    phi = G.Field(g, np.sin(x) * np.exp(y))
    raw, _ = I.build_raw_measure(spec, g)
    exact = G.integrate(G.Field(g, raw.values * phi.values))
    devs = []
    for eps in (4e-3, 1e-3, 2.5e-4):
        f = I.mollify_measure(spec, eps, g)
        devs.append(abs(G.integrate(G.Field(g, f.values * phi.values)) - exact))
    # O(eps) for probes with bounded second derivatives: 4x eps -> ~4x deviation
    assert devs[0] / devs[1] == pytest.approx(4.0, rel=0.3)
    assert devs[1] / devs[2] == pytest.approx(4.0, rel=0.3)


def test_resolved_mollification_is_strictly_positive(unit_square_64):
    spec = I.MeasureSpec(atoms=((0.5, 0.5, 1.0),))
    f = I.mollify_measure(spec, 0.05, unit_square_64)
    assert np.min(f.values) > 0.0


def test_mollify_measure_invalid_eps(unit_square_64):
    spec = I.MeasureSpec(atoms=((0.5, 0.5, 1.0),))
    with pytest.raises(InvalidParameterError):
        I.mollify_measure(spec, 0.0, unit_square_64)
    with pytest.raises(InvalidParameterError):
        I.mollify_measure(spec, -1e-3, unit_square_64)


def test_atom_validation(unit_square_64):
    with pytest.raises(InvalidParameterError):
        I.MeasureSpec(atoms=((0.5, 0.5, -1.0),))
    with pytest.raises(InvalidParameterError):
        I.MeasureSpec(atoms=((0.5, 1.0, 1.0),)).validate_on(unit_square_64)
    with pytest.raises(InvalidParameterError):
        I.MeasureSpec(atoms=((0.5, 1.0),)).validate_on(unit_square_64)  # bad arity
    with pytest.raises(InvalidParameterError):
        I.MeasureSpec().validate_on(unit_square_64)  # nothing at all
    # r = 0 (a centered atom in the ball) is interior and allowed
    I.MeasureSpec(atoms=((0.0, 1.0),)).validate_on(G.radial_ball(1.0, 32))


def test_density_catalog(unit_square_64):
    with pytest.raises(InvalidParameterError):
        I.DensitySpec("lorentzian")
    for kind in I.DENSITY_KINDS:
        f = I.density_field(unit_square_64, I.DensitySpec(kind, amplitude=2.0))
        assert np.min(f.values) >= 0.0
        assert np.max(f.values) <= 2.0 + 1e-12


def test_mollify_chemicals_constants(unit_square_64):
    params = _params(tau=1, beta=2.0, delta=1.0)
    cd = I.ChemicalInitialData(
        v0=G.constant_field(unit_square_64, 1.0),
        w0=G.constant_field(unit_square_64, 0.0),
    )
    v, w = I.mollify_chemicals(cd, 0.1, params, unit_square_64)
    assert np.max(np.abs(v.values - np.exp(-0.2))) < 1e-13
    assert np.max(np.abs(w.values)) == 0.0


def test_mollify_chemicals_shrinks_mass(unit_square_64):
    params = _params(tau=1, beta=1.5, delta=0.5)
    v0 = I.density_field(unit_square_64, I.DensitySpec("gaussian", amplitude=1.0, width=0.2))
    cd = I.ChemicalInitialData(v0=v0, w0=v0)
    v, w = I.mollify_chemicals(cd, 0.02, params, unit_square_64)
    assert G.integrate(v) <= G.integrate(v0)
    assert G.integrate(w) <= G.integrate(v0)
    assert G.integrate(v) < G.integrate(w)  # stronger decay rate on v here


def test_mollify_chemicals_w1r_convergence(unit_square_64):
    from arks.diagnostics import w1r_norm

    params = _params(tau=1)
    v0 = I.density_field(unit_square_64, I.DensitySpec("cosine-bump", amplitude=1.0, width=0.4))
    cd = I.ChemicalInitialData(v0=v0, w0=v0)
    dists = []
    for eps in (1e-1, 1e-2, 1e-3, 1e-4):
        v, _ = I.mollify_chemicals(cd, eps, params, unit_square_64)
        dists.append(w1r_norm(G.Field(unit_square_64, v.values - v0.values), 1.5))
    assert all(a > b for a, b in zip(dists, dists[1:]))


def test_mollify_chemicals_requires_parabolic(unit_square_64):
    cd = I.ChemicalInitialData(
        v0=G.constant_field(unit_square_64, 1.0),
        w0=G.constant_field(unit_square_64, 1.0),
    )
    with pytest.raises(MisuseError):
        I.mollify_chemicals(cd, 0.1, _params(tau=0), unit_square_64)


def test_chemical_data_must_be_nonnegative(unit_square_64):
    with pytest.raises(InvalidParameterError):
        I.ChemicalInitialData(
            v0=G.constant_field(unit_square_64, -0.1),
            w0=G.constant_field(unit_square_64, 1.0),
        )
