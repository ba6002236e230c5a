#! /usr/bin/env python3
# coding=utf-8
"""
Author: willmoreLab developers

"""

import numpy as np
import pytest

import willmoreLab.helpers as h
import willmoreLab.chart as ch
import willmoreLab.sphere_grid as sg
import willmoreLab.surfaces as surfaces
import willmoreLab.geometry as geometry
import willmoreLab.ambient as ambient


def _bundles(name, resolutions=(65, 129), **params):
    imm = surfaces.get_immersion(name, **params)
    return [geometry.evaluate_bundle(imm, n=n) for n in resolutions]


def _wobbly(n_theta=32, n_phi=64):
    coeffs = np.zeros(25)
    coeffs[sg.coeff_index(2, 0)] = 0.08
    coeffs[sg.coeff_index(3, -1)] = -0.05
    coeffs[sg.coeff_index(4, 3)] = 0.03
    return surfaces.RadialShape([0.05, -0.02, 0.1], 1.2, coeffs, n_theta=n_theta, n_phi=n_phi).sample()


def test_sphere_energy():
    sample = surfaces.RadialShape(R=1., n_theta=64, n_phi=128).sample()
    W = geometry.willmore_energy(sample)
    print('W sphere', W)
    assert abs(W - 8*np.pi) < 1e-8
    assert geometry.area(sample) == pytest.approx(4*np.pi, rel=1e-12)
    H, nu = geometry.mean_curvature_ambient(sample)
    assert np.allclose(H, 2.)
    assert np.allclose(nu, sample.points)
    big = surfaces.RadialShape(R=3.).sample()
    assert geometry.willmore_energy(big) == pytest.approx(8*np.pi, rel=1e-10)
    assert geometry.curvature_integral(big) == pytest.approx(8*np.pi, rel=1e-10)


def test_torus_energy():
    bundle = geometry.evaluate_bundle(surfaces.willmore_torus(), n=129)
    W = geometry.chart_willmore_energy(bundle)
    print('W torus', W, W - 4*np.pi**2)
    assert abs(W - 4*np.pi**2) < 1e-6
    assert geometry.chart_area(bundle) == pytest.approx(4*np.pi**2*np.sqrt(2), rel=1e-8)


def test_sphere_bundle():
    bundle = _bundles('sphere', (65,), R=2.)[0]
    assert np.allclose(np.abs(bundle.H_avg.values), 0.5, atol=1e-12)
    assert np.allclose(bundle.K.values, 0.25, atol=1e-12)
    assert np.max(np.abs(bundle.A0sq.values)) < 1e-12
    assert np.allclose(np.linalg.norm(bundle.n.values, axis=-1), 1.)


def test_identity_orders():
    for name in ('sphere', 'cylinder', 'catenoid', 'torus'):
        checks = geometry.identity_checks(_bundles(name))
        for c in checks:
            print(name, c.name, c['max'], c['order'])
            assert c.passed, (name, c.name)


def test_finite_difference_source():
    imm = surfaces.willmore_torus()
    analytic = geometry.evaluate_bundle(imm, n=129)
    fd = geometry.evaluate_bundle(imm, n=129, derivative_source='finite-difference')
    assert fd.source == 'finite-difference'
    assert np.nanmax(np.abs(fd.H_avg.values - analytic.H_avg.values)) < 1e-3
    with pytest.raises(ValueError):
        geometry.evaluate_bundle(imm, n=33, derivative_source='spectral')


def test_willmore_equation_on_torus():
    bundles = _bundles('torus')
    errors = [ch.residual_norms(geometry.el_residual_flat(b))['max'] for b in bundles]
    order = h.observed_order(errors[0], errors[1], bundles[0].chart.h, bundles[1].chart.h)
    print('el torus', errors, order)
    assert order > 3.5
    cyl = _bundles('cylinder', (65,))[0]
    # Δ_g H + 2H(H² − K) = 2·½·¼ on the unit cylinder
    assert ch.residual_norms(geometry.el_residual_flat(cyl))['max'] == pytest.approx(0.25, rel=1e-6)


def test_non_conformal_chart():
    def phi(X, Y):
        return np.stack([2*X, Y, np.zeros_like(X)], axis=-1)

    def dphi(X, Y):
        d = np.zeros(X.shape + (2, 3))
        d[..., 0, 0] = 2.
        d[..., 1, 1] = 1.
        return d

    imm = surfaces.AnalyticImmersion('stretched', phi, dphi, lambda X, Y: np.zeros(X.shape + (2, 2, 3)),
                                     lambda X, Y: np.log(2.)*np.ones_like(X))
    with pytest.raises(h.ConformalityError):
        geometry.evaluate_bundle(imm, n=33)


def test_first_variation():
    sample = _wobbly()
    rng = np.random.default_rng(11)
    for _ in range(5):
        X = geometry.random_field(rng)
        exact = geometry.first_variation(sample, X)
        fd = geometry.first_variation_fd(sample, X)
        print(X, exact, fd)
        assert abs(exact - fd) <= 1e-4*max(abs(fd), 1.)
    for X in (geometry.sine_square_field(), geometry.position_field(), geometry.constant_field([0.3, -1., 2.])):
        assert geometry.first_variation(sample, X) == pytest.approx(geometry.first_variation_fd(sample, X),
                                                                    rel=1e-4, abs=1e-8)


def test_invariant_directions():
    sample = _wobbly()
    assert abs(geometry.first_variation(sample, geometry.constant_field([1., 2., -0.5]))) < 1e-8
    assert abs(geometry.first_variation(sample, geometry.position_field())) < 1e-8


def test_first_variation_curved():
    g = ambient.conformal_metric(q=[0.1, 0., 0.], c4=0.05, validity_radius=3.)
    sample = surfaces.scaled(_wobbly(), np.log(0.5))
    X = geometry.constant_field([0., 0., 1.])
    exact = geometry.first_variation(sample, X, g)
    fd = geometry.first_variation_fd(sample, X, g)
    print('curved', exact, fd)
    assert abs(exact - fd) <= 1e-4*max(abs(fd), 1e-2)
    X = geometry.sine_square_field()
    assert geometry.first_variation(sample, X, g) == pytest.approx(geometry.first_variation_fd(sample, X, g),
                                                                   rel=1e-4, abs=1e-7)


def test_degenerate_sample():
    sample = surfaces.RadialShape(R=1.).sample()
    flat = sample.copy_with(sample.points, np.zeros_like(sample.d1), sample.d2)
    with pytest.raises(h.DegenerateGeometryError):
        geometry.ambient_geometry(flat)
