#! /usr/bin/env python3
# coding=utf-8
"""
Author: willmoreLab developers

"""

import numpy as np
import pytest

import willmoreLab.helpers as h
import willmoreLab.sphere_grid as sg
import willmoreLab.surfaces as surfaces
import willmoreLab.geometry as geometry
import willmoreLab.ambient as ambient


def test_curvature_tensor():
    s3 = ambient.Riemann3.s3()
    assert np.allclose(s3.ricci(), 2*np.eye(3))
    assert s3.scalar() == pytest.approx(6.)
    assert np.allclose(ambient.Riemann3.from_ricci(2*np.eye(3)).tensor, s3.tensor)
    ric = np.array([[1., 0.2, 0.], [0.2, -0.5, 0.1], [0., 0.1, 2.]])
    assert np.allclose(ambient.Riemann3.from_ricci(ric).ricci(), ric)
    assert s3.scaled(2.).scalar() == pytest.approx(12.)

    broken = s3.tensor.copy()
    broken[0, 1, 0, 1] += 0.1
    with pytest.raises(h.MetricError):
        ambient.Riemann3(broken)
    with pytest.raises(h.MetricError):
        ambient.Riemann3.from_ricci([[1., 2., 0.], [0., 1., 0.], [0., 0., 1.]])


def test_normal_form_metric():
    riem = ambient.Riemann3.from_ricci(np.diag([1., 2., -0.5]))
    g = ambient.normal_form_metric(riem)
    origin = np.zeros(3)
    assert np.allclose(g.metric(origin), np.eye(3))
    assert np.allclose(g.christoffel(origin), 0.)
    assert np.allclose(g.ricci(origin), np.diag([1., 2., -0.5]), atol=1e-12)
    assert g.scalar(origin) == pytest.approx(2.5)
    # Gauss lemma: g_ij x^j = x_i
    x = np.array([0.05, -0.1, 0.08])
    assert np.allclose(g.metric(x) @ x, x, atol=1e-14)
    assert g.validity_radius == pytest.approx(min(0.5/np.sqrt(np.max(np.abs(riem.tensor))), 1.))


def test_metric_derivatives():
    rng = np.random.default_rng(5)
    x = rng.uniform(-0.3, 0.3, size=(4, 3))
    eps = 1e-6
    for g in (ambient.normal_form_metric(ambient.Riemann3.s3()),
              ambient.conformal_metric([0.1, 0., -0.1], c2=0.3, c4=0.5)):
        for k in range(3):
            e = np.zeros(3)
            e[k] = eps
            fd = (g.metric(x + e) - g.metric(x - e))/(2*eps)
            assert np.max(np.abs(g.dmetric(x)[..., k] - fd)) < 1e-8
            fd2 = (g.dmetric(x + e) - g.dmetric(x - e))/(2*eps)
            assert np.max(np.abs(g.ddmetric(x)[..., k] - fd2)) < 1e-7
            fdG = (g.christoffel(x + e) - g.christoffel(x - e))/(2*eps)
            assert np.max(np.abs(g.dchristoffel(x)[..., k] - fdG)) < 1e-7


def test_conformal_scalar_curvature():
    g = ambient.conformal_metric(q=[0.2, 0., 0.], c2=0., c4=0.05, validity_radius=2.)
    rng = np.random.default_rng(2)
    x = rng.uniform(-0.8, 0.8, size=(10, 3))
    assert np.allclose(g.scalar(x), ambient.conformal_scalar_closed(g, x), atol=1e-10)
    # maximal at q
    assert g.scalar(np.array([0.2, 0., 0.])) == pytest.approx(0., abs=1e-14)
    assert np.all(g.scalar(x) < 0.)


def test_sphere_expansion():
    sweep = ambient.sphere_energy_sweep(ambient.normal_form_metric(ambient.Riemann3.s3()))
    print('c2', sweep.c2, sweep.expected_c2)
    assert sweep.expected_c2 == pytest.approx(-8*np.pi)
    assert abs(sweep.c2/sweep.expected_c2 - 1.) < 0.05
    doubled = ambient.sphere_energy_sweep(ambient.normal_form_metric(ambient.Riemann3.s3().scaled(2.)))
    assert abs(doubled.c2/sweep.c2 - 2.) < 0.1

    flat = ambient.sphere_energy_sweep(ambient.euclidean_metric())
    assert abs(flat.c2) < 1e-6
    assert np.allclose(flat.energies, 8*np.pi, atol=1e-9)

    with pytest.raises(h.MetricError):
        ambient.sphere_energy_sweep(ambient.conformal_metric())
    with pytest.raises(h.ValidityError):
        ambient.sphere_energy_sweep(ambient.normal_form_metric(ambient.Riemann3.s3()), radii=[0.1, 0.6])


def _random_sample(rng, R):
    coeffs = np.zeros(9)
    coeffs[4:] = rng.uniform(-0.05, 0.05, size=5)
    return surfaces.RadialShape(rng.uniform(-0.02, 0.02, size=3), R, coeffs).sample()


def test_adjust_area_pairs():
    rng = np.random.default_rng(42)
    for _ in range(20):
        sample = _random_sample(rng, rng.uniform(0.5, 2.))
        A = geometry.area(sample)
        a = A*rng.uniform(0.7, 1.4)
        t0, adjusted = ambient.adjust_area(sample, a)
        assert abs(geometry.area(adjusted) - a) <= 1e-10*a
        assert abs(t0) <= 2*abs(A - a)/a
        before, after = geometry.curvature_integral(sample), geometry.curvature_integral(adjusted)
        assert abs(after - before) < 1e-6


def test_adjust_area_curved():
    g = ambient.normal_form_metric(ambient.Riemann3.s3())
    rng = np.random.default_rng(8)
    for _ in range(5):
        sample = _random_sample(rng, 0.1)
        A = geometry.area(sample, g)
        a = A*rng.uniform(0.7, 1.4)
        t0, adjusted = ambient.adjust_area(sample, a, g)
        assert abs(geometry.area(adjusted, g) - a) <= 1e-10*a
        assert abs(t0) <= 2*abs(A - a)/a

    sample = _random_sample(rng, 1.)
    with pytest.raises(h.AreaBandError):
        ambient.adjust_area(sample, 3*geometry.area(sample))
    near_edge = _random_sample(rng, 0.42)
    with pytest.raises(h.ValidityError):
        ambient.adjust_area(near_edge, 1.4*geometry.area(near_edge, g), g)


def test_adjust_area_small_in_s3():
    g = ambient.normal_form_metric(ambient.Riemann3.s3())
    rng = np.random.default_rng(17)
    for ratio in (0.8, 1.25):
        sample = _random_sample(rng, 0.05)
        A = geometry.area(sample, g)
        t0, _ = ambient.adjust_area(sample, ratio*A, g)
        flat = 0.5*np.log(ratio)
        print(ratio, t0, flat)
        assert t0 == pytest.approx(flat, rel=1e-2)


def test_combined_adjustment():
    sample = _random_sample(np.random.default_rng(1), 1.)
    res = ambient.combined_adjustment(sample, 1.2*geometry.area(sample))
    assert abs(res['C1']) < 1e-6
    assert abs(res['delta']) < 1e-6
    g = ambient.normal_form_metric(ambient.Riemann3.s3())
    small = _random_sample(np.random.default_rng(1), 0.1)
    res = ambient.combined_adjustment(small, 1.2*geometry.area(small, g), g)
    assert res['t0'] > 0
    assert res['C1'] < 10.


def test_scaling_lambda():
    sphere = surfaces.RadialShape(R=1.5).sample()
    assert abs(ambient.estimate_lambda_scaling(sphere)) < 1e-6
    assert ambient.lambda_bound_constant(0., sphere) == 0.


def test_simon_on_spheres():
    for R in (0.5, 1., 2.):
        shape = surfaces.RadialShape([0.3, -0.1, 0.2], R)
        rows, summary = ambient.simon_checks(shape, [0.25*R, 0.5*R, R, 1.5*R, 2.5*R])
        for row in rows:
            print(R, row)
            assert row.slack >= -summary['slack_tolerance']
            assert abs(row.slack) < 1e-6
        contained = [row for row in rows if row.contained]
        assert contained and all(summary['area'] <= row.r**2*summary['willmore'] for row in contained)
        assert summary['diameter'] == pytest.approx(2*R, rel=1e-3)


def test_simon_on_perturbed_shape():
    coeffs = np.zeros(25)
    coeffs[sg.coeff_index(2, 0)] = 0.1
    coeffs[sg.coeff_index(3, 2)] = 0.05
    shape = surfaces.RadialShape(R=1., coeffs=coeffs)
    rows, summary = ambient.simon_checks(shape, [0.5, 1., 1.5, 2.5])
    assert all(row.slack >= -summary['slack_tolerance'] for row in rows)
    assert rows[-1].contained
    assert summary['area'] <= rows[-1].r**2*summary['willmore']
    print(rows[-1].slack, summary['willmore']/8 - np.pi)
    assert rows[-1].slack > 1e-3
    assert rows[-1].slack == pytest.approx(summary['willmore']/8 - np.pi, rel=1e-2)


def test_simon_hypotheses():
    shape = surfaces.RadialShape(R=1.)
    with pytest.raises(h.MetricError):
        ambient.simon_checks(shape, [1.], g=ambient.normal_form_metric(ambient.Riemann3.s3()))
    with pytest.raises(h.HypothesisError):
        ambient.simon_checks(shape, [1.], center=[0., 0., 0.])
    with pytest.raises(h.HypothesisError):
        ambient.simon_checks(shape.sample(), [1.])
