#! /usr/bin/env python3
# coding=utf-8
"""
Author: willmoreLab developers

"""

import numpy as np
import pytest

import willmoreLab.helpers as h
import willmoreLab.chart as ch
import willmoreLab.surfaces as surfaces
import willmoreLab.geometry as geometry


def test_chart_nodes():
    chart = ch.Chart(65, extent=1.)
    assert chart.h == pytest.approx(2./64)
    assert chart.x[0] == -1. and chart.x[-1] == pytest.approx(1.)
    periodic = ch.Chart(65, extent=np.pi, periodic=(True, False))
    assert periodic.spacing[0] == pytest.approx(2*np.pi/65)
    assert periodic.spacing[1] == pytest.approx(2*np.pi/64)
    assert periodic.center_node() == (32, 32)

    with pytest.raises(ValueError):
        ch.Chart(64)
    with pytest.raises(ValueError):
        ch.Chart(7)


def test_boundary_layers():
    chart = ch.Chart(33)
    f = ch.sample(chart, lambda X, Y: np.sin(X)*np.cos(Y))
    d = ch.derivative(f, 'x')
    assert np.all(np.isnan(d.values[:2, :]))
    assert np.all(np.isnan(d.values[-2:, :]))
    assert np.all(np.isfinite(d.values[2:-2, :]))
    lap = ch.laplacian_flat(f)
    assert np.all(np.isfinite(lap.values[4:-4, 4:-4]))
    assert not np.any(np.isfinite(lap.values[:4, :]))


def test_derivative_order():
    errors, spacings = [], []
    for n in (65, 129):
        chart = ch.Chart(n)
        f = ch.sample(chart, lambda X, Y: np.sin(2*X)*np.exp(Y))
        X, Y = chart.mesh()
        exact = np.stack([2*np.cos(2*X)*np.exp(Y), np.sin(2*X)*np.exp(Y)], axis=-1)
        err = ch.residual_norms(ch.grad(f) - exact)['max']
        errors.append(err)
        spacings.append(chart.h)
    order = h.observed_order(errors[0], errors[1], spacings[0], spacings[1])
    print(errors, order)
    assert order > 3.5


def test_periodic_axis():
    chart = ch.Chart(65, extent=np.pi, periodic=(True, True))
    f = ch.sample(chart, lambda X, Y: np.sin(X)*np.cos(2*Y))
    X, Y = chart.mesh()
    d = ch.derivative(f, 0)
    assert np.all(np.isfinite(d.values))
    assert np.max(np.abs(d.values - np.cos(X)*np.cos(2*Y))) < 1e-5


def test_div_grad_perp_vanishes():
    chart = ch.Chart(65)
    f = ch.sample(chart, lambda X, Y: np.exp(X*Y) + X**3)
    div = ch.divergence(ch.grad_perp(f))
    assert ch.residual_norms(div)['max'] < 1e-9


def test_chart_mismatch():
    a = ch.sample(ch.Chart(33), lambda X, Y: X)
    b = ch.sample(ch.Chart(65), lambda X, Y: X)
    with pytest.raises(h.ChartMismatchError):
        a + b
    with pytest.raises(h.ChartMismatchError):
        ch.ChartField(ch.Chart(33), np.zeros((65, 65)))


def test_integrate_regions():
    chart = ch.Chart(65, extent=1.)
    one = ch.sample(chart, lambda X, Y: np.ones_like(X))
    assert ch.integrate(one) == pytest.approx(4., rel=1e-12)
    quad = ch.sample(chart, lambda X, Y: X**2 + Y**2)
    rect = ch.Rectangle(-0.5, 0.5, -0.5, 0.5)
    assert ch.integrate(quad, region=rect) == pytest.approx(1./6, rel=1e-10)

    disk = ch.Disk(0.1, -0.1, 0.5)
    exact = np.pi*0.5**4/2 + np.pi*0.5**2*(0.1**2 + 0.1**2)
    assert ch.integrate(quad, region=disk) == pytest.approx(exact, rel=1e-10)
    masked = ch.integrate(quad, region=disk, method='masked')
    assert abs(masked - exact) < 5*chart.h*exact

    lam = ch.sample(chart, lambda X, Y: 0.5*np.log(2.)*np.ones_like(X))
    assert ch.integrate(one, lam=lam) == pytest.approx(8., rel=1e-12)


def test_integrate_outside():
    chart = ch.Chart(33)
    f = ch.laplacian_flat(ch.sample(chart, lambda X, Y: X*Y))
    with pytest.raises(h.RegionError):
        ch.integrate(f, region=ch.Disk(0., 0., 0.99))
    with pytest.raises(ValueError):
        ch.integrate(ch.grad(f))


def test_residual_norms_window():
    chart = ch.Chart(65)
    f = ch.sample(chart, lambda X, Y: np.abs(X))
    full = ch.residual_norms(f)
    inner = ch.residual_norms(f, window=0.5)
    assert full['max'] == pytest.approx(1.)
    assert inner['max'] == pytest.approx(0.5)
    assert inner['count'] < full['count']


def test_stencils_exact_on_polynomials():
    chart = ch.Chart(65)
    X, Y = chart.mesh()
    d = ch.derivative(ch.sample(chart, lambda X, Y: X**3), 'x')
    mask = d.finite_mask()
    assert np.max(np.abs(d.values[mask] - 3*X[mask]**2)) < 1e-11
    lap = ch.laplacian_flat(ch.sample(chart, lambda X, Y: X**2 + Y**2))
    mask = lap.finite_mask()
    assert np.max(np.abs(lap.values[mask] - 4.)) < 1e-8


def test_richardson_ratio():
    errors = []
    for n in (65, 129):
        chart = ch.Chart(n)
        X, Y = chart.mesh()
        d = ch.derivative(ch.sample(chart, lambda X, Y: np.sin(X)), 'x')
        errors.append(ch.residual_norms(d - np.cos(X))['max'])
    print(errors, errors[0]/errors[1])
    assert errors[0]/errors[1] == pytest.approx(2**4, rel=0.05)


def test_operators_are_linear():
    chart = ch.Chart(65)
    f = ch.sample(chart, lambda X, Y: np.sin(X)*np.exp(Y))
    g = ch.sample(chart, lambda X, Y: X**4 - X*Y)
    a, b = 2.5, -0.75
    combined = a*f + b*g
    for op in (lambda u: ch.derivative(u, 'y'), ch.grad, ch.laplacian_flat):
        diff = op(combined) - (a*op(f) + b*op(g))
        assert ch.residual_norms(diff)['max'] < 1e-10


def test_hemisphere_integrals():
    bundle = geometry.evaluate_bundle(surfaces.get_immersion('sphere'), n=257)
    disk = ch.Disk(0., 0., 1.)
    assert geometry.chart_area(bundle, disk) == pytest.approx(2*np.pi, rel=1e-6)
    assert geometry.chart_willmore_energy(bundle, disk) == pytest.approx(4*np.pi, rel=1e-6)
