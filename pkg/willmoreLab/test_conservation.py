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
import willmoreLab.conservation as conservation


def _bundles(name, resolutions=(65, 129), **params):
    imm = surfaces.get_immersion(name, **params)
    return [geometry.evaluate_bundle(imm, n=n) for n in resolutions]


def test_line_integration():
    chart = ch.Chart(65)
    X, Y = chart.mesh()
    f = np.sin(X)*np.exp(Y)
    G = ch.ChartField(chart, np.stack([np.cos(X)*np.exp(Y), np.sin(X)*np.exp(Y)], axis=-1))
    pot = conservation.integrate_gradient(G)
    i, j = chart.center_node()
    assert np.max(np.abs(pot.field.values - (f - f[i, j]))) < 1e-7
    assert pot.defect < 1e-7

    with pytest.raises(h.RegionError):
        conservation.reconstruct_potential(ch.grad(ch.ChartField(chart, f)), base=(0, 0))


def test_torus_conservation():
    checks = conservation.conservation_checks(_bundles('torus'))
    for c in checks:
        print(c.name, c['max'], c['order'])
        assert c.passed, c.name


def test_cylinder_negative_control():
    checks = {c.name: c for c in conservation.conservation_checks(_bundles('cylinder'), expect_willmore=False)}
    for c in checks.values():
        print(c.name, c['max'], c['order'])
        assert c.passed, c.name
    assert not checks['div_T']['converged']
    assert checks['generalized']['converged']
    # div T plateaus: e^{2λ}·2·2H(H² − K)·n with H = ½
    assert checks['div_T']['max'][-1] == pytest.approx(0.5, rel=1e-3)

    strict = {c.name: c for c in conservation.conservation_checks(_bundles('cylinder'), expect_willmore=True)}
    assert not strict['div_T'].passed


def test_cylinder_has_no_potentials():
    with pytest.raises(h.CurlDefectError):
        conservation.build_potentials(_bundles('cylinder', (65,))[0])
    pset = conservation.build_potentials(_bundles('cylinder', (65,))[0], check=False)
    assert pset.defects['L'] > pset.thresholds['L']


def test_torus_potentials():
    for source in ('potentials', 'generators'):
        checks, pset = conservation.potential_checks(_bundles('torus'), source=source)
        for c in checks:
            print(source, c.name, c['order'])
            assert c.passed, (source, c.name)
    assert sorted(pset.fields()) == ['L', 'R', 'S']
    assert ch.residual_norms(pset.T)['max'] > 1e-2


def test_plane_potentials_vanish():
    checks, pset = conservation.potential_checks(_bundles('plane'))
    assert all(c.passed for c in checks)
    for name, field in pset.fields().items():
        assert ch.residual_norms(field)['max'] == 0., name


def test_sphere_potentials():
    bundle = _bundles('sphere', (129,))[0]
    pset = conservation.build_potentials(bundle)
    for field in (pset.T, pset.L, pset.S):
        assert ch.residual_norms(field)['max'] < 1e-8
    # T ≡ 0 leaves ∇R = −2H∇Φ
    phi = bundle.phi.values
    closed = -2*bundle.H_avg.values[..., None]*(phi - phi[pset.base])
    assert np.nanmax(np.abs(pset.R.values - closed)) < 1e-5


def test_catenoid_is_willmore():
    bundle = _bundles('catenoid', (65,))[0]
    fields = conservation.residual_fields(bundle)
    assert ch.residual_norms(fields['div_T'])['max'] < 1e-10
    assert np.max(np.abs(bundle.H_avg.values)) < 1e-12


def test_base_point_shifts_by_constants():
    bundle = _bundles('torus', (65,))[0]
    c = bundle.chart.center_node()
    psets = [conservation.build_potentials(bundle, base=base) for base in (None, (c[0] + 7, c[1] - 5), (20, 40))]
    norms = []
    for pset in psets:
        fields = dict(conservation.cons2_residuals(pset, bundle))
        fields.update(conservation.rs_residuals(pset, bundle))
        norms.append({k: ch.residual_norms(f, window=0.6) for k, f in fields.items()})
    for other in norms[1:]:
        for name, n in norms[0].items():
            assert abs(other[name]['l2'] - n['l2']) < 1e-10, name
            assert abs(other[name]['max'] - n['max']) < 1e-10, name
    for name in ('L', 'S', 'R'):
        diff = getattr(psets[1], name).values - getattr(psets[0], name).values
        assert np.nanmax(np.abs(diff - np.nanmean(diff, axis=(0, 1)))) < 1e-12, name
    assert np.allclose(psets[2].R.values[20, 40], 0.)

    with pytest.raises(h.RegionError):
        conservation.build_potentials(_bundles('sphere', (65,))[0], base=(0, 0))
