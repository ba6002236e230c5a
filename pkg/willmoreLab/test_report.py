#! /usr/bin/env python3
# coding=utf-8
"""
Author: willmoreLab developers

"""

import json
import numpy as np
import pytest
import netCDF4

import willmoreLab.helpers as h
import willmoreLab.chart as ch
import willmoreLab.surfaces as surfaces
import willmoreLab.report as report
import willmoreLab.print_report as print_report


def _fields(n=33):
    chart = ch.Chart(n)
    X, Y = chart.mesh()
    f = ch.ChartField(chart, X**2 - Y)
    return {'f': f, 'grad_f': ch.grad(f)}


def test_check_builders():
    c = report.sequence_order_check('seq', 'a = b', [1e-4, 6.25e-6], [0.1, 0.05], 3.5)
    assert c.passed and c['order'] == pytest.approx(4.)
    slow = report.sequence_order_check('seq', 'a = b', [1e-4, 5e-5], [0.1, 0.05], 3.5)
    assert not slow.passed
    exact = report.sequence_order_check('seq', 'a = b', [1e-3, 0.], [0.1, 0.05], 3.5)
    assert exact.passed

    v = report.value_check('W', 'W = 8π', 8*np.pi + 1e-7, 8*np.pi, 1e-6)
    assert v.passed and v['error'] == pytest.approx(1e-7, rel=1e-6)
    assert not report.value_check('W', 'W = 8π', 26., 8*np.pi, 1e-3, relative=True).passed

    b = report.bound_check('bound', 'x ≤ 1', 1. + 1e-7, 1., slack_tolerance=1e-6)
    assert b.passed and b['slack'] == pytest.approx(-1e-7)
    assert not report.bound_check('bound', 'x ≤ 1', 1.1, 1.).passed

    chart = ch.Chart(33)
    zero = ch.ChartField(chart, np.zeros((33, 33)))
    assert report.norm_check('zero', '0 = 0', zero, 1e-12).passed
    assert report.info('note', '', value=3.).informational


def test_order_check_negative_control():
    fields = [ch.ChartField(ch.Chart(n), np.full((n, n), 0.5)) for n in (33, 65)]
    res = report.order_check('plateau', 'div T = 0', fields, 3.5, expect_convergence=False)
    assert res.passed and not res['converged']
    assert not report.order_check('plateau', 'div T = 0', fields, 3.5).passed


def test_report_json(tmp_path):
    rep = report.Report('verify', config={'resolutions': [65, 129]}, seed=0, meta={'contact': 'x'})
    rep.add(report.value_check('W', 'W = 8π', np.float64(8*np.pi), 8*np.pi, 1e-6))
    rep.add([report.info('nan', '', value=np.nan), report.bound_check('b', '', 2., 1.)])
    assert not rep.passed
    assert [e.name for e in rep.failed()] == ['b']

    filename = str(tmp_path / 'report.json')
    rep.write(filename)
    with open(filename) as f:
        data = json.load(f)
    assert data['schema'] == report.SCHEMA_VERSION
    assert data['passed'] is False
    assert data['checks'][1]['value'] is None
    assert data['config']['resolutions'] == [65, 129]

    assert report.format_for_json({1: np.arange(2), 'b': np.bool_(True)}) == {'1': [0, 1], 'b': True}


def test_report_text():
    rep = report.Report('potentials')
    rep.add(report.sequence_order_check('L', 'dL = ...', [1e-4, 6.25e-6], [0.1, 0.05], 3.5))
    rep.add(report.info('max_T', '', max=0.3))
    text = print_report.report2text(rep, show_anchor=True)
    print(text)
    assert 'passed' in text.splitlines()[0]
    assert 'dL = ...' in text
    assert 'info' in text


def test_chart_csv(tmp_path):
    fields = _fields()
    filename = report.write_fields(str(tmp_path), 'dump', fields)
    data = np.genfromtxt(filename, delimiter=',', names=True)
    assert data.dtype.names == ('x', 'y', 'f', 'grad_f_0', 'grad_f_1')
    assert data.shape == (33*33,)
    assert np.allclose(data['f'], data['x']**2 - data['y'])

    with pytest.raises(h.ConfigError):
        report.write_fields(str(tmp_path), 'dump', fields, field_format='hdf')


def test_chart_netcdf(tmp_path):
    fields = _fields()
    filename = report.write_fields(str(tmp_path), 'dump', fields, field_format='netcdf',
                                   meta={'institution': 'somewhere'})
    with netCDF4.Dataset(filename) as dataset:
        assert dataset.institution == 'somewhere'
        assert dataset.variables['grad_f'].dimensions == ('x', 'y', 'slot')
        f = dataset.variables['f'][:]
        assert np.allclose(f, fields['f'].values)
        grad = dataset.variables['grad_f'][:]
        assert np.ma.count_masked(grad) == np.sum(~np.isfinite(fields['grad_f'].values))


def test_tables(tmp_path):
    shape = surfaces.RadialShape(R=2., n_theta=8, n_phi=16)
    filename = str(tmp_path / 'shape.csv')
    report.write_radial_csv(filename, shape)
    with open(filename) as f:
        meta, columns = f.readline(), f.readline()
    assert meta.startswith('# center=') and 'R=2.0' in meta
    assert columns.strip() == 'theta,phi,rho'
    rows = np.loadtxt(filename, delimiter=',', skiprows=2)
    assert rows.shape == (8*16, 3)
    assert np.allclose(rows[:, 2], 2.)
    named = np.genfromtxt(filename, delimiter=',', skip_header=1, names=True)
    assert named.dtype.names == ('theta', 'phi', 'rho')

    filename = str(tmp_path / 'table.csv')
    report.write_table_csv(filename, ['r', 'E'], [[0.1, 25.], [0.2, 24.]])
    table = np.genfromtxt(filename, delimiter=',', names=True)
    assert table['E'][1] == 24.
