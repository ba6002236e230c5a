#! /usr/bin/env python3
# coding=utf-8
"""
Author: willmoreLab developers

"""

import os
import json
import numpy as np
import pytest
import toml

import willmoreLab.helpers as h
import willmoreLab.sphere_grid as sg
import willmoreLab.cli as cli


def _write_config(tmp_path, setups):
    filename = str(tmp_path / 'lab_config.toml')
    with open(filename, 'w') as f:
        f.write(toml.dumps({name: {'settings': s} for name, s in setups.items()}))
    return filename


def _load_report(out, name, command):
    with open(os.path.join(out, '{}_{}_report.json'.format(name, command))) as f:
        return json.load(f)


def test_load_config(tmp_path):
    filename = _write_config(tmp_path, {'torus': {'surface': 'torus'}, 'plane': {'surface': 'plane'}})
    name, settings = cli.load_config(filename, 'torus')
    assert name == 'torus' and settings == {'surface': 'torus'}
    with pytest.raises(h.ConfigError):
        cli.load_config(filename)
    with pytest.raises(h.ConfigError):
        cli.load_config(filename, 'sphere')
    with pytest.raises(h.ConfigError):
        cli.load_config(str(tmp_path / 'missing.toml'))

    single = tmp_path / 'single'
    single.mkdir()
    assert cli.load_config(_write_config(single, {'only': {}}))[0] == 'only'


def test_config_validation():
    cfg = cli.RunConfig('verify', {'surface': 'torus', 'minimizer': {'R': 2.}})
    assert cfg.surface == 'torus'
    assert cfg.minimizer['R'] == 2. and cfg.minimizer['degree'] == 4
    assert cfg.metric.is_flat
    with pytest.raises(AttributeError):
        cfg.no_such_key

    bad = [('verify', {'resolutions': [64, 129]}),
           ('verify', {'resolutions': [31, 65]}),
           ('verify', {'resolutions': [129, 65]}),
           ('verify', {'resolutions': [65]}),
           ('verify', {'surface': 'klein bottle'}),
           ('verify', {'no_such_key': 1}),
           ('verify', {'ambient': {'colour': 'red'}}),
           ('verify', {'ambient': {'kind': 'hyperbolic'}}),
           ('verify', {'field_format': 'xlsx'}),
           ('expand', {'ambient': {'kind': 'conformal'}}),
           ('expand', {'ambient': {'kind': 'normal-form'}}),
           ('minimize', {'minimizer': {'perturbation': [[2, 3, 0.1]]}}),
           ('minimize', {'minimizer': {'R': -1.}}),
           ('estimates', {'bumps': 'many'}),
           ('estimates', {'area_pairs': [3]}),
           ('verify', {'window': 'wide'}),
           ('minimize', {'minimizer': {'R': 'big'}}),
           ('minimize', {'minimizer': {'perturbation': [[2, 'm', 0.1]]}}),
           ('bend', {})]
    for command, settings in bad:
        with pytest.raises(h.ConfigError):
            cli.RunConfig(command, settings)
    assert cli.RunConfig('estimates', {'resolutions': [65]}).resolutions == [65]


def test_start_shape():
    cfg = cli.RunConfig('minimize', {'minimizer': {'degree': 3, 'perturbation': [[2, -1, 0.05], [3, 3, 0.01]],
                                                   'center': [0.1, 0., 0.]}}, seed=7)
    shape = cfg.start_shape()
    assert shape.coeffs.size == 16
    assert shape.coeffs[sg.coeff_index(2, -1)] == 0.05
    assert np.sum(shape.coeffs != 0) == 2
    assert cfg.seed == 7 and cfg.to_dict()['command'] == 'minimize'


def test_usage_errors(tmp_path):
    filename = _write_config(tmp_path, {'broken': {'resolutions': [64]}})
    assert cli.main(['verify', '--config', filename, '--out', str(tmp_path)]) == 2
    assert not os.path.exists(str(tmp_path / 'broken_verify_report.json'))
    filename = _write_config(tmp_path, {'wordy': {'bumps': 'many'}})
    assert cli.main(['estimates', '--config', filename, '--out', str(tmp_path)]) == 2
    assert not os.path.exists(str(tmp_path / 'wordy_estimates_report.json'))


def test_verify_torus(tmp_path):
    out = str(tmp_path / 'out')
    filename = _write_config(tmp_path, {'torus': {'surface': 'torus', 'resolutions': [65, 129]}})
    assert cli.main(['verify', '--config', filename, '--out', out]) == 0
    data = _load_report(out, 'torus', 'verify')
    assert data['passed'] and data['command'] == 'verify'
    names = [c['name'] for c in data['checks']]
    assert 'div_T' in names and 'willmore_energy' in names
    assert os.path.isfile(os.path.join(out, 'torus_verify_fields.csv'))


def test_verify_cylinder_control(tmp_path):
    out = str(tmp_path / 'out')
    filename = _write_config(tmp_path, {
        'control': {'surface': 'cylinder', 'expect_willmore': False, 'dump_fields': False},
        'strict': {'surface': 'cylinder', 'dump_fields': False}})
    assert cli.main(['verify', '--config', filename, '--setup', 'control', '--out', out]) == 0
    assert cli.main(['verify', '--config', filename, '--setup', 'strict', '--out', out]) == 1
    failed = [c['name'] for c in _load_report(out, 'strict', 'verify')['checks'] if not c['passed']]
    assert failed == ['div_T']


def test_expand_is_deterministic(tmp_path):
    out = str(tmp_path / 'out')
    filename = _write_config(tmp_path, {'flat': {'area_pairs': 3}})
    checks = []
    for _ in range(2):
        assert cli.main(['expand', '--config', filename, '--out', out, '--seed', '3']) == 0
        data = _load_report(out, 'flat', 'expand')
        assert data['seed'] == 3
        checks.append(data['checks'])
    assert checks[0] == checks[1]
    sweep = np.genfromtxt(os.path.join(out, 'flat_expand_sweep.csv'), delimiter=',', names=True)
    assert np.allclose(sweep['W'], 8*np.pi, atol=1e-9)
