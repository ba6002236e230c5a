#! /usr/bin/env python3
# coding=utf-8
"""
Check results, the run report and the file writers (JSON, CSV, netCDF4).
"""
"""
Author: willmoreLab developers
"""

import os
import json
import logging
import subprocess
import numpy as np
import netCDF4

from . import helpers as h
from . import chart as ch

log = logging.getLogger('willmoreLab')

SCHEMA_VERSION = 'willmore-lab-report/1'
ORDER_FLOOR = 1e-12
# residual fields carry roundoff amplified by second differences
ROUNDOFF_FLOOR = 1e-9


class CheckResult(object):
    """one entry of a report

    Args:
        name: check name
        anchor: the identity or statement the check verifies
        passed: outcome, decided by ``tolerance`` only
        tolerance: recorded tolerance (order target, bound or value tolerance)
        informational: entries that never fail a run
        values: norms, orders and any further numbers
    """
    def __init__(self, name, anchor, passed=True, tolerance=None, informational=False, **values):
        self.name = name
        self.anchor = anchor
        self.passed = bool(passed)
        self.tolerance = tolerance
        self.informational = informational
        self.values = values

    def __getitem__(self, key):
        return self.values[key]

    def __repr__(self):
        return 'CheckResult({}, passed={}, {})'.format(self.name, self.passed, self.values)

    def to_dict(self):
        d = {'name': self.name, 'anchor': self.anchor, 'passed': self.passed,
             'tolerance': self.tolerance, 'informational': self.informational}
        d.update(self.values)
        return d


def order_check(name, anchor, fields, target, window=None, expect_convergence=True, floor=ROUNDOFF_FLOOR):
    """convergence check from residual fields at increasing resolution

    Args:
        fields: list of residual :class:`~willmoreLab.chart.ChartField`
            ordered coarse to fine
        target: required observed order of the max-norm
        window: fraction of the chart extent for the norms
        expect_convergence: with ``False`` the check passes only if the
            residual does not converge (negative control)

    Returns:
        :class:`CheckResult` with norms per resolution and observed orders
    """
    norms = [ch.residual_norms(f, window=window) for f in fields]
    spacings = [f.chart.h for f in fields]
    order_max, order_l2 = None, None
    if len(fields) > 1:
        order_max = h.observed_order(norms[-2]['max'], norms[-1]['max'], spacings[-2], spacings[-1], floor=floor)
        order_l2 = h.observed_order(norms[-2]['l2'], norms[-1]['l2'], spacings[-2], spacings[-1], floor=floor)
    exact = norms[-1]['max'] <= floor
    converged = exact or (order_max is not None and order_max >= target)
    passed = converged if expect_convergence else not converged
    log.info('{:<28s} max {:.3e} order {}{}'.format(
        name, norms[-1]['max'], 'exact' if order_max is None else '{:.2f}'.format(order_max),
        '' if expect_convergence else ' (negative control)'))
    return CheckResult(name, anchor, passed=passed, tolerance=target, resolutions=[f.chart.n for f in fields],
                       l2=[n['l2'] for n in norms], max=[n['max'] for n in norms],
                       order=order_max, order_l2=order_l2, converged=converged,
                       expect_convergence=expect_convergence)


def sequence_order_check(name, anchor, errors, spacings, target, floor=ORDER_FLOOR):
    """convergence check of a scalar error measured at increasing resolution"""
    order = None
    if len(errors) > 1:
        order = h.observed_order(errors[-2], errors[-1], spacings[-2], spacings[-1], floor=floor)
    passed = errors[-1] <= floor or (order is not None and order >= target)
    log.info('{:<28s} {:.3e} order {}'.format(name, errors[-1], 'exact' if order is None else '{:.2f}'.format(order)))
    return CheckResult(name, anchor, passed=passed, tolerance=target, errors=list(errors), order=order)


def norm_check(name, anchor, field, tolerance, window=None):
    """max-norm of a residual below an absolute tolerance"""
    norms = ch.residual_norms(field, window=window)
    return CheckResult(name, anchor, passed=norms['max'] <= tolerance, tolerance=tolerance,
                       l2=norms['l2'], max=norms['max'])


def value_check(name, anchor, value, expected, tolerance, relative=False):
    err = abs(value - expected)
    if relative:
        err = err/abs(expected)
    log.info('{:<28s} {:.10g} (expected {:.10g}, error {:.2e})'.format(name, value, expected, err))
    return CheckResult(name, anchor, passed=err <= tolerance, tolerance=tolerance,
                       value=value, expected=expected, error=err, relative=relative)


def bound_check(name, anchor, value, bound, slack_tolerance=0.):
    """passes when value <= bound + slack_tolerance"""
    return CheckResult(name, anchor, passed=value <= bound + slack_tolerance, tolerance=slack_tolerance,
                       value=value, bound=bound, slack=bound - value)


def info(name, anchor, **values):
    return CheckResult(name, anchor, passed=True, informational=True, **values)


def format_for_json(elem):
    """numpy scalars and arrays to plain python, NaN and inf to None"""
    if isinstance(elem, dict):
        return {str(k): format_for_json(v) for k, v in elem.items()}
    if isinstance(elem, (list, tuple)):
        return [format_for_json(v) for v in elem]
    if isinstance(elem, np.ndarray):
        return format_for_json(elem.tolist())
    if isinstance(elem, (bool, np.bool_)):
        return bool(elem)
    if isinstance(elem, np.integer):
        return int(elem)
    if isinstance(elem, (float, np.floating)):
        return float(elem) if np.isfinite(elem) else None
    return elem


def get_git_hash():
    """
    Returns:
        git describe string, the package version outside a checkout
    """
    from . import __version__
    try:
        label = subprocess.check_output(['git', 'describe', '--always'], stderr=subprocess.DEVNULL,
                                        cwd=os.path.dirname(os.path.abspath(__file__)))
        return label.decode().rstrip()
    except (subprocess.CalledProcessError, OSError):
        return __version__


class Report(object):
    """machine readable record of a run

    Args:
        command: the command that produced the report
        config: echo of the effective configuration
        seed: seed of the random generator
        meta: contents of ``output_meta.toml``
    """
    def __init__(self, command, config=None, seed=None, meta=None):
        self.command = command
        self.config = config if config is not None else {}
        self.seed = seed
        self.meta = meta if meta is not None else {}
        self.version = get_git_hash()
        self.entries = []
        self.outputs = []

    def add(self, entry):
        if isinstance(entry, (list, tuple)):
            for e in entry:
                self.add(e)
            return
        self.entries.append(entry)

    @property
    def passed(self):
        return all(e.passed for e in self.entries if not e.informational)

    def failed(self):
        return [e for e in self.entries if not e.informational and not e.passed]

    def to_dict(self):
        return format_for_json({'schema': SCHEMA_VERSION, 'version': self.version,
                                'command': self.command, 'seed': self.seed, 'meta': self.meta,
                                'config': self.config, 'passed': self.passed,
                                'outputs': self.outputs,
                                'checks': [e.to_dict() for e in self.entries]})

    def to_json(self):
        return json.dumps(self.to_dict(), indent=1, sort_keys=True)

    def write(self, filename):
        with open(filename, 'w') as f:
            f.write(self.to_json())
        log.info('report written to {}'.format(filename))


def _columns(name, values):
    trailing = values.shape[2:]
    if trailing == ():
        return [name], values.reshape(-1, 1)
    labels = [name + ''.join('_{}'.format(i) for i in idx) for idx in np.ndindex(*trailing)]
    return labels, values.reshape(values.shape[0]*values.shape[1], -1)


def write_chart_csv(filename, fields):
    """one row per node: x, y and the components of every field

    Args:
        filename: output path
        fields: dict name -> :class:`~willmoreLab.chart.ChartField`, all on
            the same nodes
    """
    charts = [f.chart for f in fields.values()]
    chart = charts[0]
    for c in charts[1:]:
        chart = chart.meet(c)
    X, Y = chart.mesh()
    header = ['x', 'y']
    cols = [X.reshape(-1, 1), Y.reshape(-1, 1)]
    for name, field in fields.items():
        labels, vals = _columns(name, field.values)
        header += labels
        cols.append(vals)
    np.savetxt(filename, np.hstack(cols), delimiter=',', header=','.join(header), comments='', fmt='%.17g')
    log.info('chart fields written to {}'.format(filename))


FIELD_ATTRS = {
    'lam': ('conformal factor', ''), 'n': ('unit normal', ''), 'H_avg': ('mean curvature (average)', ''),
    'H_tr': ('mean curvature (trace)', ''), 'K': ('Gauss curvature', ''), 'A0sq': ('|Å|², trace-free part', ''),
    'T': ('conserved field', ''), 'L': ('potential L', ''), 'S': ('potential S', ''), 'R': ('potential R', ''),
}


def saveVar(dataset, varData, dtype=np.float64):
    """save an item to the dataset with data in a dict

    ================== ======================================================
     Key                Description
    ================== ======================================================
    ``var_name``        name of the variable
    ``dimension``       ``('x', 'y', ...)``
    ``arr``             data
    ``long_name``       descriptive long name
    **optional**
    ``comment``         description as a sentence
    ``units``           string with units
    ``missing_value``   define missing value
    ================== ======================================================
    """
    item = dataset.createVariable(varData['var_name'], dtype, varData['dimension'], zlib=True,
                                  fill_value=varData.get('missing_value', -999.))
    item[:] = np.where(np.isfinite(varData['arr']), varData['arr'], varData.get('missing_value', -999.))
    item.long_name = varData['long_name']
    for key in ('comment', 'units', 'missing_value'):
        if key in varData:
            setattr(item, key, varData[key])


def write_chart_netcdf(filename, fields, meta=None):
    """chart fields as netCDF4 variables over the dimensions x, y (and slot,
    component)"""
    meta = meta if meta is not None else {}
    chart = list(fields.values())[0].chart
    with netCDF4.Dataset(filename, 'w', format='NETCDF4') as dataset:
        dataset.createDimension('x', chart.n)
        dataset.createDimension('y', chart.n)
        dataset.createDimension('slot', 2)
        dataset.createDimension('component', 3)
        for name, coords in (('x', chart.x), ('y', chart.y)):
            var = dataset.createVariable(name, np.float64, (name,))
            var[:] = coords
            var.long_name = 'chart coordinate {}'.format(name)
        for name, field in fields.items():
            dims = {(): ('x', 'y'), (3,): ('x', 'y', 'component'), (2,): ('x', 'y', 'slot'),
                    (2, 3): ('x', 'y', 'slot', 'component')}[field.values.shape[2:]]
            long_name, units = FIELD_ATTRS.get(name, (name, ''))
            saveVar(dataset, {'var_name': name, 'dimension': dims, 'arr': field.values,
                              'long_name': long_name, 'units': units, 'missing_value': -999.,
                              'comment': 'NaN (outside the stencil reach) stored as missing value'})
        dataset.periodic = str(chart.periodic)
        dataset.extent = chart.extent
        for key, value in meta.items():
            setattr(dataset, key, value)
        dataset.version = get_git_hash()
    log.info('chart fields written to {}'.format(filename))


def write_fields(outdir, stem, fields, field_format='csv', meta=None):
    """chart field dump in the configured format, returns the path"""
    if field_format == 'csv':
        filename = os.path.join(outdir, stem + '.csv')
        write_chart_csv(filename, fields)
    elif field_format == 'netcdf':
        filename = os.path.join(outdir, stem + '.nc4')
        write_chart_netcdf(filename, fields, meta=meta)
    else:
        raise h.ConfigError('unknown field_format {}'.format(field_format))
    return filename


def write_radial_csv(filename, shape, grid=None):
    """radial graph as (θ, φ, ρ) rows"""
    grid = shape.grid if grid is None else grid
    sample = shape.sample(grid)
    rows = np.column_stack([grid.THETA.ravel(), grid.PHI.ravel(), (shape.R*sample.rho).ravel()])
    header = '# center={} R={} coeffs={}\ntheta,phi,rho'.format(
        ' '.join(repr(float(c)) for c in shape.center), repr(shape.R),
        ' '.join(repr(float(c)) for c in shape.coeffs))
    np.savetxt(filename, rows, delimiter=',', header=header, comments='', fmt='%.17g')


def write_table_csv(filename, columns, rows):
    np.savetxt(filename, np.asarray(rows, dtype=float), delimiter=',', header=','.join(columns),
               comments='', fmt='%.17g')
