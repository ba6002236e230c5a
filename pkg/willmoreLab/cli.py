#! /usr/bin/env python3
# coding=utf-8
"""
Batch driver: ``willmore-lab <command> --config <file> [--setup NAME]``.

Every command turns one setup of a TOML config file into a
:class:`~willmoreLab.report.Report`, writes it as JSON next to the CSV or
netCDF outputs and exits with 0 if all non-informational checks passed,
1 if some failed (or a library error occurred) and 2 on usage errors.
"""
"""
Author: willmoreLab developers
"""

import os
import copy
import logging
import argparse
import numpy as np
import toml

from . import helpers as h
from . import chart as ch
from . import surfaces
from . import sphere_grid as sg
from . import geometry
from . import conservation
from . import ambient
from . import minimize
from . import analysis
from . import report
from . import print_report

log = logging.getLogger('willmoreLab')

COMMANDS = ('verify', 'potentials', 'expand', 'minimize', 'estimates')
ORDER_COMMANDS = ('verify', 'potentials')
MIN_RESOLUTION = 33
METRIC_KINDS = ('euclidean', 'normal-form', 's3', 'conformal')

DEFAULTS = {
    'surface': 'sphere',
    'radius': 1.,
    'resolutions': [65, 129],
    'derivative_source': 'analytic',
    'window': geometry.DEFAULT_WINDOW,
    'expect_willmore': True,
    'field_format': 'csv',
    'dump_fields': True,
    'potential_source': 'potentials',
    'radii': list(ambient.DEFAULT_RADII),
    'simon_radii': [0.5, 1., 1.5, 2., 2.5],
    'area_pairs': 20,
    'bumps': 5,
    'lambda': None,
    'seed': 0,
    'ambient': {'kind': 'euclidean', 'scale': 1., 'q': [0., 0., 0.], 'c2': 0., 'c4': 0.05,
                'ricci': None, 'validity_radius': None},
    'minimizer': {'degree': 4, 'n_theta': 32, 'n_phi': 64, 'center': [0., 0., 0.], 'R': 1.,
                  'perturbation': [[2, 0, 0.1]], 'area': None, 'max_iter': 200, 'gtol': 1e-3,
                  'fd_step': 1e-5, 'run': False},
}


def load_config(filename, setup=None):
    """read one setup from a TOML file

    A file may hold several setups as top-level tables; each carries its
    keys in a ``settings`` sub-table.

    Returns:
        (setup name, settings dict)

    Raises:
        ConfigError: unreadable file, unknown or ambiguous setup
    """
    try:
        with open(filename) as cf:
            config = toml.loads(cf.read())
    except (OSError, toml.TomlDecodeError) as err:
        raise h.ConfigError('cannot read config {}: {}'.format(filename, err))
    if setup is None:
        if len(config) != 1:
            raise h.ConfigError('config {} holds {} setups, choose one with --setup'.format(
                filename, sorted(config.keys())))
        setup = list(config.keys())[0]
    if setup not in config:
        raise h.ConfigError('no setup {} in {}, available: {}'.format(setup, filename, sorted(config.keys())))
    entry = config[setup]
    if not isinstance(entry, dict) or not isinstance(entry.get('settings', {}), dict):
        raise h.ConfigError('setup {} is not a table'.format(setup))
    return setup, entry.get('settings', {})


def _merge(defaults, given, where='settings'):
    out = copy.deepcopy(defaults)
    for key, value in given.items():
        if key not in defaults:
            raise h.ConfigError('unknown key {} in {}'.format(key, where))
        if isinstance(defaults[key], dict):
            if not isinstance(value, dict):
                raise h.ConfigError('{} has to be a table'.format(key))
            out[key] = _merge(defaults[key], value, where=key)
        else:
            out[key] = value
    return out


def build_metric(table):
    """ambient metric from the ``[ambient]`` table

    ============== ==========================================================
     kind           keys
    ============== ==========================================================
     euclidean      none
     s3             ``scale`` (curvature of the unit three-sphere times scale)
     normal-form    ``ricci`` (3×3), ``scale``, ``validity_radius``
     conformal      ``q``, ``c2``, ``c4``, ``validity_radius``
    ============== ==========================================================
    """
    kind = table['kind']
    try:
        if kind == 'euclidean':
            return ambient.euclidean_metric()
        if kind == 's3':
            return ambient.normal_form_metric(ambient.Riemann3.s3().scaled(table['scale']),
                                              validity_radius=table['validity_radius'])
        if kind == 'normal-form':
            if table.get('ricci') is None:
                raise h.ConfigError('normal-form ambient needs a ricci matrix')
            riem = ambient.Riemann3.from_ricci(table['ricci']).scaled(table['scale'])
            return ambient.normal_form_metric(riem, validity_radius=table['validity_radius'])
        if kind == 'conformal':
            vr = table['validity_radius'] if table['validity_radius'] is not None else 1.
            return ambient.conformal_metric(table['q'], table['c2'], table['c4'], validity_radius=vr)
    except h.MetricError as err:
        raise h.ConfigError('invalid ambient: {}'.format(err))
    raise h.ConfigError('unknown ambient kind {}, choose from {}'.format(kind, METRIC_KINDS))


def _number(table, key, cast=float):
    try:
        return cast(table[key])
    except (TypeError, ValueError):
        raise h.ConfigError('{} = {!r} is not a number'.format(key, table[key]))


class RunConfig(object):
    """validated settings of one run

    Args:
        command: one of :data:`COMMANDS`
        settings: dict as read by :func:`load_config`
        name: setup name, used for output file names
        out: output directory
        seed: overrides the ``seed`` key

    Raises:
        ConfigError: any invalid entry, before anything is written
    """
    def __init__(self, command, settings=None, name='default', out='output', seed=None):
        if command not in COMMANDS:
            raise h.ConfigError('unknown command {}'.format(command))
        self.command = command
        self.name = name
        self.out = out
        s = _merge(DEFAULTS, settings if settings is not None else {})
        if seed is not None:
            s['seed'] = int(seed)
        self.settings = s
        self._validate()
        self.metric = build_metric(s['ambient'])

    def __getattr__(self, key):
        settings = self.__dict__.get('settings', {})
        if key in settings:
            return settings[key]
        raise AttributeError(key)

    def _validate(self):
        s = self.settings
        if s['surface'] not in surfaces.SURFACES:
            raise h.ConfigError('unknown surface {}, choose from {}'.format(s['surface'], sorted(surfaces.SURFACES)))
        res = s['resolutions']
        if not isinstance(res, list) or not all(isinstance(n, int) for n in res):
            raise h.ConfigError('resolutions have to be a list of integers')
        for n in res:
            if not h.is_odd(n) or n < MIN_RESOLUTION:
                raise h.ConfigError('resolution {} has to be odd and >= {}'.format(n, MIN_RESOLUTION))
        if res != sorted(res) or len(set(res)) != len(res):
            raise h.ConfigError('resolutions have to increase')
        if self.command in ORDER_COMMANDS and len(res) < 2:
            raise h.ConfigError('{} needs at least two resolutions'.format(self.command))
        if len(res) < 1:
            raise h.ConfigError('at least one resolution needed')
        choices = {'derivative_source': ('analytic', 'finite-difference'), 'field_format': ('csv', 'netcdf'),
                   'potential_source': ('potentials', 'generators')}
        for key, allowed in choices.items():
            if s[key] not in allowed:
                raise h.ConfigError('{} = {} not in {}'.format(key, s[key], allowed))
        if not 0 < _number(s, 'window') <= 1:
            raise h.ConfigError('window has to lie in (0, 1]')
        if s['ambient']['kind'] not in METRIC_KINDS:
            raise h.ConfigError('unknown ambient kind {}'.format(s['ambient']['kind']))
        if self.command == 'expand' and s['ambient']['kind'] == 'conformal':
            raise h.ConfigError('expand needs a normal-coordinate ambient, not conformal')
        if _number(s, 'bumps', int) < 0 or _number(s, 'area_pairs', int) < 0:
            raise h.ConfigError('bumps and area_pairs have to be non-negative')
        m = s['minimizer']
        if _number(m, 'R') <= 0 or (m['area'] is not None and _number(m, 'area') <= 0):
            raise h.ConfigError('minimizer R and area have to be positive')
        degree = _number(m, 'degree', int)
        for entry in m['perturbation']:
            try:
                l, mm, _ = int(entry[0]), int(entry[1]), float(entry[2])
                valid = len(entry) == 3 and abs(mm) <= l <= degree
            except (TypeError, ValueError, IndexError):
                valid = False
            if not valid:
                raise h.ConfigError('perturbation entries are [l, m, value] with |m| <= l <= degree')

    def immersion(self):
        params = {'R': self.radius} if self.surface == 'sphere' else {}
        return surfaces.get_immersion(self.surface, **params)

    def rng(self):
        return np.random.default_rng(self.seed)

    def start_shape(self):
        m = self.minimizer
        coeffs = np.zeros((m['degree'] + 1)**2)
        for l, mm, value in m['perturbation']:
            coeffs[sg.coeff_index(l, mm)] = value
        return surfaces.RadialShape(m['center'], m['R'], coeffs, n_theta=m['n_theta'], n_phi=m['n_phi'])

    def to_dict(self):
        d = copy.deepcopy(self.settings)
        d['command'] = self.command
        d['setup'] = self.name
        return d


def _meta():
    for path in ('output_meta.toml', os.path.join(os.path.dirname(__file__), '..', 'output_meta.toml')):
        if os.path.isfile(path):
            with open(path) as f:
                return toml.loads(f.read())
    return {}


def _new_report(cfg):
    return report.Report(cfg.command, config=cfg.to_dict(), seed=cfg.seed, meta=_meta())


def _path(cfg, suffix):
    return os.path.join(cfg.out, '{}_{}{}'.format(cfg.name, cfg.command, suffix))


def _bundles(cfg):
    imm = cfg.immersion()
    return [geometry.evaluate_bundle(imm, n=n, derivative_source=cfg.derivative_source) for n in cfg.resolutions]


def cmd_verify(cfg):
    """chart identities, wedge identities and the conservation law"""
    rep = _new_report(cfg)
    bundles = _bundles(cfg)
    rep.add(geometry.identity_checks(bundles, window=cfg.window))
    rep.add(conservation.conservation_checks(bundles, expect_willmore=cfg.expect_willmore, window=cfg.window))
    finest = bundles[-1]
    W = geometry.chart_willmore_energy(finest)
    if cfg.surface == 'torus':
        rep.add(report.value_check('willmore_energy', 'W(√2 torus) = 4π²', W, 4*np.pi**2, 1e-6))
    else:
        rep.add(report.info('willmore_energy', '½∫H² dμ over the chart', value=W))
    if cfg.dump_fields:
        fields = dict(finest.fields())
        fields.update(conservation.residual_fields(finest))
        rep.outputs.append(report.write_fields(cfg.out, '{}_verify_fields'.format(cfg.name), fields,
                                               cfg.field_format, meta=rep.meta))
    return rep


def cmd_potentials(cfg):
    """potentials L, S, R with their path defects and the closure relations"""
    rep = _new_report(cfg)
    bundles = _bundles(cfg)
    checks, pset = conservation.potential_checks(bundles, source=cfg.potential_source, window=cfg.window)
    rep.add(checks)
    for name, field in pset.fields().items():
        rep.add(report.info('max_' + name, 'potential ' + name, max=ch.residual_norms(field)['max']))
    if cfg.surface in ('plane', 'sphere'):
        # T vanishes, so do L and S; R = −2H(Φ − Φ(base))
        rep.add(report.norm_check('T_zero', 'T ≡ 0 for constant H', pset.T, 1e-8))
        rep.add(report.norm_check('L_zero', 'L ≡ 0 for T ≡ 0', pset.L, 1e-8))
        rep.add(report.norm_check('S_zero', 'S ≡ 0 for T ≡ 0', pset.S, 1e-8))
        errors = []
        for b in bundles:
            p = conservation.build_potentials(b)
            phi = b.phi.values
            closed = -2*b.H_avg.values[..., None]*(phi - phi[p.base])
            errors.append(float(np.nanmax(np.abs(p.R.values - closed))))
        rep.add(report.sequence_order_check('R_closed_form', 'R = −2H(Φ − Φ(base)) for T ≡ 0', errors,
                                            [b.chart.h for b in bundles], 3.))
    if cfg.dump_fields:
        fields = dict(pset.fields())
        fields['T'] = pset.T
        rep.outputs.append(report.write_fields(cfg.out, '{}_potentials'.format(cfg.name), fields,
                                               cfg.field_format, meta=rep.meta))
    return rep


def _area_pairs(cfg, g, rng):
    """randomized area adjustments, |t₀| ≤ 2||Σ| − a|/a and area = a"""
    worst_area, worst_ratio, cons = 0., 0., []
    for _ in range(cfg.area_pairs):
        coeffs = np.zeros(9)
        coeffs[4:] = rng.uniform(-0.05, 0.05, size=5)
        R = 0.1 if not g.is_flat else rng.uniform(0.5, 2.)
        sample = surfaces.RadialShape(rng.uniform(-0.02, 0.02, size=3), R, coeffs).sample()
        A = geometry.area(sample, g)
        a = A*rng.uniform(0.7, 1.4)
        t0, adjusted = ambient.adjust_area(sample, a, g)
        worst_area = max(worst_area, abs(geometry.area(adjusted, g) - a)/a)
        worst_ratio = max(worst_ratio, abs(t0)/(2*abs(A - a)/a))
        if g.is_flat:
            cons.append(abs(geometry.curvature_integral(adjusted, g) - geometry.curvature_integral(sample, g)))
    out = [report.bound_check('adjust_area', '|e^{t₀}Σ| = a', worst_area, 1e-10),
           report.bound_check('adjust_exponent', '|t₀| ≤ 2||Σ| − a|/a', worst_ratio, 1.)]
    if cons:
        out.append(report.bound_check('scaling_invariance', '∫|A|² invariant under dilations', max(cons), 1e-6))
    return out


def cmd_expand(cfg):
    """energy of small coordinate spheres and the fit W = 8π + c₂r²"""
    rep = _new_report(cfg)
    g = cfg.metric
    sweep = ambient.sphere_energy_sweep(g, cfg.radii)
    filename = _path(cfg, '_sweep.csv')
    report.write_table_csv(filename, ['r', 'W', 'fit_residual'],
                           np.column_stack([sweep.radii, sweep.energies, sweep.residuals]))
    rep.outputs.append(filename)
    anchor = 'W(S_r) = 8π − (4π/3)Scal(p)r² + O(r³)'
    if sweep.expected_c2 == 0.:
        rep.add(report.value_check('c2', anchor, sweep.c2, 0., 1e-6))
    else:
        rep.add(report.value_check('c2', anchor, sweep.c2, sweep.expected_c2, 0.05, relative=True))
        doubled = ambient.normal_form_metric(g.riemann0.scaled(2.), validity_radius=g.validity_radius)
        c2_doubled = ambient.sphere_energy_sweep(doubled, cfg.radii).c2
        rep.add(report.value_check('c2_doubling', 'c₂ is linear in the curvature', c2_doubled/sweep.c2, 2., 0.05,
                                   relative=True))
    rep.add(report.info('fit_residual', 'rms of W − 8π − c₂r²', value=sweep.fit_residual))
    if cfg.area_pairs:
        rep.add(_area_pairs(cfg, g, cfg.rng()))
    return rep


def _target_area(cfg, shape, g):
    if cfg.minimizer['area'] is not None:
        return float(cfg.minimizer['area'])
    sphere = surfaces.RadialShape(shape.center, shape.R, np.zeros_like(shape.coeffs),
                                  n_theta=shape.n_theta, n_phi=shape.n_phi)
    return minimize.energy_area(sphere, g)[1]


def _descend(cfg, g):
    m = cfg.minimizer
    shape0 = cfg.start_shape()
    a = _target_area(cfg, shape0, g)
    opts = minimize.MinimizeOptions.from_dict(m)
    shape, trace = minimize.minimize(shape0, a, g, opts)
    return shape0, a, shape, trace


def cmd_minimize(cfg):
    """area constrained descent from the configured start shape"""
    rep = _new_report(cfg)
    g = cfg.metric
    shape0, a, shape, trace = _descend(cfg, g)
    trace_file, shape_file = _path(cfg, '_trace.csv'), _path(cfg, '_shape.csv')
    report.write_table_csv(trace_file, trace.columns, trace.rows)
    report.write_radial_csv(shape_file, shape)
    rep.outputs += [trace_file, shape_file]

    W, A = minimize.energy_area(shape, g)
    gW, gA = minimize.gradient(shape, g, cfg.minimizer['fd_step'])
    lam = minimize.multiplier(gW, gA)
    areas = trace.column('area')
    rep.add(report.bound_check('area_constraint', '|Σ| = a at every iterate',
                               float(np.max(np.abs(areas - a))/a), 1e-8))
    rep.add(report.bound_check('monotone_energy', 'W non-increasing along accepted steps',
                               float(np.max(np.diff(trace.column('W')), initial=0.)), 0.))
    rep.add(report.bound_check('kkt_residual', '|∇W − λ̂∇A| at the final shape',
                               minimize.kkt_residual(gW, gA, lam), cfg.minimizer['gtol']))
    rep.add(report.info('lambda', 'least-squares multiplier λ̂', value=lam, reason=trace.reason,
                        iterations=len(trace) - 1, willmore=W, area=A))
    if g.is_flat:
        rep.add(report.bound_check('willmore_limit', 'minimizers with small area are round spheres, W = 8π',
                                   W, 8*np.pi + 1e-3))
        rep.add(report.bound_check('harmonic_coefficients', 'round limit: a_lm → 0',
                                   float(np.max(np.abs(shape.coeffs))), 1e-2))
    elif g.kind == 'conformal':
        q = np.asarray(g.center)
        drift = float(np.dot(shape.center - shape0.center, q - shape0.center))
        rep.add(report.CheckResult('localization', 'minimizers concentrate where Scal is maximal',
                                   passed=drift > 0, tolerance=0., value=drift,
                                   start=shape0.center, final=shape.center))
        energies = minimize.translated_sphere_energies(g, shape0.R, [shape0.center, shape.center])
        rep.add(report.info('translated_spheres', 'W of round spheres at the start and final centers',
                            start=energies[0], final=energies[1]))
    return rep


def cmd_estimates(cfg):
    """curvature estimates of a (minimized) shape, Simon-type bounds and the
    Bochner and stability checks"""
    rep = _new_report(cfg)
    g = cfg.metric
    rng = cfg.rng()
    if cfg.minimizer['run']:
        _, _, shape, _ = _descend(cfg, g)
    else:
        shape = cfg.start_shape()
    lam = cfg.settings['lambda']
    if lam is None:
        lam = minimize.lagrange_estimate(shape, g, cfg.minimizer['fd_step'])

    est = minimize.estimate_report(shape, g, lam)
    rep.add(report.info('curvature_integral', '∫|∇²H|² + H²|∇H|² + H⁴|Å|² dμ', value=est['Q']))
    rep.add(report.info('traceless_l2', '‖Å‖_{L²}', value=est['A0_l2']))
    rep.add(report.info('mean_curvature_deviation', '‖H − 2/R‖_∞ ≤ C|Σ|^{1/2}', value=est['H_dev'],
                        constant=est['H_dev_constant']))
    rep.add(report.info('euler_lagrange', 'ΔH + H|Å|² + H Ric(ν,ν) + λH = 0', l2=est['el_l2'],
                        max=est['el_max'], value=lam))
    rep.add(report.CheckResult('positive_mean_curvature', 'minimizers have H > 0', passed=est['H_positive'],
                               tolerance=0., value=est['H_min']))

    if g.is_flat:
        rows, summary = ambient.simon_checks(shape, cfg.simon_radii)
        tol = summary['slack_tolerance']
        for row in rows:
            rep.add(report.CheckResult('monotonicity_r{:.3g}'.format(row.r), 'r^{−2}|Σ_r| + W(Σ_r)/8 − … ≥ π',
                                       passed=row.slack >= -tol, tolerance=tol, value=row.monotonicity,
                                       slack=row.slack))
            if row.contained:
                rep.add(report.bound_check('area_bound_r{:.3g}'.format(row.r), '|Σ| ≤ r²W(Σ) for Σ ⊂ B_r',
                                           summary['area'], row.r**2*summary['willmore']))
        rep.add(report.info('diameter', 'diam Σ ≤ C(|Σ|W(Σ))^{1/2}', value=summary['diameter'],
                            ratio=summary['diameter_ratio']))

    count = int(cfg.bumps)
    shape_bumps = analysis.random_shape_bumps(rng, count)
    rep.add(analysis.stability_checks(shape, shape_bumps, lam=lam, g=g))
    rep.add(analysis.bochner_checks(shape, shape_bumps, g=g))
    if g.is_flat and len(cfg.resolutions) > 1:
        bundles = _bundles(cfg)
        bumps = analysis.random_bumps(rng, bundles[0].chart, count)
        chart_checks = analysis.bochner_checks(bundles, bumps)
        for c in chart_checks:
            c.name = 'chart_' + c.name
        rep.add(chart_checks)
    return rep


HANDLERS = {'verify': cmd_verify, 'potentials': cmd_potentials, 'expand': cmd_expand,
            'minimize': cmd_minimize, 'estimates': cmd_estimates}


def build_parser():
    parser = argparse.ArgumentParser(prog='willmore-lab', description='Willmore surface numerical lab')
    parser.add_argument('command', choices=COMMANDS, help='suite or experiment to run')
    parser.add_argument('--config', help='TOML config file', required=True)
    parser.add_argument('--setup', help='setup (top-level table) in the config file', default=None)
    parser.add_argument('--out', help='output directory', default='output')
    parser.add_argument('--seed', help='seed of the random generator', type=int, default=None)
    parser.add_argument('--verbose', help='debug output', action='store_true')
    return parser


def run(cfg):
    """run a validated config, write the report

    Returns:
        :class:`~willmoreLab.report.Report`
    """
    os.makedirs(cfg.out, exist_ok=True)
    rep = HANDLERS[cfg.command](cfg)
    filename = _path(cfg, '_report.json')
    rep.write(filename)
    log.info(print_report.report2text(rep))
    return rep


def main(argv=None):
    args = build_parser().parse_args(argv)
    if not log.handlers:
        log.addHandler(logging.StreamHandler())
    log.setLevel(logging.DEBUG if args.verbose else logging.INFO)
    try:
        name, settings = load_config(args.config, args.setup)
        cfg = RunConfig(args.command, settings, name=name, out=args.out, seed=args.seed)
    except h.ConfigError as err:
        log.error('usage error: {}'.format(err))
        return 2
    try:
        rep = run(cfg)
    except (ValueError, RuntimeError) as err:
        log.error('{}: {}: {}'.format(cfg.command, type(err).__name__, err))
        return 1
    return 0 if rep.passed else 1
