#! /usr/bin/env python3
# coding=utf-8
"""
Second order checks with compactly supported test functions: the covariant
Hessian on conformal charts, the Bochner identity and the stability
inequality of Willmore-type surfaces.

Both checks accept a :class:`~willmoreLab.geometry.GeometryBundle` (chart,
Euclidean ambient, tested with a :class:`BumpFunction`) or a
:class:`~willmoreLab.surfaces.RadialShape` (any ambient metric, tested with a
:class:`ShapeBump`).
"""
"""
Author: willmoreLab developers
"""

import logging
import collections
import numpy as np

from . import helpers as h
from . import chart as ch
from . import sphere_grid as sg
from . import surfaces
from . import geometry
from . import report

log = logging.getLogger('willmoreLab')

BOCHNER_ORDER = 2.
BOCHNER_FLOOR = 1e-10
STABILITY_TOLERANCE = 1e-4
SHAPE_GRID = (96, 192)
SUPPORT_WINDOW = 0.8

BOCHNER_ANCHOR = '∫|∇²f|² = ∫(Δf)² + |∇f|²(½|Å|² − ¼H² − ½Scal + Ric(ν,ν)) dμ'
STABILITY_ANCHOR = '∫f²(½|Å|² + ¼H² + ½Scal − ½Scal^Σ + λ) dμ ≤ ∫|∇f|² dμ'

BochnerResult = collections.namedtuple('BochnerResult', ['lhs', 'rhs', 'defect'])
StabilityResult = collections.namedtuple('StabilityResult',
                                         ['lhs', 'rhs', 'margin', 'hypothesis_min', 'H_positive'])


class BumpFunction(object):
    """f = A(1 − |x − c|²/r²)³ on the disk of radius r around c, zero outside

    The bump has two continuous derivatives, its gradient and Hessian are
    evaluated in closed form.
    """
    def __init__(self, center, radius, amplitude=1.):
        if radius <= 0:
            raise ValueError('bump radius has to be positive')
        self.center = np.asarray(center, dtype=float)
        self.radius = float(radius)
        self.amplitude = float(amplitude)

    def __repr__(self):
        return 'BumpFunction(center={}, radius={:.4g}, amplitude={:.4g})'.format(
            self.center.tolist(), self.radius, self.amplitude)

    @property
    def disk(self):
        return ch.Disk(self.center[0], self.center[1], self.radius)

    def scaled(self, factor):
        return BumpFunction(self.center, self.radius, self.amplitude*factor)

    def _parts(self, X, Y):
        d = np.stack([X - self.center[0], Y - self.center[1]], axis=-1)
        q = 1. - np.sum(d**2, axis=-1)/self.radius**2
        return d, np.where(q > 0, q, 0.)

    def value(self, X, Y):
        _, q = self._parts(X, Y)
        return self.amplitude*q**3

    def grad(self, X, Y):
        d, q = self._parts(X, Y)
        return -6*self.amplitude*(q**2)[..., None]*d/self.radius**2

    def hess(self, X, Y):
        d, q = self._parts(X, Y)
        r2 = self.radius**2
        return self.amplitude*(24*q[..., None, None]*d[..., :, None]*d[..., None, :]/r2**2
                               - 6*(q**2)[..., None, None]*np.eye(2)/r2)

    def laplacian(self, X, Y):
        return np.trace(self.hess(X, Y), axis1=-2, axis2=-1)

    def sample(self, chart):
        return ch.sample(chart, self.value)


class ShapeBump(object):
    """f(ω) = A((ω·ω₀ − cos r)/(1 − cos r))³ on the cap of angular radius r
    around ω₀ in the direction space of a radial shape"""
    def __init__(self, axis, radius, amplitude=1.):
        axis = np.asarray(axis, dtype=float)
        if not 0 < radius < np.pi:
            raise ValueError('cap radius has to lie in (0, π)')
        self.axis = axis/np.linalg.norm(axis)
        self.radius = float(radius)
        self.amplitude = float(amplitude)

    def __repr__(self):
        return 'ShapeBump(axis={}, radius={:.4g})'.format(np.round(self.axis, 4).tolist(), self.radius)

    def scaled(self, factor):
        return ShapeBump(self.axis, self.radius, self.amplitude*factor)

    def evaluate(self, theta, phi):
        """
        Returns:
            f, (∂_θ f, ∂_φ f) and the matrix of second derivatives
        """
        om, om_t, om_p, om_tt, om_tp, om_pp = surfaces.directions(theta, phi)
        c = np.cos(self.radius)
        u = om @ self.axis
        du = np.stack([om_t @ self.axis, om_p @ self.axis], axis=-1)
        ddu = np.stack([np.stack([om_tt @ self.axis, om_tp @ self.axis], axis=-1),
                        np.stack([om_tp @ self.axis, om_pp @ self.axis], axis=-1)], axis=-2)
        q = np.where(u > c, (u - c)/(1. - c), 0.)
        A = self.amplitude
        f = A*q**3
        f1 = 3*A*q**2/(1. - c)
        f2 = 6*A*q/(1. - c)**2
        d1 = f1[..., None]*du
        d2 = f2[..., None, None]*du[..., :, None]*du[..., None, :] + f1[..., None, None]*ddu
        return f, d1, d2


def random_bumps(rng, chart, count=5, radius=(0.2, 0.35), window=SUPPORT_WINDOW):
    """bumps with random centers and radii (as fractions of the chart extent)
    whose support stays inside ``window*extent``"""
    bumps = []
    limit = window*chart.extent
    for _ in range(count):
        r = rng.uniform(*radius)*chart.extent
        c = rng.uniform(-limit + r, limit - r, size=2)
        bumps.append(BumpFunction(c, r))
    return bumps


def random_shape_bumps(rng, count=5, radius=(0.4, 0.8)):
    return [ShapeBump(rng.normal(size=3), rng.uniform(*radius)) for _ in range(count)]


def covariant_hessian(f, bundle):
    """Hess_ij f = ∂_i∂_j f − Γ^k_ij ∂_k f for ḡ = e^{2λ}δ

    Γ¹₁₁ = λx, Γ²₁₁ = −λy, Γ¹₁₂ = λy, Γ²₁₂ = λx, Γ¹₂₂ = −λx, Γ²₂₂ = λy

    Returns:
        tensor :class:`~willmoreLab.chart.ChartField`
    """
    df = ch.grad(f)
    dlam = ch.grad(bundle.lam)
    fx, fy = df.slot(0), df.slot(1)
    lx, ly = dlam.slot(0), dlam.slot(1)
    h11 = ch.derivative(fx, 0) - lx*fx + ly*fy
    h12 = ch.derivative(fx, 1) - ly*fx - lx*fy
    h21 = ch.derivative(fy, 0) - ly*fx - lx*fy
    h22 = ch.derivative(fy, 1) + lx*fx - ly*fy
    values = np.stack([np.stack([h11.values, h12.values], axis=-1),
                       np.stack([h21.values, h22.values], axis=-1)], axis=-2)
    return ch.ChartField(h11.chart, values)


def hessian_norm_sq(hess, lam):
    """|∇²f|²_ḡ = e^{−4λ} Σ Hess_ij²"""
    return ch.ChartField(hess.chart, np.exp(-4*lam.values)*np.sum(hess.values**2, axis=(-2, -1)))


def _flat_only(g):
    g = geometry._metric_or_flat(g)
    if not g.is_flat:
        raise h.MetricError('chart checks need the Euclidean ambient, got {}'.format(g.kind))
    return g


def _check_support(field, disk):
    chart = field.chart
    block = h.finite_block(field.finite_mask())
    xb, yb = chart.x[block[0]], chart.y[block[1]]
    if not (xb[0] < disk.cx - disk.radius and disk.cx + disk.radius < xb[-1]
            and yb[0] < disk.cy - disk.radius and disk.cy + disk.radius < yb[-1]):
        raise h.RegionError('support {} touches the boundary of the valid chart'.format(disk))


def _chart_nodes(bump, bundle, n_r=64, n_phi=128):
    """bump derivatives and interpolated bundle fields on polar nodes of the
    support disk"""
    dlam = ch.grad(bundle.lam)
    _check_support(dlam, bump.disk)
    X, Y, W = ch.polar_nodes(bump.disk, n_r, n_phi)

    def ev(field):
        return ch.interpolator(field).ev(X, Y)

    lam = ev(bundle.lam)
    lx, ly = ev(dlam.slot(0)), ev(dlam.slot(1))
    fd, fh = bump.grad(X, Y), bump.hess(X, Y)
    fx, fy = fd[..., 0], fd[..., 1]
    hess = np.stack([fh[..., 0, 0] - lx*fx + ly*fy, fh[..., 0, 1] - ly*fx - lx*fy,
                     fh[..., 1, 1] + lx*fx - ly*fy], axis=-1)
    e2l = np.exp(2*lam)
    return {'f': bump.value(X, Y), 'dmu': W*e2l,
            'hess_sq': (hess[..., 0]**2 + 2*hess[..., 1]**2 + hess[..., 2]**2)/e2l**2,
            'laplacian': (fh[..., 0, 0] + fh[..., 1, 1])/e2l,
            'grad_sq': (fx**2 + fy**2)/e2l,
            'H': ev(bundle.H_tr), 'K': ev(bundle.K), 'A0sq': ev(bundle.A0sq)}


def _shape_nodes(bump, shape, g, n_theta=SHAPE_GRID[0], n_phi=SHAPE_GRID[1]):
    grid = sg.get_grid(n_theta, n_phi, 'gauss')
    sample = shape.sample(grid)
    if not g.is_flat:
        g.check_contains(sample.points, 'shape')
    geo = geometry.AmbientGeometry(sample, g)
    f, d1, d2 = bump.evaluate(grid.THETA, grid.PHI)
    ops = geometry.intrinsic_operators(geo, d1, d2)
    x = sample.points
    return geo, f, ops, np.einsum('...ab,...a,...b->...', g.ricci(x), geo.nu, geo.nu), g.scalar(x)


def bochner_check(bump, surface, g=None):
    """both sides of the Bochner identity for a compactly supported f

    Args:
        bump: :class:`BumpFunction` for charts, :class:`ShapeBump` for shapes
        surface: :class:`~willmoreLab.geometry.GeometryBundle` or
            :class:`~willmoreLab.surfaces.RadialShape`
        g: ambient metric, Euclidean if None (charts need it flat)

    Returns:
        :class:`BochnerResult` with defect = |lhs − rhs|/max(lhs, 1)

    Raises:
        RegionError: the support leaves the valid part of the chart
    """
    if isinstance(surface, surfaces.RadialShape):
        g = geometry._metric_or_flat(g)
        geo, f, ops, ric_nn, scal = _shape_nodes(bump, surface, g)
        bracket = 0.5*geo.A0_sq - 0.25*geo.H**2 - 0.5*scal + ric_nn
        lhs = geo.integral(ops['hess_sq'])
        rhs = geo.integral(ops['laplacian']**2 + ops['grad_sq']*bracket)
    else:
        _flat_only(g)
        nd = _chart_nodes(bump, surface)
        bracket = 0.5*nd['A0sq'] - 0.25*nd['H']**2
        lhs = float(np.sum(nd['hess_sq']*nd['dmu']))
        rhs = float(np.sum((nd['laplacian']**2 + nd['grad_sq']*bracket)*nd['dmu']))
    defect = abs(lhs - rhs)/max(lhs, 1.)
    log.debug('bochner {} lhs {:.10g} rhs {:.10g} defect {:.3e}'.format(bump, lhs, rhs, defect))
    return BochnerResult(lhs, rhs, defect)


def stability_check(bump, surface, lam=0., g=None, strict=False):
    """both sides of the stability inequality of Willmore-type surfaces

    lhs = ∫f²(½|Å|² + ¼H² + ½Scal − ½Scal^Σ + λ) dμ, rhs = ∫|∇f|² dμ. On
    charts Scal^Σ = 2K, on shapes it comes from the Gauss equation
    Scal^Σ = Scal − 2Ric(ν,ν) + H² − |A|².

    The hypotheses (H > 0 on the support, λ + ½Scal ≥ 0) are reported in the
    result; with ``strict`` a violated H > 0 raises.

    Returns:
        :class:`StabilityResult`

    Raises:
        HypothesisError: ``strict`` and H ≤ 0 somewhere on the support
    """
    if isinstance(surface, surfaces.RadialShape):
        g = geometry._metric_or_flat(g)
        geo, f, ops, ric_nn, scal = _shape_nodes(bump, surface, g)
        H = geo.H
        scal_sigma = scal - 2*ric_nn + H**2 - geo.A_sq
        bracket = 0.5*geo.A0_sq + 0.25*H**2 + 0.5*scal - 0.5*scal_sigma + lam
        lhs = geo.integral(f**2*bracket)
        rhs = geo.integral(ops['grad_sq'])
        hypothesis = float(np.min(lam + 0.5*scal))
    else:
        _flat_only(g)
        nd = _chart_nodes(bump, surface)
        f, H = nd['f'], nd['H']
        bracket = 0.5*nd['A0sq'] + 0.25*H**2 - nd['K'] + lam
        lhs = float(np.sum(f**2*bracket*nd['dmu']))
        rhs = float(np.sum(nd['grad_sq']*nd['dmu']))
        hypothesis = float(lam)
    support = f > 0
    H_positive = bool(np.all(H[support] > 0))
    if not H_positive:
        log.warning('H ≤ 0 on the support of {}'.format(bump))
        if strict:
            raise h.HypothesisError('mean curvature not positive on the support of {}'.format(bump))
    return StabilityResult(lhs, rhs, rhs - lhs, hypothesis, H_positive)


def bochner_checks(sequence, bumps, g=None, target=BOCHNER_ORDER, floor=BOCHNER_FLOOR):
    """Bochner defect of every bump across a resolution sequence

    Args:
        sequence: bundles ordered coarse to fine (or one radial shape)
        bumps: list of bumps

    Returns:
        list of :class:`~willmoreLab.report.CheckResult`
    """
    if isinstance(sequence, surfaces.RadialShape):
        out = []
        for i, bump in enumerate(bumps):
            res = bochner_check(bump, sequence, g)
            out.append(report.bound_check('bochner_{}'.format(i), BOCHNER_ANCHOR, res.defect, 0.,
                                          slack_tolerance=1e-3))
        return out
    out = []
    spacings = [b.chart.h for b in sequence]
    for i, bump in enumerate(bumps):
        defects = [bochner_check(bump, b, g).defect for b in sequence]
        out.append(report.sequence_order_check('bochner_{}'.format(i), BOCHNER_ANCHOR, defects, spacings,
                                               target, floor=floor))
    return out


def stability_checks(surface, bumps, lam=0., g=None, tolerance=STABILITY_TOLERANCE):
    """stability margins as bound checks, lhs ≤ rhs + tolerance"""
    out = []
    for i, bump in enumerate(bumps):
        res = stability_check(bump, surface, lam=lam, g=g)
        check = report.bound_check('stability_{}'.format(i), STABILITY_ANCHOR, res.lhs, res.rhs,
                                   slack_tolerance=tolerance)
        check.values.update(margin=res.margin, hypothesis_min=res.hypothesis_min, H_positive=res.H_positive)
        log.info('{:<28s} lhs {:.4e} rhs {:.4e} margin {:+.3e}'.format(check.name, res.lhs, res.rhs, res.margin))
        out.append(check)
    return out
