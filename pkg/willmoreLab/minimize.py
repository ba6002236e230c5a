#! /usr/bin/env python3
# coding=utf-8
"""
Area constrained minimization of the Willmore energy over radial shapes.

The parameters of a :class:`~willmoreLab.surfaces.RadialShape` are stacked
as ``[a_lm (25 for degree 4), center (3), R]``. Each step moves along
−(∇W − λ̂∇A), restores the area by a uniform radial rescaling and is
accepted by a backtracking (Armijo) line search.
"""
"""
Author: willmoreLab developers
"""

import logging
import numpy as np
import scipy.optimize

from . import helpers as h
from . import sphere_grid as sg
from . import geometry
from .surfaces import RadialShape

log = logging.getLogger('willmoreLab')

EIGHT_PI = 8*np.pi
WILLMORE_SLACK = 1e-6

__all__ = ['RadialShape', 'energy_area', 'gradient', 'multiplier', 'lagrange_estimate', 'kkt_residual', 'restore_area',
           'DescentTrace', 'MinimizeOptions', 'minimize', 'estimate_report', 'translated_sphere_energies']


def _geometry(shape, g, grid=None):
    g = geometry._metric_or_flat(g)
    sample = shape.sample(grid)
    if not g.is_flat:
        g.check_contains(sample.points, 'shape')
    return geometry.AmbientGeometry(sample, g)


def energy_area(shape, g=None):
    """
    Returns:
        (W, A) of the shape by quadrature
    """
    g = geometry._metric_or_flat(g)
    geo = _geometry(shape, g)
    W, A = geo.willmore, geo.area
    if g.is_flat:
        assert W >= EIGHT_PI - WILLMORE_SLACK, 'Willmore energy {:.12f} below 8π'.format(W)
    return W, A


def _steps(shape, fd_step):
    k = shape.coeffs.size
    steps = np.full(k + 4, fd_step)
    steps[k:] = fd_step*shape.R
    return steps


def gradient(shape, g=None, fd_step=1e-5):
    """central differences of W and A in the stacked parameters

    Coefficients are stepped by ``fd_step``, center and radius by
    ``fd_step*R``.

    Returns:
        (∇W, ∇A) as arrays of length ``n_coeffs + 4``
    """
    p = shape.to_vector()
    steps = _steps(shape, fd_step)
    gW = np.empty_like(p)
    gA = np.empty_like(p)
    for i, s in enumerate(steps):
        e = np.zeros_like(p)
        e[i] = s
        Wp, Ap = energy_area(shape.from_vector(p + e), g)
        Wm, Am = energy_area(shape.from_vector(p - e), g)
        gW[i] = (Wp - Wm)/(2*s)
        gA[i] = (Ap - Am)/(2*s)
    return gW, gA


def multiplier(gW, gA):
    """least-squares multiplier λ̂ = ⟨∇W, ∇A⟩/|∇A|² from the two gradients

    Raises:
        DegenerateGeometryError: ∇A vanishes
    """
    norm = np.dot(gA, gA)
    if norm < 1e-28:
        raise h.DegenerateGeometryError('area gradient vanishes')
    return float(np.dot(gW, gA)/norm)


def lagrange_estimate(shape, g=None, fd_step=1e-5):
    """λ̂ minimizing |∇W − λ∇A| at the shape"""
    return multiplier(*gradient(shape, g, fd_step))


def kkt_residual(gW, gA, lam):
    return float(np.linalg.norm(gW - lam*gA))


def _with_radius(shape, R):
    return RadialShape(shape.center, R, shape.coeffs, n_theta=shape.n_theta, n_phi=shape.n_phi, rule=shape.rule)


def restore_area(shape, a, g=None):
    """uniform radial rescaling R -> sR about the center with area a

    Flat ambient: s = √(a/A). Curved: s = e^t with t from ``brentq``.
    """
    g = geometry._metric_or_flat(g)
    A = _geometry(shape, g).area
    if g.is_flat:
        return _with_radius(shape, shape.R*np.sqrt(a/A))

    def f(t):
        return _geometry(_with_radius(shape, shape.R*np.exp(t)), g).area - a
    t_guess = 0.5*np.log(a/A)
    width = max(abs(t_guess), 1e-6)
    lo, hi = t_guess - width, t_guess + width
    for _ in range(40):
        if f(lo) < 0 < f(hi):
            break
        lo, hi = lo - width, hi + width
        width *= 2
    else:
        raise h.AreaBandError('cannot bracket the area {:.6g}'.format(a))
    t = scipy.optimize.brentq(f, lo, hi, xtol=1e-15, rtol=4*np.finfo(float).eps)
    return _with_radius(shape, shape.R*np.exp(t))


class DescentTrace(object):
    """per iteration record of the descent"""
    columns = ['iteration', 'W', 'area', 'lambda', 'gradient_norm', 'center_x', 'center_y', 'center_z', 'step']

    def __init__(self):
        self.rows = []
        self.reason = None

    def __len__(self):
        return len(self.rows)

    def append(self, iteration, W, area, lam, gnorm, center, step):
        self.rows.append([iteration, W, area, lam, gnorm] + list(center) + [step])

    def column(self, name):
        i = self.columns.index(name)
        return np.array([r[i] for r in self.rows])

    def to_dict(self):
        return {'reason': self.reason, 'iterations': len(self.rows) - 1,
                'rows': [dict(zip(self.columns, r)) for r in self.rows]}


class MinimizeOptions(object):
    """options of :func:`minimize`

    Args:
        max_iter: iteration limit
        gtol: tolerance on |∇W − λ̂∇A|
        fd_step: relative finite-difference step
        armijo: sufficient decrease constant
        min_step: smallest trial step before the line search fails
    """
    def __init__(self, max_iter=200, gtol=1e-3, fd_step=1e-5, armijo=1e-4, min_step=1e-12, step0=1.):
        self.max_iter = int(max_iter)
        self.gtol = float(gtol)
        self.fd_step = float(fd_step)
        self.armijo = float(armijo)
        self.min_step = float(min_step)
        self.step0 = float(step0)

    @classmethod
    def from_dict(cls, d):
        keys = ('max_iter', 'gtol', 'fd_step', 'armijo', 'min_step', 'step0')
        return cls(**{k: d[k] for k in keys if k in d})

    def to_dict(self):
        return dict(self.__dict__)


def _trial(shape, p, a, g):
    try:
        trial = restore_area(shape.from_vector(p), a, g).absorb_mean()
        W, A = energy_area(trial, g)
    except (h.ShapeError, h.ValidityError, h.AreaBandError, h.DegenerateGeometryError) as err:
        log.debug('trial rejected: {}'.format(err))
        return None, np.inf, np.nan
    return trial, W, A


def minimize(shape0, a, g=None, opts=None):
    """projected gradient descent with exact area restoration

    Returns:
        (final shape, :class:`DescentTrace`)

    Raises:
        LineSearchError: no admissible step above ``opts.min_step``
    """
    g = geometry._metric_or_flat(g)
    opts = MinimizeOptions() if opts is None else opts
    if a <= 0:
        raise ValueError('target area has to be positive')
    shape = restore_area(shape0.absorb_mean(), a, g)
    trace = DescentTrace()
    alpha = opts.step0
    step_taken = 0.
    for it in range(opts.max_iter + 1):
        W, A = energy_area(shape, g)
        gW, gA = gradient(shape, g, opts.fd_step)
        lam = multiplier(gW, gA)
        d = -(gW - lam*gA)
        gnorm = float(np.linalg.norm(d))
        trace.append(it, W, A, lam, gnorm, shape.center, step_taken)
        log.info('iter {:3d}  W={:.10f}  A={:.10g}  lambda={:+.4e}  |g|={:.3e}'.format(it, W, A, lam, gnorm))
        if gnorm < opts.gtol:
            trace.reason = 'gtol'
            break
        if it == opts.max_iter:
            trace.reason = 'max_iter'
            break
        p = shape.to_vector()
        while True:
            trial, Wt, At = _trial(shape, p + alpha*d, a, g)
            log.debug('  step {:.3e} W={:.12f}'.format(alpha, Wt))
            if Wt <= W - opts.armijo*alpha*gnorm**2:
                break
            alpha *= 0.5
            if alpha < opts.min_step:
                raise h.LineSearchError('no decrease along the projected gradient at iteration {}'.format(it))
        assert abs(At - a) <= 1e-8*a, 'area {:.12g} drifted from {:.12g}'.format(At, a)
        shape = trial
        step_taken = alpha
        alpha = min(2*alpha, 1.)
    log.info('descent finished ({}) after {} iterations'.format(trace.reason, len(trace) - 1))
    return shape, trace


def translated_sphere_energies(g, R, centers, n_theta=32, n_phi=64):
    """W of round spheres of coordinate radius R at the given centers"""
    return np.array([energy_area(RadialShape(c, R, np.zeros(1), n_theta=n_theta, n_phi=n_phi), g)[0]
                     for c in centers])


def _spectral_operators(geo, grid, f):
    df = sg.spectral_derivatives(f, grid)
    d1 = np.stack([df['t'], df['p']], axis=-1)
    d2 = np.stack([np.stack([df['tt'], df['tp']], axis=-1), np.stack([df['tp'], df['pp']], axis=-1)], axis=-2)
    return geometry.intrinsic_operators(geo, d1, d2)


def estimate_report(shape, g=None, lam=0., n_theta=48, n_phi=96):
    """curvature integrals of a (converged) shape

    ================ ====================================================
     key              value
    ================ ====================================================
     Q                ∫|∇²H|² + H²|∇H|² + H⁴|Å|² dμ
     A0_l2            ‖Å‖_{L²}
     H_dev            ‖H − 2/R‖_∞ with 4πR² = |Σ|
     H_dev_constant   H_dev/|Σ|^{1/2}
     H_min            min H (positivity check)
     el_l2, el_max    norms of ΔH + H|Å|² + H Ric(ν,ν) + λH
    ================ ====================================================
    """
    g = geometry._metric_or_flat(g)
    grid = sg.get_grid(n_theta, n_phi, 'fejer')
    geo = _geometry(shape, g, grid)
    H = geo.H
    ops = _spectral_operators(geo, grid, H)
    area = geo.area
    R_eff = np.sqrt(area/(4*np.pi))
    ric_nn = np.einsum('...ab,...a,...b->...', g.ricci(geo.surface.points), geo.nu, geo.nu)
    el = ops['laplacian'] + H*geo.A0_sq + H*ric_nn + lam*H
    Q = geo.integral(ops['hess_sq'] + H**2*ops['grad_sq'] + H**4*geo.A0_sq)
    H_dev = float(np.max(np.abs(H - 2/R_eff)))
    out = {'Q': Q, 'A0_l2': float(np.sqrt(max(geo.integral(geo.A0_sq), 0.))), 'H_dev': H_dev,
           'H_dev_constant': H_dev/np.sqrt(area), 'H_min': float(np.min(H)), 'H_positive': bool(np.all(H > 0)),
           'el_l2': float(np.sqrt(geo.integral(el**2))), 'el_max': float(np.max(np.abs(el))),
           'area': area, 'willmore': geo.willmore, 'R_eff': R_eff, 'lambda': lam}
    log.debug('estimate report {}'.format(out))
    return out
