#! /usr/bin/env python3
# coding=utf-8
"""
Ambient metrics on ℝ³ given in coordinates, their curvature, energies of
small coordinate spheres, the scaling flow and the flat Simon-type
inequalities.

Array conventions (trailing axes, leading axes are the points):

=============== ================ ======================================
 array           shape            meaning
=============== ================ ======================================
 metric          (3, 3)           g_αβ
 dmetric         (3, 3, 3)        [α, β, γ] = ∂_γ g_αβ
 ddmetric        (3, 3, 3, 3)     [α, β, γ, δ] = ∂_γ ∂_δ g_αβ
 christoffel     (3, 3, 3)        [α, β, γ] = Γ^α_βγ
 dchristoffel    (3, 3, 3, 3)     [α, β, γ, δ] = ∂_δ Γ^α_βγ
 riemann         (3, 3, 3, 3)     [ρ, σ, μ, ν] = R^ρ_σμν
 ricci           (3, 3)           R_σν = R^ρ_σρν
=============== ================ ======================================
"""
"""
Author: willmoreLab developers
"""

import logging
import collections
import numpy as np
import scipy.optimize
import scipy.special
import scipy.spatial
import scipy.spatial.distance

from . import helpers as h
from . import sphere_grid as sg
from . import surfaces
from . import geometry

log = logging.getLogger('willmoreLab')

EIGHT_PI = 8*np.pi
SYMMETRY_ATOL = 1e-12
DEFAULT_RADII = (0.02, 0.04, 0.06, 0.08, 0.1)


class Riemann3(object):
    """algebraic curvature tensor R_ikjl at the origin of ℝ³

    Convention: the normal-form metric is g_ij = δ_ij − ⅓R_ikjl x^k x^l and
    Ric_kl = R_ikil, so the unit three-sphere has R_ikjl = δ_ij δ_kl − δ_il δ_kj.

    Raises:
        MetricError: if the tensor violates one of the symmetries
    """
    def __init__(self, tensor, atol=SYMMETRY_ATOL):
        T = np.asarray(tensor, dtype=float)
        if T.shape != (3, 3, 3, 3):
            raise h.MetricError('curvature tensor must have shape (3, 3, 3, 3), got {}'.format(T.shape))
        scale = max(1., float(np.max(np.abs(T))))
        defects = {
            'antisymmetry ik': T + T.transpose(1, 0, 2, 3),
            'antisymmetry jl': T + T.transpose(0, 1, 3, 2),
            'pair symmetry': T - T.transpose(2, 3, 0, 1),
            'first Bianchi': T + T.transpose(1, 2, 0, 3) + T.transpose(2, 0, 1, 3),
        }
        for name, d in defects.items():
            if np.max(np.abs(d)) > atol*scale:
                raise h.MetricError('{} violated by {:.2e}'.format(name, np.max(np.abs(d))))
        self.tensor = T

    def __repr__(self):
        return 'Riemann3(Scal={:.6g})'.format(self.scalar())

    @classmethod
    def constant_curvature(cls, kappa=1.):
        d = np.eye(3)
        return cls(kappa*(np.einsum('ij,kl->ikjl', d, d) - np.einsum('il,kj->ikjl', d, d)))

    @classmethod
    def s3(cls):
        return cls.constant_curvature(1.)

    @classmethod
    def zero(cls):
        return cls(np.zeros((3, 3, 3, 3)))

    @classmethod
    def from_ricci(cls, ric):
        """in three dimensions the Ricci tensor determines the curvature"""
        ric = np.asarray(ric, dtype=float)
        if ric.shape != (3, 3) or np.max(np.abs(ric - ric.T)) > SYMMETRY_ATOL*max(1., np.max(np.abs(ric))):
            raise h.MetricError('Ricci tensor must be a symmetric 3x3 matrix')
        d = np.eye(3)
        scal = np.trace(ric)
        T = (np.einsum('ij,kl->ikjl', ric, d) + np.einsum('kl,ij->ikjl', ric, d)
             - np.einsum('il,kj->ikjl', ric, d) - np.einsum('kj,il->ikjl', ric, d)
             - 0.5*scal*(np.einsum('ij,kl->ikjl', d, d) - np.einsum('il,kj->ikjl', d, d)))
        return cls(T)

    def scaled(self, factor):
        return Riemann3(factor*self.tensor)

    def ricci(self):
        return np.einsum('ikil->kl', self.tensor)

    def scalar(self):
        return float(np.trace(self.ricci()))

    def norm(self):
        return float(np.sqrt(np.sum(self.tensor**2)))

    def h0(self):
        """constant of |h| ≤ h0|x|² and |∂h| ≤ h0|x| for h = g − δ"""
        return 2./3.*self.norm()


def _eye_like(x):
    return np.broadcast_to(np.eye(3), x.shape[:-1] + (3, 3)).copy()


class AmbientMetric(object):
    """metric g on ℝ³ with analytic first and second derivatives

    Args:
        kind: ``'euclidean'``, ``'normal-form'`` or ``'conformal'``
        metric, dmetric, ddmetric: closures of points ``(..., 3)``
        validity_radius: radius of the ball around ``center`` on which the
            metric is trusted
        center: center of the validity ball
        riemann0: :class:`Riemann3` of a normal-form metric
        params: construction parameters echoed in reports
    """
    def __init__(self, kind, metric, dmetric, ddmetric, validity_radius=np.inf, center=(0., 0., 0.),
                 riemann0=None, params=None):
        self.kind = kind
        self.metric = metric
        self.dmetric = dmetric
        self.ddmetric = ddmetric
        self.validity_radius = float(validity_radius)
        self.center = np.asarray(center, dtype=float)
        self.riemann0 = riemann0
        self.params = params if params is not None else {}

    def __repr__(self):
        return 'AmbientMetric({}, {})'.format(self.kind, self.params)

    @property
    def is_flat(self):
        return self.kind == 'euclidean'

    def christoffel(self, x):
        x = np.asarray(x, dtype=float)
        if self.is_flat:
            return np.zeros(x.shape[:-1] + (3, 3, 3))
        g_inv = np.linalg.inv(self.metric(x))
        return np.einsum('...ae,...ebc->...abc', g_inv, self._lowered(self.dmetric(x)))

    @staticmethod
    def _lowered(dg):
        # Γ_εβγ = ½(∂_γ g_εβ + ∂_β g_εγ − ∂_ε g_βγ)
        return 0.5*(dg + np.einsum('...ecb->...ebc', dg) - np.einsum('...bce->...ebc', dg))

    def dchristoffel(self, x):
        x = np.asarray(x, dtype=float)
        if self.is_flat:
            return np.zeros(x.shape[:-1] + (3, 3, 3, 3))
        g_inv = np.linalg.inv(self.metric(x))
        dg = self.dmetric(x)
        ddg = self.ddmetric(x)
        d_ginv = -np.einsum('...am,...mnd,...ne->...aed', g_inv, dg, g_inv)
        low = self._lowered(dg)
        d_low = 0.5*(ddg + np.einsum('...ecbd->...ebcd', ddg) - np.einsum('...bced->...ebcd', ddg))
        return (np.einsum('...aed,...ebc->...abcd', d_ginv, low)
                + np.einsum('...ae,...ebcd->...abcd', g_inv, d_low))

    def riemann(self, x):
        G = self.christoffel(x)
        dG = self.dchristoffel(x)
        return (np.einsum('...rnsm->...rsmn', dG) - np.einsum('...rmsn->...rsmn', dG)
                + np.einsum('...rml,...lns->...rsmn', G, G) - np.einsum('...rnl,...lms->...rsmn', G, G))

    def ricci(self, x):
        x = np.asarray(x, dtype=float)
        if self.is_flat:
            return np.zeros(x.shape[:-1] + (3, 3))
        return np.einsum('...rsrn->...sn', self.riemann(x))

    def scalar(self, x):
        x = np.asarray(x, dtype=float)
        return np.einsum('...sn,...sn->...', np.linalg.inv(self.metric(x)), self.ricci(x))

    def contains(self, points):
        """all points strictly inside the validity ball"""
        r = np.linalg.norm(np.asarray(points) - self.center, axis=-1)
        return bool(np.all(r < self.validity_radius))

    def check_contains(self, points, what='surface'):
        if not self.contains(points):
            r = np.max(np.linalg.norm(np.asarray(points) - self.center, axis=-1))
            raise h.ValidityError('{} reaches |x - c| = {:.4g} beyond the validity radius {:.4g}'.format(
                what, r, self.validity_radius))


def euclidean_metric():
    def metric(x):
        return _eye_like(np.asarray(x))

    def dmetric(x):
        return np.zeros(np.shape(x)[:-1] + (3, 3, 3))

    def ddmetric(x):
        return np.zeros(np.shape(x)[:-1] + (3, 3, 3, 3))

    return AmbientMetric('euclidean', metric, dmetric, ddmetric)


def normal_form_metric(riem, validity_radius=None, max_radius=1.):
    """g_ij(x) = δ_ij − ⅓R_ikjl x^k x^l

    Args:
        riem: :class:`Riemann3`
        validity_radius: defaults to 0.5/√max|R|, capped at ``max_radius``
    """
    if not isinstance(riem, Riemann3):
        riem = Riemann3(riem)
    R = riem.tensor
    if validity_radius is None:
        peak = np.max(np.abs(R))
        validity_radius = min(0.5/np.sqrt(peak), max_radius) if peak > 0 else max_radius

    def metric(x):
        x = np.asarray(x, dtype=float)
        return _eye_like(x) - np.einsum('ikjl,...k,...l->...ij', R, x, x)/3.

    def dmetric(x):
        x = np.asarray(x, dtype=float)
        return -(np.einsum('iajl,...l->...ija', R, x) + np.einsum('ikja,...k->...ija', R, x))/3.

    def ddmetric(x):
        x = np.asarray(x, dtype=float)
        dd = -(np.einsum('iajb->ijab', R) + np.einsum('ibja->ijab', R))/3.
        return np.broadcast_to(dd, x.shape[:-1] + (3, 3, 3, 3)).copy()

    return AmbientMetric('normal-form', metric, dmetric, ddmetric, validity_radius=validity_radius,
                         riemann0=riem, params={'scal0': riem.scalar(), 'h0': riem.h0()})


def conformal_metric(q=(0., 0., 0.), c2=0., c4=0.05, validity_radius=1.):
    """g = e^{2φ}δ with φ(x) = c2|x−q|² + c4|x−q|⁴

    The scalar curvature is e^{−2φ}(−4Δφ − 2|∇φ|²); with c2 = 0 and c4 > 0 it
    attains its maximum 0 at q.
    """
    q = np.asarray(q, dtype=float)

    def parts(x):
        y = np.asarray(x, dtype=float) - q
        s = np.sum(y*y, axis=-1)
        phi = c2*s + c4*s*s
        a = 2*c2 + 4*c4*s
        dphi = a[..., None]*y
        ddphi = a[..., None, None]*np.eye(3) + 8*c4*y[..., :, None]*y[..., None, :]
        return np.exp(2*phi), dphi, ddphi

    def metric(x):
        e, _, _ = parts(x)
        return e[..., None, None]*np.eye(3)

    def dmetric(x):
        e, d, _ = parts(x)
        return 2*(e[..., None]*d)[..., None, None, :]*np.eye(3)[:, :, None]

    def ddmetric(x):
        e, d, dd = parts(x)
        f = (4*d[..., :, None]*d[..., None, :] + 2*dd)*e[..., None, None]
        return f[..., None, None, :, :]*np.eye(3)[:, :, None, None]

    return AmbientMetric('conformal', metric, dmetric, ddmetric, validity_radius=validity_radius, center=q,
                         params={'q': q.tolist(), 'c2': c2, 'c4': c4})


def conformal_scalar_closed(g, x):
    """closed-form scalar curvature of a :func:`conformal_metric`"""
    y = np.asarray(x, dtype=float) - g.center
    s = np.sum(y*y, axis=-1)
    c2, c4 = g.params['c2'], g.params['c4']
    phi = c2*s + c4*s*s
    lap = 6*c2 + 20*c4*s
    grad_sq = (2*c2 + 4*c4*s)**2*s
    return np.exp(-2*phi)*(-4*lap - 2*grad_sq)


def coordinate_sphere(r, center=(0., 0., 0.), n_theta=32, n_phi=64):
    grid = sg.get_grid(n_theta, n_phi, 'gauss')
    return surfaces.radial_graph(np.asarray(center, dtype=float), r, np.zeros(1), grid)


SweepResult = collections.namedtuple('SweepResult', ['radii', 'energies', 'c2', 'residuals', 'fit_residual',
                                                     'expected_c2'])


def sphere_energy_sweep(g, radii=DEFAULT_RADII, n_theta=32, n_phi=64):
    """W of coordinate spheres S_r and the least-squares fit W = 8π + c₂r²

    Raises:
        MetricError: conformal metrics (coordinate spheres are not geodesic)
        ValidityError: a radius beyond the validity radius
    """
    if g.kind == 'conformal':
        raise h.MetricError('coordinate spheres are geodesic spheres only in normal coordinates')
    radii = np.asarray(radii, dtype=float)
    energies = []
    for r in radii:
        if r >= g.validity_radius:
            raise h.ValidityError('radius {} beyond the validity radius {}'.format(r, g.validity_radius))
        W = geometry.willmore_energy(coordinate_sphere(r, n_theta=n_theta, n_phi=n_phi), g)
        log.info('sphere r={:.4f}  W={:.12f}  W-8pi={:.4e}'.format(r, W, W - EIGHT_PI))
        energies.append(W)
    energies = np.array(energies)
    c2 = float(np.sum(radii**2*(energies - EIGHT_PI))/np.sum(radii**4))
    residuals = energies - EIGHT_PI - c2*radii**2
    scal0 = g.riemann0.scalar() if g.riemann0 is not None else 0.
    return SweepResult(radii, energies, c2, residuals, float(np.sqrt(np.mean(residuals**2))),
                       -4*np.pi/3*scal0)


def scaling_flow(surface, t):
    """flow of the position field, x -> e^t x"""
    return surfaces.scaled(surface, t)


def area_along_flow(surface, ts, g=None):
    return np.array([geometry.area(scaling_flow(surface, t), g) for t in ts])


def adjust_area(surface, a, g=None):
    """dilation exponent t₀ with |e^{t₀}Σ| = a

    Returns:
        (t₀, adjusted surface)

    Raises:
        AreaBandError: |Σ| outside (a/2, 3a/2)
        ValidityError: the adjusted surface leaves the validity ball
    """
    g = geometry._metric_or_flat(g)
    A = geometry.area(surface, g)
    if not a/2. < A < 1.5*a:
        raise h.AreaBandError('area {:.6g} outside ({:.6g}, {:.6g})'.format(A, a/2., 1.5*a))
    bound = 2*abs(A - a)/a
    if A == a:
        t0 = 0.
    elif g.is_flat:
        t0 = 0.5*np.log(a/A)
    else:
        def f(t):
            return geometry.area(scaling_flow(surface, t), g) - a
        lo, hi = -bound, bound
        for _ in range(60):
            if f(lo) < 0 < f(hi):
                break
            log.debug('expanding scaling bracket [{:.3e}, {:.3e}]'.format(lo, hi))
            lo, hi = 2*lo, 2*hi
        else:
            raise h.AreaBandError('no scaling bracket for target area {:.6g}'.format(a))
        t0 = scipy.optimize.brentq(f, lo, hi, xtol=1e-15, rtol=4*np.finfo(float).eps, maxiter=200)
    adjusted = scaling_flow(surface, t0)
    if not g.is_flat:
        g.check_contains(adjusted.points, 'adjusted surface')
    assert abs(t0) <= bound, 'scaling exponent {:.3e} exceeds 2||S|-a|/a = {:.3e}'.format(t0, bound)
    log.debug('adjust_area |S|={:.10g} a={:.10g} t0={:.6e} bound={:.6e}'.format(A, a, t0, bound))
    return t0, adjusted


def scaling_curvature_delta(surface, g=None, dt=1e-4):
    """d/dt ∫|A_t|² dμ_t at t = 0 along the scaling flow"""
    g = geometry._metric_or_flat(g)
    return (geometry.curvature_integral(scaling_flow(surface, dt), g)
            - geometry.curvature_integral(scaling_flow(surface, -dt), g))/(2*dt)


def estimate_lambda_scaling(surface, g=None, dt=1e-4):
    """δW/δA along the scaling field, the Lagrange parameter seen by
    dilations

    Raises:
        DegenerateGeometryError: vanishing area variation
    """
    g = geometry._metric_or_flat(g)
    plus, minus = scaling_flow(surface, dt), scaling_flow(surface, -dt)
    dW = (geometry.willmore_energy(plus, g) - geometry.willmore_energy(minus, g))/(2*dt)
    dA = (geometry.area(plus, g) - geometry.area(minus, g))/(2*dt)
    if abs(dA) < 1e-14*geometry.area(surface, g):
        raise h.DegenerateGeometryError('area variation along the scaling field vanishes')
    return dW/dA


def extrinsic_radius(surface, center=(0., 0., 0.)):
    return float(np.max(np.linalg.norm(surface.points - np.asarray(center), axis=-1)))


def lambda_bound_constant(lam, surface, g=None):
    """realized C in |λ| ≤ C|Σ|^{−1}(|Σ|^{1/2} + r∫|A|²)"""
    g = geometry._metric_or_flat(g)
    geo = geometry.ambient_geometry(surface, g)
    r = extrinsic_radius(surface, g.center)
    return abs(lam)*geo.area/(np.sqrt(geo.area) + r*geo.integral(geo.A_sq))


def combined_adjustment(surface, a, g=None):
    """area adjustment followed by the change of ∫|A|²

    Returns:
        dict with ``t0``, ``before``, ``after``, ``delta`` (derivative along
        the flow on the adjusted surface), ``radius`` and the realized
        constant ``C1`` of |∫|A_{t₀}|² − ∫|A|²| ≤ C₁|t₀| r ∫|A|²
    """
    g = geometry._metric_or_flat(g)
    t0, adjusted = adjust_area(surface, a, g)
    before = geometry.curvature_integral(surface, g)
    after = geometry.curvature_integral(adjusted, g)
    r = extrinsic_radius(surface, g.center)
    C1 = abs(after - before)/(abs(t0)*r*before) if t0 != 0 and before > 0 else 0.
    return {'t0': t0, 'before': before, 'after': after, 'radius': r, 'C1': C1,
            'delta': scaling_curvature_delta(adjusted, g), 'surface': adjusted}


def _column_nodes(shape, x0, r, n_nodes, n_scan=64):
    """θ boundary of Σ ∩ B_r(x0) per azimuth column and Gauss nodes on [0, θ_b]"""
    xi, wi = scipy.special.roots_legendre(n_nodes)
    phis = shape.grid.phi
    degree = shape.degree
    thetas, weights = [], []
    full = True
    scan = np.linspace(1e-9, np.pi - 1e-9, n_scan)
    for p in phis:
        def dist(t):
            tt = np.atleast_1d(np.asarray(t, dtype=float))
            pp = np.full_like(tt, p)
            Y = sg.real_sph_harm(degree, tt, pp, derivatives=False)['Y']
            rho = 1. + np.tensordot(shape.coeffs, Y, axes=1)
            om = np.stack([np.sin(tt)*np.cos(pp), np.sin(tt)*np.sin(pp), np.cos(tt)], axis=-1)
            pts = shape.center + shape.R*rho[:, None]*om
            return np.linalg.norm(pts - x0, axis=-1) - r
        d = dist(scan)
        outside = np.where(d >= 0)[0]
        if outside.size == 0:
            tb = np.pi
        else:
            k = outside[0]
            full = False
            tb = scipy.optimize.brentq(lambda t: float(dist(t)[0]), scan[k-1] if k > 0 else 0., scan[k],
                                       xtol=1e-14)
        thetas.append(0.5*tb*(xi + 1.))
        weights.append(0.5*tb*wi)
    THETA = np.array(thetas).T
    PHI = np.broadcast_to(phis, THETA.shape)
    W = np.array(weights).T*(2*np.pi/phis.size)
    return THETA, np.ascontiguousarray(PHI), W, full


def cap_integrals(shape, x0, r, n_nodes=48):
    """|Σ_r|, W(Σ_r) and ∫_{Σ_r} H⟨x − x0, ν⟩ dμ for Σ_r = Σ ∩ B_r(x0), flat
    ambient"""
    THETA, PHI, W, full = _column_nodes(shape, x0, r, n_nodes)
    sample = surfaces.radial_sample(shape.center, shape.R, shape.coeffs, THETA, PHI, W)
    geo = geometry.ambient_geometry(sample)
    flux = geo.integral(geo.H*np.sum((sample.points - x0)*geo.nu, axis=-1))
    return {'area': geo.area, 'willmore': geo.willmore, 'flux': flux, 'contained': full}


def monotonicity_quantity(shape, r, center=None, n_nodes=48):
    """r^{−2}|Σ_r| + W(Σ_r)/8 − ½r^{−2}∫_{Σ_r} H⟨x − x0, ν⟩ dμ, bounded below by π"""
    x0 = shape.north_pole() if center is None else np.asarray(center, dtype=float)
    c = cap_integrals(shape, x0, r, n_nodes)
    return c['area']/r**2 + c['willmore']/8. - 0.5*c['flux']/r**2, c


def extrinsic_diameter(points):
    """largest chord, from the convex hull vertices"""
    pts = points.reshape(-1, 3)
    hull = scipy.spatial.ConvexHull(pts)
    return float(np.max(scipy.spatial.distance.pdist(pts[hull.vertices])))


SimonRow = collections.namedtuple('SimonRow', ['r', 'area_r', 'monotonicity', 'slack', 'contained'])


def simon_checks(shape, radii, g=None, center=None, slack_tolerance=1e-6, n_nodes=48):
    """monotonicity and area bounds around the north pole of a closed shape

    Args:
        shape: :class:`~willmoreLab.surfaces.RadialShape`
        radii: ball radii
        g: ambient metric, must be Euclidean
        center: must be ``None`` or the north pole
        slack_tolerance: round spheres attain equality in the monotonicity
            bound, slack down to ``-slack_tolerance`` passes

    Returns:
        (list of SimonRow, dict with ``area``, ``willmore``, ``diameter``,
        ``diameter_ratio``)

    Raises:
        HypothesisError: not a closed radial shape, or center not on it
        MetricError: curved ambient
    """
    if g is not None and not g.is_flat:
        raise h.MetricError('the explicit-constant inequalities hold in flat ambient only')
    if not isinstance(shape, surfaces.RadialShape):
        raise h.HypothesisError('closed surfaces only, got {}'.format(type(shape).__name__))
    x0 = shape.north_pole()
    if center is not None and np.linalg.norm(np.asarray(center) - x0) > 1e-9*shape.R:
        raise h.HypothesisError('center {} is not the surface point {}'.format(center, x0))
    full = shape.sample()
    geo = geometry.ambient_geometry(full)
    area, W = geo.area, geo.willmore
    rows = []
    for r in radii:
        m, c = monotonicity_quantity(shape, r, x0, n_nodes)
        rows.append(SimonRow(float(r), c['area'], m, m - np.pi, c['contained']))
        log.info('simon r={:.4f} |S_r|={:.8g} m(r)={:.10f} slack={:.3e}'.format(r, c['area'], m, m - np.pi))
    diam = extrinsic_diameter(full.points)
    return rows, {'area': area, 'willmore': W, 'diameter': diam,
                  'diameter_ratio': diam/(np.sqrt(area*W) + area), 'slack_tolerance': slack_tolerance}
