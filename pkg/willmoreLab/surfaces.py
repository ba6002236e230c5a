#! /usr/bin/env python3
# coding=utf-8
"""
Analytic conformal test immersions on charts and radial graphs over the
sphere.

An :class:`AnalyticImmersion` carries closures for Φ, its first and second
partial derivatives and the conformal factor λ. The closures take node
arrays ``X, Y`` and return arrays with trailing shapes ``(3,)``, ``(2, 3)``
and ``(2, 2, 3)``.

Radial graphs F(ω) = c + R(1 + Σ a_lm Y_lm(ω))ω are sampled on a
:class:`~willmoreLab.sphere_grid.SphereGrid` into a :class:`SurfaceSample`.
"""
"""
Author: willmoreLab developers
"""

import logging
import numpy as np

from . import helpers as h
from . import chart as ch
from . import sphere_grid as sg

log = logging.getLogger('willmoreLab')

CONFORMALITY_THRESHOLD = 1e-8
SQRT2 = np.sqrt(2.)


class AnalyticImmersion(object):
    """conformal immersion of a chart domain into ℝ³

    Args:
        name: surface name
        phi, dphi, ddphi: closures ``f(X, Y)`` for Φ, ∂Φ and ∂²Φ
        lam: closure for the conformal factor λ
        extent: half width of the natural chart
        periodic: periodic axes of the natural chart
        params: dict of construction parameters (echoed in reports)
    """
    def __init__(self, name, phi, dphi, ddphi, lam, extent=1.0, periodic=(False, False), params=None):
        self.name = name
        self.phi = phi
        self.dphi = dphi
        self.ddphi = ddphi
        self.lam = lam
        self.extent = extent
        self.periodic = tuple(periodic)
        self.params = params if params is not None else {}

    def __repr__(self):
        return 'AnalyticImmersion({}, {})'.format(self.name, self.params)

    def default_chart(self, n):
        return ch.Chart(n, extent=self.extent, periodic=self.periodic)

    def check_chart(self, chart):
        for a in (0, 1):
            if chart.periodic[a] and not self.periodic[a]:
                raise ValueError('{} is not periodic along axis {}'.format(self.name, a))
            if chart.periodic[a] and abs(chart.extent - self.extent) > 1e-14:
                raise ValueError('periodic axis of {} needs extent {}'.format(self.name, self.extent))


def sample_on_chart(imm, chart):
    """Φ, ∂Φ, ∂²Φ and λ on the chart nodes as plain arrays"""
    imm.check_chart(chart)
    X, Y = chart.mesh()
    return imm.phi(X, Y), imm.dphi(X, Y), imm.ddphi(X, Y), imm.lam(X, Y)


def conformality_defect(imm, chart):
    """max over nodes of max(|⟨Φx,Φy⟩|, ||Φx|²−|Φy|²|)/|Φx|²"""
    X, Y = chart.mesh()
    d = imm.dphi(X, Y)
    gxx = np.sum(d[..., 0, :]**2, axis=-1)
    gyy = np.sum(d[..., 1, :]**2, axis=-1)
    gxy = np.sum(d[..., 0, :]*d[..., 1, :], axis=-1)
    if np.any(gxx < 1e-24):
        raise h.DegenerateGeometryError('|Φx| vanishes on {}'.format(imm.name))
    return float(np.max(np.maximum(np.abs(gxy), np.abs(gxx - gyy))/gxx))


def _stack(*comps):
    return np.stack(comps, axis=-1)


def plane():
    """Φ = (x, y, 0), the flat control"""
    zero = lambda X, Y: np.zeros_like(X)
    one = lambda X, Y: np.ones_like(X)

    def phi(X, Y):
        return _stack(X, Y, zero(X, Y))

    def dphi(X, Y):
        z, o = zero(X, Y), one(X, Y)
        return np.stack([_stack(o, z, z), _stack(z, o, z)], axis=-2)

    def ddphi(X, Y):
        return np.zeros(X.shape + (2, 2, 3))

    return AnalyticImmersion('plane', phi, dphi, ddphi, zero, extent=1.0)


def sphere_stereo(R=1.0):
    """inverse stereographic chart of the sphere of radius R

    Φ = R(2x, 2y, x²+y²−1)/(1+x²+y²), e^λ = 2R/(1+x²+y²). The unit disk is
    mapped onto the lower hemisphere.
    """
    if R <= 0:
        raise ValueError('sphere radius has to be positive, got {}'.format(R))

    def phi(X, Y):
        s = 1 + X**2 + Y**2
        return R*_stack(2*X, 2*Y, X**2 + Y**2 - 1)/s[..., None]

    def dphi(X, Y):
        s = 1 + X**2 + Y**2
        f = 2*R/s**2
        px = _stack(f*(1 - X**2 + Y**2), -2*f*X*Y, 2*f*X)
        py = _stack(-2*f*X*Y, f*(1 + X**2 - Y**2), 2*f*Y)
        return np.stack([px, py], axis=-2)

    def ddphi(X, Y):
        s3 = (1 + X**2 + Y**2)**3
        f = 4*R/s3
        pxx = _stack(-f*X*(3 - X**2 + 3*Y**2), -f*Y*(1 + Y**2 - 3*X**2), f*(1 - 3*X**2 + Y**2))
        pxy = _stack(f*Y*(3*X**2 - Y**2 - 1), f*X*(3*Y**2 - X**2 - 1), -4*f*X*Y)
        pyy = _stack(-f*X*(1 + X**2 - 3*Y**2), -f*Y*(3 - Y**2 + 3*X**2), f*(1 + X**2 - 3*Y**2))
        return np.stack([np.stack([pxx, pxy], axis=-2), np.stack([pxy, pyy], axis=-2)], axis=-3)

    def lam(X, Y):
        return np.log(2*R/(1 + X**2 + Y**2))

    return AnalyticImmersion('sphere', phi, dphi, ddphi, lam, extent=1.25, params={'radius': R})


def cylinder():
    """Φ = (cos x, sin x, y), periodic in x"""
    def phi(X, Y):
        return _stack(np.cos(X), np.sin(X), Y)

    def dphi(X, Y):
        z = np.zeros_like(X)
        return np.stack([_stack(-np.sin(X), np.cos(X), z), _stack(z, z, np.ones_like(X))], axis=-2)

    def ddphi(X, Y):
        out = np.zeros(X.shape + (2, 2, 3))
        out[..., 0, 0, 0] = -np.cos(X)
        out[..., 0, 0, 1] = -np.sin(X)
        return out

    return AnalyticImmersion('cylinder', phi, dphi, ddphi, lambda X, Y: np.zeros_like(X),
                             extent=np.pi, periodic=(True, False))


def catenoid():
    """Φ = (cosh y cos x, cosh y sin x, y), e^λ = cosh y, periodic in x"""
    def phi(X, Y):
        return _stack(np.cosh(Y)*np.cos(X), np.cosh(Y)*np.sin(X), Y)

    def dphi(X, Y):
        z = np.zeros_like(X)
        px = _stack(-np.cosh(Y)*np.sin(X), np.cosh(Y)*np.cos(X), z)
        py = _stack(np.sinh(Y)*np.cos(X), np.sinh(Y)*np.sin(X), np.ones_like(X))
        return np.stack([px, py], axis=-2)

    def ddphi(X, Y):
        z = np.zeros_like(X)
        pxx = _stack(-np.cosh(Y)*np.cos(X), -np.cosh(Y)*np.sin(X), z)
        pxy = _stack(-np.sinh(Y)*np.sin(X), np.sinh(Y)*np.cos(X), z)
        pyy = _stack(np.cosh(Y)*np.cos(X), np.cosh(Y)*np.sin(X), z)
        return np.stack([np.stack([pxx, pxy], axis=-2), np.stack([pxy, pyy], axis=-2)], axis=-3)

    return AnalyticImmersion('catenoid', phi, dphi, ddphi, lambda X, Y: np.log(np.cosh(Y)),
                             extent=np.pi, periodic=(True, False))


TORUS_K = SQRT2 - 1.


def torus_forward(u):
    """ũ(u) = 2 arctan((√2−1) tan(u/2)) continued to [−π, π]"""
    return 2*np.arctan2(TORUS_K*np.sin(u/2.), np.cos(u/2.))


def torus_inverse(ut, tol=1e-14):
    """u(ũ) by bracketed Newton iteration on the monotone forward map"""
    ut = np.asarray(ut, dtype=float)
    flat = np.ascontiguousarray(ut.ravel())
    return h.invert_monotone(flat, TORUS_K, tol).reshape(ut.shape)


def torus_inverse_closed(ut):
    """closed-form inverse u = 2 arctan((√2+1) tan(ũ/2))"""
    ut = np.asarray(ut, dtype=float)
    return 2*np.arctan2((SQRT2 + 1.)*np.sin(ut/2.), np.cos(ut/2.))


def willmore_torus():
    """conformal chart (ũ, v) of the √2 torus of revolution

    X(u, v) = ((√2 + cos u) cos v, (√2 + cos u) sin v, sin u), with the
    induced metric (√2 + cos u)²(dũ² + dv²).
    """
    def parts(X, Y):
        u = torus_inverse(X)
        return u, SQRT2 + np.cos(u), np.cos(Y), np.sin(Y)

    def phi(X, Y):
        u, w, cv, sv = parts(X, Y)
        return _stack(w*cv, w*sv, np.sin(u))

    def dphi(X, Y):
        u, w, cv, sv = parts(X, Y)
        Xu = _stack(-np.sin(u)*cv, -np.sin(u)*sv, np.cos(u))
        Xv = _stack(-w*sv, w*cv, np.zeros_like(u))
        return np.stack([w[..., None]*Xu, Xv], axis=-2)

    def ddphi(X, Y):
        u, w, cv, sv = parts(X, Y)
        su, cu = np.sin(u), np.cos(u)
        Xu = _stack(-su*cv, -su*sv, cu)
        Xuu = _stack(-cu*cv, -cu*sv, -su)
        Xuv = _stack(su*sv, -su*cv, np.zeros_like(u))
        Xvv = _stack(-w*cv, -w*sv, np.zeros_like(u))
        w3 = w[..., None]
        puu = w3*(-su[..., None]*Xu + w3*Xuu)
        puv = w3*Xuv
        return np.stack([np.stack([puu, puv], axis=-2), np.stack([puv, Xvv], axis=-2)], axis=-3)

    def lam(X, Y):
        return np.log(SQRT2 + np.cos(torus_inverse(X)))

    return AnalyticImmersion('torus', phi, dphi, ddphi, lam, extent=np.pi, periodic=(True, True))


SURFACES = {'plane': plane, 'sphere': sphere_stereo, 'cylinder': cylinder,
            'catenoid': catenoid, 'torus': willmore_torus}


def get_immersion(name, **params):
    if name not in SURFACES:
        raise ValueError('unknown surface {}, choose from {}'.format(name, sorted(SURFACES)))
    return SURFACES[name](**params)


class SurfaceSample(object):
    """parametrized surface samples with quadrature weights

    Args:
        points: F at the nodes, shape ``(..., 3)``
        d1: first derivatives ``(..., 2, 3)``
        d2: second derivatives ``(..., 2, 2, 3)``
        weights: parameter-space quadrature weights ``(...)``
        omega: unit directions of the parametrization, if radial
        grid: the :class:`~willmoreLab.sphere_grid.SphereGrid`, if any
    """
    def __init__(self, points, d1, d2, weights, omega=None, grid=None):
        self.points = points
        self.d1 = d1
        self.d2 = d2
        self.weights = weights
        self.omega = omega
        self.grid = grid

    def copy_with(self, points, d1, d2):
        return SurfaceSample(points, d1, d2, self.weights, omega=self.omega, grid=self.grid)


def scaled(surface, t):
    """image under the dilation x -> e^t x"""
    s = np.exp(t)
    return surface.copy_with(s*surface.points, s*surface.d1, s*surface.d2)


def transformed(surface, Q, b):
    """image under x -> Qx + b"""
    Q = np.asarray(Q, dtype=float)
    return surface.copy_with(surface.points @ Q.T + b, surface.d1 @ Q.T, surface.d2 @ Q.T)


def directions(theta, phi):
    st, ct, sp, cp = np.sin(theta), np.cos(theta), np.sin(phi), np.cos(phi)
    z = np.zeros_like(theta)
    om = _stack(st*cp, st*sp, ct)
    om_t = _stack(ct*cp, ct*sp, -st)
    om_p = _stack(-st*sp, st*cp, z)
    om_tt = -om
    om_tp = _stack(-ct*sp, ct*cp, z)
    om_pp = _stack(-st*cp, -st*sp, z)
    return om, om_t, om_p, om_tt, om_tp, om_pp


def radial_sample(center, R, coeffs, theta, phi, weights, basis=None, grid=None):
    """sample the radial graph at arbitrary (θ, φ) nodes

    Raises:
        ShapeError: if the radius function is not positive on the nodes
    """
    coeffs = np.asarray(coeffs, dtype=float)
    degree = sg.degree_of(coeffs.size)
    if basis is None:
        basis = sg.real_sph_harm(degree, theta, phi)
    rho = 1. + np.tensordot(coeffs, basis['Y'], axes=1)
    if not np.all(rho > 0):
        raise h.ShapeError('radius function not positive (min {:.3e})'.format(np.min(rho)))
    r = {k: np.tensordot(coeffs, basis[k], axes=1) for k in ('t', 'p', 'tt', 'tp', 'pp')}
    om, om_t, om_p, om_tt, om_tp, om_pp = directions(theta, phi)

    def e(a):
        return a[..., None]

    F = np.asarray(center, dtype=float) + R*e(rho)*om
    Ft = R*(e(r['t'])*om + e(rho)*om_t)
    Fp = R*(e(r['p'])*om + e(rho)*om_p)
    Ftt = R*(e(r['tt'])*om + 2*e(r['t'])*om_t + e(rho)*om_tt)
    Ftp = R*(e(r['tp'])*om + e(r['t'])*om_p + e(r['p'])*om_t + e(rho)*om_tp)
    Fpp = R*(e(r['pp'])*om + 2*e(r['p'])*om_p + e(rho)*om_pp)
    d1 = np.stack([Ft, Fp], axis=-2)
    d2 = np.stack([np.stack([Ftt, Ftp], axis=-2), np.stack([Ftp, Fpp], axis=-2)], axis=-3)
    sample = SurfaceSample(F, d1, d2, weights, omega=om, grid=grid)
    sample.rho = rho
    return sample


def radial_graph(center, R, coeffs, grid):
    """F(ω) = center + R(1 + Σ a_lm Y_lm(ω)) ω on a polar product grid"""
    if R <= 0:
        raise h.ShapeError('base radius has to be positive')
    coeffs = np.asarray(coeffs, dtype=float)
    degree = sg.degree_of(coeffs.size)
    return radial_sample(center, R, coeffs, grid.THETA, grid.PHI, grid.weights,
                         basis=grid.basis(degree), grid=grid)


class RadialShape(object):
    """center, base radius and real spherical-harmonic coefficients

    Args:
        center: ℝ³
        R: base radius
        coeffs: a_lm, length (degree+1)², zero for a round sphere
        n_theta, n_phi, rule: quadrature resolution
    """
    def __init__(self, center=(0., 0., 0.), R=1., coeffs=None, degree=4, n_theta=32, n_phi=64, rule='gauss'):
        self.center = np.asarray(center, dtype=float)
        self.R = float(R)
        if coeffs is None:
            coeffs = np.zeros(sg.n_coeffs(degree))
        self.coeffs = np.asarray(coeffs, dtype=float)
        self.degree = sg.degree_of(self.coeffs.size)
        self.n_theta, self.n_phi, self.rule = n_theta, n_phi, rule

    def __repr__(self):
        return 'RadialShape(center={}, R={:.6g}, degree={})'.format(self.center.tolist(), self.R, self.degree)

    @property
    def grid(self):
        return sg.get_grid(self.n_theta, self.n_phi, self.rule)

    def sample(self, grid=None):
        return radial_graph(self.center, self.R, self.coeffs, self.grid if grid is None else grid)

    def with_grid(self, n_theta, n_phi, rule):
        return RadialShape(self.center, self.R, self.coeffs, n_theta=n_theta, n_phi=n_phi, rule=rule)

    def to_vector(self):
        return np.concatenate([self.coeffs, self.center, [self.R]])

    def from_vector(self, vec):
        k = self.coeffs.size
        return RadialShape(vec[k:k+3], vec[k+3], vec[:k], n_theta=self.n_theta, n_phi=self.n_phi, rule=self.rule)

    def north_pole(self):
        rho0 = 1. + np.dot(self.coeffs, sg.pole_values(self.degree))
        return self.center + self.R*rho0*np.array([0., 0., 1.])

    def absorb_mean(self):
        """move a_00 into the base radius, the surface is unchanged"""
        i0 = sg.coeff_index(0, 0)
        fac = 1. + self.coeffs[i0]*sg.pole_values(0)[0]
        coeffs = self.coeffs/fac
        coeffs[i0] = 0.
        return RadialShape(self.center, self.R*fac, coeffs, n_theta=self.n_theta, n_phi=self.n_phi, rule=self.rule)
