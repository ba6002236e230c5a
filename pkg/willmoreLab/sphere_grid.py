#! /usr/bin/env python3
# coding=utf-8
"""
Polar product grids on the unit sphere, real spherical harmonics with
closed-form angular derivatives, and spectral differentiation on the
double Fourier sphere.
"""
"""
Author: willmoreLab developers
"""

import functools
import logging
import numpy as np
import scipy.special

from . import helpers as h

log = logging.getLogger('willmoreLab')

MAX_DEGREE = 16


def fejer_weights(n):
    """weights of Fejér's first rule for ∫_{-1}^{1} g(x) dx on x = cos θ_j,
    θ_j = (j + 1/2) π/n"""
    theta = (np.arange(n) + 0.5)*np.pi/n
    k = np.arange(1, n//2 + 1)
    s = np.sum(np.cos(2*np.outer(theta, k))/(4.*k**2 - 1.), axis=1)
    return theta, 2./n*(1. - 2.*s)


class SphereGrid(object):
    """polar (θ) times uniform azimuth (φ) grid

    Args:
        n_theta: number of polar nodes
        n_phi: number of azimuth nodes
        rule: ``'gauss'`` (Gauss-Legendre in cos θ) or ``'fejer'`` (Fejér's
            first rule, equispaced midpoints in θ, supports
            :func:`spectral_derivatives`)

    ``weights`` are parameter-space weights: ``sum(f*sqrt_det*weights)``
    integrates f against the area element whose density with respect to
    dθ dφ is ``sqrt_det``.
    """
    def __init__(self, n_theta=64, n_phi=128, rule='gauss'):
        if rule == 'gauss':
            x, wx = scipy.special.roots_legendre(n_theta)
            order = np.argsort(-x)
            theta, wx = np.arccos(x[order]), wx[order]
        elif rule == 'fejer':
            if n_phi % 2:
                raise ValueError('the double Fourier sphere needs an even n_phi')
            theta, wx = fejer_weights(n_theta)
        else:
            raise ValueError('unknown polar rule {}'.format(rule))
        self.rule = rule
        self.n_theta, self.n_phi = int(n_theta), int(n_phi)
        self.theta = theta
        self.phi = 2*np.pi*np.arange(n_phi)/n_phi
        self.THETA, self.PHI = np.meshgrid(self.theta, self.phi, indexing='ij')
        self.weights = np.repeat((wx/np.sin(theta))[:, None], n_phi, axis=1)*(2*np.pi/n_phi)
        self._basis = {}

    def __repr__(self):
        return 'SphereGrid({}, {}, {})'.format(self.n_theta, self.n_phi, self.rule)

    def basis(self, degree):
        """cached real spherical harmonics up to ``degree`` on the nodes"""
        if degree not in self._basis:
            self._basis[degree] = real_sph_harm(degree, self.THETA, self.PHI)
        return self._basis[degree]


@functools.lru_cache(maxsize=32)
def get_grid(n_theta, n_phi, rule='gauss'):
    """shared grid instances, so that basis evaluations are reused"""
    return SphereGrid(n_theta, n_phi, rule)


def n_coeffs(degree):
    return (degree + 1)**2


def coeff_index(l, m):
    """position of a_{lm} in the flat coefficient vector"""
    return l*l + l + m


def degree_of(n):
    degree = int(round(np.sqrt(n))) - 1
    if n_coeffs(degree) != n:
        raise h.ShapeError('{} is not a full set of coefficients'.format(n))
    return degree


def _normalization(l, m):
    return np.sqrt((2*l + 1)/(4*np.pi)*scipy.special.factorial(l - m)/scipy.special.factorial(l + m))


def real_sph_harm(degree, theta, phi, derivatives=True):
    """real orthonormal spherical harmonics and their angular derivatives

    Args:
        degree: maximal l
        theta, phi: arrays of equal shape, θ strictly inside (0, π) when
            derivatives are requested
        derivatives: also return the first and second derivatives

    Returns:
        dict with ``Y`` and (optionally) ``t``, ``p``, ``tt``, ``tp``, ``pp``,
        each of shape ``((degree+1)**2,) + theta.shape``, ordered as
        :func:`coeff_index`

    Y_lm = N_lm P_l^|m|(cos θ) · √2 cos(mφ) for m > 0, · √2 sin(|m|φ) for m < 0.
    """
    if degree > MAX_DEGREE or degree < 0:
        raise h.ShapeError('degree {} outside 0..{}'.format(degree, MAX_DEGREE))
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    x = np.cos(theta)
    sin_t = np.sin(theta)
    keys = ['Y', 't', 'p', 'tt', 'tp', 'pp'] if derivatives else ['Y']
    out = {k: np.zeros((n_coeffs(degree),) + theta.shape) for k in keys}

    for l in range(degree + 1):
        for m in range(0, l + 1):
            P = scipy.special.lpmv(m, l, x)
            norm = _normalization(l, m)
            if derivatives:
                P_prev = scipy.special.lpmv(m, l - 1, x) if l - 1 >= m else np.zeros_like(x)
                dP = (l*x*P - (l + m)*P_prev)/sin_t
                ddP = -x/sin_t*dP - (l*(l + 1) - m*m/sin_t**2)*P
            if m == 0:
                i = coeff_index(l, 0)
                out['Y'][i] = norm*P
                if derivatives:
                    out['t'][i] = norm*dP
                    out['tt'][i] = norm*ddP
                continue
            c, s = np.cos(m*phi), np.sin(m*phi)
            fac = np.sqrt(2.)*norm
            for sign, ang, dang, ddang in ((1, c, -m*s, -m*m*c), (-1, s, m*c, -m*m*s)):
                i = coeff_index(l, sign*m)
                out['Y'][i] = fac*P*ang
                if derivatives:
                    out['t'][i] = fac*dP*ang
                    out['p'][i] = fac*P*dang
                    out['tt'][i] = fac*ddP*ang
                    out['tp'][i] = fac*dP*dang
                    out['pp'][i] = fac*P*ddang
    return out


def pole_values(degree):
    """Y_lm at θ = 0 (only the zonal m = 0 terms survive)"""
    out = np.zeros(n_coeffs(degree))
    for l in range(degree + 1):
        out[coeff_index(l, 0)] = _normalization(l, 0)
    return out


def _extend(f, n_phi):
    return np.concatenate([f, np.roll(f[::-1], -(n_phi//2), axis=1)], axis=0)


def spectral_derivatives(f, grid):
    """∂_θ, ∂_φ, ∂²_θ, ∂_θ∂_φ, ∂²_φ of a smooth function on the sphere

    The Fejér grid is extended to θ ∈ (0, 2π) by f(2π − θ, φ) = f(θ, φ + π),
    which is smooth and periodic, and differentiated with the FFT. The
    Nyquist mode is dropped for odd derivative orders.

    Args:
        f: array of shape ``(n_theta, n_phi)``
        grid: :class:`SphereGrid` with ``rule='fejer'``

    Returns:
        dict with keys ``t``, ``p``, ``tt``, ``tp``, ``pp``
    """
    if grid.rule != 'fejer':
        raise ValueError('spectral derivatives need the Fejér grid')
    nt, npf = grid.n_theta, grid.n_phi
    E = np.fft.fft2(_extend(np.asarray(f, dtype=float), npf))
    kt = np.fft.fftfreq(2*nt, d=1./(2*nt))
    kp = np.fft.fftfreq(npf, d=1./npf)
    kt_odd = np.where(np.abs(kt) == nt, 0., kt)
    kp_odd = np.where(np.abs(kp) == npf//2, 0., kp)

    def back(mult):
        return np.real(np.fft.ifft2(E*mult))[:nt]

    return {'t': back(1j*kt_odd[:, None]),
            'p': back(1j*kp_odd[None, :]),
            'tt': back(-kt[:, None]**2),
            'tp': back(-(kt_odd[:, None]*kp_odd[None, :])),
            'pp': back(-kp[None, :]**2)}
