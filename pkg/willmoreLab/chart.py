#! /usr/bin/env python3
# coding=utf-8
"""
Finite-difference calculus on a uniform square chart.

Fields are plain numpy arrays with the two node axes first
(indexing ``[i, j]`` for ``(x_i, y_j)``) wrapped in :class:`ChartField`
together with the chart they were sampled on. Trailing axes give the kind:

========== ================ ==========================================
 kind       trailing shape   examples
========== ================ ==========================================
 scalar     ``()``           λ, H, K
 vec3       ``(3,)``         Φ, n, L
 grad       ``(2,)``         ∇H, ∇S
 grad3      ``(2, 3)``       ∇Φ, ∇n, T
 tensor     ``(2, 2)``       covariant Hessians
========== ================ ==========================================

Derivatives use the 4th-order central stencil. On non-periodic axes the
stencil is only evaluated where it fits; the two outer node layers are set to
NaN, so every composed operator carries its own boundary loss.
"""
"""
Author: willmoreLab developers
"""

import logging
import collections
import numpy as np
import scipy.integrate
import scipy.interpolate

from . import helpers as h

log = logging.getLogger('willmoreLab')

STENCIL_RADIUS = 2

Rectangle = collections.namedtuple('Rectangle', ['x0', 'x1', 'y0', 'y1'])
Disk = collections.namedtuple('Disk', ['cx', 'cy', 'radius'])

KINDS = {(): 'scalar', (3,): 'vec3', (2,): 'grad', (2, 3): 'grad3', (2, 2): 'tensor'}


class Chart(object):
    """uniform square chart ``[-extent, extent]^2``

    Args:
        n: odd number of nodes per axis
        extent: half width of the domain
        margin: boundary layers excluded from interior masks
        periodic: per axis flag, periodic axes wrap around with period
            ``2*extent`` and node spacing ``2*extent/n``
    """
    def __init__(self, n, extent=1.0, margin=STENCIL_RADIUS, periodic=(False, False)):
        n = int(n)
        if n < 9:
            raise ValueError('n={} too small for the 4th-order stencil'.format(n))
        if not h.is_odd(n):
            raise ValueError('node count must be odd, got {}'.format(n))
        if extent <= 0:
            raise ValueError('extent has to be positive')
        if margin < STENCIL_RADIUS:
            raise ValueError('margin smaller than the stencil radius')
        self.n = n
        self.extent = float(extent)
        self.margin = int(margin)
        self.periodic = tuple(bool(p) for p in periodic)
        self.spacing = tuple(2*self.extent/n if p else 2*self.extent/(n-1)
                             for p in self.periodic)
        self.x = -self.extent + np.arange(n)*self.spacing[0]
        self.y = -self.extent + np.arange(n)*self.spacing[1]

    @property
    def h(self):
        return max(self.spacing)

    @property
    def key(self):
        return (self.n, self.extent, self.spacing)

    def __repr__(self):
        return 'Chart(n={}, extent={}, periodic={})'.format(self.n, self.extent, self.periodic)

    def same_nodes(self, other):
        return self.key == other.key

    def with_periodic(self, periodic):
        """same nodes and spacing, other periodicity flags"""
        new = Chart.__new__(Chart)
        new.__dict__.update(self.__dict__)
        new.periodic = tuple(bool(p) for p in periodic)
        return new

    def unwrapped(self):
        """the chart seen as a plain rectangle, no wrap-around stencils"""
        return self.with_periodic((False, False))

    def meet(self, other):
        if other is self:
            return self
        if not self.same_nodes(other):
            raise h.ChartMismatchError('fields sampled on {} and {}'.format(self, other))
        return self.with_periodic(tuple(a and b for a, b in zip(self.periodic, other.periodic)))

    def mesh(self):
        return np.meshgrid(self.x, self.y, indexing='ij')

    def center_node(self):
        return (self.n//2, self.n//2)

    def interior_mask(self, layers=None):
        layers = self.margin if layers is None else layers
        mask = np.ones((self.n, self.n), dtype=bool)
        if not self.periodic[0]:
            mask[:layers, :] = False
            mask[self.n-layers:, :] = False
        if not self.periodic[1]:
            mask[:, :layers] = False
            mask[:, self.n-layers:] = False
        return mask

    def window_mask(self, window=None):
        """nodes with ``|x| <= window*extent`` on the non-periodic axes"""
        X, Y = self.mesh()
        mask = np.ones((self.n, self.n), dtype=bool)
        if window is None:
            return mask
        tol = 1e-12*self.extent
        if not self.periodic[0]:
            mask &= np.abs(X) <= window*self.extent + tol
        if not self.periodic[1]:
            mask &= np.abs(Y) <= window*self.extent + tol
        return mask


class ChartField(object):
    """node values on a :class:`Chart`"""
    __array_priority__ = 100

    def __init__(self, chart, values):
        values = np.asarray(values, dtype=float)
        if values.shape[:2] != (chart.n, chart.n):
            raise h.ChartMismatchError('values of shape {} do not fit {}'.format(values.shape, chart))
        if values.shape[2:] not in KINDS:
            raise ValueError('unsupported field shape {}'.format(values.shape))
        self.chart = chart
        self.values = values

    @property
    def kind(self):
        return KINDS[self.values.shape[2:]]

    def __repr__(self):
        return 'ChartField({}, {})'.format(self.kind, self.chart)

    def slot(self, k):
        """the k-th chart slot of a grad or grad3 field"""
        if self.kind not in ('grad', 'grad3'):
            raise ValueError('{} field has no slots'.format(self.kind))
        return ChartField(self.chart, self.values[:, :, k])

    def norm(self):
        return ChartField(self.chart, h.node_norm(self.values))

    def finite_mask(self):
        flat = self.values.reshape(self.chart.n, self.chart.n, -1)
        return np.all(np.isfinite(flat), axis=-1)

    def _operands(self, other):
        if isinstance(other, ChartField):
            chart = self.chart.meet(other.chart)
            a, b = self.values, other.values
            if a.ndim < b.ndim:
                a = a.reshape(a.shape + (1,)*(b.ndim - a.ndim))
            elif b.ndim < a.ndim:
                b = b.reshape(b.shape + (1,)*(a.ndim - b.ndim))
            return chart, a, b
        return self.chart, self.values, other

    def __add__(self, other):
        chart, a, b = self._operands(other)
        return ChartField(chart, a + b)

    __radd__ = __add__

    def __sub__(self, other):
        chart, a, b = self._operands(other)
        return ChartField(chart, a - b)

    def __rsub__(self, other):
        chart, a, b = self._operands(other)
        return ChartField(chart, b - a)

    def __mul__(self, other):
        chart, a, b = self._operands(other)
        return ChartField(chart, a * b)

    __rmul__ = __mul__

    def __truediv__(self, other):
        chart, a, b = self._operands(other)
        return ChartField(chart, a / b)

    def __rtruediv__(self, other):
        chart, a, b = self._operands(other)
        return ChartField(chart, b / a)

    def __neg__(self):
        return ChartField(self.chart, -self.values)


def sample(chart, func):
    """sample ``func(X, Y)`` on the chart nodes"""
    X, Y = chart.mesh()
    return ChartField(chart, func(X, Y))


def _axis_index(axis):
    if axis in ('x', 0):
        return 0
    if axis in ('y', 1):
        return 1
    raise ValueError('axis has to be x or y, got {}'.format(axis))


def _diff(values, axis, step, periodic):
    if periodic:
        return (np.roll(values, 2, axis) - 8*np.roll(values, 1, axis)
                + 8*np.roll(values, -1, axis) - np.roll(values, -2, axis))/(12*step)
    n = values.shape[axis]
    if n < 2*STENCIL_RADIUS + 1:
        raise ValueError('n too small for stencil')
    v = np.moveaxis(values, axis, 0)
    out = np.full(v.shape, np.nan)
    out[2:-2] = (v[:-4] - 8*v[1:-3] + 8*v[3:-1] - v[4:])/(12*step)
    return np.moveaxis(out, 0, axis)


def derivative(f, axis):
    """4th-order central difference ∂_x or ∂_y of any field kind"""
    a = _axis_index(axis)
    return ChartField(f.chart, _diff(f.values, a, f.chart.spacing[a], f.chart.periodic[a]))


def grad(f):
    """(∂_x f, ∂_y f), slot axis inserted after the node axes"""
    return ChartField(f.chart, np.stack([derivative(f, 0).values, derivative(f, 1).values], axis=2))


def rotate_slots(F):
    """(F_x, F_y) -> (-F_y, F_x), i.e. grad_perp for gradient fields"""
    return ChartField(F.chart, np.stack([-F.values[:, :, 1], F.values[:, :, 0]], axis=2))


def grad_perp(f):
    """∇⊥f = (−∂_y f, ∂_x f)"""
    return rotate_slots(grad(f))


def divergence(F):
    """∂_x F_x + ∂_y F_y of a two-slot field"""
    return derivative(F.slot(0), 0) + derivative(F.slot(1), 1)


def laplacian_flat(f):
    return divergence(grad(f))


def laplacian_conformal(f, lam):
    """Δ_g f = e^{-2λ} Δf on a conformal chart

    λ has to be finite wherever the flat Laplacian of f is.
    """
    lap = laplacian_flat(f)
    needed = lap.finite_mask()
    if not np.all(np.isfinite(lam.values[needed])):
        raise ValueError('non-finite conformal factor')
    return ChartField(lap.chart.meet(lam.chart), np.exp(-2*lam.values)*lap.values)


def wedge(u, v):
    """cross product of ℝ³ vectors (arrays or vec3 fields)"""
    if isinstance(u, ChartField):
        chart, a, b = u._operands(v)
        return ChartField(chart, np.cross(a, b))
    if isinstance(v, ChartField):
        chart, b, a = v._operands(u)
        return ChartField(chart, np.cross(a, b))
    return np.cross(u, v)


def dot_slots(A, B):
    """A·B = Σ_slots ⟨A_slot, B_slot⟩"""
    chart = A.chart.meet(B.chart)
    if A.kind == 'grad3' and B.kind == 'grad3':
        return ChartField(chart, np.einsum('ijsc,ijsc->ij', A.values, B.values))
    if A.kind == 'grad' and B.kind == 'grad':
        return ChartField(chart, np.einsum('ijs,ijs->ij', A.values, B.values))
    if A.kind == 'grad' and B.kind == 'grad3':
        return ChartField(chart, np.einsum('ijs,ijsc->ijc', A.values, B.values))
    raise ValueError('cannot contract {} with {}'.format(A.kind, B.kind))


def wedge_slots(A, B):
    """A∧B = Σ_slots A_slot × B_slot"""
    chart = A.chart.meet(B.chart)
    return ChartField(chart, np.sum(np.cross(A.values, B.values), axis=2))


def cross_each(v, A):
    """v∧A taken slot by slot (vec3 with grad3 gives grad3)"""
    chart = v.chart.meet(A.chart)
    return ChartField(chart, np.cross(v.values[:, :, None, :], A.values))


def outer_slots(g, v):
    """grad field times vec3 field, e.g. ∇H n"""
    chart = g.chart.meet(v.chart)
    return ChartField(chart, g.values[:, :, :, None]*v.values[:, :, None, :])


def inner(u, v):
    """pointwise ⟨u, v⟩ over the last axis"""
    chart = u.chart.meet(v.chart)
    return ChartField(chart, np.sum(u.values*v.values, axis=-1))


def residual_norms(field, window=None):
    """discrete L² and max norm over the finite nodes inside the window

    Returns:
        dict with ``l2``, ``max`` and ``count``
    """
    chart = field.chart
    mask = field.finite_mask() & chart.window_mask(window)
    if not np.any(mask):
        raise h.RegionError('no finite nodes inside window {}'.format(window))
    mag = h.node_norm(np.where(mask.reshape(mask.shape + (1,)*(field.values.ndim-2)), field.values, 0.))
    cell = chart.spacing[0]*chart.spacing[1]
    return {'l2': float(np.sqrt(np.sum(mag[mask]**2)*cell)),
            'max': float(np.max(mag[mask])),
            'count': int(np.count_nonzero(mask))}


def _block_coords(chart, block):
    return chart.x[block[0]], chart.y[block[1]]


def _axis_integral(values, coords, step, periodic, axis):
    if periodic:
        return np.sum(values, axis=axis)*step
    return scipy.integrate.simpson(values, x=coords, axis=axis)


def interpolator(field):
    """bicubic interpolant of a scalar field on its finite node block"""
    chart = field.chart
    block = h.finite_block(field.finite_mask())
    xb, yb = _block_coords(chart, block)
    return scipy.interpolate.RectBivariateSpline(xb, yb, field.values[block], kx=3, ky=3, s=0)


def polar_nodes(disk, n_r=64, n_phi=128):
    """Gauss-Legendre (radius) times trapezoid (angle) nodes on a disk

    Returns:
        X, Y, weights with ``sum(weights*f(X, Y)) ≈ ∫_disk f dx dy``
    """
    xi, wi = np.polynomial.legendre.leggauss(n_r)
    r = 0.5*disk.radius*(xi + 1.)
    wr = 0.5*disk.radius*wi*r
    ang = 2*np.pi*np.arange(n_phi)/n_phi
    R, A = np.meshgrid(r, ang, indexing='ij')
    W = np.repeat(wr[:, None], n_phi, axis=1)*(2*np.pi/n_phi)
    return disk.cx + R*np.cos(A), disk.cy + R*np.sin(A), W


def _inside_block(chart, block, x0, x1, y0, y1):
    xb, yb = _block_coords(chart, block)
    tol = 1e-9*chart.h
    return (x0 >= xb[0] - tol and x1 <= xb[-1] + tol and y0 >= yb[0] - tol and y1 <= yb[-1] + tol)


def _node_aligned(coords, a, b, step):
    i0 = np.argmin(np.abs(coords - a))
    i1 = np.argmin(np.abs(coords - b))
    ok = abs(coords[i0] - a) < 1e-9*step and abs(coords[i1] - b) < 1e-9*step and i1 - i0 >= 2
    return ok, i0, i1


def integrate(f, lam=None, region=None, method='auto'):
    """∫ f e^{2λ} dx over a region of the chart

    Args:
        f: scalar field
        lam: conformal factor field, ``None`` for λ ≡ 0
        region: ``None`` for the whole finite chart, a :class:`Rectangle` or a
            :class:`Disk`
        method: for disks ``'auto'``/``'polar'`` (bicubic interpolant and a
            polar Gauss rule) or ``'masked'`` (node masking with boundary
            weight 1/2, first order)

    Returns:
        float

    Node-aligned rectangles and full non-periodic axes use composite Simpson,
    periodic axes the trapezoid rule.
    """
    if f.kind != 'scalar':
        raise ValueError('integrate expects a scalar field, got {}'.format(f.kind))
    chart = f.chart
    values = f.values
    if lam is not None:
        chart = chart.meet(lam.chart)
        values = values*np.exp(2*lam.values)
    integrand = ChartField(chart, values)
    block = h.finite_block(integrand.finite_mask())
    xb, yb = _block_coords(chart, block)
    vb = values[block]

    if region is None:
        full = [block[a].start == 0 and block[a].stop == chart.n for a in (0, 1)]
        per = [chart.periodic[a] and full[a] for a in (0, 1)]
        partial = _axis_integral(vb, xb, chart.spacing[0], per[0], axis=0)
        return float(_axis_integral(partial, yb, chart.spacing[1], per[1], axis=0))

    if isinstance(region, Rectangle):
        if not _inside_block(chart, block, region.x0, region.x1, region.y0, region.y1):
            raise h.RegionError('rectangle {} outside the valid chart'.format(region))
        okx, i0, i1 = _node_aligned(xb, region.x0, region.x1, chart.spacing[0])
        oky, j0, j1 = _node_aligned(yb, region.y0, region.y1, chart.spacing[1])
        if okx and oky:
            sub = vb[i0:i1+1, j0:j1+1]
            partial = scipy.integrate.simpson(sub, x=xb[i0:i1+1], axis=0)
            return float(scipy.integrate.simpson(partial, x=yb[j0:j1+1]))
        spline = scipy.interpolate.RectBivariateSpline(xb, yb, vb, kx=3, ky=3, s=0)
        return float(spline.integral(region.x0, region.x1, region.y0, region.y1))

    if isinstance(region, Disk):
        if not _inside_block(chart, block, region.cx - region.radius, region.cx + region.radius,
                             region.cy - region.radius, region.cy + region.radius):
            raise h.RegionError('disk {} outside the valid chart'.format(region))
        if method == 'masked':
            X, Y = chart.mesh()
            dist = np.sqrt((X[block] - region.cx)**2 + (Y[block] - region.cy)**2)
            weight = np.where(dist < region.radius, 1., 0.)
            weight[np.abs(dist - region.radius) <= 0.5*chart.h] = 0.5
            return float(np.sum(weight*vb)*chart.spacing[0]*chart.spacing[1])
        if method not in ('auto', 'polar'):
            raise ValueError('unknown disk quadrature {}'.format(method))
        spline = scipy.interpolate.RectBivariateSpline(xb, yb, vb, kx=3, ky=3, s=0)
        X, Y, W = polar_nodes(region)
        return float(np.sum(W*spline.ev(X, Y)))

    raise ValueError('unknown region {}'.format(region))
