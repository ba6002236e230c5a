#! /usr/bin/env python3
# coding=utf-8
"""
Curvature of conformal charts and of parametrized surfaces in an ambient
metric.

Two conventions for the mean curvature are carried side by side:

========== =================== =============================================
 name       definition          consumers
========== =================== =============================================
 H_avg      ½(h11 + h22)        conservation laws on charts
 H_tr       h11 + h22           energies, ambient metrics, minimizer
========== =================== =============================================

The chart frame is e1 = Φx/|Φx|, n = Φx∧Φy/|Φx∧Φy|, e2 = n∧e1, so that
e1∧e2 = n, and h_ij = −e^{−λ}⟨e_j, ∂_i n⟩.
"""
"""
Author: willmoreLab developers
"""

import logging
import numpy as np

from . import helpers as h
from . import chart as ch
from . import surfaces
from . import report

log = logging.getLogger('willmoreLab')

DEFAULT_WINDOW = 0.6
IDENTITY_ORDER = 3.5


class GeometryBundle(object):
    """per node curvature data of a conformal chart

    ============ ======== =================================================
     attribute    kind     description
    ============ ======== =================================================
     lam          scalar   conformal factor λ = log|Φx|
     phi          vec3     Φ
     dphi         grad3    ∇Φ
     lap_phi      vec3     ΔΦ
     e1, e2, n    vec3     orthonormal frame, n = e1∧e2
     dn           grad3    ∇n
     h11 .. h22   scalar   second fundamental form, h12 symmetrized
     h12_asym     scalar   difference of the two off-diagonal formulas
     H_avg, H_tr  scalar   mean curvature in both conventions
     K            scalar   Gauss curvature
     A0sq         scalar   |Å|² in the trace convention
    ============ ======== =================================================
    """
    def __init__(self, chart, imm, source, **fields):
        self.chart = chart
        self.imm = imm
        self.source = source
        for key, value in fields.items():
            setattr(self, key, value)

    def __repr__(self):
        return 'GeometryBundle({}, {}, {})'.format(self.imm.name, self.chart, self.source)

    def fields(self):
        """the scalar and vector fields worth dumping"""
        return {k: getattr(self, k) for k in ('lam', 'n', 'H_avg', 'H_tr', 'K', 'A0sq')}


def _normalize(v):
    norm = np.linalg.norm(v, axis=-1)
    return v/norm[..., None], norm


def _dot(a, b):
    return np.sum(a*b, axis=-1)


def evaluate_bundle(imm, chart=None, derivative_source='analytic', n=129):
    """evaluate frame and curvatures of an immersion on a chart

    Args:
        imm: :class:`~willmoreLab.surfaces.AnalyticImmersion`
        chart: chart to sample on, ``imm.default_chart(n)`` if None
        derivative_source: ``'analytic'`` uses the closed-form first and
            second derivatives, ``'finite-difference'`` differentiates the
            sampled Φ (and n) with the chart stencils

    Returns:
        :class:`GeometryBundle`

    Raises:
        ConformalityError: conformality defect above 1e-8
        DegenerateGeometryError: |Φx| below 1e-12 somewhere
    """
    chart = imm.default_chart(n) if chart is None else chart
    defect = surfaces.conformality_defect(imm, chart)
    if defect > surfaces.CONFORMALITY_THRESHOLD:
        raise h.ConformalityError('{} has conformality defect {:.2e}'.format(imm.name, defect))
    phi, dphi, ddphi, _ = surfaces.sample_on_chart(imm, chart)
    phi_f = ch.ChartField(chart, phi)

    if derivative_source == 'analytic':
        d = dphi
        lap_phi = ddphi[..., 0, 0, :] + ddphi[..., 1, 1, :]
    elif derivative_source == 'finite-difference':
        d = ch.grad(phi_f).values
        lap_phi = ch.laplacian_flat(phi_f).values
    else:
        raise ValueError('unknown derivative source {}'.format(derivative_source))

    px, py = d[..., 0, :], d[..., 1, :]
    e1, len_x = _normalize(px)
    finite = np.isfinite(len_x)
    if np.any(len_x[finite] < 1e-12):
        raise h.DegenerateGeometryError('|Φx| vanishes on {}'.format(imm.name))
    N = np.cross(px, py)
    n_vec, len_N = _normalize(N)
    e2 = np.cross(n_vec, e1)
    lam = np.log(len_x)

    if derivative_source == 'analytic':
        dN = np.stack([np.cross(ddphi[..., 0, 0, :], py) + np.cross(px, ddphi[..., 0, 1, :]),
                       np.cross(ddphi[..., 0, 1, :], py) + np.cross(px, ddphi[..., 1, 1, :])], axis=-2)
        proj = np.sum(n_vec[..., None, :]*dN, axis=-1)
        dn = (dN - proj[..., None]*n_vec[..., None, :])/len_N[..., None, None]
    else:
        dn = ch.grad(ch.ChartField(chart, n_vec)).values

    e_lam = np.exp(-lam)
    h11 = -e_lam*_dot(e1, dn[..., 0, :])
    h22 = -e_lam*_dot(e2, dn[..., 1, :])
    h12a = -e_lam*_dot(e2, dn[..., 0, :])
    h12b = -e_lam*_dot(e1, dn[..., 1, :])
    h12 = 0.5*(h12a + h12b)

    f = lambda v: ch.ChartField(chart, v)
    H_avg = 0.5*(h11 + h22)
    bundle = GeometryBundle(
        chart, imm, derivative_source,
        lam=f(lam), phi=phi_f, dphi=f(d), lap_phi=f(lap_phi), e1=f(e1), e2=f(e2), n=f(n_vec),
        dn=f(dn), h11=f(h11), h12=f(h12), h22=f(h22), h12_asym=f(h12a - h12b),
        H_avg=f(H_avg), H_tr=f(2*H_avg), K=f(h11*h22 - h12**2),
        A0sq=f(0.5*(h11 - h22)**2 + 2*h12**2))
    log.debug('bundle {} defect {:.2e} max|h12 asym| {:.2e}'.format(
        bundle, defect, np.nanmax(np.abs(h12a - h12b))))
    return bundle


def identity_residuals(bundle):
    """residual fields of ΔΦ = 2e^{2λ}H n, H = −(e^{−2λ}/2)∇n·∇Φ and ∇Φ·∇Φ = 2e^{2λ}

    Returns:
        dict name -> ChartField
    """
    e2l = ch.ChartField(bundle.chart, np.exp(2*bundle.lam.values))
    return {
        'laplace_phi': bundle.lap_phi - 2*e2l*bundle.H_avg*bundle.n,
        'mean_curvature': bundle.H_avg + 0.5/e2l*ch.dot_slots(bundle.dn, bundle.dphi),
        'conformal_metric': ch.dot_slots(bundle.dphi, bundle.dphi) - 2*e2l,
    }


IDENTITY_ANCHORS = {
    'laplace_phi': 'ΔΦ = 2e^{2λ} H n',
    'mean_curvature': 'H = −(e^{−2λ}/2) ∇n·∇Φ',
    'conformal_metric': '∇Φ·∇Φ = 2e^{2λ}',
}


def identity_checks(bundles, target=IDENTITY_ORDER, window=DEFAULT_WINDOW):
    """convergence checks of the chart identities

    Args:
        bundles: one bundle or a list ordered coarse to fine
        target: required observed order
        window: fraction of the chart extent entering the norms

    Returns:
        list of :class:`~willmoreLab.report.CheckResult`
    """
    if isinstance(bundles, GeometryBundle):
        bundles = [bundles]
    residuals = [identity_residuals(b) for b in bundles]
    return [report.order_check(name, IDENTITY_ANCHORS[name], [r[name] for r in residuals], target, window=window)
            for name in IDENTITY_ANCHORS]


def el_residual_flat(bundle):
    """Δ_g H + 2H(H² − K) with Δ_g = e^{−2λ}Δ, H = H_avg"""
    H = bundle.H_avg
    return ch.laplacian_conformal(H, bundle.lam) + 2*H*(H*H - bundle.K)


def chart_willmore_energy(bundle, region=None):
    """½∫H_tr² dμ over the chart (or a region of it)"""
    return 0.5*ch.integrate(bundle.H_tr*bundle.H_tr, lam=bundle.lam, region=region)


def chart_area(bundle, region=None):
    return ch.integrate(ch.ChartField(bundle.chart, np.ones((bundle.chart.n, bundle.chart.n))),
                        lam=bundle.lam, region=region)


def _metric_or_flat(g):
    if g is None:
        from .ambient import euclidean_metric
        return euclidean_metric()
    return g


class AmbientGeometry(object):
    """induced geometry of a :class:`~willmoreLab.surfaces.SurfaceSample` in
    an ambient metric, all arrays over the sample nodes

    ============ ================ =========================================
     attribute    shape            description
    ============ ================ =========================================
     g            (..., 3, 3)      ambient metric at the points
     gamma        (..., 3, 3, 3)   Γ^α_βγ at the points
     gbar         (..., 2, 2)      induced metric
     gbar_inv     (..., 2, 2)      its inverse
     sqrt_det     (...)            √det ḡ
     nu           (..., 3)         g-unit normal (outward for radial graphs)
     nu_flat      (..., 3)         g ν
     hess_F       (..., 2, 2, 3)   ∇_{F_i}F_j = F_ij + Γ(F_i, F_j)
     h            (..., 2, 2)      second fundamental form
     H            (...)            mean curvature, trace convention
     A_sq         (...)            |A|²
     A0_sq        (...)            |Å|² = |A|² − H²/2
     dmu          (...)            quadrature weights of the area measure
    ============ ================ =========================================
    """
    def __init__(self, surface, g):
        self.surface = surface
        self.metric = g
        x = surface.points
        F1, F2 = surface.d1, surface.d2
        self.g = g.metric(x)
        self.gamma = g.christoffel(x)
        gF = np.einsum('...ab,...jb->...ja', self.g, F1)
        self.gbar = np.einsum('...ia,...ja->...ij', F1, gF)
        det = self.gbar[..., 0, 0]*self.gbar[..., 1, 1] - self.gbar[..., 0, 1]**2
        scale = (self.gbar[..., 0, 0] + self.gbar[..., 1, 1])**2
        if np.any(det <= 1e-14*scale):
            raise h.DegenerateGeometryError('induced metric degenerate at {} nodes'.format(
                np.count_nonzero(det <= 1e-14*scale)))
        self.sqrt_det = np.sqrt(det)
        self.gbar_inv = np.stack([np.stack([self.gbar[..., 1, 1], -self.gbar[..., 0, 1]], axis=-1),
                                  np.stack([-self.gbar[..., 0, 1], self.gbar[..., 0, 0]], axis=-1)],
                                 axis=-2)/det[..., None, None]
        N = np.cross(F1[..., 0, :], F1[..., 1, :])
        g_inv = np.linalg.inv(self.g)
        nu = np.einsum('...ab,...b->...a', g_inv, N)
        self.nu = nu/np.sqrt(np.sum(N*nu, axis=-1))[..., None]
        self.nu_flat = np.einsum('...ab,...b->...a', self.g, self.nu)
        self.hess_F = F2 + np.einsum('...abc,...ib,...jc->...ija', self.gamma, F1, F1)
        self.h = -np.einsum('...ija,...a->...ij', self.hess_F, self.nu_flat)
        self.H = np.einsum('...ij,...ij->...', self.gbar_inv, self.h)
        h_up = np.einsum('...ik,...kl,...lj->...ij', self.gbar_inv, self.h, self.gbar_inv)
        self.h_up = h_up
        self.A_sq = np.einsum('...ij,...ij->...', h_up, self.h)
        self.A0_sq = self.A_sq - 0.5*self.H**2
        self.dmu = self.sqrt_det*surface.weights

    def integral(self, values):
        return float(np.sum(values*self.dmu))

    @property
    def area(self):
        return float(np.sum(self.dmu))

    @property
    def willmore(self):
        return 0.5*self.integral(self.H**2)


def intrinsic_operators(geo, d1, d2):
    """covariant Hessian of a function on the surface from its parameter
    derivatives

    Args:
        geo: :class:`AmbientGeometry` of the sample
        d1: ∂_i f, shape ``(..., 2)``
        d2: ∂_i∂_j f, shape ``(..., 2, 2)``

    Returns:
        dict with ``hess``, ``hess_sq`` (|∇²f|²), ``grad_sq`` (|∇f|²) and
        ``laplacian`` (tr_ḡ ∇²f)
    """
    F1, F2 = geo.surface.d1, geo.surface.d2
    dg = geo.metric.dmetric(geo.surface.points)
    # [i, j, k] = ∂_k ḡ_ij
    d_gbar = (np.einsum('...abc,...kc,...ia,...jb->...ijk', dg, F1, F1, F1)
              + np.einsum('...ika,...ab,...jb->...ijk', F2, geo.g, F1)
              + np.einsum('...ia,...ab,...jkb->...ijk', F1, geo.g, F2))
    low = 0.5*(np.einsum('...lji->...lij', d_gbar) + np.einsum('...ilj->...lij', d_gbar)
               - np.einsum('...ijl->...lij', d_gbar))
    gam = np.einsum('...kl,...lij->...kij', geo.gbar_inv, low)
    hess = d2 - np.einsum('...kij,...k->...ij', gam, d1)
    gi = geo.gbar_inv
    return {'hess': hess,
            'hess_sq': np.einsum('...ik,...jl,...ij,...kl->...', gi, gi, hess, hess),
            'grad_sq': np.einsum('...ij,...i,...j->...', gi, d1, d1),
            'laplacian': np.einsum('...ij,...ij->...', gi, hess)}


def ambient_geometry(F, g=None):
    """:class:`AmbientGeometry` of the sample F, Euclidean if g is None"""
    return AmbientGeometry(F, _metric_or_flat(g))


def mean_curvature_ambient(F, g=None):
    """
    Returns:
        (H_tr, ν) per node
    """
    geo = ambient_geometry(F, g)
    return geo.H, geo.nu


def willmore_energy(F, g=None):
    """½∫H_tr² dμ"""
    return ambient_geometry(F, g).willmore


def area(F, g=None):
    return ambient_geometry(F, g).area


def curvature_integral(F, g=None):
    """∫|A|² dμ"""
    geo = ambient_geometry(F, g)
    return geo.integral(geo.A_sq)


class SmoothField(object):
    """ambient vector field X with analytic Jacobian and Hessian

    Args:
        value, jacobian, hessian: closures of points (..., 3) returning
            X^α, ∂_β X^α and ∂_β∂_γ X^α
        name: label for reports
    """
    def __init__(self, value, jacobian, hessian, name='field'):
        self.value = value
        self.jacobian = jacobian
        self.hessian = hessian
        self.name = name

    def __repr__(self):
        return 'SmoothField({})'.format(self.name)


def constant_field(b):
    b = np.asarray(b, dtype=float)
    return SmoothField(lambda x: np.broadcast_to(b, x.shape).copy(),
                       lambda x: np.zeros(x.shape + (3,)),
                       lambda x: np.zeros(x.shape + (3, 3)), name='constant {}'.format(b.tolist()))


def position_field():
    """X(x) = x, generator of the dilations"""
    return SmoothField(lambda x: np.array(x, dtype=float),
                       lambda x: np.broadcast_to(np.eye(3), x.shape + (3,)).copy(),
                       lambda x: np.zeros(x.shape + (3, 3)), name='position')


def polynomial_sine_field(b, A, C, s, k, p, name='polynomial+sine'):
    """X = b + A x + ½C(x, x) + s sin(k·x + p)"""
    b, A, C, s, k = (np.asarray(v, dtype=float) for v in (b, A, C, s, k))

    def value(x):
        return (b + np.einsum('ab,...b->...a', A, x) + 0.5*np.einsum('abc,...b,...c->...a', C, x, x)
                + s*np.sin(x @ k + p)[..., None])

    def jacobian(x):
        return (A + np.einsum('abc,...c->...ab', C, x)
                + np.cos(x @ k + p)[..., None, None]*np.einsum('a,b->ab', s, k))

    def hessian(x):
        return C - np.sin(x @ k + p)[..., None, None, None]*np.einsum('a,b,c->abc', s, k, k)

    return SmoothField(value, jacobian, hessian, name=name)


def sine_square_field():
    """X = (sin x₂, 0, x₁²)"""
    def value(x):
        return np.stack([np.sin(x[..., 1]), np.zeros_like(x[..., 0]), x[..., 0]**2], axis=-1)

    def jacobian(x):
        out = np.zeros(x.shape + (3,))
        out[..., 0, 1] = np.cos(x[..., 1])
        out[..., 2, 0] = 2*x[..., 0]
        return out

    def hessian(x):
        out = np.zeros(x.shape + (3, 3))
        out[..., 0, 1, 1] = -np.sin(x[..., 1])
        out[..., 2, 0, 0] = 2.
        return out

    return SmoothField(value, jacobian, hessian, name='(sin x2, 0, x1^2)')


def random_field(rng, scale=0.3):
    """randomized :func:`polynomial_sine_field` with C symmetric in its lower
    indices"""
    C = rng.normal(size=(3, 3, 3))*scale
    C = 0.5*(C + C.transpose(0, 2, 1))
    return polynomial_sine_field(rng.normal(size=3)*scale, rng.normal(size=(3, 3))*scale, C,
                                 rng.normal(size=3)*scale, rng.normal(size=3), rng.uniform(0, 2*np.pi),
                                 name='random')


def displace(F, X, t):
    """the sample of F + tX(F) with exact chain-rule derivatives"""
    x = F.points
    J = X.jacobian(x)
    D2 = X.hessian(x)
    d1 = F.d1 + t*np.einsum('...ab,...ib->...ia', J, F.d1)
    d2 = F.d2 + t*(np.einsum('...abc,...ib,...jc->...ija', D2, F.d1, F.d1)
                   + np.einsum('...ab,...ijb->...ija', J, F.d2))
    return F.copy_with(x + t*X.value(x), d1, d2)


def first_variation(F, X, g=None):
    """δ_X W for W = ½∫H² dμ

    ∫ −H ḡ^{ij} g(∇²X(F_i, F_j), ν) − 2H h^{kl} g(∇_{F_k}X, F_l)
      + H² g(∇_ν X, ν) − H Ric(X, ν) + ½H² div_Σ X  dμ

    Args:
        F: surface sample
        X: :class:`SmoothField`
        g: ambient metric, Euclidean if None
    """
    g = _metric_or_flat(g)
    geo = AmbientGeometry(F, g)
    x = F.points
    Xv = X.value(x)
    dX = X.jacobian(x)
    ddX = X.hessian(x)
    gam = geo.gamma
    dgam = g.dchristoffel(x)
    # nabla_b X^a
    nX = dX + np.einsum('...abc,...c->...ab', gam, Xv)
    # d_b (nabla_c X^a)
    d_nX = (np.einsum('...acb->...abc', ddX)
            + np.einsum('...acdb,...d->...abc', dgam, Xv)
            + np.einsum('...acd,...db->...abc', gam, dX))
    # nabla_b nabla_c X^a
    nnX = (d_nX + np.einsum('...abd,...dc->...abc', gam, nX)
           - np.einsum('...dbc,...ad->...abc', gam, nX))
    F1 = F.d1
    hess_term = np.einsum('...ij,...abc,...ib,...jc,...a->...', geo.gbar_inv, nnX, F1, F1, geo.nu_flat)
    nX_F = np.einsum('...ab,...kb->...ka', nX, F1)
    gradX_F = np.einsum('...ka,...ab,...lb->...kl', nX_F, geo.g, F1)
    h_term = np.einsum('...kl,...kl->...', geo.h_up, gradX_F)
    nu_term = np.einsum('...ab,...b,...a->...', nX, geo.nu, geo.nu_flat)
    ric = g.ricci(x)
    ric_term = np.einsum('...ab,...a,...b->...', ric, Xv, geo.nu)
    div = np.einsum('...kl,...kl->...', geo.gbar_inv, gradX_F)
    H = geo.H
    integrand = -H*hess_term - 2*H*h_term + H**2*nu_term - H*ric_term + 0.5*H**2*div
    return geo.integral(integrand)


def first_variation_fd(F, X, g=None, t=1e-4):
    """central difference (W(F + tX) − W(F − tX))/2t"""
    g = _metric_or_flat(g)
    return (willmore_energy(displace(F, X, t), g) - willmore_energy(displace(F, X, -t), g))/(2*t)
