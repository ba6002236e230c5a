#! /usr/bin/env python3
# coding=utf-8
"""
Conserved field of the Willmore equation on conformal charts, its wedge
identities and the potentials L, S, R.

With ∇⊥ = (−∂_y, ∂_x) and the slot products of :mod:`willmoreLab.chart`:

- T = H∇n − 2∇H n − H n∧∇⊥n
- ∇⊥L = T
- ∇S = L·∇Φ, ∇R = ∇Φ∧L − 2H∇Φ
- ∇⊥R = ∇S n + ∇R∧n, ΔR = ∇S·∇⊥n + ∇R∧∇⊥n

H is H_avg throughout.
"""
"""
Author: willmoreLab developers
"""

import logging
import collections
import numpy as np

from . import helpers as h
from . import chart as ch
from . import geometry
from . import report

log = logging.getLogger('willmoreLab')

ANCHORS = {
    'gauss': '2K n + e^{−2λ} ∇n∧∇⊥n = 0',
    'help': '∇n + n∧∇⊥n + 2H∇Φ = 0',
    'wedgephi': '∇Φ∧n = ∇⊥Φ',
    'div_T': 'div T = 0 for Willmore immersions',
    'generalized': 'div T + 2e^{2λ}(Δ_g H + 2H(H² − K)) n = 0',
    'defect_L': 'T = ∇⊥L (path independence)',
    'defect_S': '∇S = L·∇Φ (path independence)',
    'defect_R': '∇R = ∇Φ∧L − 2H∇Φ (path independence)',
    'cons2a': '∇⊥L·∇Φ = 0',
    'cons2b': '∇Φ∧∇⊥L − 2∇⊥H·∇Φ = 0',
    'reconstruction': '∇⊥L − T = 0',
    'rs1': '∇⊥R = ∇S n + ∇R∧n',
    'rs2': 'ΔR = ∇S·∇⊥n + ∇R∧∇⊥n',
}

DEFAULT_TOL_FACTOR = 100.
DEFECT_FLOOR = 1e-12

Potential = collections.namedtuple('Potential', ['field', 'defect'])


def gauss_wedge_residual(bundle):
    e2l = ch.ChartField(bundle.chart, np.exp(2*bundle.lam.values))
    return 2*bundle.K*bundle.n + ch.wedge_slots(bundle.dn, ch.rotate_slots(bundle.dn))/e2l


def help_wedge_residual(bundle):
    return bundle.dn + ch.cross_each(bundle.n, ch.rotate_slots(bundle.dn)) + 2*bundle.H_avg*bundle.dphi


def wedgephi_residual(bundle):
    """∇Φ∧n − ∇⊥Φ, slot by slot"""
    phi_wedge_n = -ch.cross_each(bundle.n, bundle.dphi)
    return phi_wedge_n - ch.rotate_slots(bundle.dphi)


def conserved_field(bundle):
    H = bundle.H_avg
    grad_H = ch.grad(H)
    return (H*bundle.dn - 2*ch.outer_slots(grad_H, bundle.n)
            - H*ch.cross_each(bundle.n, ch.rotate_slots(bundle.dn)))


def conservation_residual(bundle, T=None):
    """
    Returns:
        (div T, div T + 2e^{2λ} E n) with E the flat Euler-Lagrange operator
    """
    T = conserved_field(bundle) if T is None else T
    div_T = ch.divergence(T)
    e2l = ch.ChartField(bundle.chart, np.exp(2*bundle.lam.values))
    return div_T, div_T + 2*e2l*geometry.el_residual_flat(bundle)*bundle.n


def residual_fields(bundle):
    div_T, generalized = conservation_residual(bundle)
    return {'gauss': gauss_wedge_residual(bundle), 'help': help_wedge_residual(bundle),
            'wedgephi': wedgephi_residual(bundle), 'div_T': div_T, 'generalized': generalized}


def conservation_checks(bundles, expect_willmore=True, target=geometry.IDENTITY_ORDER,
                        window=geometry.DEFAULT_WINDOW):
    """order checks of the wedge identities and the conservation law

    With ``expect_willmore=False`` the check on div T is a negative control
    and passes only if div T does not converge.
    """
    if isinstance(bundles, geometry.GeometryBundle):
        bundles = [bundles]
    fields = [residual_fields(b) for b in bundles]
    checks = []
    for name in ('gauss', 'help', 'wedgephi', 'generalized', 'div_T'):
        expect = expect_willmore if name == 'div_T' else True
        checks.append(report.order_check(name, ANCHORS[name], [f[name] for f in fields], target,
                                         window=window, expect_convergence=expect))
    return checks


def reconstruct_potential(F, base=None):
    """solve ∇⊥P = F by line integration from a base node

    ∂_x P = F_y and ∂_y P = −F_x are integrated with the cubic interval rule
    along x-then-y and y-then-x paths; P is their mean.

    Args:
        F: grad or grad3 field
        base: node index ``(i, j)``, the chart center if None

    Returns:
        :class:`Potential` with the field (NaN outside the finite block of F)
        and the path-consistency defect max|P_xy − P_yx|
    """
    chart = F.chart
    base = chart.center_node() if base is None else tuple(base)
    block = h.finite_block(F.finite_mask())
    i0 = base[0] - block[0].start
    j0 = base[1] - block[1].start
    v = F.values[block]
    if not (0 <= i0 < v.shape[0] and 0 <= j0 < v.shape[1]):
        raise h.RegionError('base node {} outside the finite block'.format(base))
    px = v[:, :, 1]
    py = -v[:, :, 0]
    hx, hy = chart.spacing

    P_xy = h.cumulative_integral(px[:, j0], hx, i0, axis=0)[:, None] + h.cumulative_integral(py, hy, j0, axis=1)
    P_yx = h.cumulative_integral(py[i0, :], hy, j0, axis=0)[None, :] + h.cumulative_integral(px, hx, i0, axis=0)
    out = np.full((chart.n, chart.n) + v.shape[3:], np.nan)
    out[block] = 0.5*(P_xy + P_yx)
    defect = float(np.max(np.abs(P_xy - P_yx))) if P_xy.size else 0.
    return Potential(ch.ChartField(chart, out), defect)


def integrate_gradient(G, base=None):
    """P with ∇P = G"""
    return reconstruct_potential(ch.rotate_slots(G), base=base)


class PotentialSet(object):
    """T and its potentials on the unwrapped chart

    ============== ====== ==============================================
     attribute      kind   description
    ============== ====== ==============================================
     T              grad3  conserved field
     L              vec3   ∇⊥L = T
     G_S            grad   L·∇Φ
     G_R            grad3  ∇Φ∧L − 2H∇Φ
     S              scalar ∇S = G_S
     R              vec3   ∇R = G_R
     defects        dict   path-consistency defects of L, S, R
     thresholds     dict   accepted defects
    ============== ====== ==============================================
    """
    def __init__(self, T, L, S, R, G_S, G_R, base, defects, thresholds):
        self.T, self.L, self.S, self.R = T, L, S, R
        self.G_S, self.G_R = G_S, G_R
        self.base = base
        self.defects = defects
        self.thresholds = thresholds

    def __repr__(self):
        return 'PotentialSet(base={}, defects={})'.format(self.base, self.defects)

    def fields(self):
        return {'L': self.L, 'S': self.S, 'R': self.R}


def defect_threshold(G, tol_factor=DEFAULT_TOL_FACTOR):
    """tol_factor·h⁴ relative to max|G| times the chart length"""
    chart = G.chart
    mag = G.norm().values
    scale = float(np.nanmax(mag)) if np.any(np.isfinite(mag)) else 0.
    return max(tol_factor*chart.h**4*scale*2*chart.extent, DEFECT_FLOOR)


def _shift_to(P, base):
    """P − P(base)"""
    if not (0 <= base[0] < P.chart.n and 0 <= base[1] < P.chart.n) or not np.all(np.isfinite(P.values[base])):
        raise h.RegionError('base node {} outside the finite block'.format(base))
    return ch.ChartField(P.chart, P.values - P.values[base])


def build_potentials(bundle, base=None, tol_factor=DEFAULT_TOL_FACTOR, check=True):
    """reconstruct L, S and R

    All three are integrated from the chart center, G_S and G_R are built
    from that L, and each potential is then shifted to vanish at ``base``.
    Another base therefore changes L, S, R by constants only.

    Raises:
        CurlDefectError: a path-consistency defect above its threshold,
            i.e. the input is not Willmore at the chart resolution
    """
    unwrapped = bundle.chart.unwrapped()
    reference = bundle.chart.center_node()
    base = reference if base is None else tuple(base)
    T = ch.ChartField(unwrapped, conserved_field(bundle).values)
    defects, thresholds = {}, {}

    def accept(name, G, pot):
        defects[name] = pot.defect
        thresholds[name] = defect_threshold(G, tol_factor)
        log.debug('defect {} {:.3e} (threshold {:.3e})'.format(name, pot.defect, thresholds[name]))
        if check and pot.defect > thresholds[name]:
            raise h.CurlDefectError('{} path defect {:.3e} above {:.3e} on {}'.format(
                name, pot.defect, thresholds[name], bundle.imm.name))
        return pot.field

    L = accept('L', T, reconstruct_potential(T, reference))
    dphi = ch.ChartField(unwrapped, bundle.dphi.values)
    H = ch.ChartField(unwrapped, bundle.H_avg.values)
    G_S = ch.ChartField(unwrapped, np.einsum('ijc,ijsc->ijs', L.values, dphi.values))
    G_R = -ch.cross_each(L, dphi) - 2*H*dphi
    S = accept('S', G_S, integrate_gradient(G_S, reference))
    R = accept('R', G_R, integrate_gradient(G_R, reference))
    L, S, R = (_shift_to(P, base) for P in (L, S, R))
    return PotentialSet(T, L, S, R, G_S, G_R, base, defects, thresholds)


def _on(chart, field):
    return ch.ChartField(chart, field.values)


def cons2_residuals(pset, bundle):
    """∇⊥L·∇Φ, ∇Φ∧∇⊥L − 2∇⊥H·∇Φ and the reconstruction error ∇⊥L − T"""
    chart = pset.L.chart
    dphi = _on(chart, bundle.dphi)
    perp_L = ch.grad_perp(pset.L)
    perp_H = ch.grad_perp(_on(chart, bundle.H_avg))
    return {'cons2a': ch.dot_slots(perp_L, dphi),
            'cons2b': ch.wedge_slots(dphi, perp_L) - 2*ch.dot_slots(perp_H, dphi),
            'reconstruction': perp_L - pset.T}


def rs_residuals(pset, bundle, source='potentials'):
    """residuals of ∇⊥R = ∇S n + ∇R∧n and ΔR = ∇S·∇⊥n + ∇R∧∇⊥n

    Args:
        source: ``'potentials'`` differentiates the reconstructed S and R,
            ``'generators'`` uses ∇S = G_S, ∇R = G_R and
            ΔR = ΔΦ∧L + Σ_s Φ_s∧∂_sL − 2∇H·∇Φ − 2HΔΦ with ∂_xL = T_y,
            ∂_yL = −T_x
    """
    chart = pset.L.chart
    n = _on(chart, bundle.n)
    perp_n = ch.rotate_slots(_on(chart, bundle.dn))
    if source == 'potentials':
        grad_S = ch.grad(pset.S)
        grad_R = ch.grad(pset.R)
        perp_R = ch.grad_perp(pset.R)
        lap_R = ch.laplacian_flat(pset.R)
    elif source == 'generators':
        grad_S, grad_R = pset.G_S, pset.G_R
        perp_R = ch.rotate_slots(grad_R)
        dphi = _on(chart, bundle.dphi).values
        T = pset.T.values
        lap_phi = _on(chart, bundle.lap_phi)
        H = _on(chart, bundle.H_avg)
        sum_slots = ch.ChartField(chart, np.cross(dphi[:, :, 0], T[:, :, 1]) - np.cross(dphi[:, :, 1], T[:, :, 0]))
        lap_R = (ch.wedge(lap_phi, pset.L) + sum_slots - 2*ch.dot_slots(ch.grad(H), _on(chart, bundle.dphi))
                 - 2*H*lap_phi)
    else:
        raise ValueError('unknown residual source {}'.format(source))
    R_wedge_n = -ch.cross_each(n, grad_R)
    return {'rs1': perp_R - ch.outer_slots(grad_S, n) - R_wedge_n,
            'rs2': lap_R - ch.dot_slots(grad_S, perp_n) - ch.wedge_slots(grad_R, perp_n)}


def potential_checks(bundles, source='potentials', base=None, tol_factor=DEFAULT_TOL_FACTOR,
                     defect_order=3., rs_order=2.5, window=geometry.DEFAULT_WINDOW):
    """build the potentials at each resolution and check the defects and the
    closure relations

    Returns:
        (list of :class:`~willmoreLab.report.CheckResult`, finest
        :class:`PotentialSet`)
    """
    if isinstance(bundles, geometry.GeometryBundle):
        bundles = [bundles]
    psets = [build_potentials(b, base=base, tol_factor=tol_factor) for b in bundles]
    spacings = [b.chart.h for b in bundles]
    checks = []
    for name in ('L', 'S', 'R'):
        checks.append(report.sequence_order_check(
            'defect_' + name, ANCHORS['defect_' + name], [p.defects[name] for p in psets], spacings, defect_order))
    cons2 = [cons2_residuals(p, b) for p, b in zip(psets, bundles)]
    for name in ('cons2a', 'cons2b', 'reconstruction'):
        checks.append(report.order_check(name, ANCHORS[name], [c[name] for c in cons2], defect_order,
                                         window=window))
    rs = [rs_residuals(p, b, source=source) for p, b in zip(psets, bundles)]
    for name in ('rs1', 'rs2'):
        checks.append(report.order_check(name, ANCHORS[name], [r[name] for r in rs], rs_order, window=window))
    return checks, psets[-1]
