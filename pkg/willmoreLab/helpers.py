#! /usr/bin/env python3
# coding=utf-8
"""
Collection of common helper functions and the error types of the package.
"""
"""
Author: willmoreLab developers
"""

import numpy as np
from numba import jit


class ChartMismatchError(ValueError):
    """fields sampled on different charts were combined"""


class ConformalityError(ValueError):
    """an immersion is not conformal on the sampled nodes"""


class DegenerateGeometryError(ValueError):
    """vanishing tangent vectors or degenerate induced metric"""


class RegionError(ValueError):
    """integration region, base point or bump support outside the valid chart"""


class CurlDefectError(ValueError):
    """path-consistency defect above the Willmore-quality threshold"""


class MetricError(ValueError):
    """invalid curvature tensor or metric kind not allowed for an operation"""


class ValidityError(ValueError):
    """surface leaves the validity ball of a metric"""


class AreaBandError(ValueError):
    """area outside the admissible band (a/2, 3a/2)"""


class ShapeError(ValueError):
    """radial shape with non-positive radius function or unsupported degree"""


class LineSearchError(RuntimeError):
    """backtracking did not find an admissible step"""


class HypothesisError(ValueError):
    """a precondition on the surface itself fails (not closed, center not on it)"""


class ConfigError(ValueError):
    """malformed run configuration"""


def is_odd(n):
    return int(n) % 2 == 1


def observed_order(err_coarse, err_fine, h_coarse, h_fine, floor=1e-13):
    """observed convergence order from errors at two spacings

    Args:
        err_coarse, err_fine: error norms at the coarse and the fine resolution
        h_coarse, h_fine: the corresponding grid spacings
        floor: errors below this value count as exact

    Returns:
        the order as float, ``None`` if both errors are below the floor
    """
    if err_coarse <= floor and err_fine <= floor:
        return None
    if err_fine <= 0.:
        return np.inf
    return float(np.log(err_coarse/err_fine)/np.log(h_coarse/h_fine))


def node_norm(values, n_lead=2):
    """euclidean norm over all trailing (component) axes of a node array"""
    flat = values.reshape(values.shape[:n_lead] + (-1,))
    return np.sqrt(np.sum(flat**2, axis=-1))


def finite_block(mask):
    """slices of the rectangular block where mask is True

    The NaN margins produced by interior-only stencils are bands along the
    chart boundary, so the finite part of a field is a rectangle.
    """
    rows = np.where(mask.any(axis=1))[0]
    cols = np.where(mask.any(axis=0))[0]
    if rows.size == 0 or cols.size == 0:
        raise RegionError('field has no finite nodes')
    block = (slice(rows[0], rows[-1]+1), slice(cols[0], cols[-1]+1))
    if not np.all(mask[block]):
        raise RegionError('finite nodes do not form a rectangle')
    return block


def interval_integrals(values, h, axis=0):
    """integrals over the grid intervals [x_k, x_k+1] along an axis

    Cubic interpolation through four neighbouring nodes, one-sided at the
    two end intervals; fourth order for smooth integrands.
    """
    v = np.moveaxis(values, axis, 0)
    n = v.shape[0]
    if n < 4:
        raise ValueError('at least 4 nodes needed for the cubic line rule')
    out = np.empty((n-1,) + v.shape[1:])
    out[1:-1] = (-v[:-3] + 13.*v[1:-2] + 13.*v[2:-1] - v[3:]) * h/24.
    out[0] = (9.*v[0] + 19.*v[1] - 5.*v[2] + v[3]) * h/24.
    out[-1] = (v[-4] - 5.*v[-3] + 19.*v[-2] + 9.*v[-1]) * h/24.
    return np.moveaxis(out, 0, axis)


def cumulative_integral(values, h, base, axis=0):
    """line integral from node ``base`` to every node along ``axis``"""
    pieces = np.moveaxis(interval_integrals(values, h, axis=axis), axis, 0)
    n = pieces.shape[0] + 1
    out = np.zeros((n,) + pieces.shape[1:])
    if base < n-1:
        out[base+1:] = np.cumsum(pieces[base:], axis=0)
    if base > 0:
        out[:base] = -np.cumsum(pieces[:base][::-1], axis=0)[::-1]
    return np.moveaxis(out, 0, axis)


@jit(nopython=True)
def invert_monotone(targets, k, tol):
    """invert t(u) = 2 arctan2(k sin(u/2), cos(u/2)) on [-pi, pi]

    Bracketed Newton iteration with dt/du = k/(cos^2(u/2) + k^2 sin^2(u/2)),
    falls back to bisection whenever a step leaves the bracket.
    """
    out = np.empty_like(targets)
    for i in range(targets.shape[0]):
        t = targets[i]
        lo, hi = -np.pi, np.pi
        u = t
        for it in range(200):
            f = 2.*np.arctan2(k*np.sin(u/2.), np.cos(u/2.)) - t
            if abs(f) < 1e-16:
                break
            if f > 0.:
                hi = u
            else:
                lo = u
            c2 = np.cos(u/2.)**2
            s2 = np.sin(u/2.)**2
            dt = k/(c2 + k*k*s2)
            u_new = u - f/dt
            if u_new <= lo or u_new >= hi:
                u_new = 0.5*(lo + hi)
            if abs(u_new - u) < tol:
                u = u_new
                break
            u = u_new
        out[i] = u
    return out
