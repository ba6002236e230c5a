#! /usr/bin/env python3
# coding=utf-8
"""
Author: willmoreLab developers

"""

import numpy as np
import pytest

import willmoreLab.helpers as h
import willmoreLab.surfaces as surfaces


def test_conformal_charts():
    for name in sorted(surfaces.SURFACES):
        imm = surfaces.get_immersion(name)
        defect = surfaces.conformality_defect(imm, imm.default_chart(65))
        print(name, defect)
        assert defect < 1e-12


def test_conformal_factor():
    for name in sorted(surfaces.SURFACES):
        imm = surfaces.get_immersion(name)
        X, Y = imm.default_chart(33).mesh()
        d = imm.dphi(X, Y)
        assert np.allclose(np.log(np.linalg.norm(d[..., 0, :], axis=-1)), imm.lam(X, Y), atol=1e-13)


def test_analytic_derivatives():
    rng = np.random.default_rng(3)
    X, Y = rng.uniform(-0.9, 0.9, size=(2, 50))
    eps = 1e-6
    for name in sorted(surfaces.SURFACES):
        imm = surfaces.get_immersion(name)
        fd_x = (imm.phi(X + eps, Y) - imm.phi(X - eps, Y))/(2*eps)
        fd_y = (imm.phi(X, Y + eps) - imm.phi(X, Y - eps))/(2*eps)
        d = imm.dphi(X, Y)
        assert np.max(np.abs(d[..., 0, :] - fd_x)) < 1e-8, name
        assert np.max(np.abs(d[..., 1, :] - fd_y)) < 1e-8, name
        dd = imm.ddphi(X, Y)
        fd_xy = (imm.dphi(X, Y + eps)[..., 0, :] - imm.dphi(X, Y - eps)[..., 0, :])/(2*eps)
        fd_yy = (imm.dphi(X, Y + eps)[..., 1, :] - imm.dphi(X, Y - eps)[..., 1, :])/(2*eps)
        assert np.max(np.abs(dd[..., 0, 1, :] - fd_xy)) < 1e-7, name
        assert np.max(np.abs(dd[..., 1, 1, :] - fd_yy)) < 1e-7, name


def test_sphere_chart():
    imm = surfaces.sphere_stereo(R=2.)
    X, Y = imm.default_chart(33).mesh()
    assert np.allclose(np.linalg.norm(imm.phi(X, Y), axis=-1), 2.)
    assert imm.default_chart(33).extent == 1.25
    with pytest.raises(ValueError):
        surfaces.sphere_stereo(R=0.)
    with pytest.raises(ValueError):
        surfaces.get_immersion('klein_bottle')


def test_torus_inverse():
    ut = np.linspace(-np.pi, np.pi, 257)
    newton = surfaces.torus_inverse(ut)
    closed = surfaces.torus_inverse_closed(ut)
    assert np.max(np.abs(newton - closed)) < 1e-12
    assert np.max(np.abs(surfaces.torus_forward(newton) - ut)) < 1e-12


def test_periodic_chart_check():
    imm = surfaces.plane()
    with pytest.raises(ValueError):
        surfaces.sample_on_chart(imm, imm.default_chart(33).with_periodic((True, False)))


def test_radial_shape():
    coeffs = np.zeros(25)
    coeffs[0] = 0.2
    coeffs[surfaces.sg.coeff_index(2, 1)] = 0.05
    shape = surfaces.RadialShape([0.1, 0., -0.2], 1.5, coeffs)
    assert shape.degree == 4
    absorbed = shape.absorb_mean()
    assert absorbed.coeffs[0] == 0.
    assert np.allclose(absorbed.sample().points, shape.sample().points, atol=1e-13)
    Y0 = surfaces.sg.real_sph_harm(4, np.zeros(1), np.zeros(1), derivatives=False)['Y'][:, 0]
    expected = shape.center + 1.5*(1. + np.dot(coeffs, Y0))*np.array([0., 0., 1.])
    assert np.allclose(shape.north_pole(), expected, atol=1e-14)

    same = shape.from_vector(shape.to_vector())
    assert np.array_equal(same.coeffs, shape.coeffs) and same.R == shape.R

    bad = np.zeros(9)
    bad[0] = -10.
    with pytest.raises(h.ShapeError):
        surfaces.RadialShape(R=1., coeffs=bad).sample()
    with pytest.raises(h.ShapeError):
        surfaces.RadialShape(R=-1.).sample()


def test_rigid_motions():
    sample = surfaces.RadialShape(R=1.).sample()
    moved = surfaces.scaled(sample, np.log(2.))
    assert np.allclose(np.linalg.norm(moved.points, axis=-1), 2.)
    Q = np.array([[0., -1., 0.], [1., 0., 0.], [0., 0., 1.]])
    turned = surfaces.transformed(sample, Q, np.array([1., 0., 0.]))
    assert np.allclose(np.linalg.norm(turned.points - [1., 0., 0.], axis=-1), 1.)
