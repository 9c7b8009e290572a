import math

import numpy as np
import pytest

from ppimex.basis import (NodalBasis, basis_eval, basis_grad, build_point_sets,
                          gauss_lobatto_rule, gauss_rule)
from ppimex.errors import UnsupportedOrder


def test_gauss_small_rules():
    r = gauss_rule(1)
    np.testing.assert_allclose(r.points, [0.0])
    np.testing.assert_allclose(r.weights, [1.0])
    r = gauss_rule(2)
    np.testing.assert_allclose(r.points, [-1 / (2 * math.sqrt(3)), 1 / (2 * math.sqrt(3))], atol=1e-15)
    np.testing.assert_allclose(r.weights, [0.5, 0.5], atol=1e-15)
    for p in range(4):
        exact = 0.0 if p % 2 else 0.5 ** p / (p + 1)
        assert abs(r.integrate(lambda x: x ** p) - exact) < 1e-15


def test_gauss_three_points_x4():
    assert abs(gauss_rule(3).integrate(lambda x: x ** 4) - 1 / 80) < 1e-16


@pytest.mark.parametrize("n", range(1, 9))
def test_gauss_exactness(n):
    r = gauss_rule(n)
    for p in range(2 * n):
        exact = 0.0 if p % 2 else 0.5 ** p / (p + 1)
        assert abs(r.integrate(lambda x: x ** p) - exact) < 1e-14


def test_lobatto_small_rules():
    r = gauss_lobatto_rule(2)
    np.testing.assert_allclose(r.points, [-0.5, 0.5])
    np.testing.assert_allclose(r.weights, [0.5, 0.5])
    r = gauss_lobatto_rule(3)
    np.testing.assert_allclose(r.points, [-0.5, 0.0, 0.5], atol=1e-16)
    np.testing.assert_allclose(r.weights, [1 / 6, 2 / 3, 1 / 6], atol=1e-15)
    assert abs(gauss_lobatto_rule(4).integrate(lambda x: x ** 5)) < 1e-16


@pytest.mark.parametrize("n", range(2, 7))
def test_lobatto_exactness(n):
    r = gauss_lobatto_rule(n)
    for p in range(2 * n - 2):
        exact = 0.0 if p % 2 else 0.5 ** p / (p + 1)
        assert abs(r.integrate(lambda x: x ** p) - exact) < 1e-14


def test_rule_ranges():
    with pytest.raises(UnsupportedOrder):
        gauss_rule(9)
    with pytest.raises(UnsupportedOrder):
        gauss_lobatto_rule(1)
    with pytest.raises(UnsupportedOrder):
        NodalBasis(4, 2)


def test_point_sets_q2():
    ps = build_point_sets(2, 2)
    assert abs(ps.omega_hat - 1 / 6) < 1e-16
    assert len(ps.p) == 9
    assert ps.face.shape[1] == 3


def test_point_sets_q1():
    ps = build_point_sets(1, 2)
    assert ps.n_lobatto == 2
    assert len(ps.aux) == 0
    assert ps.omega_hat == 0.5


def test_point_sets_q3_1d():
    assert len(build_point_sets(3, 1).vol) == 4


def test_q1_gradient_at_center():
    b = NodalBasis(1, 2)
    np.testing.assert_allclose(basis_grad(b, 0, [0.0, 0.0]), [-0.5, -0.5])


def test_q1_gradients_closed_form(rng):
    b = NodalBasis(1, 2)
    for x, y in rng.uniform(-0.5, 0.5, (10, 2)):
        ref = 0.5 * np.array([[-1 + 2 * y, -1 + 2 * x], [1 - 2 * y, -1 - 2 * x],
                              [-1 - 2 * y, 1 - 2 * x], [1 + 2 * y, 1 + 2 * x]])
        for j in range(4):
            np.testing.assert_allclose(basis_grad(b, j, [x, y]), ref[j], atol=1e-15)


@pytest.mark.parametrize("k", [1, 2, 3])
@pytest.mark.parametrize("dim", [1, 2])
def test_partition_of_unity(k, dim):
    b = NodalBasis(k, dim)
    x = np.array([0.17, -0.31][:dim])
    assert abs(sum(basis_eval(b, j, x) for j in range(b.nloc)) - 1.0) < 1e-14
    assert np.abs(sum(basis_grad(b, j, x) for j in range(b.nloc))).max() < 1e-13


@pytest.mark.parametrize("k", [1, 2, 3])
def test_nodal_property_and_order(k):
    b = NodalBasis(k, 2)
    np.testing.assert_allclose(b.eval(b.nodes), np.eye(b.nloc), atol=1e-14)
    # x index runs fastest
    assert b.nodes[1, 0] > b.nodes[0, 0] and b.nodes[1, 1] == b.nodes[0, 1]
    assert abs(b.weights.sum() - 1.0) < 1e-15
