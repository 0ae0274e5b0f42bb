# -*- coding: utf-8 -*-
"""
Created on Wed Sep 23 10:22:37 2026

@author: compamg developers
"""

import numpy as np
import pytest

from compamg.probgen import AnisotropyParams, element_stiffness, gen_anisotropic_2d, gen_anisotropic_3d, \
 gen_rhs, gen_laplace, grid_coordinates
from compamg.sparse_core import is_symmetric, is_positive_definite


def test_bilinear_matrix_by_hand():
    # K = diag(2, 1)
    A = gen_anisotropic_2d(AnisotropyParams(3, epsilon=1.0, theta=0.0))
    expected = np.array([[4.0, 0.0, -1.0, -0.5],
                         [0.0, 4.0, -0.5, -1.0],
                         [-1.0, -0.5, 4.0, 0.0],
                         [-0.5, -1.0, 0.0, 4.0]])
    assert np.allclose(A.toarray(), expected, atol=1e-12)


def test_element_stiffness_annihilates_constants():
    for K in [np.diag([1.0, 1e-6]), AnisotropyParams(2, 1e-3, 0.4, 0.3).tensor(3)]:
        Ke = element_stiffness(K)
        assert np.allclose(Ke.sum(axis=1), 0.0, atol=1e-12)
        assert np.array_equal(Ke, Ke.T)


@pytest.mark.parametrize('theta', [0.0, np.pi / 6, np.pi / 4])
def test_anisotropic_2d_properties(theta):
    A = gen_anisotropic_2d(AnisotropyParams(8, epsilon=1e-6, theta=theta))
    assert A.shape == (49, 49)
    assert is_symmetric(A)
    assert is_positive_definite(A)


def test_anisotropic_3d_properties():
    A = gen_anisotropic_3d(AnisotropyParams(4, epsilon=1e-2, theta=np.pi / 6, phi=np.pi / 8))
    assert A.shape == (27, 27)
    assert is_symmetric(A)
    # the interior node couples with its 26 neighbors
    assert A[13].nnz == 27
    assert is_positive_definite(A)


def test_tensor_is_dominated_by_direction():
    p = AnisotropyParams(4, epsilon=1e-6, theta=np.pi / 2)
    assert np.allclose(p.tensor(2), np.diag([1e-6, 1.0]))
    assert np.allclose(p.beta(3), [0.0, 1.0, 0.0])


def test_invalid_parameters():
    with pytest.raises(ValueError):
        gen_anisotropic_2d(AnisotropyParams(1))
    with pytest.raises(ValueError):
        gen_anisotropic_2d(AnisotropyParams(4, epsilon=0.0))
    with pytest.raises(ValueError):
        gen_laplace(4, 4)


def test_gen_rhs():
    assert np.array_equal(gen_rhs(AnisotropyParams(5), 2), np.ones(16))


def test_laplace_stencils():
    A1 = gen_laplace(5, 1).toarray()
    assert np.array_equal(A1, 2 * np.eye(4) - np.eye(4, k=1) - np.eye(4, k=-1))
    A2 = gen_laplace(3, 2)
    assert np.array_equal(A2.diagonal(), 4 * np.ones(4))
    A3 = gen_laplace(3, 3)
    assert A3.shape == (8, 8)
    assert np.array_equal(A3.diagonal(), 6 * np.ones(8))
    # positive rowsums
    assert np.all(np.asarray(A2.sum(axis=1)).ravel() > 0)


def test_grid_coordinates_follow_numbering():
    coords = grid_coordinates(3, 2)
    assert np.array_equal(coords, np.array([[0, 0], [0, 1], [1, 0], [1, 1]]))


def test_opposite_directions_give_same_matrix():
    for theta in [0.0, 0.3, np.pi / 6]:
        A = gen_anisotropic_2d(AnisotropyParams(6, epsilon=1e-4, theta=theta))
        B = gen_anisotropic_2d(AnisotropyParams(6, epsilon=1e-4, theta=theta + np.pi))
        assert np.abs(A - B).max() <= 1e-12


def test_complementary_angle_swaps_grid_axes():
    m = 6
    theta = 0.3
    A = gen_anisotropic_2d(AnisotropyParams(m + 1, epsilon=1e-4, theta=theta)).toarray()
    B = gen_anisotropic_2d(AnisotropyParams(m + 1, epsilon=1e-4, theta=np.pi / 2 - theta)).toarray()
    # index of the node with swapped grid indices
    swap = np.arange(m * m).reshape(m, m).T.ravel()
    assert np.allclose(A[np.ix_(swap, swap)], B, atol=1e-12)


def test_flat_direction_matches_2d_stencil():
    n, theta, epsilon = 6, np.pi / 6, 1e-3
    p = AnisotropyParams(n, epsilon=epsilon, theta=theta, phi=0.0)
    assert np.allclose(p.tensor(3)[:2, :2], p.tensor(2), atol=1e-15)
    assert np.allclose(p.tensor(3)[2], [0.0, 0.0, epsilon], atol=1e-15)
    A2 = gen_anisotropic_2d(p)
    A3 = gen_anisotropic_3d(p)
    m = n - 1
    center2 = np.ravel_multi_index((2, 2), (m, m))
    center3 = np.ravel_multi_index((2, 2, 2), (m, m, m))
    # couplings summed along z reproduce the 2-D stencil
    for dx in [-1, 0, 1]:
        for dy in [-1, 0, 1]:
            column = np.ravel_multi_index((2 + dx, 2 + dy), (m, m))
            summed = sum(A3[center3, np.ravel_multi_index((2 + dx, 2 + dy, 2 + dz), (m, m, m))] for dz in [-1, 0, 1])
            assert summed == pytest.approx(A2[center2, column], abs=1e-12)
