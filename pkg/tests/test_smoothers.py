# -*- coding: utf-8 -*-
"""
Created on Wed Sep 23 11:05:19 2026

@author: compamg developers
"""

import warnings
import numpy as np
import pytest
import scipy.linalg
import scipy.sparse as sp

from compamg.smoothers import build_smoother, smoother_apply, smoother_norm_bound, contiguous_blocks, SPD_KINDS
from compamg.sparse_core import a_norm


def test_l1_jacobi_exact_on_diagonal_matrix():
    A = sp.csr_matrix(np.diag([1.0, 100.0]))
    b = np.array([3.0, 5.0])
    x = np.zeros(2)
    smoother_apply(build_smoother(A, 'l1_jacobi'), A, b, x)
    assert np.allclose(x, [3.0, 0.05])


def test_single_block_jacobi_is_exact(rng):
    M = rng.standard_normal((5, 5))
    A = sp.csr_matrix(M @ M.T + 5 * np.eye(5))
    b = rng.standard_normal(5)
    x = np.zeros(5)
    smoother_apply(build_smoother(A, 'block_jacobi'), A, b, x)
    assert np.allclose(A @ x, b, atol=1e-10)


def test_contiguous_blocks_keep_remainder():
    assert np.array_equal(contiguous_blocks(7, 3), [0, 3, 6, 7])
    with pytest.raises(ValueError):
        contiguous_blocks(7, 0)


def test_symmetric_gs_is_forward_then_backward(laplace_1d, rng):
    b = rng.standard_normal(64)
    x = np.zeros(64)
    smoother_apply(build_smoother(laplace_1d, 'symmetric_gs'), laplace_1d, b, x)
    y = np.zeros(64)
    smoother_apply(build_smoother(laplace_1d, 'forward_gs'), laplace_1d, b, y)
    smoother_apply(build_smoother(laplace_1d, 'backward_gs'), laplace_1d, b, y)
    assert np.allclose(x, y, atol=1e-12)


def test_reverse_switches_sweep_direction(laplace_1d, rng):
    b = rng.standard_normal(64)
    x = np.zeros(64)
    smoother_apply(build_smoother(laplace_1d, 'forward_gs'), laplace_1d, b, x, reverse=True)
    y = np.zeros(64)
    smoother_apply(build_smoother(laplace_1d, 'backward_gs'), laplace_1d, b, y)
    assert np.allclose(x, y, atol=1e-12)


@pytest.mark.parametrize('kind', SPD_KINDS)
def test_spd_smoothers_reduce_energy(kind, laplace_1d, rng):
    S = build_smoother(laplace_1d, kind, block_size=4)
    x = rng.uniform(-1, 1, 64)
    start = a_norm(x, laplace_1d)
    smoother_apply(S, laplace_1d, np.zeros(64), x, sweeps=5)
    assert a_norm(x, laplace_1d) < start


def test_norm_bound_of_l1_jacobi(laplace_1d):
    norm_B, c0 = smoother_norm_bound(build_smoother(laplace_1d, 'l1_jacobi'), laplace_1d)
    assert norm_B == 4.0
    assert c0 >= 1.0


def test_norm_bound_of_symmetric_gs(laplace_1d):
    with warnings.catch_warnings():
        warnings.simplefilter('error', RuntimeWarning)
        norm_B, c0 = smoother_norm_bound(build_smoother(laplace_1d, 'symmetric_gs'), laplace_1d)
    dense = laplace_1d.toarray()
    B = np.tril(dense) @ np.diag(1.0 / np.diag(dense)) @ np.triu(dense)
    assert norm_B == pytest.approx(scipy.linalg.eigvalsh(B)[-1], rel=1e-6)
    assert c0 >= 1.0 - 1e-6


def test_symmetric_gs_application_is_symmetric(laplace_1d, rng):
    S = build_smoother(laplace_1d, 'symmetric_gs')

    def solve(b):
        x = np.zeros(64)
        smoother_apply(S, laplace_1d, b, x)
        return x

    for _ in range(10):
        u, v = rng.standard_normal((2, 64))
        Su, Sv = solve(u), solve(v)
        scale = max(np.linalg.norm(u) * np.linalg.norm(v), np.linalg.norm(Su) * np.linalg.norm(v), np.linalg.norm(Sv) * np.linalg.norm(u))
        assert abs(np.dot(u, Sv) - np.dot(v, Su)) <= 1e-12 * scale


def test_l1_jacobi_majorizes_matrix(rng):
    for _ in range(10):
        M = rng.standard_normal((20, 20)) * (rng.uniform(size=(20, 20)) < 0.2)
        A = sp.csr_matrix(M @ M.T + np.eye(20))
        B = np.diag(build_smoother(A, 'l1_jacobi').diag_data)
        scale = np.linalg.norm(A.toarray(), 2)
        for _ in range(10):
            v = rng.standard_normal(20)
            assert v @ (B - A.toarray()) @ v >= -1e-12 * np.dot(v, v) * scale


def test_norm_bound_rejects_non_spd_kind(laplace_1d):
    with pytest.raises(ValueError, match='not s.p.d.'):
        smoother_norm_bound(build_smoother(laplace_1d, 'forward_gs'), laplace_1d)


def test_invalid_smoothers(laplace_1d):
    with pytest.raises(ValueError):
        build_smoother(laplace_1d, 'chebyshev')
    with pytest.raises(ValueError):
        build_smoother(sp.csr_matrix(np.diag([1.0, 0.0])), 'l1_jacobi')
    with pytest.raises(ValueError):
        build_smoother(laplace_1d, 'weighted_jacobi', omega=2.5)
