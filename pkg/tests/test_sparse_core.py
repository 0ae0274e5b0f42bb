# -*- coding: utf-8 -*-
"""
Created on Wed Sep 23 09:40:11 2026

@author: compamg developers
"""

import numpy as np
import pytest
import scipy.sparse as sp

from compamg.sparse_core import to_csr, check_csr, is_symmetric, load_matrix_market, write_matrix_market, \
 spmv, triple_product, a_norm, axpy, dot, norm, power_method, spectral_norm, is_positive_definite
from compamg.utilities import NotPositiveDefiniteError


SYMMETRIC_MTX = '''%%MatrixMarket matrix coordinate real symmetric
% lower triangle of a 3 x 3 tridiagonal matrix
3 3 5
1 1 2.0
2 1 -1.0
2 2 2.0
3 2 -1.0
3 3 2.0
'''


def write_text(path, content):
    with open(path, 'w') as newfile:
        newfile.write(content)
    return str(path)


def test_to_csr_sums_duplicates_and_sorts():
    coo = sp.coo_matrix(([1.0, 2.0, 3.0], ([0, 0, 1], [1, 1, 0])), shape=(2, 2))
    A = to_csr(coo)
    assert A[0, 1] == 3.0
    assert A.nnz == 2
    assert A.indices.dtype == np.int64
    check_csr(A)


def test_check_csr_rejects_unsorted_columns():
    A = sp.csr_matrix((np.array([1.0, 2.0]), np.array([1, 0]), np.array([0, 2])), shape=(1, 2))
    with pytest.raises(ValueError):
        check_csr(A)


def test_is_symmetric():
    A = sp.csr_matrix(np.array([[2.0, 1.0], [1.0, 3.0]]))
    B = sp.csr_matrix(np.array([[2.0, 1.0], [1.0 + 1e-9, 3.0]]))
    assert is_symmetric(A)
    assert not is_symmetric(B)
    assert is_symmetric(B, tol=1e-8)
    assert not is_symmetric(sp.csr_matrix(np.ones((2, 3))))


def test_load_symmetric_file_is_expanded(tmp_path):
    A = load_matrix_market(write_text(tmp_path / 'tri.mtx', SYMMETRIC_MTX))
    expected = np.array([[2.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 2.0]])
    assert np.array_equal(A.toarray(), expected)
    assert is_symmetric(A)


def test_load_general_file_sums_duplicates(tmp_path):
    content = '%%MatrixMarket matrix coordinate real general\n2 2 3\n1 1 1.5\n1 1 0.5\n2 2 4\n'
    A = load_matrix_market(write_text(tmp_path / 'dup.mtx', content))
    assert A[0, 0] == 2.0
    assert A[1, 1] == 4.0


def test_load_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError, match='cannot open'):
        load_matrix_market(str(tmp_path / 'missing.mtx'))


def test_load_index_out_of_bounds(tmp_path):
    content = '%%MatrixMarket matrix coordinate real general\n3 3 1\n4 1 1.0\n'
    with pytest.raises(ValueError, match='index out of bounds'):
        load_matrix_market(write_text(tmp_path / 'bad.mtx', content))


def test_load_wrong_entry_count(tmp_path):
    content = '%%MatrixMarket matrix coordinate real general\n3 3 3\n1 1 1.0\n2 2 1.0\n'
    with pytest.raises(ValueError):
        load_matrix_market(write_text(tmp_path / 'short.mtx', content))


def test_load_rejects_complex_field(tmp_path):
    content = '%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1.0 0.0\n'
    with pytest.raises(ValueError):
        load_matrix_market(write_text(tmp_path / 'complex.mtx', content))


def test_written_matrix_reloads_identically(tmp_path):
    A = load_matrix_market(write_text(tmp_path / 'tri.mtx', SYMMETRIC_MTX))
    path = str(tmp_path / 'copy.mtx')
    write_matrix_market(A, path)
    B = load_matrix_market(path)
    assert np.array_equal(A.toarray(), B.toarray())


def test_triple_product_matches_dense(rng):
    n, n_c = 12, 5
    M = rng.standard_normal((n, n))
    A = to_csr(M + M.T)
    P = to_csr(sp.random(n, n_c, density=0.4, random_state=3))
    dense = P.toarray().T @ A.toarray() @ P.toarray()
    result = triple_product(P, A).toarray()
    assert np.abs(result - dense).max() <= 1e-12 * max(1.0, np.abs(dense).max())


def test_triple_product_dimension_mismatch():
    with pytest.raises(ValueError):
        triple_product(sp.identity(3, format='csr'), sp.identity(4, format='csr'))


def test_spmv_dimension_mismatch():
    with pytest.raises(ValueError):
        spmv(sp.identity(3, format='csr'), np.ones(4))


def test_vector_kernels():
    x, y = np.array([1.0, 2.0]), np.array([3.0, 4.0])
    assert dot(x, y) == 11.0
    assert norm(y) == 5.0
    assert np.array_equal(axpy(2.0, x, y), np.array([5.0, 8.0]))


def test_a_norm():
    A = sp.csr_matrix(np.diag([4.0, 9.0]))
    assert a_norm(np.array([1.0, 1.0]), A) == pytest.approx(np.sqrt(13.0))


def test_a_norm_detects_indefinite_matrix():
    A = sp.csr_matrix(np.diag([1.0, -1.0]))
    with pytest.raises(NotPositiveDefiniteError):
        a_norm(np.array([0.0, 1.0]), A)


def test_power_method_dominant_eigenvalue():
    A = sp.csr_matrix(np.diag([1.0, 2.0, 5.0]))
    estimate, converged = power_method(A)
    assert converged
    assert estimate == pytest.approx(5.0, rel=1e-6)


def test_is_positive_definite():
    assert is_positive_definite(sp.csr_matrix(np.array([[2.0, -1.0], [-1.0, 2.0]])))
    assert not is_positive_definite(np.array([[1.0, 2.0], [2.0, 1.0]]))


def test_spmv_is_linear(rng):
    A = to_csr(sp.random(30, 30, density=0.2, random_state=4) + sp.identity(30))
    x, y = rng.standard_normal((2, 30))
    alpha, beta = 2.5, -0.75
    lhs = spmv(A, alpha * x + beta * y)
    rhs = alpha * spmv(A, x) + beta * spmv(A, y)
    assert np.abs(lhs - rhs).max() <= 1e-12 * max(1.0, np.abs(rhs).max())
    assert np.allclose(spmv(A, x), A.toarray() @ x)


@pytest.mark.parametrize('n', [5, 100])
def test_spectral_norm_matches_dense(n):
    main = 2.0 * np.ones(n)
    off = -np.ones(n - 1)
    A = to_csr(sp.diags([off, main, off], [-1, 0, 1]))
    expected = 2.0 - 2.0 * np.cos(n * np.pi / (n + 1))
    assert spectral_norm(A) == pytest.approx(expected, rel=1e-6)
