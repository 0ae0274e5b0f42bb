# -*- coding: utf-8 -*-
"""
Created on Mon Sep 14 10:41:17 2026

@author: compamg developers

Sparse matrix and dense vector kernels: storage checks, Matrix Market I/O,
products, norms and the spectral norm estimate.
Matrices are scipy CSR matrices with sorted 64-bit column indices, vectors
and candidate blocks are numpy arrays.
"""

import os
import warnings
import numpy as np
import pandas as pd
import scipy.io
import scipy.linalg
import scipy.sparse as sp
from scipy.sparse.linalg import ArpackNoConvergence, aslinearoperator, eigsh

from compamg.utilities import NotPositiveDefiniteError


# largest operator whose spectrum is computed densely
DENSE_EIG_SIZE = 16


def to_csr(A):
    '''
    (sparse matrix | numpy.ndarray) -> scipy.sparse.csr_matrix

    :param A: Any sparse matrix or dense 2-D array

    Return A in CSR format with sorted, duplicate-free 64-bit column indices
    '''

    A = sp.csr_matrix(A, dtype=np.float64)
    A.sum_duplicates()
    A.sort_indices()
    A.indptr = A.indptr.astype(np.int64)
    A.indices = A.indices.astype(np.int64)
    return A


def check_csr(A):
    '''
    (scipy.sparse.csr_matrix) -> None

    :param A: Matrix in CSR format

    Raise a ValueError if A breaks the compressed-row invariants: monotone row offsets
    starting at 0 and ending at nnz, strictly increasing column indices within each row,
    column indices within bounds
    '''

    n_rows, n_cols = A.shape
    indptr, indices = A.indptr, A.indices
    if len(indptr) != n_rows + 1 or indptr[0] != 0 or indptr[-1] != len(A.data):
        raise ValueError('ERR: Row offsets are inconsistent with the number of stored entries')
    if np.any(np.diff(indptr) < 0):
        raise ValueError('ERR: Row offsets must be non-decreasing')
    if len(indices) != len(A.data):
        raise ValueError('ERR: Column indices and values have different lengths')
    if len(indices) != 0 and (indices.min() < 0 or indices.max() >= n_cols):
        raise ValueError('ERR: Column index out of bounds')
    # consecutive columns within a row must increase, row boundaries excepted
    steps = np.diff(indices)
    row_starts = np.zeros(len(indices), dtype=bool)
    row_starts[indptr[1:-1][indptr[1:-1] < len(indices)]] = True
    if np.any((steps <= 0) & ~row_starts[1:]):
        raise ValueError('ERR: Column indices must be strictly increasing within each row')


def is_symmetric(A, tol=0.0):
    '''
    (scipy.sparse.csr_matrix, float) -> bool

    :param A: Square sparse matrix
    :param tol: Absolute tolerance on |a_ij - a_ji|. Exact comparison if 0

    Return True if A equals its transpose within tol
    '''

    if A.shape[0] != A.shape[1]:
        return False
    diff = (A - A.T).tocsr()
    if diff.nnz == 0:
        return True
    return bool(np.abs(diff.data).max() <= tol)


def load_matrix_market(path):
    '''
    (str) -> scipy.sparse.csr_matrix

    :param path: Path to a Matrix Market coordinate file, real field,
                 general or symmetric qualifier

    Return the validated matrix. Symmetric files are expanded to full storage
    and duplicate entries are summed. Indices are 1-based on disk, 0-based in memory
    '''

    if os.path.isfile(path) == False:
        raise FileNotFoundError('cannot open {0}'.format(path))

    # header: rows, cols, entries, format, field, symmetry
    try:
        n_rows, n_cols, entries, fmt, field, symmetry = scipy.io.mminfo(path)
    except Exception as e:
        raise ValueError('ERR: Malformed Matrix Market header in {0}: {1}'.format(path, e))
    if fmt != 'coordinate':
        raise ValueError('ERR: Only coordinate Matrix Market files are supported')
    if field != 'real':
        raise ValueError('ERR: Matrix Market field must be real, found {0}'.format(field))
    if symmetry not in ['general', 'symmetric']:
        raise ValueError('ERR: Unsupported Matrix Market qualifier {0}'.format(symmetry))

    # the size line is read as the first data row
    try:
        table = pd.read_csv(path, comment='%', sep=r'\s+', header=None)
    except Exception as e:
        raise ValueError('ERR: Cannot parse entries of {0}: {1}'.format(path, e))
    table = table.iloc[1:]
    if len(table) != entries:
        raise ValueError('ERR: Expected {0} entries, found {1}'.format(entries, len(table)))
    if entries != 0 and table.shape[1] != 3:
        raise ValueError('ERR: Each entry must hold a row index, a column index and a value')
    try:
        table = table.astype(np.float64)
    except ValueError:
        raise ValueError('ERR: Non numeric entries in {0}'.format(path))

    rows = table[0].to_numpy()
    cols = table[1].to_numpy()
    values = table[2].to_numpy()
    if np.any(rows != np.round(rows)) or np.any(cols != np.round(cols)):
        raise ValueError('ERR: Non integer indices in {0}'.format(path))
    rows = rows.astype(np.int64) - 1
    cols = cols.astype(np.int64) - 1
    if entries != 0 and (rows.min() < 0 or rows.max() >= n_rows or cols.min() < 0 or cols.max() >= n_cols):
        raise ValueError('ERR: index out of bounds in {0}'.format(path))

    if symmetry == 'symmetric':
        off = rows != cols
        rows, cols = np.concatenate([rows, cols[off]]), np.concatenate([cols, rows[off]])
        values = np.concatenate([values, values[off]])

    # coo to csr sums duplicates
    A = to_csr(sp.coo_matrix((values, (rows, cols)), shape=(n_rows, n_cols)))
    check_csr(A)
    return A


def write_matrix_market(A, path):
    '''
    (scipy.sparse.csr_matrix, str) -> None

    :param A: Sparse matrix
    :param path: Path to the output .mtx file

    Write A in coordinate format, with the symmetric qualifier when A is exactly symmetric
    '''

    symmetry = 'symmetric' if is_symmetric(A) else 'general'
    scipy.io.mmwrite(path, sp.coo_matrix(A), symmetry=symmetry)


def spmv(A, x):
    '''
    (scipy.sparse.csr_matrix, numpy.ndarray) -> numpy.ndarray

    :param A: Sparse matrix
    :param x: Dense vector with len(x) equal to the number of columns of A

    Return the product A x
    '''

    if x.shape[0] != A.shape[1]:
        raise ValueError('ERR: Dimension mismatch {0} x {1}'.format(A.shape, x.shape))
    return A @ x


def transpose(A):
    '''
    (scipy.sparse.csr_matrix) -> scipy.sparse.csr_matrix

    :param A: Sparse matrix

    Return the transpose of A in CSR format
    '''

    return to_csr(A.T)


def triple_product(P, A):
    '''
    (scipy.sparse.csr_matrix, scipy.sparse.csr_matrix) -> scipy.sparse.csr_matrix

    :param P: Interpolation matrix, n x n_c
    :param A: Square matrix, n x n

    Return the Galerkin product P^T A P. No drop tolerance is applied
    '''

    if A.shape[0] != A.shape[1] or P.shape[0] != A.shape[0]:
        raise ValueError('ERR: Dimension mismatch in triple product {0}, {1}'.format(P.shape, A.shape))
    return to_csr(transpose(P) @ (A @ P))


def dot(u, v):
    '''
    (numpy.ndarray, numpy.ndarray) -> float

    Return the euclidean inner product of u and v
    '''

    if u.shape != v.shape:
        raise ValueError('ERR: Dimension mismatch {0}, {1}'.format(u.shape, v.shape))
    return float(np.dot(u, v))


def norm(u):
    '''
    (numpy.ndarray) -> float

    Return the euclidean norm of u
    '''

    return float(np.linalg.norm(u))


def a_norm(u, A):
    '''
    (numpy.ndarray, scipy.sparse.csr_matrix) -> float

    :param u: Dense vector
    :param A: s.p.d. matrix

    Return the energy norm sqrt(u^T A u). Raise NotPositiveDefiniteError if
    u^T A u is negative beyond rounding
    '''

    value = dot(u, spmv(A, u))
    if value < 0:
        # rounding scale of the quadratic form
        scale = float(np.abs(u) @ (abs(A) @ np.abs(u)))
        if value < -1e-14 * scale:
            raise NotPositiveDefiniteError('matrix not positive definite on this vector (u^T A u = {0})'.format(value))
        value = 0.0
    return float(np.sqrt(value))


def axpy(alpha, x, y):
    '''
    (float, numpy.ndarray, numpy.ndarray) -> numpy.ndarray

    Return y + alpha x as a new vector
    '''

    if x.shape != y.shape:
        raise ValueError('ERR: Dimension mismatch {0}, {1}'.format(x.shape, y.shape))
    return y + alpha * x


def power_method(A, tol=1e-8, max_iter=1000, seed=0):
    '''
    (sparse matrix | LinearOperator, float, int, int) -> (float, bool)

    :param A: Symmetric nonzero operator
    :param tol: Relative tolerance between successive Rayleigh quotients
    :param max_iter: Maximum number of iterations
    :param seed: Seed of the start vector

    Return a tuple with the estimate of the dominant eigenvalue and a flag that
    is True if the estimate converged within max_iter
    '''

    op = aslinearoperator(A)
    n = op.shape[0]
    rng = np.random.default_rng(seed)
    x = rng.uniform(-1.0, 1.0, n)
    x /= np.linalg.norm(x)

    estimate = 0.0
    for i in range(max_iter):
        y = op.matvec(x)
        previous, estimate = estimate, float(np.dot(x, y))
        size = np.linalg.norm(y)
        if size == 0:
            # x is in the kernel, the Rayleigh quotient is exact there
            return estimate, True
        if i > 0 and abs(estimate - previous) <= tol * abs(estimate):
            return estimate, True
        x = y / size
    warnings.warn('power method did not converge in {0} iterations'.format(max_iter), RuntimeWarning)
    return estimate, False


def spectral_norm(A, tol=1e-8, seed=0):
    '''
    (sparse matrix | LinearOperator, float, int) -> float

    :param A: Symmetric positive semi-definite operator
    :param tol: Relative accuracy of the Lanczos estimate
    :param seed: Seed of the Lanczos start vector

    Return the largest eigenvalue of A, computed with the implicitly restarted
    Lanczos method of scipy, or densely for operators of size <= DENSE_EIG_SIZE
    '''

    op = aslinearoperator(A)
    n = op.shape[0]
    if n <= DENSE_EIG_SIZE:
        return float(scipy.linalg.eigvalsh(op.matmat(np.eye(n)))[-1])
    v0 = np.random.default_rng(seed).uniform(-1.0, 1.0, n)
    try:
        return float(eigsh(op, k=1, which='LA', tol=tol, v0=v0, return_eigenvectors=False)[0])
    except ArpackNoConvergence:
        warnings.warn('Lanczos did not converge, falling back to the power method', RuntimeWarning)
        return power_method(op, tol=tol, seed=seed)[0]


def is_positive_definite(A):
    '''
    (scipy.sparse.csr_matrix | numpy.ndarray) -> bool

    :param A: Small symmetric matrix

    Return True if the dense Cholesky factorization of A succeeds
    '''

    dense = A.toarray() if sp.issparse(A) else np.asarray(A)
    try:
        scipy.linalg.cholesky(0.5 * (dense + dense.T), lower=True)
    except np.linalg.LinAlgError:
        return False
    return True
