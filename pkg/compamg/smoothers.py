# -*- coding: utf-8 -*-
"""
Created on Tue Sep 15 14:37:09 2026

@author: compamg developers

Relaxation methods used as base solvers of the composite and as level
smoothers inside mu-cycles. Every method is a stationary correction
x <- x + B^{-1} (b - A x) with an implicit matrix B.
"""

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.sparse.linalg import LinearOperator, spsolve_triangular

from compamg.sparse_core import spectral_norm
from compamg.utilities import NotPositiveDefiniteError


SMOOTHER_KINDS = ['l1_jacobi', 'forward_gs', 'backward_gs', 'symmetric_gs', 'weighted_jacobi', 'block_jacobi']

# kinds whose implicit B is symmetric positive definite
SPD_KINDS = ['l1_jacobi', 'symmetric_gs', 'weighted_jacobi', 'block_jacobi']

# sweep direction of the A-adjoint relaxation
REVERSED_KIND = {'forward_gs': 'backward_gs', 'backward_gs': 'forward_gs'}


class SmootherState:
    '''
    Data needed to apply one relaxation method to a fixed matrix
    '''

    def __init__(self, kind, diag_data, omega=None, block_offsets=None, block_data=None):
        '''
        (str, numpy.ndarray, float | None, numpy.ndarray | None, list | None) -> None

        :param kind: One of SMOOTHER_KINDS
        :param diag_data: l1 row sums (l1_jacobi) or inverse diagonal (other kinds)
        :param omega: Damping weight (weighted_jacobi only)
        :param block_offsets: Start of every block plus the matrix size (block_jacobi only)
        :param block_data: Cholesky factors of the l1-augmented blocks (block_jacobi only)
        '''

        self.kind = kind
        self.diag_data = diag_data
        self.omega = omega
        self.block_offsets = block_offsets
        self.block_data = block_data
        # triangular parts, filled by build_smoother for the Gauss-Seidel kinds
        self.lower = None
        self.upper = None
        # (row indices, stacked block inverses) per block size, block_jacobi only
        self.block_groups = []

    def __repr__(self):
        return 'SmootherState(kind={0}, n={1})'.format(self.kind, len(self.diag_data))


def contiguous_blocks(n, block_size):
    '''
    (int, int) -> numpy.ndarray

    :param n: Matrix size
    :param block_size: Size of every block but the last

    Return the block offsets of contiguous blocks, the remainder block at the end
    may be smaller
    '''

    if block_size < 1:
        raise ValueError('ERR: Block size must be >= 1')
    return np.append(np.arange(0, n, block_size), n).astype(np.int64)


def group_blocks(block_offsets, inverses):
    '''
    (numpy.ndarray, list) -> list

    :param block_offsets: Block boundaries
    :param inverses: Dense inverse of every block

    Return a list of (rows, stacked inverses) tuples, one per distinct block size,
    rows being a (number of blocks, size) index array
    '''

    sizes = np.diff(block_offsets)
    groups = []
    for size in np.unique(sizes):
        which = np.flatnonzero(sizes == size)
        rows = block_offsets[which][:, None] + np.arange(size)[None, :]
        groups.append((rows, np.stack([inverses[i] for i in which])))
    return groups


def build_smoother(A, kind, block_size=None, omega=2.0 / 3.0, block_offsets=None):
    '''
    (scipy.sparse.csr_matrix, str, int | None, float, numpy.ndarray | None) -> SmootherState

    :param A: Symmetric matrix with positive diagonal
    :param kind: One of SMOOTHER_KINDS
    :param block_size: Size of contiguous blocks (block_jacobi)
    :param omega: Weight of weighted_jacobi, 0 < omega < 2
    :param block_offsets: Explicit block boundaries (block_jacobi), take precedence over block_size

    Return the smoother state ready for smoother_apply
    '''

    if kind not in SMOOTHER_KINDS:
        raise ValueError('ERR: Unknown smoother {0}. Valid options are {1}'.format(kind, ', '.join(SMOOTHER_KINDS)))
    diagonal = A.diagonal()
    if np.any(diagonal <= 0):
        raise ValueError('ERR: Smoother requires a positive diagonal, found {0}'.format(diagonal.min()))

    if kind == 'l1_jacobi':
        return SmootherState(kind, np.asarray(abs(A).sum(axis=1)).ravel())

    if kind == 'weighted_jacobi':
        if not 0 < omega < 2:
            raise ValueError('ERR: Jacobi weight must lie in (0, 2)')
        return SmootherState(kind, 1.0 / diagonal, omega=omega)

    if kind == 'block_jacobi':
        n = A.shape[0]
        if block_offsets is None:
            block_offsets = contiguous_blocks(n, n if block_size is None else block_size)
        block_offsets = np.asarray(block_offsets, dtype=np.int64)
        # off-block absolute row sums added to the block diagonal
        block_id = np.repeat(np.arange(len(block_offsets) - 1), np.diff(block_offsets))
        coo = A.tocoo()
        outside = block_id[coo.row] != block_id[coo.col]
        l1 = np.bincount(coo.row[outside], weights=np.abs(coo.data[outside]), minlength=n)
        factors, inverses = [], []
        for start, stop in zip(block_offsets[:-1], block_offsets[1:]):
            block = A[start:stop, start:stop].toarray() + np.diag(l1[start:stop])
            try:
                factor = scipy.linalg.cho_factor(block, lower=True)
            except np.linalg.LinAlgError:
                raise NotPositiveDefiniteError('singular or indefinite diagonal block at rows {0}:{1}'.format(start, stop))
            factors.append(factor)
            inverses.append(scipy.linalg.cho_solve(factor, np.eye(stop - start)))
        state = SmootherState(kind, 1.0 / diagonal, block_offsets=block_offsets, block_data=factors)
        state.block_groups = group_blocks(block_offsets, inverses)
        return state

    # Gauss-Seidel kinds keep D + L and D + U
    state = SmootherState(kind, 1.0 / diagonal)
    state.lower = sp.tril(A, format='csr')
    state.upper = sp.triu(A, format='csr')
    return state


def apply_inverse(S, r, kind=None):
    '''
    (SmootherState, numpy.ndarray, str | None) -> numpy.ndarray

    :param S: Smoother state
    :param r: Residual
    :param kind: Overrides S.kind for the Gauss-Seidel direction

    Return B^{-1} r for the explicit kinds. The Gauss-Seidel kinds are triangular
    solves with D + L (forward) or D + U (backward)
    '''

    kind = S.kind if kind is None else kind
    if kind == 'l1_jacobi':
        return r / S.diag_data
    if kind == 'weighted_jacobi':
        return S.omega * S.diag_data * r
    if kind == 'block_jacobi':
        z = np.empty_like(r)
        for rows, inverse in S.block_groups:
            z[rows] = np.einsum('kij,kj->ki', inverse, r[rows])
        return z
    if kind == 'forward_gs':
        return spsolve_triangular(S.lower, r, lower=True)
    if kind == 'backward_gs':
        return spsolve_triangular(S.upper, r, lower=False)
    raise ValueError('ERR: Smoother {0} has no single triangular inverse'.format(kind))


def smoother_apply(S, A, b, x, sweeps=1, reverse=False):
    '''
    (SmootherState, scipy.sparse.csr_matrix, numpy.ndarray, numpy.ndarray, int, bool) -> None

    :param S: Smoother state built on A
    :param A: System matrix
    :param b: Right-hand side
    :param x: Current iterate, updated in place
    :param sweeps: Number of applications
    :param reverse: Use the opposite sweep direction (A-adjoint relaxation)

    Apply x <- x + B^{-1}(b - A x) sweeps times. symmetric_gs performs a forward
    then a backward sweep per application
    '''

    if b.shape[0] != A.shape[0] or x.shape[0] != A.shape[0]:
        raise ValueError('ERR: Dimension mismatch in smoother')
    kind = REVERSED_KIND.get(S.kind, S.kind) if reverse else S.kind
    for _ in range(sweeps):
        if kind == 'symmetric_gs':
            x += apply_inverse(S, b - A @ x, 'forward_gs')
            x += apply_inverse(S, b - A @ x, 'backward_gs')
        else:
            x += apply_inverse(S, b - A @ x, kind)


def symmetric_gs_operator(S):
    '''
    (SmootherState) -> LinearOperator

    :param S: State of a symmetric_gs smoother

    Return B = (D + L) D^{-1} (D + U) as a linear operator
    '''

    n = len(S.diag_data)

    def matvec(v):
        return S.lower @ (S.diag_data * (S.upper @ np.ravel(v)))

    return LinearOperator((n, n), matvec=matvec, dtype=np.float64)


def smoother_norm_bound(S, A, tol=1e-8):
    '''
    (SmootherState, scipy.sparse.csr_matrix, float) -> (float, float)

    :param S: State of an s.p.d. smoother kind
    :param A: Matrix the smoother was built on
    :param tol: Relative accuracy of the Lanczos estimates

    Return a tuple (norm_B, c0) with the spectral norm of the implicit B and the
    ratio c0 = ||B|| / ||A||. ||B|| is exact for the Jacobi kinds and computed
    with spectral_norm for symmetric_gs
    '''

    if S.kind not in SPD_KINDS:
        raise ValueError('ERR: smoother not s.p.d. ({0})'.format(S.kind))

    if S.kind == 'l1_jacobi':
        norm_B = float(S.diag_data.max())
    elif S.kind == 'weighted_jacobi':
        norm_B = float((1.0 / S.diag_data).max() / S.omega)
    elif S.kind == 'block_jacobi':
        norm_B = 0.0
        for factor in S.block_data:
            L = np.tril(factor[0])
            norm_B = max(norm_B, float(scipy.linalg.eigvalsh(L @ L.T)[-1]))
    else:
        norm_B = spectral_norm(symmetric_gs_operator(S), tol)

    norm_A = spectral_norm(A, tol)
    return norm_B, norm_B / norm_A
