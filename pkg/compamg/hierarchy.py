# -*- coding: utf-8 -*-
"""
Created on Thu Sep 17 10:12:44 2026

@author: compamg developers

Smoothed aggregation hierarchies built from aggregations and near-null
candidates, and the mu-cycles applying them.
"""

import math
import numpy as np
import scipy.linalg
import scipy.sparse as sp

from compamg.coarsening import Aggregation, aggregate
from compamg.smoothers import build_smoother, smoother_apply
from compamg.sparse_core import to_csr, triple_product
from compamg.utilities import NotCoarsenableError, NotPositiveDefiniteError


class HierarchyParams:
    '''
    Parameters of a smoothed aggregation hierarchy and of its cycle
    '''

    def __init__(self, mu=1, nu=2, gamma=4.0, coarse_size=64, omega=2.0 / 3.0,
                 fine_smoother='l1_jacobi', skip_fine_smoothing=False,
                 strength_combine='sum', matching='maximal'):
        '''
        (int, int, float, int, float, str, bool, str, str) -> None

        :param mu: Cycle parameter, 1 for V-cycles and 2 for W-cycles
        :param nu: Total number of pre- and post-smoothing sweeps per level
        :param gamma: Target coarsening factor
        :param coarse_size: Levels of at most this dimension are solved directly
        :param omega: Weight of the interpolation smoother
        :param fine_smoother: Smoother kind of the finest level
        :param skip_fine_smoothing: Use the tentative interpolation on the finest level
        :param strength_combine: Combination of the candidates in the strength graph
        :param matching: 'maximal' or 'single' matching per coarsening step
        '''

        self.mu = mu
        self.nu = nu
        self.gamma = gamma
        self.coarse_size = coarse_size
        self.omega = omega
        self.fine_smoother = fine_smoother
        self.skip_fine_smoothing = skip_fine_smoothing
        self.strength_combine = strength_combine
        self.matching = matching


class Level:
    '''
    One level of a hierarchy. interp is None on the coarsest level
    '''

    def __init__(self, operator, interp=None, smoother=None, candidates=None, aggregation=None, deficiency=0):
        self.operator = operator
        self.interp = interp
        self.smoother = smoother
        self.candidates = candidates
        self.aggregation = aggregation
        self.deficiency = deficiency

    def __repr__(self):
        return 'Level(dim={0}, nnz={1})'.format(self.operator.shape[0], self.operator.nnz)


class Hierarchy:
    '''
    Ordered levels, finest first, and the dense Cholesky factor of the coarsest operator
    '''

    def __init__(self, levels, coarse_factorization, params):
        self.levels = levels
        self.coarse_factorization = coarse_factorization
        self.params = params

    def __len__(self):
        return len(self.levels)

    @property
    def n_sa(self):
        W = self.levels[0].candidates
        return 0 if W is None else W.shape[1]


def tentative_interp(agg, W, rank_tol=1e-10):
    '''
    (Aggregation, numpy.ndarray, float) -> (scipy.sparse.csr_matrix, numpy.ndarray, numpy.ndarray, int)

    :param agg: Aggregation of the rows of W
    :param W: Candidate vectors, one per column
    :param rank_tol: Relative threshold on the pivots of the local QR

    Return a tuple (P, R, dof_to_node, deficiency). The rows of aggregate a in P hold
    an orthonormal basis of W restricted to a (thin QR, positive diagonal of R), and
    P R = W. Coarse unknowns of an aggregate are consecutive, dof_to_node maps each
    of them to its aggregate. Columns that are dependent within an aggregate are
    dropped locally and counted in deficiency
    '''

    W = np.asarray(W, dtype=np.float64)
    if W.ndim == 1:
        W = W[:, None]
    if W.shape[0] != len(agg):
        raise ValueError('ERR: Candidates have {0} rows for {1} aggregated vertices'.format(W.shape[0], len(agg)))
    n_cols = W.shape[1]
    scale = np.abs(W).max() if W.size else 0.0

    rows, cols, vals, blocks, nodes = [], [], [], [], []
    offset, deficiency, n_nodes = 0, 0, 0
    for members in agg.members():
        Wa = W[members, :]
        Q, R = np.linalg.qr(Wa)
        pivots = np.abs(np.diag(R))
        if len(pivots) == n_cols and np.all(pivots > rank_tol * scale):
            signs = np.where(np.diag(R) < 0, -1.0, 1.0)
            Q, R = Q * signs, R * signs[:, None]
        else:
            # rank revealing factorization, keep the independent directions only
            Qp, Rp, _ = scipy.linalg.qr(Wa, mode='economic', pivoting=True)
            rank = int(np.sum(np.abs(np.diag(Rp)) > rank_tol * scale))
            Q = Qp[:, :rank]
            R = Q.T @ Wa
        rank = Q.shape[1]
        deficiency += n_cols - rank
        if rank == 0:
            continue
        rows.append(np.repeat(members, rank))
        cols.append(np.tile(np.arange(offset, offset + rank), len(members)))
        vals.append(Q.ravel())
        blocks.append(R)
        nodes.append(np.full(rank, n_nodes))
        n_nodes += 1
        offset += rank

    if offset == 0:
        raise ValueError('ERR: Candidates vanish on every aggregate')
    P = sp.coo_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(len(agg), offset))
    return to_csr(P), np.vstack(blocks), np.concatenate(nodes), deficiency


def smooth_interp(A, P, omega=2.0 / 3.0):
    '''
    (scipy.sparse.csr_matrix, scipy.sparse.csr_matrix, float) -> scipy.sparse.csr_matrix

    :param A: Matrix with positive diagonal
    :param P: Tentative interpolation
    :param omega: Damping weight of the Jacobi smoother

    Return the smoothed interpolation (I - omega D^{-1} A) P
    '''

    diagonal = A.diagonal()
    if np.any(diagonal == 0):
        raise ValueError('ERR: Zero diagonal entry in interpolation smoothing')
    if omega == 0:
        return to_csr(P)
    return to_csr(P - sp.diags(omega / diagonal) @ (A @ P))


def node_offsets(dof_to_node):
    '''
    (numpy.ndarray) -> numpy.ndarray

    Return the block boundaries of the consecutive unknowns of every node
    '''

    return np.concatenate([[0], np.cumsum(np.bincount(dof_to_node))]).astype(np.int64)


def level_smoother(A, level, params, dof_to_node=None, n_sa=1):
    '''
    (scipy.sparse.csr_matrix, int, HierarchyParams, numpy.ndarray | None, int) -> SmootherState

    Return the smoother of a level: the configured kind on the finest level,
    block Jacobi over the unknowns of each node on coarse levels carrying several
    candidates, the configured kind otherwise
    '''

    if level > 0 and n_sa > 1 and dof_to_node is not None:
        return build_smoother(A, 'block_jacobi', block_offsets=node_offsets(dof_to_node))
    return build_smoother(A, params.fine_smoother, block_size=max(n_sa, 1), omega=params.omega)


def factorize_coarse(A):
    '''
    (scipy.sparse.csr_matrix) -> tuple

    Return the dense Cholesky factor of the symmetrized operator for scipy.linalg.cho_solve
    '''

    dense = A.toarray()
    try:
        return scipy.linalg.cho_factor(0.5 * (dense + dense.T), lower=True)
    except np.linalg.LinAlgError:
        raise NotPositiveDefiniteError('coarsest operator of dimension {0} is not positive definite'.format(A.shape[0]))


def build_hierarchy(A, W, params=None):
    '''
    (scipy.sparse.csr_matrix, numpy.ndarray, HierarchyParams | None) -> Hierarchy

    :param A: s.p.d. matrix
    :param W: Near-null candidates, one per column
    :param params: Hierarchy parameters. Defaults if None

    Return the hierarchy obtained by repeated aggregation, tentative interpolation,
    interpolation smoothing and Galerkin products. Coarsening stops when the
    dimension is at most params.coarse_size or when it stalls. A stall on the
    finest level raises NotCoarsenableError
    '''

    params = HierarchyParams() if params is None else params
    W = np.asarray(W, dtype=np.float64)
    if W.ndim == 1:
        W = W[:, None]
    if W.shape[0] != A.shape[0]:
        raise ValueError('ERR: Candidates have {0} rows, matrix has {1}'.format(W.shape[0], A.shape[0]))
    n_sa = W.shape[1]

    levels = []
    A_l, W_l, dof_to_node = to_csr(A), W, None
    while A_l.shape[0] > params.coarse_size:
        n_l = A_l.shape[0]
        initial = None if dof_to_node is None else Aggregation(dof_to_node)
        agg = aggregate(A_l, W_l, params.gamma, initial, params.strength_combine, params.matching)
        P, W_c, coarse_nodes, deficiency = tentative_interp(agg, W_l)
        if P.shape[1] >= n_l:
            if len(levels) == 0:
                raise NotCoarsenableError('matrix not coarsenable with given candidates')
            break
        if len(levels) == 0 and params.skip_fine_smoothing:
            P_tilde = P
        else:
            P_tilde = smooth_interp(A_l, P, params.omega)
        A_c = triple_product(P_tilde, A_l)
        # full column rank of the interpolation shows on the coarse diagonal
        if np.any(A_c.diagonal() <= 0):
            raise NotPositiveDefiniteError('coarse operator at level {0} has a non-positive diagonal'.format(len(levels) + 1))
        smoother = level_smoother(A_l, len(levels), params, dof_to_node, n_sa)
        levels.append(Level(A_l, P_tilde, smoother, W_l, agg, deficiency))
        A_l, W_l, dof_to_node = A_c, W_c, coarse_nodes

    levels.append(Level(A_l, candidates=W_l))
    return Hierarchy(levels, factorize_coarse(A_l), params)


def cycle_sweeps(nu, transpose=False):
    '''
    (int, bool) -> (int, int)

    Return the number of pre- and post-smoothing sweeps. The transposed cycle
    swaps them
    '''

    pre = int(math.ceil(nu / 2))
    post = nu - pre
    return (post, pre) if transpose else (pre, post)


def mu_cycle(H, level, b, x, transpose=False):
    '''
    (Hierarchy, int, numpy.ndarray, numpy.ndarray, bool) -> None

    :param H: Hierarchy
    :param level: Index of the current level
    :param b: Right-hand side on this level
    :param x: Iterate on this level, updated in place
    :param transpose: Apply the A-adjoint cycle

    Apply one mu-cycle: pre-smoothing, mu recursive coarse corrections from a zero
    coarse guess, post-smoothing with the sweep direction reversed. The coarsest
    level is solved with the dense Cholesky factor
    '''

    current = H.levels[level]
    A = current.operator
    if current.interp is None:
        x += scipy.linalg.cho_solve(H.coarse_factorization, b - A @ x)
        return

    pre, post = cycle_sweeps(H.params.nu, transpose)
    smoother_apply(current.smoother, A, b, x, sweeps=pre)

    P = current.interp
    r_c = P.T @ (b - A @ x)
    x_c = np.zeros(P.shape[1])
    for _ in range(H.params.mu):
        mu_cycle(H, level + 1, r_c, x_c, transpose)
    x += P @ x_c

    smoother_apply(current.smoother, A, b, x, sweeps=post, reverse=True)


def hierarchy_apply(H, b, transpose=False):
    '''
    (Hierarchy, numpy.ndarray, bool) -> numpy.ndarray

    :param H: Hierarchy
    :param b: Right-hand side on the finest level
    :param transpose: Apply the transposed cycle

    Return B^{-1} b (or B^{-T} b), one mu-cycle from a zero initial guess
    '''

    if b.shape[0] != H.levels[0].operator.shape[0]:
        raise ValueError('ERR: Dimension mismatch in hierarchy application')
    x = np.zeros(b.shape[0])
    mu_cycle(H, 0, b, x, transpose)
    return x


def total_nnz(H):
    return int(sum(level.operator.nnz for level in H.levels))


def operator_complexity(H):
    '''
    (Hierarchy) -> float

    Return sum_l nnz(A_l) / nnz(A_0)
    '''

    return total_nnz(H) / H.levels[0].operator.nnz


def hierarchy_summary(H):
    '''
    (Hierarchy) -> dict

    :param H: Hierarchy

    Return a json-serializable summary with the dimension, number of nonzeros,
    number of aggregates and rank deficiency of every level
    '''

    levels = []
    for level in H.levels:
        levels.append({'dim': int(level.operator.shape[0]),
                       'nnz': int(level.operator.nnz),
                       'aggregates': None if level.aggregation is None else int(level.aggregation.n_agg),
                       'deficiency': int(level.deficiency)})
    return {'levels': levels, 'operator_complexity': float(operator_complexity(H)),
            'candidates': H.n_sa}
