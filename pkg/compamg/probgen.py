# -*- coding: utf-8 -*-
"""
Created on Tue Sep 15 09:02:51 2026

@author: compamg developers

Desk-scale s.p.d. test matrices: anisotropic diffusion -div(K grad u) = 1 with
homogeneous Dirichlet conditions, K = eps I + beta beta^T, discretized with
bilinear (2-D) or trilinear (3-D) elements on a uniform grid of the unit
square/cube, and textbook Laplacian stencils.
The unscaled stiffness matrix is assembled (reference element of side 1).
"""

import itertools
import numpy as np
import scipy.sparse as sp

from compamg.sparse_core import to_csr


class AnisotropyParams:
    '''
    Parameters of the anisotropic diffusion problem
    '''

    def __init__(self, n, epsilon=1e-6, theta=0.0, phi=0.0):
        '''
        (int, float, float, float) -> None

        :param n: Number of cells per axis
        :param epsilon: Cross-direction diffusivity
        :param theta: Angle of the dominant direction in the xy plane (radians)
        :param phi: Elevation of the dominant direction (radians, 3-D only)
        '''

        self.n = n
        self.epsilon = epsilon
        self.theta = theta
        self.phi = phi

    def check(self):
        '''
        (None) -> None

        Raise a ValueError if the parameters are invalid
        '''

        if int(self.n) != self.n or self.n < 2:
            raise ValueError('ERR: The number of cells per axis must be an integer >= 2')
        if not self.epsilon > 0:
            raise ValueError('ERR: epsilon must be positive')

    def beta(self, dim):
        '''
        (int) -> numpy.ndarray

        :param dim: Space dimension, 2 or 3

        Return the dominant diffusion direction
        '''

        if dim == 2:
            return np.array([np.cos(self.theta), np.sin(self.theta)])
        return np.array([np.cos(self.theta) * np.cos(self.phi),
                         np.sin(self.theta) * np.cos(self.phi),
                         np.sin(self.phi)])

    def tensor(self, dim):
        '''
        (int) -> numpy.ndarray

        Return the diffusion tensor K = eps I + beta beta^T
        '''

        beta = self.beta(dim)
        return self.epsilon * np.eye(dim) + np.outer(beta, beta)


def element_stiffness(K):
    '''
    (numpy.ndarray) -> numpy.ndarray

    :param K: Constant d x d diffusion tensor

    Return the 2^d x 2^d stiffness matrix of the multilinear element on the unit
    box, int grad(phi_a)^T K grad(phi_b). Local node a has corner offsets given by
    the bits of itertools.product([0, 1], repeat=d), last axis fastest.
    Two-point Gauss quadrature per axis is exact here
    '''

    dim = K.shape[0]
    corners = np.array(list(itertools.product([0, 1], repeat=dim)))
    g = 0.5 / np.sqrt(3.0)
    points = np.array(list(itertools.product([0.5 - g, 0.5 + g], repeat=dim)))
    # each quadrature point has weight 1 / 2^d
    weight = 1.0 / len(points)

    Ke = np.zeros((len(corners), len(corners)))
    for xi in points:
        # values of the 1-D hat functions along each axis, per corner
        hats = np.where(corners == 1, xi, 1.0 - xi)
        slopes = np.where(corners == 1, 1.0, -1.0)
        grads = np.empty((len(corners), dim))
        for k in range(dim):
            others = np.prod(np.delete(hats, k, axis=1), axis=1)
            grads[:, k] = slopes[:, k] * others
        Ke += weight * grads @ K @ grads.T
    # symmetrize against rounding
    return 0.5 * (Ke + Ke.T)


def assemble_diffusion(n, K):
    '''
    (int, numpy.ndarray) -> scipy.sparse.csr_matrix

    :param n: Cells per axis
    :param K: Constant diffusion tensor (2 x 2 or 3 x 3)

    Return the stiffness matrix on the (n-1)^d interior nodes, the Dirichlet
    boundary rows and columns being eliminated. Unknowns are numbered
    lexicographically with the last axis fastest
    '''

    dim = K.shape[0]
    Ke = element_stiffness(K)
    corners = list(itertools.product([0, 1], repeat=dim))

    # lower-left corner of every element
    origins = np.indices((n,) * dim).reshape(dim, -1)
    interior = n - 1

    rows, cols, vals = [], [], []
    for a, ca in enumerate(corners):
        node_a = origins + np.array(ca)[:, None]
        for b, cb in enumerate(corners):
            node_b = origins + np.array(cb)[:, None]
            # keep couplings between interior nodes only
            keep = np.all((node_a >= 1) & (node_a <= n - 1) & (node_b >= 1) & (node_b <= n - 1), axis=0)
            ia = np.ravel_multi_index(tuple(node_a[:, keep] - 1), (interior,) * dim)
            ib = np.ravel_multi_index(tuple(node_b[:, keep] - 1), (interior,) * dim)
            rows.append(ia)
            cols.append(ib)
            vals.append(np.full(len(ia), Ke[a, b]))

    size = interior ** dim
    A = sp.coo_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(size, size))
    A = to_csr(A)
    # mirror the upper triangle
    upper = sp.triu(A, k=1)
    return to_csr(sp.triu(A) + upper.T)


def gen_anisotropic_2d(p):
    '''
    (AnisotropyParams) -> scipy.sparse.csr_matrix

    :param p: Problem parameters, beta = (cos theta, sin theta)

    Return the bilinear element (9-point stencil) matrix of dimension (n-1)^2
    '''

    p.check()
    return assemble_diffusion(int(p.n), p.tensor(2))


def gen_anisotropic_3d(p):
    '''
    (AnisotropyParams) -> scipy.sparse.csr_matrix

    :param p: Problem parameters, beta = (cos theta cos phi, sin theta cos phi, sin phi)

    Return the trilinear element (27-point stencil) matrix of dimension (n-1)^3
    '''

    p.check()
    return assemble_diffusion(int(p.n), p.tensor(3))


def gen_rhs(p, dim):
    '''
    (AnisotropyParams, int) -> numpy.ndarray

    Return the constant 1 load vector matching the unit source term
    '''

    p.check()
    return np.ones((int(p.n) - 1) ** dim)


def gen_laplace(n, dim):
    '''
    (int, int) -> scipy.sparse.csr_matrix

    :param n: Number of cells per axis, n-1 interior points per axis
    :param dim: 1, 2 or 3

    Return the unscaled 3-point, 5-point or 7-point Dirichlet Laplacian
    '''

    if int(n) != n or n < 2:
        raise ValueError('ERR: The number of cells per axis must be an integer >= 2')
    if dim not in [1, 2, 3]:
        raise ValueError('ERR: Laplacian dimension must be 1, 2 or 3')
    m = int(n) - 1
    T = sp.diags([-np.ones(m - 1), 2 * np.ones(m), -np.ones(m - 1)], [-1, 0, 1])
    I = sp.identity(m)
    if dim == 1:
        A = T
    elif dim == 2:
        A = sp.kron(T, I) + sp.kron(I, T)
    else:
        A = sp.kron(sp.kron(T, I), I) + sp.kron(sp.kron(I, T), I) + sp.kron(sp.kron(I, I), T)
    return to_csr(A)


def grid_coordinates(n, dim):
    '''
    (int, int) -> numpy.ndarray

    :param n: Cells per axis
    :param dim: Space dimension

    Return a ((n-1)^dim, dim) array with the grid index of every unknown,
    column 0 is x (slowest axis)
    '''

    m = int(n) - 1
    return np.indices((m,) * dim).reshape(dim, -1).T
