# -*- coding: utf-8 -*-
"""
Created on Mon Sep 21 13:48:22 2026

@author: compamg developers

Stationary and preconditioned conjugate gradient drivers for composite
solvers, and the convergence metrics reported for them.
"""

import time
import numpy as np

from compamg.sparse_core import dot, norm
from compamg.utilities import DivergenceError, NotPositiveDefiniteError


# relative residual beyond which a stationary iteration is aborted
DIVERGENCE_LIMIT = 1e3

# number of trailing per-cycle factors averaged into the asymptotic factor
ASYMPTOTIC_WINDOW = 5


class ConvergenceReport:
    '''
    Residual history and derived factors of one solve
    '''

    def __init__(self, mode, residual_history, components, complexity=None, tol=1e-12, trivial=False):
        '''
        (str, list, int, float | None, float, bool) -> None

        :param mode: 'stationary' or 'pcg'
        :param residual_history: Relative residuals, starting with 1
        :param components: Number of components k of the composite
        :param complexity: Operator complexity per component C_k
        :param tol: Relative residual tolerance of the solve
        :param trivial: The right-hand side is zero and x = 0 is exact
        '''

        self.mode = mode
        self.residual_history = [float(i) for i in residual_history]
        self.components = components
        self.complexity = complexity
        self.tol = tol
        self.trivial = trivial
        self.rho_per_cycle = per_cycle_rates(self.residual_history, components)
        self.wall_times = {}

    @property
    def iterations(self):
        return len(self.residual_history) - 1

    @property
    def converged(self):
        return self.trivial or self.residual_history[-1] <= self.tol

    @property
    def iterations_to_tol(self):
        return self.iterations if self.converged else None

    def to_json(self):
        return {'mode': self.mode, 'components': self.components, 'complexity': self.complexity,
                'residual_history': self.residual_history, 'rho_per_cycle': self.rho_per_cycle,
                'asymptotic_rho': asymptotic_rate(self.rho_per_cycle), 'iterations': self.iterations,
                'iterations_to_tol': self.iterations_to_tol, 'converged': self.converged,
                'cycles': cycles_per_iteration(self.components) * self.iterations,
                'tol': self.tol, 'wall_times': self.wall_times}


def cycles_per_iteration(k):
    '''
    (int) -> int

    Return the number of mu-cycles of one composite application with k components
    counted as 2k - 1, and 1 for the base smoother alone
    '''

    return 2 * k - 1 if k >= 1 else 1


def per_cycle_rates(history, k):
    '''
    (list, int) -> list

    :param history: Relative residual norms
    :param k: Number of components

    Return the reduction factors (r_i / r_{i-1})^(1 / (2k - 1))
    '''

    exponent = 1.0 / cycles_per_iteration(k)
    rates = []
    for previous, current in zip(history[:-1], history[1:]):
        if previous > 0:
            rates.append(float((current / previous) ** exponent))
    return rates


def asymptotic_rate(rates, window=ASYMPTOTIC_WINDOW):
    '''
    (list, int) -> float | None

    Return the geometric mean of the last window factors, None if there are none
    '''

    tail = np.array(rates[-window:], dtype=np.float64)
    if len(tail) == 0:
        return None
    if np.any(tail == 0):
        return 0.0
    return float(np.exp(np.log(tail).mean()))


def components_of(C):
    return len(getattr(C, 'components', []))


def stationary_solve(A, C, b, tol=1e-12, max_iter=1000):
    '''
    (scipy.sparse.csr_matrix, CompositeSolver, numpy.ndarray, float, int) -> (numpy.ndarray, ConvergenceReport)

    :param A: s.p.d. matrix
    :param C: Solver providing apply(r)
    :param b: Right-hand side
    :param tol: Relative residual tolerance
    :param max_iter: Maximum number of iterations

    Return the solution of x <- x + B^{-1}(b - A x) from x = 0 and its report.
    Raise DivergenceError if the relative residual exceeds 1e3
    '''

    if not tol > 0:
        raise ValueError('ERR: Tolerance must be positive')
    start = time.perf_counter()
    k = components_of(C)
    x = np.zeros(A.shape[0])
    r = b.astype(np.float64).copy()
    r0 = norm(r)
    history = [1.0]
    if r0 > 0:
        for _ in range(max_iter):
            x += C.apply(r)
            r = b - A @ x
            history.append(norm(r) / r0)
            if not np.isfinite(history[-1]) or history[-1] > DIVERGENCE_LIMIT:
                raise DivergenceError('stationary iteration diverged (relative residual {0:.3e} after {1} iterations)'.format(history[-1], len(history) - 1))
            if history[-1] <= tol:
                break
    report = ConvergenceReport('stationary', history, k, tol=tol, trivial=r0 == 0)
    report.wall_times['solve'] = time.perf_counter() - start
    return x, report


def pcg_solve(A, C, b, tol=1e-12, max_iter=1000):
    '''
    (scipy.sparse.csr_matrix, CompositeSolver, numpy.ndarray, float, int) -> (numpy.ndarray, ConvergenceReport)

    :param A: s.p.d. matrix
    :param C: s.p.d. preconditioner providing apply(r)
    :param b: Right-hand side
    :param tol: Relative residual tolerance
    :param max_iter: Maximum number of iterations

    Return the solution of the preconditioned conjugate gradient method from x = 0
    and its report
    '''

    if not tol > 0:
        raise ValueError('ERR: Tolerance must be positive')
    start = time.perf_counter()
    k = components_of(C)
    x = np.zeros(A.shape[0])
    r = b.astype(np.float64).copy()
    r0 = norm(r)
    if r0 == 0:
        report = ConvergenceReport('pcg', [1.0], k, tol=tol, trivial=True)
        report.wall_times['solve'] = time.perf_counter() - start
        return x, report

    history = [1.0]
    z = C.apply(r)
    rz = dot(r, z)
    if rz <= 0:
        raise NotPositiveDefiniteError('matrix or preconditioner not s.p.d. (r^T z = {0})'.format(rz))
    p = z.copy()
    for _ in range(max_iter):
        Ap = A @ p
        pAp = dot(p, Ap)
        if pAp <= 0:
            raise NotPositiveDefiniteError('matrix or preconditioner not s.p.d. (p^T A p = {0})'.format(pAp))
        alpha = rz / pAp
        x += alpha * p
        r -= alpha * Ap
        history.append(norm(r) / r0)
        if history[-1] <= tol:
            break
        z = C.apply(r)
        rz_new = dot(r, z)
        if rz_new <= 0:
            raise NotPositiveDefiniteError('matrix or preconditioner not s.p.d. (r^T z = {0})'.format(rz_new))
        p = z + (rz_new / rz) * p
        rz = rz_new
    report = ConvergenceReport('pcg', history, k, tol=tol)
    report.wall_times['solve'] = time.perf_counter() - start
    return x, report


def complexity_per_component(C):
    '''
    (CompositeSolver) -> float

    Return C_k, the nonzeros of all operators of all hierarchies divided by k nnz(A)
    '''

    k = components_of(C)
    if k < 1:
        raise ValueError('ERR: Operator complexity needs at least one component')
    return C.total_nnz() / (k * C.a_ref.nnz)


def compute_metrics(C, histories):
    '''
    (CompositeSolver, dict) -> dict

    :param C: Composite solver with at least one component
    :param histories: Relative residual histories keyed by solve mode

    Return a json-serializable record with the number of components, C_k, and per
    mode the per-cycle factors, the asymptotic factor, the iteration count and the
    number of mu-cycles
    '''

    k = components_of(C)
    metrics = {'components': k, 'complexity': complexity_per_component(C)}
    for mode, history in histories.items():
        rates = per_cycle_rates(history, k)
        iterations = len(history) - 1
        metrics[mode] = {'rho_per_cycle': rates, 'asymptotic_rho': asymptotic_rate(rates),
                         'iterations': iterations, 'cycles': iterations * cycles_per_iteration(k)}
    return metrics
