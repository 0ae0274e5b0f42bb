# -*- coding: utf-8 -*-
"""
Created on Fri Sep 18 09:31:06 2026

@author: compamg developers

Adaptive composite solver. Hierarchies targeting the error left behind by
the current solver are built one at a time and composed symmetrically around
a base smoother:

    I - B^{-1} A = (I - B_m^{-T} A) ... (I - B_1^{-T} A) (I - B_0^{-1} A) (I - B_1^{-1} A) ... (I - B_m^{-1} A)
"""

import time
import warnings
import numpy as np
import scipy.linalg

from compamg.hierarchy import HierarchyParams, build_hierarchy, hierarchy_apply, hierarchy_summary, total_nnz
from compamg.smoothers import SPD_KINDS, build_smoother, smoother_apply, smoother_norm_bound
from compamg.sparse_core import a_norm, is_symmetric, norm
from compamg.utilities import NotPositiveDefiniteError


# relative A-norm below which a tester run counts as solved exactly
EXACT_FLOOR = 1e-13

# random pairs of the symmetry and positivity check of a built composite
SPD_CHECK_PAIRS = 20

# asymmetry of A accepted by the build, relative to max |a_ij|
SYMMETRY_TOL = 1e-12


class AdaptiveConfig(HierarchyParams):
    '''
    Parameters of the adaptive build, hierarchy parameters included
    '''

    def __init__(self, target_rho=0.9, tester_iters=20, candidates=1, max_components=10,
                 seed=1, ortho_period=5, base_smoother='l1_jacobi', stall_threshold=0.999,
                 stall_steps=3, **hierarchy_params):
        '''
        (float, int, int, int, int, int, str, float, int, **) -> None

        :param target_rho: Convergence factor to reach, in (0, 1)
        :param tester_iters: Number of tester iterations
        :param candidates: Number of near-null candidates per component
        :param max_components: Maximum number of hierarchies in the composite
        :param seed: Seed from which every random vector is derived
        :param ortho_period: Orthonormalization period of the multi-vector tester
        :param base_smoother: s.p.d. smoother kind of the base solver
        :param stall_threshold: Reduction factor treated as a stall by the tester
        :param stall_steps: Consecutive stalled steps ending a tester run
        :param hierarchy_params: Keyword arguments of HierarchyParams
        '''

        HierarchyParams.__init__(self, **hierarchy_params)
        self.target_rho = target_rho
        self.tester_iters = tester_iters
        self.candidates = candidates
        self.max_components = max_components
        self.seed = seed
        self.ortho_period = ortho_period
        self.base_smoother = base_smoother
        self.stall_threshold = stall_threshold
        self.stall_steps = stall_steps

    def check(self):
        '''
        (None) -> None

        Raise a ValueError if a parameter is out of range
        '''

        if not 0 < self.target_rho < 1:
            raise ValueError('ERR: Target convergence factor must lie in (0, 1)')
        if self.tester_iters < 2:
            raise ValueError('ERR: The tester needs at least 2 iterations')
        if self.candidates < 1:
            raise ValueError('ERR: At least 1 candidate is required')
        if self.gamma < 2:
            raise ValueError('ERR: Coarsening factor must be >= 2')
        if self.mu < 1 or self.nu < 0:
            raise ValueError('ERR: Cycle parameter must be >= 1 and smoothing steps >= 0')
        if self.max_components < 0:
            raise ValueError('ERR: Maximum number of components must be >= 0')
        if self.coarse_size < 1:
            raise ValueError('ERR: Coarse size must be >= 1')
        if self.ortho_period < 1:
            raise ValueError('ERR: Orthonormalization period must be >= 1')
        if self.base_smoother not in SPD_KINDS:
            raise ValueError('ERR: Base smoother must be one of {0}'.format(', '.join(SPD_KINDS)))

    def to_dict(self):
        return dict(sorted(vars(self).items()))


class CompositeSolver:
    '''
    Base smoother B_0 and components B_1, ..., B_m applied as a symmetric sandwich
    '''

    def __init__(self, A, base, components=None):
        '''
        (scipy.sparse.csr_matrix, SmootherState, list | None) -> None

        :param A: Reference matrix
        :param base: s.p.d. base smoother built on A
        :param components: Hierarchies built on A, innermost first
        '''

        self.a_ref = A
        self.base = base
        self.components = [] if components is None else list(components)

    def __len__(self):
        return len(self.components)

    def append(self, H):
        self.components.append(H)

    def apply(self, b):
        return composite_apply(self, b)

    def prefix(self, k):
        '''
        (int) -> CompositeSolver

        Return the composite made of the base and the first k components
        '''

        if not 0 <= k <= len(self.components):
            raise ValueError('ERR: Composite has {0} components, {1} requested'.format(len(self.components), k))
        return CompositeSolver(self.a_ref, self.base, self.components[:k])

    def apply_symmetrized(self, k, b):
        '''
        (int, numpy.ndarray) -> numpy.ndarray

        :param k: Component index, 1-based
        :param b: Right-hand side

        Return the symmetrized solve of component k, the solver with error propagation
        (I - B_k^{-T} A)(I - B_k^{-1} A)
        '''

        H = self.components[k - 1]
        x = hierarchy_apply(H, b)
        x += hierarchy_apply(H, b - self.a_ref @ x, transpose=True)
        return x

    def total_nnz(self):
        return sum(total_nnz(H) for H in self.components)


class TesterResult:
    '''
    Outcome of a tester run. w is None when the solver was found exact
    '''

    def __init__(self, rho_b, w, history, exact=False, stalled=False):
        self.rho_b = rho_b
        self.w = w
        self.history = history
        self.exact = exact
        self.stalled = stalled

    @property
    def steps(self):
        return len(self.history) - 1


class NearNullBasis:
    '''
    Euclidean orthonormal candidate block with the last measured reduction
    factor of each column
    '''

    def __init__(self, columns, rates, provenance=None, exact=False, steps=0, stalled=False):
        self.columns = columns
        self.rates = rates
        self.provenance = provenance
        self.exact = exact
        self.steps = steps
        self.stalled = stalled

    def __len__(self):
        return self.columns.shape[1]

    @property
    def rho_b(self):
        return float(np.max(self.rates)) if len(self.rates) else 0.0


def composite_apply(C, b):
    '''
    (CompositeSolver, numpy.ndarray) -> numpy.ndarray

    :param C: Composite solver
    :param b: Right-hand side

    Return B^{-1} b: starting from zero, the components are applied from the
    outermost to the innermost, then the base smoother, then the transposed
    components from the innermost to the outermost
    '''

    A = C.a_ref
    if b.shape[0] != A.shape[0]:
        raise ValueError('ERR: Dimension mismatch in composite application')
    x = np.zeros(b.shape[0])
    for H in reversed(C.components):
        x += hierarchy_apply(H, b - A @ x)
    smoother_apply(C.base, A, b, x)
    for H in C.components:
        x += hierarchy_apply(H, b - A @ x, transpose=True)
    return x


def spd_check(C, pairs=SPD_CHECK_PAIRS, seed=0, tol=1e-10):
    '''
    (CompositeSolver, int, int, float) -> dict

    :param C: Composite solver
    :param pairs: Number of random pairs (u, v)
    :param seed: Seed of the random pairs
    :param tol: Largest accepted relative symmetry defect

    Return the largest relative defect |u^T B^{-1} v - v^T B^{-1} u| and the smallest
    Rayleigh quotient u^T B^{-1} u / u^T u over the pairs. Raise NotPositiveDefiniteError
    if the defect exceeds tol or a quotient is not positive
    '''

    rng = np.random.default_rng(seed)
    defect, rayleigh = 0.0, np.inf
    for _ in range(pairs):
        u, v = rng.normal(size=(2, C.a_ref.shape[0]))
        Cu, Cv = C.apply(u), C.apply(v)
        scale = max(norm(u) * norm(v), norm(Cu) * norm(v), norm(Cv) * norm(u))
        defect = max(defect, abs(np.dot(u, Cv) - np.dot(v, Cu)) / scale)
        rayleigh = min(rayleigh, np.dot(u, Cu) / np.dot(u, u), np.dot(v, Cv) / np.dot(v, v))
    if defect > tol:
        raise NotPositiveDefiniteError('composite solver not symmetric (relative defect {0:.3e})'.format(defect))
    if rayleigh <= 0:
        raise NotPositiveDefiniteError('composite solver not positive definite (b^T B^-1 b / b^T b = {0:.3e})'.format(rayleigh))
    return {'pairs': pairs, 'symmetry_defect': float(defect), 'min_rayleigh': float(rayleigh)}


def tester(A, C, m, seed=1, stall_threshold=0.999, stall_steps=3):
    '''
    (scipy.sparse.csr_matrix, CompositeSolver, int, int, float, int) -> TesterResult

    :param A: s.p.d. matrix
    :param C: Solver to test
    :param m: Maximum number of iterations, >= 2
    :param seed: Seed of the random start
    :param stall_threshold: Reduction factor counted as stalled
    :param stall_steps: Number of consecutive stalled steps ending the run

    Return the measured convergence factor ||x_m||_A / ||x_{m-1}||_A of the
    iteration x <- (I - B^{-1} A) x on A x = 0 and the normalized last iterate
    '''

    if m < 2:
        raise ValueError('ERR: The tester needs at least 2 iterations')
    x = np.random.default_rng(seed).uniform(-1.0, 1.0, A.shape[0])
    history = [a_norm(x, A)]
    stalled_steps = 0
    for _ in range(m):
        x = x - C.apply(A @ x)
        history.append(a_norm(x, A))
        if history[-1] <= EXACT_FLOOR * history[0]:
            warnings.warn('no near-null component found, the solver is exact', RuntimeWarning)
            return TesterResult(0.0, None, np.array(history), exact=True)
        stalled_steps = stalled_steps + 1 if history[-1] >= stall_threshold * history[-2] else 0
        if stalled_steps >= stall_steps:
            break
    return TesterResult(history[-1] / history[-2], x / norm(x), np.array(history), stalled=stalled_steps >= stall_steps)


def orthonormalize(X, A, drop_tol=1e-10):
    '''
    (numpy.ndarray, scipy.sparse.csr_matrix, float) -> (numpy.ndarray, numpy.ndarray)

    :param X: Block of column vectors
    :param A: s.p.d. matrix giving the processing order
    :param drop_tol: Relative size below which a projected column is dropped

    Return the block orthonormalized with modified Gram-Schmidt, columns taken in
    order of decreasing A-norm, and the original indices of the kept columns
    '''

    order = np.argsort([-a_norm(X[:, i], A) for i in range(X.shape[1])], kind='stable')
    kept, index = [], []
    for i in order:
        v = X[:, i].copy()
        size = norm(v)
        for q in kept:
            v -= np.dot(q, v) * q
        if size == 0 or norm(v) <= drop_tol * size:
            continue
        kept.append(v / norm(v))
        index.append(i)
    if len(kept) == 0:
        return np.zeros((X.shape[0], 0)), np.array(index, dtype=np.int64)
    return np.column_stack(kept), np.array(index, dtype=np.int64)


def multi_tester(A, C, m, n_vectors, ortho_period=5, seed=1, stall_threshold=0.999, stall_steps=3):
    '''
    (scipy.sparse.csr_matrix, CompositeSolver, int, int, int, int, float, int) -> NearNullBasis

    :param A: s.p.d. matrix
    :param C: Solver to test
    :param m: Number of iterations
    :param n_vectors: Number of simultaneous random starts
    :param ortho_period: Orthonormalize every ortho_period iterations
    :param seed: Seed of the random starts
    :param stall_threshold: Reduction factor counted as stalled
    :param stall_steps: Number of consecutive steps with every column stalled ending the run

    Return the near-null basis found by testing n_vectors random starts in lockstep
    '''

    if n_vectors < 1:
        raise ValueError('ERR: At least one test vector is required')
    if n_vectors == 1:
        result = tester(A, C, m, seed, stall_threshold, stall_steps)
        if result.exact:
            return NearNullBasis(np.zeros((A.shape[0], 0)), np.zeros(0), exact=True, steps=result.steps)
        return NearNullBasis(result.w[:, None], np.array([result.rho_b]), np.array([0]), steps=result.steps,
                            stalled=result.stalled)
    if m < 2:
        raise ValueError('ERR: The tester needs at least 2 iterations')

    X = np.random.default_rng(seed).uniform(-1.0, 1.0, (A.shape[0], n_vectors))
    provenance = np.arange(n_vectors)
    initial = max(a_norm(X[:, i], A) for i in range(n_vectors))
    rates = np.ones(n_vectors)
    stalled_steps, step = 0, 0
    for step in range(1, m + 1):
        before = np.array([a_norm(X[:, i], A) for i in range(X.shape[1])])
        X = np.column_stack([X[:, i] - C.apply(A @ X[:, i]) for i in range(X.shape[1])])
        after = np.array([a_norm(X[:, i], A) for i in range(X.shape[1])])
        rates = np.divide(after, before, out=np.zeros_like(after), where=before > 0)
        alive = after > EXACT_FLOOR * initial
        X, rates, provenance = X[:, alive], rates[alive], provenance[alive]
        if X.shape[1] == 0:
            break
        stalled_steps = stalled_steps + 1 if np.all(rates >= stall_threshold) else 0
        stalled = stalled_steps >= stall_steps
        if step % ortho_period == 0 or step == m or stalled:
            X, index = orthonormalize(X, A)
            rates, provenance = rates[index], provenance[index]
        if stalled:
            break

    if X.shape[1] == 0:
        warnings.warn('no near-null component found, the solver is exact', RuntimeWarning)
        return NearNullBasis(X, np.zeros(0), exact=True, steps=step)
    return NearNullBasis(X, rates, provenance, steps=step, stalled=stalled_steps >= stall_steps)


def theorem_check(A, w, rho_b, norm_B, tol=1e-8):
    '''
    (scipy.sparse.csr_matrix, numpy.ndarray, float, float, float) -> (bool, float)

    :param A: s.p.d. matrix
    :param w: Candidate returned by the tester
    :param rho_b: Measured convergence factor
    :param norm_B: Spectral norm of the s.p.d. solver (c0 ||A||)
    :param tol: Relative slack

    Return a tuple (holds, ratio) with ratio = ||A w||^2 / (norm_B delta ||w||_A^2),
    delta = 1 - rho_b^2. The near-null estimate holds when ratio <= 1 + tol
    '''

    delta = 1.0 - rho_b ** 2
    if delta <= 0:
        warnings.warn('measured convergence factor {0} >= 1, delta clamped'.format(rho_b), RuntimeWarning)
        delta = np.finfo(np.float64).eps
    energy = a_norm(w, A) ** 2
    if energy == 0:
        return True, 0.0
    ratio = norm(A @ w) ** 2 / (norm_B * delta * energy)
    return bool(ratio <= 1.0 + tol), float(ratio)


class BuildLog:
    '''
    Record of an adaptive build, one entry per tester pass
    '''

    def __init__(self, config, nnz):
        self.config = config
        self.nnz = nnz
        self.entries = []
        self.norm_B = None
        self.stop_reason = None
        self.spd_check = None

    def record(self, components, rho_b, margin, holds, exact, seed):
        self.entries.append({'components': components, 'rho_b': float(rho_b),
                             'theorem_margin': margin, 'theorem_holds': holds,
                             'exact': exact, 'seed': int(seed), 'hierarchy': None,
                             'complexity': None, 'wall_time': 0.0})
        return self.entries[-1]

    def rho_sequence(self):
        return [entry['rho_b'] for entry in self.entries]

    @property
    def final_rho(self):
        return self.entries[-1]['rho_b'] if self.entries else None

    def to_json(self):
        '''
        (None) -> dict

        Return the json-serializable content of the log
        '''

        return {'config': self.config.to_dict(), 'fine_nnz': int(self.nnz), 'norm_B': self.norm_B,
                'entries': self.entries, 'final_rho': self.final_rho,
                'components': sum(1 for entry in self.entries if entry['hierarchy'] is not None),
                'stop_reason': self.stop_reason, 'spd_check': self.spd_check}


def adaptive_build(A, config=None):
    '''
    (scipy.sparse.csr_matrix, AdaptiveConfig | None) -> (CompositeSolver, BuildLog)

    :param A: s.p.d. matrix
    :param config: Build parameters. Defaults if None

    Return the composite solver and its build log. The current solver is tested,
    a hierarchy is built from the near-null candidates it leaves behind and added
    as a new component, until the measured factor reaches config.target_rho, the
    solver is exact or config.max_components components are built
    '''

    config = AdaptiveConfig() if config is None else config
    config.check()
    if A.shape[0] == 0 or not is_symmetric(A, SYMMETRY_TOL * abs(A).max()):
        raise ValueError('ERR: Matrix is empty or not symmetric, the composite solver needs an s.p.d. matrix')

    base = build_smoother(A, config.base_smoother, block_size=config.candidates)
    norm_B, _ = smoother_norm_bound(base, A)
    C = CompositeSolver(A, base)
    log = BuildLog(config, A.nnz)
    log.norm_B = float(norm_B)
    seeds = np.random.default_rng(config.seed).integers(0, 2 ** 31 - 1, size=config.max_components + 1)

    for iteration, seed in enumerate(seeds):
        start = time.perf_counter()
        basis = multi_tester(A, C, config.tester_iters, config.candidates, config.ortho_period,
                             int(seed), config.stall_threshold, config.stall_steps)
        if basis.exact:
            entry = log.record(len(C), 0.0, None, None, True, seed)
        else:
            # the leading column is the slowest error component
            holds, margin = theorem_check(A, basis.columns[:, 0], float(basis.rates[0]), norm_B)
            entry = log.record(len(C), basis.rho_b, margin, holds, False, seed)

        if basis.exact:
            log.stop_reason = 'exact'
        elif basis.rho_b <= config.target_rho:
            log.stop_reason = 'target'
        elif len(C) >= config.max_components:
            log.stop_reason = 'max_components'
        if log.stop_reason is not None:
            entry['wall_time'] = time.perf_counter() - start
            break

        H = build_hierarchy(A, basis.columns, config)
        C.append(H)
        entry['hierarchy'] = hierarchy_summary(H)
        entry['complexity'] = C.total_nnz() / (len(C) * A.nnz)
        entry['wall_time'] = time.perf_counter() - start

    log.spd_check = spd_check(C, seed=config.seed)
    return C, log


def subspace_overlap(Q, W, tol=1e-8):
    '''
    (numpy.ndarray, numpy.ndarray, float) -> (float, numpy.ndarray)

    :param Q: Column-orthonormal reference basis
    :param W: Column-orthonormal basis to score
    :param tol: Largest accepted deviation of the Gram matrices from the identity

    Return a tuple (score, per_vector) with score = ||Q^T W||_* / cols(Q), the nuclear
    norm computed from the eigenvalues of the small Gram matrix, and per_vector[i] =
    ||W^T q_i||
    '''

    if Q.shape[0] != W.shape[0]:
        raise ValueError('ERR: Bases have {0} and {1} rows'.format(Q.shape[0], W.shape[0]))
    for name, X in [('Q', Q), ('W', W)]:
        if np.abs(X.T @ X - np.eye(X.shape[1])).max() > tol:
            raise ValueError('ERR: {0} is not column-orthonormal'.format(name))
    M = Q.T @ W
    gram = M @ M.T if M.shape[0] <= M.shape[1] else M.T @ M
    singular = np.sqrt(np.clip(scipy.linalg.eigvalsh(gram), 0.0, None))
    return float(singular.sum() / Q.shape[1]), np.linalg.norm(M, axis=1)
