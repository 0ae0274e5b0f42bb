# -*- coding: utf-8 -*-
"""
Created on Thu Sep 24 15:40:02 2026

@author: compamg developers
"""

import numpy as np
import pytest
import scipy.sparse as sp

from compamg.composite import CompositeSolver
from compamg.hierarchy import HierarchyParams, build_hierarchy
from compamg.probgen import gen_laplace
from compamg.smoothers import build_smoother
from compamg.solve_drivers import ConvergenceReport, stationary_solve, pcg_solve, per_cycle_rates, asymptotic_rate, \
 cycles_per_iteration, complexity_per_component, compute_metrics
from compamg.utilities import DivergenceError, NotPositiveDefiniteError


class ScaledIdentity:
    '''
    Preconditioner returning scale * r
    '''

    def __init__(self, scale=1.0):
        self.scale = scale

    def apply(self, r):
        return self.scale * r


@pytest.fixture
def exact_composite():
    A = gen_laplace(9, 1)
    H = build_hierarchy(A, np.ones(8), HierarchyParams(coarse_size=64))
    return CompositeSolver(A, build_smoother(A, 'l1_jacobi'), [H])


def test_pcg_identity_converges_at_once():
    A = sp.identity(10, format='csr')
    x, report = pcg_solve(A, ScaledIdentity(), np.arange(1.0, 11.0))
    assert report.iterations == 1
    assert np.allclose(x, np.arange(1.0, 11.0))
    assert report.converged


def test_pcg_two_distinct_eigenvalues():
    A = sp.diags([1.0, 2.0, 1.0, 2.0], format='csr')
    x, report = pcg_solve(A, ScaledIdentity(), np.ones(4))
    assert report.iterations <= 2
    assert np.allclose(A @ x, np.ones(4))


def test_pcg_rejects_indefinite_preconditioner():
    with pytest.raises(NotPositiveDefiniteError):
        pcg_solve(sp.identity(5, format='csr'), ScaledIdentity(-1.0), np.ones(5))


def test_pcg_laplace_with_l1_preconditioner():
    A = gen_laplace(33, 1)
    C = CompositeSolver(A, build_smoother(A, 'l1_jacobi'))
    b = np.ones(32)
    x, report = pcg_solve(A, C, b, tol=1e-10)
    assert report.converged
    assert np.linalg.norm(b - A @ x) <= 1e-10 * np.linalg.norm(b)
    assert report.residual_history[0] == 1.0


def test_stationary_divergence():
    with pytest.raises(DivergenceError):
        stationary_solve(sp.identity(5, format='csr'), ScaledIdentity(10.0), np.ones(5))


def test_stationary_exact_composite(exact_composite):
    b = np.arange(8.0)
    x, report = stationary_solve(exact_composite.a_ref, exact_composite, b)
    assert report.iterations == 1
    assert report.components == 1
    assert np.allclose(exact_composite.a_ref @ x, b)


def test_zero_rhs(exact_composite):
    A = exact_composite.a_ref
    for solve in [stationary_solve, pcg_solve]:
        x, report = solve(A, exact_composite, np.zeros(8))
        assert report.iterations == 0
        assert report.residual_history == [1.0]
        assert report.converged
        assert not np.any(x)


def test_tolerance_must_be_positive(exact_composite):
    with pytest.raises(ValueError):
        stationary_solve(exact_composite.a_ref, exact_composite, np.ones(8), tol=0)


def test_stationary_stops_at_max_iter():
    A = gen_laplace(33, 1)
    C = CompositeSolver(A, build_smoother(A, 'l1_jacobi'))
    _, report = stationary_solve(A, C, np.ones(32), max_iter=5)
    assert report.iterations == 5
    assert not report.converged
    assert report.iterations_to_tol is None


def test_per_cycle_rates():
    assert per_cycle_rates([1.0, 0.125], 2) == pytest.approx([0.5])
    assert per_cycle_rates([1.0, 0.5, 0.25], 1) == pytest.approx([0.5, 0.5])
    assert cycles_per_iteration(0) == 1
    assert cycles_per_iteration(3) == 5


def test_asymptotic_rate():
    assert asymptotic_rate([]) is None
    assert asymptotic_rate([0.9, 0.1, 0.1, 0.1, 0.1, 0.1]) == pytest.approx(0.1)
    assert asymptotic_rate([0.5, 0.0]) == 0.0


def test_convergence_report_json():
    report = ConvergenceReport('pcg', [1.0, 0.1, 1e-13], 1, tol=1e-12)
    record = report.to_json()
    assert record['iterations'] == 2
    assert record['iterations_to_tol'] == 2
    assert record['cycles'] == 2
    assert record['converged']
    assert record['rho_per_cycle'] == pytest.approx([0.1, 1e-12])


def test_compute_metrics(exact_composite):
    metrics = compute_metrics(exact_composite, {'stationary': [1.0, 0.5, 0.25, 0.125]})
    assert metrics['components'] == 1
    # a single level hierarchy stores A once
    assert metrics['complexity'] == 1.0
    assert metrics['stationary']['rho_per_cycle'] == pytest.approx([0.5, 0.5, 0.5])
    assert metrics['stationary']['asymptotic_rho'] == pytest.approx(0.5)
    assert metrics['stationary']['cycles'] == 3


def test_complexity_needs_components():
    A = gen_laplace(9, 1)
    with pytest.raises(ValueError):
        complexity_per_component(CompositeSolver(A, build_smoother(A, 'l1_jacobi')))
