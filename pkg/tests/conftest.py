# -*- coding: utf-8 -*-
"""
Created on Wed Sep 23 09:14:52 2026

@author: compamg developers
"""

import numpy as np
import pytest

from compamg.hierarchy import HierarchyParams
from compamg.probgen import AnisotropyParams, gen_anisotropic_2d, gen_laplace


@pytest.fixture
def laplace_1d():
    # 64 unknowns
    return gen_laplace(65, 1)


@pytest.fixture
def small_params():
    return HierarchyParams(coarse_size=4, gamma=2.0)


@pytest.fixture
def aniso_16():
    return gen_anisotropic_2d(AnisotropyParams(16, epsilon=1e-6, theta=0.0))


@pytest.fixture
def aniso_32():
    return gen_anisotropic_2d(AnisotropyParams(32, epsilon=1e-6, theta=0.0))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
