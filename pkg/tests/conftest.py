import numpy as np
import pytest

from msapprox.geometry import mat_exp_sym, symmetrize


def rand_sym(rng, d=3, scale=1.0):
    return symmetrize(rng.standard_normal((d, d))) * scale


def rand_spd(rng, d=3, scale=1.0):
    return mat_exp_sym(rand_sym(rng, d, scale))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
