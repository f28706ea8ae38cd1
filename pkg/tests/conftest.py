import numpy as np
import pytest
import scipy.linalg as sla

from petzlab.channels import KrausSet
from petzlab.linalg import random_density_matrix


@pytest.fixture
def rng():
    return np.random.default_rng(20240617)


def random_channel(d, n_kraus, rng):
    """Random CPTP map: a Ginibre stack made into an isometry."""
    g = rng.standard_normal((n_kraus * d, d)) + 1j * rng.standard_normal((n_kraus * d, d))
    v = g @ sla.fractional_matrix_power(g.conj().T @ g, -0.5)
    return KrausSet(v.reshape(n_kraus, d, d))


def random_state(d, rng, rank=None):
    return random_density_matrix(d, rng, rank)


def basis_op(d, i, j):
    e = np.zeros((d, d), complex)
    e[i, j] = 1
    return e


PAULI_X = np.array([[0, 1], [1, 0]], complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], complex)
PAULI_Z = np.array([[1, 0], [0, -1]], complex)
