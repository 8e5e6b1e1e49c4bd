import itertools

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from pairlab.linalg import Mat, rank

settings.register_profile("default", deadline=None, max_examples=50,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

PRIMES = [2, 3, 5, 7, 101]


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def rand_mat(rng, n, p, m=None):
    return Mat(rng.integers(0, p, size=(n, n if m is None else m)), p)


def rand_invertible(rng, n, p):
    while True:
        X = rand_mat(rng, n, p)
        if rank(X) == n:
            return X


def jordan(n, p, eig=0):
    a = np.eye(n, k=1, dtype=np.int64) + eig * np.eye(n, dtype=np.int64)
    return Mat(a, p)


def all_matrices(n, p):
    for entries in itertools.product(range(p), repeat=n * n):
        yield Mat(np.array(entries, dtype=np.int64).reshape(n, n), p)


def all_invertible(n, p):
    return [X for X in all_matrices(n, p) if rank(X) == n]
