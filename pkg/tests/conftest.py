import numpy as np
import pytest

import phs_kit as pk


def random_skew(rng, n):
    a = rng.standard_normal((n, n))
    return a - a.T


def random_dirac(rng, n, mix=True):
    """Valid kernel representation from the graph of a random skew map.

    D = {(J e, e)} gives F = I, G = -J; an optional well-conditioned left
    factor changes the representation without changing the subspace.
    """
    j = random_skew(rng, n)
    f_mat, g_mat = np.eye(n), -j
    if mix:
        q, _ = np.linalg.qr(rng.standard_normal((n, n)))
        scale = np.diag(rng.uniform(0.5, 2.0, size=n))
        m = q @ scale
        f_mat, g_mat = m @ f_mat, m @ g_mat
    splits = sorted(rng.choice(n + 1, size=2))
    n_s = max(1, splits[0]) if n > 1 else 1
    n_r = splits[1] - splits[0] if splits[1] >= n_s else 0
    n_s = min(n_s, n)
    n_r = min(n_r, n - n_s)
    n_p = n - n_s - n_r
    return pk.DiracKernelRep(F=f_mat, G=g_mat, n_s=n_s, n_r=n_r, n_p=n_p)


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)


@pytest.fixture
def oscillator():
    return pk.oscillator()


@pytest.fixture
def damped():
    return pk.damped_oscillator(1.0)


@pytest.fixture
def forced():
    return pk.forced_oscillator()
