import numpy as np
import pytest

from kantorovich import validate_spd


def random_rotation(rng, n):
    """Haar-ish random orthogonal matrix via QR with sign fixing."""
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


def spd_with_kappa(rng, n, kappa):
    """Random SPD matrix with condition number exactly kappa.

    Smallest eigenvalue 1, largest kappa, the rest uniform in between,
    conjugated by a random rotation.
    """
    if n == 1:
        return validate_spd(np.array([[1.0]]))
    lams = np.empty(n)
    lams[0] = 1.0
    lams[-1] = kappa
    if n > 2:
        lams[1:-1] = rng.uniform(1.0, kappa, size=n - 2)
    u = random_rotation(rng, n)
    a = (u * lams) @ u.T
    return validate_spd(0.5 * (a + a.T))


def random_spd(rng, n, spread=4.0):
    lams = rng.uniform(0.5, spread, size=n)
    u = random_rotation(rng, n)
    a = (u * lams) @ u.T
    return validate_spd(0.5 * (a + a.T))


@pytest.fixture
def rng():
    return np.random.default_rng(20260814)
