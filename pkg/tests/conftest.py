import mpmath
import numpy as np
import pytest

from fluidgp.kernel import JAKES, gram


def j0_series_oracle(t, dps=50):
    """J0 by its defining power series in arbitrary precision."""
    with mpmath.workdps(dps):
        t = mpmath.mpf(t)
        term = mpmath.mpf(1)
        total = term
        k = 0
        while True:
            k += 1
            term *= -(t * t) / (4 * k * k)
            total += term
            if abs(term) < mpmath.mpf(10) ** (-dps + 5) and k > t:
                break
        return float(total)


def schur_oracle(positions, x_target, beta, lam, y, eta):
    """Condition h(x*) on ``y = sqrt(eta) * (h + e)``, ``e ~ CN(0, lam I)``.

    Builds the joint covariance of ``(y / sqrt(eta), h(x*))`` and applies the
    Gaussian conditioning formula (Schur complement) directly.
    """
    pos = np.concatenate([np.asarray(positions, float), [x_target]])
    C = beta * gram(JAKES, pos)
    n = pos.size - 1
    Cyy = C[:n, :n] + lam * np.eye(n)
    Chy = C[n, :n]
    gain = np.linalg.solve(Cyy, Chy)
    mean = gain @ (np.asarray(y) / np.sqrt(eta))
    var = C[n, n] - Chy @ gain
    return mean, var


@pytest.fixture
def rng():
    return np.random.default_rng(20240531)
