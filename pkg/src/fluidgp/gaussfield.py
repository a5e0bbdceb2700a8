"""Covariance assembly and joint sampling of the proper complex Gaussian field.

For one UE-AP pair the channel ``h(x)`` along the antenna segment is a
zero-mean circularly symmetric complex Gaussian process with covariance
``beta * kappa(x, x')``. Because the Jakes kernel is real, every covariance
built here is a real symmetric matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._validation import (
    DomainError,
    NumericError,
    as_position_array,
    check_nonnegative,
    check_positive,
    check_rng,
)
from .kernel import JAKES, gram

__all__ = [
    "PositionSet",
    "PSDFactor",
    "FieldRealization",
    "build_covariance",
    "cross_covariance",
    "joint_covariance",
    "jitter_schedule",
    "psd_factor",
    "sample_field",
    "draw_joint",
]

_JITTER_START = 1e-12
_JITTER_STOP = 1e-6


@dataclass(frozen=True, eq=False)
class PositionSet:
    """Ordered sampling positions on the segment ``[0, ell]``.

    Duplicates are allowed: sampling the same location twice is physically
    valid and simply yields a rank-deficient covariance.
    """

    positions: np.ndarray
    ell: float

    def __post_init__(self):
        ell = check_positive(self.ell, "ell")
        pos = as_position_array(self.positions).copy()
        if np.any(pos < 0) or np.any(pos > ell):
            raise DomainError(f"positions must lie in [0, {ell}]")
        pos.flags.writeable = False
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "ell", ell)

    def __len__(self):
        return self.positions.size


def _positions(p):
    if isinstance(p, PositionSet):
        return p.positions
    return as_position_array(p)


def build_covariance(p, beta, k=JAKES):
    """Covariance of the channel samples, ``beta * kappa(p_u, p_v)``.

    The diagonal is set to ``beta`` exactly.
    """
    beta = check_nonnegative(beta, "beta")
    pos = _positions(p)
    C = beta * gram(k, pos)
    np.fill_diagonal(C, beta)
    return C


def cross_covariance(x_target, p, beta, k=JAKES):
    """Covariance between the samples and the channel at ``x_target``."""
    beta = check_nonnegative(beta, "beta")
    pos = _positions(p)
    return beta * gram(k, pos, [x_target])[:, 0]


def joint_covariance(p, x_target, beta, k=JAKES):
    """``(n+1) x (n+1)`` covariance of the samples followed by the target."""
    pos = _positions(p)
    return build_covariance(np.append(pos, float(x_target)), beta, k)


def jitter_schedule(C):
    """Diagonal loads tried by :func:`psd_factor`, smallest first.

    ``0`` and then ``1e-12 * trace/n`` growing by decades up to
    ``1e-6 * trace/n``.
    """
    n = C.shape[0]
    scale = float(np.trace(C)) / n
    decades = np.arange(int(round(np.log10(_JITTER_STOP / _JITTER_START))) + 1)
    return [0.0] + [_JITTER_START * 10.0**d * scale for d in decades]


@dataclass(frozen=True, eq=False)
class PSDFactor:
    """Lower-triangular factor with ``lower @ lower.T == C + jitter * I``."""

    lower: np.ndarray
    jitter: float


def psd_factor(C):
    """Cholesky factor of a PSD matrix, escalating a diagonal load on failure.

    Raises
    ------
    NumericError
        If factorization fails at the largest load of :func:`jitter_schedule`.
    """
    C = np.asarray(C, dtype=float)
    if C.ndim != 2 or C.shape[0] != C.shape[1] or C.shape[0] == 0:
        raise DomainError(f"covariance must be a non-empty square matrix, got {C.shape}")
    if not np.all(np.isfinite(C)):
        raise DomainError("covariance must be finite")
    scale = max(np.max(np.abs(C)), 1.0)
    if np.max(np.abs(C - C.T)) > 1e-12 * scale:
        raise DomainError("covariance must be symmetric")
    n = C.shape[0]
    if not np.any(C):
        return PSDFactor(np.zeros_like(C), 0.0)
    eye = np.eye(n)
    for delta in jitter_schedule(C):
        try:
            L = np.linalg.cholesky(C + delta * eye)
        except np.linalg.LinAlgError:
            continue
        return PSDFactor(L, delta)
    eig = np.linalg.eigvalsh(0.5 * (C + C.T))
    raise NumericError(
        f"cholesky failed at maximum jitter: n={n}, trace={np.trace(C):.6g}, "
        f"min eigenvalue={eig[0]:.6g}, max eigenvalue={eig[-1]:.6g}"
    )


@dataclass(frozen=True, eq=False)
class FieldRealization:
    """Channel draws at the sampling positions plus the target position.

    ``values`` has shape ``(n,)`` or ``(n, size)``; ``target_value`` is a
    complex scalar or an array of shape ``(size,)``.
    """

    values: np.ndarray
    target_value: complex | np.ndarray


def sample_field(factor, rng, size=None, with_target=True):
    """Draw ``v = L z`` with ``z`` i.i.d. unit-variance circular complex normal.

    Real and imaginary parts of ``z`` are independent with variance 1/2 each.
    When ``with_target`` is true the factor is assumed to come from
    :func:`joint_covariance` and the last entry is returned separately as
    the target channel.
    """
    rng = check_rng(rng)
    L = factor.lower if isinstance(factor, PSDFactor) else np.asarray(factor)
    n = L.shape[0]
    shape = (n,) if size is None else (n, int(size))
    z = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) * np.sqrt(0.5)
    v = L @ z
    if not with_target:
        return FieldRealization(v, None)
    target = v[-1]
    if size is None:
        target = complex(target)
    return FieldRealization(v[:-1], target)


def draw_joint(p, x_target, beta, rng, size=None, k=JAKES):
    """Jointly sample the field at ``p`` and at ``x_target``."""
    factor = psd_factor(joint_covariance(p, x_target, beta, k))
    return sample_field(factor, rng, size=size)
