"""Exceptions and small input-validation helpers shared across the package."""

from __future__ import annotations

import numbers

import numpy as np


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class NumericError(np.linalg.LinAlgError):
    """A numerical routine failed (e.g. factorization at maximum jitter)."""


class StreamError(TypeError):
    """A random stream argument is missing or not usable."""


def check_finite_scalar(value, name):
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise DomainError(f"{name} must be a real number, got {value!r}") from None
    if not np.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value}")
    return value


def check_nonnegative(value, name):
    value = check_finite_scalar(value, name)
    if value < 0:
        raise DomainError(f"{name} must be >= 0, got {value}")
    return value


def check_positive(value, name):
    value = check_finite_scalar(value, name)
    if value <= 0:
        raise DomainError(f"{name} must be > 0, got {value}")
    return value


def check_int(value, name, minimum=None):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise DomainError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if minimum is not None and value < minimum:
        raise DomainError(f"{name} must be >= {minimum}, got {value}")
    return value


def as_position_array(positions, name="positions"):
    """Return positions as a finite, non-empty 1-D float array.

    Column vectors of shape ``(n, 1)`` are accepted and flattened, matching
    the ``X`` convention of scikit-learn estimators.
    """
    arr = np.asarray(positions, dtype=float)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    elif arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise DomainError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise DomainError(f"{name} must be non-empty")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite")
    return arr


def check_rng(rng):
    """Accept a ``numpy.random.Generator`` only; anything else is a stream error."""
    if not isinstance(rng, np.random.Generator):
        raise StreamError(
            f"expected numpy.random.Generator, got {type(rng).__name__}"
        )
    return rng
