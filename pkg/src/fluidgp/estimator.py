"""Pilot-phase simulation and the LMMSE (GP posterior) channel estimator.

Observation model for one UE-AP pair after pilot matched filtering::

    y = sqrt(eta_p) * h + n,    n ~ CN(0, sigma2 / tau_p * I)

with ``h`` the channel at the sampling positions. With ``R = beta * K`` the
sample covariance, ``r`` the cross-covariance to the target position and
``lam = sigma2 / (eta_p * tau_p)``, the conditional mean and its error are::

    h_hat = r^T (R + lam I)^{-1} y / sqrt(eta_p)
    mse   = beta - r^T (R + lam I)^{-1} r

The ``1 / sqrt(eta_p)`` factor makes ``h_hat`` the exact conditional mean;
``mse`` is the error of that estimator for every ``eta_p``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import (
    DomainError,
    as_position_array,
    check_finite_scalar,
    check_int,
    check_nonnegative,
    check_positive,
    check_rng,
)
from .gaussfield import PositionSet, build_covariance, cross_covariance, psd_factor
from .kernel import JAKES, SpatialKernel, gram

__all__ = [
    "PilotConfig",
    "PilotBook",
    "MatchedObservation",
    "EstimationProblem",
    "make_pilot_book",
    "simulate_pilot_phase",
    "lmmse_estimate",
    "theoretical_mse",
    "nmse",
    "nmse_batch",
    "FluidAntennaGPR",
]


@dataclass(frozen=True)
class PilotConfig:
    tau_p: int = 10
    eta_p: float = 10.0
    sigma2: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "tau_p", check_int(self.tau_p, "tau_p", minimum=1))
        object.__setattr__(self, "eta_p", check_positive(self.eta_p, "eta_p"))
        object.__setattr__(self, "sigma2", check_nonnegative(self.sigma2, "sigma2"))

    @property
    def loading(self):
        """Noise loading ``sigma2 / (eta_p * tau_p)`` added to the sample covariance."""
        return self.sigma2 / (self.eta_p * self.tau_p)


@dataclass(frozen=True, eq=False)
class PilotBook:
    """``tau_p x K`` matrix of unit-modulus, mutually orthogonal pilots."""

    sequences: np.ndarray

    @property
    def tau_p(self):
        return self.sequences.shape[0]

    @property
    def K(self):
        return self.sequences.shape[1]

    def gram(self):
        return self.sequences.conj().T @ self.sequences


def make_pilot_book(K, tau_p):
    """First ``K`` columns of the ``tau_p``-point DFT basis."""
    K = check_int(K, "K", minimum=1)
    tau_p = check_int(tau_p, "tau_p", minimum=1)
    if tau_p < K:
        raise DomainError(f"orthogonal pilots need tau_p >= K (tau_p={tau_p}, K={K})")
    u = np.arange(tau_p)[:, None]
    k = np.arange(K)[None, :]
    return PilotBook(np.exp(2j * np.pi * u * k / tau_p))


@dataclass(frozen=True, eq=False)
class MatchedObservation:
    y: np.ndarray
    noise_var: float


def simulate_pilot_phase(fields, book, powers, sigma2, rng):
    """Received pilots and per-UE matched filtering at one AP.

    While the antenna rests at sampling position ``u`` the AP receives one
    full pilot block ``Y[u, s] = sum_k sqrt(eta_k) h_k(x(u)) phi_k(s) + N[u, s]``
    with ``N ~ CN(0, sigma2)``. Correlating with ``phi_k`` gives
    ``y_k(u) = (1/tau_p) sum_s conj(phi_k(s)) Y[u, s]``, i.e. the channel
    sample of UE ``k`` with noise variance ``sigma2 / tau_p`` and no
    leakage from the other (orthogonal) UEs.

    Parameters
    ----------
    fields : sequence
        One entry per UE: a :class:`FieldRealization` or a complex array of
        shape ``(n,)`` or ``(n, trials)`` with the channel at the ``n``
        sampling positions.
    book : PilotBook
    powers : sequence of float
        Pilot power per UE.
    sigma2 : float
    rng : numpy.random.Generator

    Returns
    -------
    list of MatchedObservation
    """
    rng = check_rng(rng)
    sigma2 = check_nonnegative(sigma2, "sigma2")
    H = np.stack([np.asarray(getattr(f, "values", f), dtype=complex) for f in fields])
    powers = np.asarray(powers, dtype=float).reshape(-1)
    K = H.shape[0]
    if book.K != K or powers.size != K:
        raise DomainError(
            f"dimension mismatch: {K} field(s), {book.K} pilot(s), {powers.size} power(s)"
        )
    if np.any(powers <= 0) or not np.all(np.isfinite(powers)):
        raise DomainError("pilot powers must be finite and > 0")
    tau = book.tau_p
    Phi = book.sequences
    Hs = np.sqrt(powers).reshape((K,) + (1,) * (H.ndim - 1)) * H
    # Y[u, s, ...]
    Y = np.einsum("kn...,sk->ns...", Hs, Phi)
    shape = Y.shape
    noise = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) * np.sqrt(sigma2 / 2)
    Y = Y + noise
    Yk = np.einsum("sk,ns...->kn...", Phi.conj(), Y) / tau
    return [MatchedObservation(Yk[k], sigma2 / tau) for k in range(K)]


@dataclass(frozen=True, eq=False)
class EstimationProblem:
    positions: PositionSet
    x_target: float
    beta: float
    kernel: SpatialKernel = JAKES
    pilot: PilotConfig = PilotConfig()

    def __post_init__(self):
        if not isinstance(self.positions, PositionSet):
            raise DomainError("positions must be a PositionSet")
        x = check_finite_scalar(self.x_target, "x_target")
        if not 0.0 <= x <= self.positions.ell:
            raise DomainError(f"x_target={x} outside [0, {self.positions.ell}]")
        object.__setattr__(self, "x_target", x)
        object.__setattr__(self, "beta", check_nonnegative(self.beta, "beta"))
        if not np.isfinite(self.pilot.loading):
            raise DomainError("noise loading must be finite")

    @classmethod
    def from_positions(cls, positions, x_target, beta, ell=None, pilot=None, kernel=JAKES):
        pos = as_position_array(positions)
        ell = float(max(pos.max(), x_target)) if ell is None else ell
        return cls(PositionSet(pos, ell), x_target, beta, kernel, pilot or PilotConfig())


def _solve_loaded(R, lam, rhs):
    """Solve ``(R + lam I) X = rhs`` by a (jittered if needed) Cholesky factor."""
    A = R + lam * np.eye(R.shape[0])
    factor = psd_factor(A)
    return cho_solve((factor.lower, True), rhs)


def _weights(prob):
    # w = (R + lam I)^{-1} r; zero when beta == 0 (r == 0)
    pos = prob.positions.positions
    if prob.beta == 0.0:
        return np.zeros(pos.size), np.zeros(pos.size)
    R = build_covariance(pos, prob.beta, prob.kernel)
    r = cross_covariance(prob.x_target, pos, prob.beta, prob.kernel)
    return _solve_loaded(R, prob.pilot.loading, r), r


def lmmse_estimate(obs, prob):
    """Conditional-mean estimate of the channel at ``prob.x_target``.

    ``obs.y`` may carry trailing trial dimensions; the estimate has the
    same trailing shape (a complex scalar for a single observation vector).
    """
    y = np.asarray(obs.y if isinstance(obs, MatchedObservation) else obs)
    n = len(prob.positions)
    if y.shape[:1] != (n,):
        raise DomainError(f"observation length {y.shape[:1]} != number of positions {n}")
    w, _ = _weights(prob)
    h_hat = np.tensordot(w, y, axes=(0, 0)) / np.sqrt(prob.pilot.eta_p)
    if np.ndim(h_hat) == 0:
        return complex(h_hat)
    return h_hat


def theoretical_mse(prob):
    """Closed-form MSE ``beta - r^T (R + lam I)^{-1} r``, clamped to ``[0, beta]``."""
    w, r = _weights(prob)
    mse = prob.beta - float(r @ w)
    return float(min(max(mse, 0.0), prob.beta))


def nmse(prob):
    """Normalized MSE in ``[0, 1]``; undefined for ``beta == 0``."""
    if prob.beta == 0.0:
        raise DomainError("nmse is undefined for beta = 0 (normalization by zero)")
    return theoretical_mse(prob) / prob.beta


def nmse_batch(positions, x_target, betas, pilot, kernel=JAKES):
    """NMSE of one sampling pattern for many large-scale coefficients.

    With ``K = V diag(w) V^T`` the normalized Gram matrix and ``c = (V^T k)^2``
    for the normalized cross-correlation ``k``,
    ``nmse(beta) = 1 - sum_i c_i / (w_i + lam / beta)``. One symmetric
    eigendecomposition therefore serves every ``beta``. Falls back to
    :func:`nmse` per entry when ``lam == 0``.
    """
    pos = as_position_array(positions)
    betas = np.asarray(betas, dtype=float)
    if np.any(betas <= 0) or not np.all(np.isfinite(betas)):
        raise DomainError("nmse_batch requires finite betas > 0")
    lam = pilot.loading
    if lam == 0.0:
        ell = float(max(pos.max(), x_target))
        flat = [
            nmse(EstimationProblem(PositionSet(pos, ell), x_target, b, kernel, pilot))
            for b in betas.reshape(-1)
        ]
        return np.asarray(flat).reshape(betas.shape)
    Kmat = gram(kernel, pos)
    np.fill_diagonal(Kmat, 1.0)
    kvec = gram(kernel, pos, [x_target])[:, 0]
    w, V = np.linalg.eigh(Kmat)
    w = np.clip(w, 0.0, None)
    c = (V.T @ kvec) ** 2
    b = betas.reshape(-1, 1)
    out = 1.0 - np.sum(c / (w + lam / b), axis=1)
    return np.clip(out, 0.0, 1.0).reshape(betas.shape)


class FluidAntennaGPR(BaseEstimator):
    """GP regression of a spatially correlated channel from matched pilot samples.

    ``fit`` takes the sampling positions ``X`` (shape ``(n,)`` or ``(n, 1)``)
    and the matched-filter outputs ``y`` (complex, shape ``(n,)`` or
    ``(n, m)`` for ``m`` independent observation vectors). ``predict``
    returns the posterior mean of the channel at new positions, i.e. the
    LMMSE estimate, optionally with the posterior standard deviation
    ``sqrt(MSE)``.

    Parameters
    ----------
    beta : float
        Large-scale fading coefficient (prior variance).
    eta_p : float
        Pilot power.
    sigma2 : float
        Receiver noise power.
    tau_p : int or None
        Pilot length used for the matched-filter gain. ``None`` uses the
        number of samples seen in ``fit``.
    kernel : str
        Spatial correlation kernel; only ``"jakes"``.
    """

    def __init__(self, beta=1.0, eta_p=10.0, sigma2=1.0, tau_p=None, kernel="jakes"):
        self.beta = beta
        self.eta_p = eta_p
        self.sigma2 = sigma2
        self.tau_p = tau_p
        self.kernel = kernel

    def _validate_params(self):
        check_nonnegative(self.beta, "beta")
        check_positive(self.eta_p, "eta_p")
        check_nonnegative(self.sigma2, "sigma2")
        if self.tau_p is not None:
            check_int(self.tau_p, "tau_p", minimum=1)
        return SpatialKernel(self.kernel)

    def fit(self, X, y):
        kernel = self._validate_params()
        X = as_position_array(X, "X")
        y = np.asarray(y)
        if y.shape[:1] != X.shape:
            raise DomainError(f"y has {y.shape[:1]} samples, X has {X.shape}")
        if not np.all(np.isfinite(y)):
            raise DomainError("y must be finite")
        tau_p = X.size if self.tau_p is None else self.tau_p
        pilot = PilotConfig(tau_p, self.eta_p, self.sigma2)
        self.kernel_ = kernel
        self.X_train_ = X
        self.noise_loading_ = pilot.loading
        self.n_features_in_ = 1
        R = build_covariance(X, self.beta, kernel)
        A = R + self.noise_loading_ * np.eye(X.size)
        self.factor_ = psd_factor(A) if self.beta > 0 or self.noise_loading_ > 0 else None
        if self.factor_ is None or not np.any(self.factor_.lower):
            self.alpha_ = np.zeros(y.shape, dtype=complex)
        else:
            self.alpha_ = cho_solve((self.factor_.lower, True), y.astype(complex))
        return self

    def predict(self, X, return_std=False):
        check_is_fitted(self, "alpha_")
        X = as_position_array(X, "X")
        Ks = self.beta * gram(self.kernel_, X, self.X_train_)
        mean = (Ks @ self.alpha_) / np.sqrt(self.eta_p)
        if not return_std:
            return mean
        return mean, np.sqrt(self.predictive_mse(X))

    def predictive_mse(self, X):
        """Posterior variance (the estimation MSE) at each position in ``X``."""
        check_is_fitted(self, "alpha_")
        X = as_position_array(X, "X")
        if self.beta == 0:
            return np.zeros(X.size)
        Ks = self.beta * gram(self.kernel_, X, self.X_train_)
        V = cho_solve((self.factor_.lower, True), Ks.T)
        mse = self.beta - np.einsum("ij,ji->i", Ks, V)
        return np.clip(mse, 0.0, self.beta)
