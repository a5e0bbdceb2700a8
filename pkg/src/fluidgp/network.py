"""Cell-free topology: AP/UE placement, large-scale fading and user-centric clusters.

Large-scale fading follows ``beta = (max(d, d_min) / d_ref)^(-alpha) * 10^(S/10)``
with ``S`` zero-mean normal shadowing in dB, drawn i.i.d. per UE-AP pair.
Indices are 0-based throughout.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._validation import DomainError, check_int, check_nonnegative, check_positive, check_rng

__all__ = [
    "NetworkConfig",
    "NetworkRealization",
    "large_scale_fading",
    "beta_matrix",
    "cluster_users",
    "generate_network",
    "normalize_beta",
    "export_network",
]


@dataclass(frozen=True)
class NetworkConfig:
    L: int = 64
    K: int = 10
    area_side: float = 400.0
    alpha: float = 3.2
    shadow_sigma_db: float = 8.0
    cluster_size: int = 8
    ref_distance: float = 1.0
    min_distance: float = 1.0

    def __post_init__(self):
        L = check_int(self.L, "L", minimum=1)
        check_int(self.K, "K", minimum=1)
        cs = check_int(self.cluster_size, "cluster_size", minimum=1)
        if cs > L:
            raise DomainError(f"cluster_size={cs} exceeds L={L}")
        check_positive(self.area_side, "area_side")
        check_positive(self.alpha, "alpha")
        check_nonnegative(self.shadow_sigma_db, "shadow_sigma_db")
        ref = check_positive(self.ref_distance, "ref_distance")
        if check_positive(self.min_distance, "min_distance") < ref:
            raise DomainError("min_distance must be >= ref_distance")


@dataclass(frozen=True, eq=False)
class NetworkRealization:
    ap_xy: np.ndarray
    ue_xy: np.ndarray
    beta: np.ndarray
    serving: tuple
    served: tuple

    def pairs(self):
        """``(ue, ap)`` serving pairs in UE-major, AP-ascending order."""
        return [(k, l) for k, aps in enumerate(self.serving) for l in aps]

    def pair_betas(self):
        return np.array([self.beta[k, l] for k, l in self.pairs()])


def large_scale_fading(d, cfg, shadow_db=0.0):
    """Path loss with shadowing; broadcasts over ``d`` and ``shadow_db``."""
    d = np.asarray(d, dtype=float)
    if np.any(d < 0):
        raise DomainError("distance must be >= 0")
    ratio = np.maximum(d, cfg.min_distance) / cfg.ref_distance
    out = ratio ** (-cfg.alpha) * 10.0 ** (np.asarray(shadow_db, dtype=float) / 10.0)
    return float(out) if out.ndim == 0 else out


def beta_matrix(ap_xy, ue_xy, shadow_db, cfg):
    """``K x L`` large-scale coefficients from positions and shadowing draws."""
    d = np.linalg.norm(np.asarray(ue_xy)[:, None, :] - np.asarray(ap_xy)[None, :, :], axis=2)
    return large_scale_fading(d, cfg, shadow_db)


def cluster_users(beta, cluster_size):
    """Serve each UE by its ``cluster_size`` strongest APs.

    Ties go to the lower AP index. Returns ``(serving, served)``: per-UE
    sorted AP tuples and the inverse per-AP sorted UE tuples.
    """
    beta = np.asarray(beta, dtype=float)
    K, L = beta.shape
    cluster_size = check_int(cluster_size, "cluster_size", minimum=1)
    if cluster_size > L:
        raise DomainError(f"cluster_size={cluster_size} exceeds L={L}")
    order = np.argsort(-beta, axis=1, kind="stable")[:, :cluster_size]
    serving = tuple(tuple(sorted(int(l) for l in row)) for row in order)
    served = [[] for _ in range(L)]
    for k, aps in enumerate(serving):
        for l in aps:
            served[l].append(k)
    return serving, tuple(tuple(s) for s in served)


def generate_network(cfg, rng):
    """Uniform AP/UE placement on the square, shadowing, and clustering."""
    rng = check_rng(rng)
    ap_xy = rng.uniform(0.0, cfg.area_side, size=(cfg.L, 2))
    ue_xy = rng.uniform(0.0, cfg.area_side, size=(cfg.K, 2))
    shadow = rng.normal(0.0, cfg.shadow_sigma_db, size=(cfg.K, cfg.L))
    beta = beta_matrix(ap_xy, ue_xy, shadow, cfg)
    serving, served = cluster_users(beta, cfg.cluster_size)
    return NetworkRealization(ap_xy, ue_xy, beta, serving, served)


def normalize_beta(net, mode):
    """Optionally rescale ``beta`` so the median serving-pair coefficient is one."""
    if mode == "none":
        return net
    if mode != "median-one":
        raise DomainError(f"unknown beta normalization {mode!r}")
    scale = np.median(net.pair_betas())
    return NetworkRealization(net.ap_xy, net.ue_xy, net.beta / scale, net.serving, net.served)


def export_network(net, directory):
    """Write ``aps.csv``, ``ues.csv`` and ``beta.csv`` into ``directory``."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    with open(directory / "aps.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["ap_id", "x", "y"])
        for i, (x, y) in enumerate(net.ap_xy):
            w.writerow([i, repr(float(x)), repr(float(y))])
    with open(directory / "ues.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["ue_id", "x", "y"])
        for i, (x, y) in enumerate(net.ue_xy):
            w.writerow([i, repr(float(x)), repr(float(y))])
    with open(directory / "beta.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["ue_id", "ap_id", "beta"])
        K, L = net.beta.shape
        for k in range(K):
            for l in range(L):
                w.writerow([k, l, repr(float(net.beta[k, l]))])
