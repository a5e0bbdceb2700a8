import csv

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fluidgp import DomainError
from fluidgp.network import (
    NetworkConfig,
    beta_matrix,
    cluster_users,
    export_network,
    generate_network,
    large_scale_fading,
    normalize_beta,
)

CFG = NetworkConfig()


def test_path_loss_values():
    assert large_scale_fading(10.0, CFG) == pytest.approx(10 ** -3.2)
    assert large_scale_fading(10.0, CFG, shadow_db=10.0) == pytest.approx(10 ** -2.2)


def test_min_distance_clamp():
    assert large_scale_fading(0.0, CFG) == large_scale_fading(1.0, CFG) == 1.0


def test_negative_distance():
    with pytest.raises(DomainError):
        large_scale_fading(-1.0, CFG)


@pytest.mark.parametrize("kw", [dict(L=0), dict(cluster_size=65), dict(alpha=0), dict(shadow_sigma_db=-1),
                                dict(min_distance=0.5)])
def test_config_validation(kw):
    with pytest.raises(DomainError):
        NetworkConfig(**kw)


def test_beta_matrix_geometry():
    cfg = NetworkConfig(L=2, K=1, cluster_size=1)
    b = beta_matrix(np.array([[0.0, 0.0], [30.0, 40.0]]), np.array([[0.0, 10.0]]), 0.0, cfg)
    assert b.shape == (1, 2)
    assert b[0, 0] == pytest.approx(10 ** -3.2)
    assert b[0, 1] == pytest.approx(np.hypot(30, 30) ** -3.2)


def test_cluster_ties_go_to_lower_index():
    serving, served = cluster_users(np.array([[1.0, 2.0, 2.0, 0.5]]), 2)
    assert serving == ((1, 2),)
    assert served == ((), (0,), (0,), ())


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**63 - 1))
def test_network_invariants(seed):
    net = generate_network(CFG, np.random.default_rng(seed))
    assert net.beta.shape == (10, 64)
    assert np.all(net.beta > 0)
    assert np.all((net.ap_xy >= 0) & (net.ap_xy <= 400))
    for k, aps in enumerate(net.serving):
        assert len(aps) == 8
        weakest_served = min(net.beta[k, list(aps)])
        others = np.delete(net.beta[k], list(aps))
        assert np.all(others <= weakest_served)
        for l in aps:
            assert k in net.served[l]
    assert len(net.pairs()) == 80


def test_generation_deterministic():
    a = generate_network(CFG, np.random.default_rng(5))
    b = generate_network(CFG, np.random.default_rng(5))
    assert np.array_equal(a.beta, b.beta)


def test_median_normalization():
    net = generate_network(CFG, np.random.default_rng(1))
    out = normalize_beta(net, "median-one")
    assert np.median(out.pair_betas()) == pytest.approx(1.0)
    assert out.serving == net.serving
    assert normalize_beta(net, "none") is net
    with pytest.raises(DomainError):
        normalize_beta(net, "max")


def test_export(tmp_path):
    net = generate_network(NetworkConfig(L=4, K=2, cluster_size=2), np.random.default_rng(0))
    export_network(net, tmp_path / "n")
    rows = list(csv.DictReader(open(tmp_path / "n" / "beta.csv")))
    assert len(rows) == 8
    assert float(rows[5]["beta"]) == net.beta[1, 1]
    assert list(csv.reader(open(tmp_path / "n" / "aps.csv")))[0] == ["ap_id", "x", "y"]
