import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fluidgp import DomainError
from fluidgp.trajectory import (
    MotionConstraint,
    PortSet,
    Trajectory,
    discrete_greedy,
    discrete_track,
    linear_sweep,
    oscillatory,
    random_admissible,
    read_csv,
    validate,
    write_csv,
)

C = MotionConstraint()
taus = st.integers(1, 60)


def test_defaults():
    assert C.d_max == pytest.approx(0.3)
    assert C.ell == 2.0


def test_ports():
    assert np.allclose(PortSet(5, 2.0).ports, [0, 0.5, 1, 1.5, 2])
    assert np.array_equal(PortSet(1, 2.0).ports, [1.0])
    assert PortSet(8, 2.0).spacing == pytest.approx(2 / 7)


def test_linear_sweep_reflects():
    assert np.allclose(linear_sweep(C, 10).positions,
                       [0, 0.3, 0.6, 0.9, 1.2, 1.5, 1.8, 2.0, 1.7, 1.4])


def test_linear_sweep_from_upper_end_moves_down():
    assert np.allclose(linear_sweep(C, 3, start=2.0).positions, [2.0, 1.7, 1.4])


def test_oscillatory_window():
    t = oscillatory(C, 7, 1.0, 0.3)
    assert np.allclose(t.positions, [1.0, 1.3, 1.0, 0.7, 1.0, 1.3, 1.0])


def test_oscillatory_zero_amplitude_hovers():
    assert np.all(oscillatory(C, 5, 1.0, 0.0).positions == 1.0)


def test_oscillatory_period_slows_step():
    t = oscillatory(C, 3, 1.0, 0.2, period=4)
    assert np.allclose(np.diff(t.positions), [0.1, 0.1])


def test_oscillatory_window_outside_segment():
    with pytest.raises(DomainError):
        oscillatory(C, 4, 1.9, 0.3)


def test_greedy_q8_walks_ports():
    ps = PortSet(8, 2.0)
    t = discrete_greedy(ps, C, 10)
    idx = [int(np.flatnonzero(ps.ports == x)[0]) for x in t.positions]
    assert idx == [0, 1, 2, 3, 4, 5, 6, 7, 6, 5]
    assert t.kind == "discrete"


def test_greedy_dwells_when_ports_out_of_reach():
    t = discrete_greedy(PortSet(4, 2.0), C, 5)
    assert np.all(t.positions == 0.0)


def test_greedy_single_port():
    assert np.all(discrete_greedy(PortSet(1, 2.0), C, 4).positions == 1.0)


def test_track_converges_to_reference_on_dense_ports():
    ref = oscillatory(C, 10, 1.0, 0.3)
    ps = PortSet(21, 2.0)  # 0.1 spacing contains the reference exactly
    assert np.allclose(discrete_track(ps, C, ref).positions, ref.positions)


@given(taus)
def test_sweep_admissible_and_prefix_closed(tau):
    t = linear_sweep(C, tau)
    assert validate(t, C)
    assert np.array_equal(t.prefix(max(1, tau // 2)).positions,
                          linear_sweep(C, max(1, tau // 2)).positions)


@given(taus, st.integers(0, 63))
def test_greedy_admissible_on_ports(tau, seed):
    q = [2, 4, 8, 16, 32, 64][seed % 6]
    ps = PortSet(q, 2.0)
    assert validate(discrete_greedy(ps, C, tau, seed % q), C, ps)


@given(taus, st.integers(0, 2**32))
def test_random_admissible_is_admissible(tau, seed):
    assert validate(random_admissible(C, tau, np.random.default_rng(seed)), C)


@settings(max_examples=50)
@given(taus, st.integers(0, 2**32), st.sampled_from([8, 16, 32, 64]))
def test_track_admissible(tau, seed, q):
    ps = PortSet(q, 2.0)
    ref = random_admissible(C, tau, np.random.default_rng(seed))
    assert validate(discrete_track(ps, C, ref), C, ps)


def test_validate_speed_message():
    rep = validate(Trajectory([0.0, 0.31]), C)
    assert not rep and rep.index == 1 and rep.rule == "speed"
    assert rep.message.startswith("speed violation at index 1")


def test_validate_bounds():
    rep = validate(Trajectory([0.0, 2.5]), MotionConstraint(ell=2.0, v_max=10))
    assert (rep.ok, rep.rule, rep.index) == (False, "bounds", 1)


def test_validate_exact_step_passes():
    assert validate(Trajectory([0.0, 0.3, 0.6]), C)


def test_validate_port_membership():
    ps = PortSet(8, 2.0)
    rep = validate(Trajectory([0.0, 0.3]), C, ps)
    assert rep.rule == "port" and rep.index == 1


def test_csv_round_trip(tmp_path):
    t = linear_sweep(C, 12)
    write_csv(t, tmp_path / "t.csv")
    assert np.array_equal(read_csv(tmp_path / "t.csv").positions, t.positions)


@pytest.mark.parametrize("body", ["", "pos\n1\n", "position\nabc\n", "position\n1,2\n", "position\n"])
def test_malformed_csv(tmp_path, body):
    path = tmp_path / "bad.csv"
    path.write_text(body)
    with pytest.raises(DomainError):
        read_csv(path)


@settings(max_examples=200)
@given(taus, st.integers(1, 64), st.integers(0, 63))
def test_port_admissible_implies_continuous_admissible(tau, q, start):
    ps = PortSet(q, 2.0)
    t = discrete_greedy(ps, C, tau, start % q)
    assert validate(t, C, ps)
    assert validate(t, C)


@given(taus, st.sampled_from([8, 9, 16, 32, 64]))
def test_greedy_coverage_when_ports_reachable(tau, q):
    ps = PortSet(q, 2.0)
    assert ps.spacing <= C.d_max
    assert len(set(discrete_greedy(ps, C, tau).positions.tolist())) == min(q, tau)
