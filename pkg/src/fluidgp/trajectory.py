"""Motion-constrained fluid-antenna sampling trajectories.

A trajectory is the ordered list of antenna positions used during the
pilot symbols. Consecutive positions may differ by at most
``d_max = v_max * T_s``. Discrete (port-based) trajectories must in
addition sit exactly on one of ``Q`` uniformly spaced ports.

All indices (positions, ports) are 0-based.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._validation import (
    DomainError,
    as_position_array,
    check_finite_scalar,
    check_int,
    check_positive,
    check_rng,
)

__all__ = [
    "TOL",
    "MotionConstraint",
    "PortSet",
    "Trajectory",
    "ValidationReport",
    "linear_sweep",
    "oscillatory",
    "random_admissible",
    "discrete_greedy",
    "discrete_track",
    "validate",
    "read_csv",
    "write_csv",
]

TOL = 1e-12


@dataclass(frozen=True)
class MotionConstraint:
    v_max: float = 0.3
    T_s: float = 1.0
    ell: float = 2.0

    def __post_init__(self):
        object.__setattr__(self, "v_max", check_positive(self.v_max, "v_max"))
        object.__setattr__(self, "T_s", check_positive(self.T_s, "T_s"))
        object.__setattr__(self, "ell", check_positive(self.ell, "ell"))

    @property
    def d_max(self):
        """Largest admissible displacement between consecutive symbols."""
        return self.v_max * self.T_s


@dataclass(frozen=True, eq=False)
class PortSet:
    """``Q`` uniformly spaced ports spanning ``[0, ell]`` (one port at ``ell/2`` if ``Q == 1``)."""

    Q: int
    ell: float

    def __post_init__(self):
        object.__setattr__(self, "Q", check_int(self.Q, "Q", minimum=1))
        object.__setattr__(self, "ell", check_positive(self.ell, "ell"))

    @property
    def ports(self):
        if self.Q == 1:
            return np.array([self.ell / 2.0])
        return np.linspace(0.0, self.ell, self.Q)

    @property
    def spacing(self):
        return np.inf if self.Q == 1 else self.ell / (self.Q - 1)


@dataclass(frozen=True, eq=False)
class Trajectory:
    positions: np.ndarray
    kind: str = "continuous"

    def __post_init__(self):
        if self.kind not in ("continuous", "discrete"):
            raise DomainError(f"unknown trajectory kind {self.kind!r}")
        pos = as_position_array(self.positions).copy()
        pos.flags.writeable = False
        object.__setattr__(self, "positions", pos)

    def __len__(self):
        return self.positions.size

    def __getitem__(self, item):
        return self.positions[item]

    def prefix(self, tau_p):
        return Trajectory(self.positions[:tau_p], self.kind)


def _check_tau(tau_p):
    return check_int(tau_p, "tau_p", minimum=1)


def _reflect_walk(lo, hi, step, tau_p, start):
    # Reaching a boundary (clamped or exact) reverses direction, so a sample
    # is never wasted by a zero-length step into the wall.
    x = start
    s = -1.0 if start >= hi else 1.0
    out = np.empty(tau_p)
    out[0] = x
    for u in range(1, tau_p):
        nxt = x + s * step
        if nxt >= hi:
            nxt, s = hi, -1.0
        elif nxt <= lo:
            nxt, s = lo, 1.0
        x = nxt
        out[u] = x
    return out


def linear_sweep(c, tau_p, start=0.0):
    """Sweep at full speed, reflecting off the segment ends.

    >>> linear_sweep(MotionConstraint(0.3, 1.0, 2.0), 4).positions
    array([0. , 0.3, 0.6, 0.9])
    """
    tau_p = _check_tau(tau_p)
    start = check_finite_scalar(start, "start")
    if not 0.0 <= start <= c.ell:
        raise DomainError(f"start={start} outside [0, {c.ell}]")
    return Trajectory(_reflect_walk(0.0, c.ell, c.d_max, tau_p, start))


def oscillatory(c, tau_p, center, amplitude, period=None):
    """Triangle wave inside ``[center - amplitude, center + amplitude]``.

    Starts at ``center`` moving upward. The per-symbol step is ``d_max``,
    or ``min(d_max, 2 * amplitude / period)`` when ``period`` (symbols per
    one-way traversal of the window) is given. ``amplitude == 0`` holds the
    antenna at ``center``.
    """
    tau_p = _check_tau(tau_p)
    center = check_finite_scalar(center, "center")
    amplitude = check_finite_scalar(amplitude, "amplitude")
    if amplitude < 0:
        raise DomainError("amplitude must be >= 0")
    lo, hi = center - amplitude, center + amplitude
    if lo < -TOL or hi > c.ell + TOL:
        raise DomainError(f"window [{lo}, {hi}] outside [0, {c.ell}]")
    lo, hi = max(lo, 0.0), min(hi, c.ell)
    step = c.d_max
    if period is not None:
        period = check_positive(period, "period")
        step = min(step, 2.0 * amplitude / period)
    return Trajectory(_reflect_walk(lo, hi, step, tau_p, min(max(center, lo), hi)))


def random_admissible(c, tau_p, rng):
    """Uniform start, then each step uniform over the reachable interval."""
    tau_p = _check_tau(tau_p)
    rng = check_rng(rng)
    out = np.empty(tau_p)
    out[0] = rng.uniform(0.0, c.ell)
    for u in range(1, tau_p):
        lo = max(0.0, out[u - 1] - c.d_max)
        hi = min(c.ell, out[u - 1] + c.d_max)
        out[u] = rng.uniform(lo, hi)
    return Trajectory(out)


def discrete_greedy(ps, c, tau_p, start_index=0):
    """Round-robin port sweep under the per-symbol displacement limit.

    Each symbol hops to the adjacent port in the current direction if it is
    within ``d_max``; the direction flips at the end ports. When the
    adjacent port is out of reach the antenna dwells where it is.
    """
    tau_p = _check_tau(tau_p)
    start_index = check_int(start_index, "start_index")
    ports = ps.ports
    Q = ports.size
    if not 0 <= start_index < Q:
        raise DomainError(f"start_index={start_index} outside [0, {Q - 1}]")
    i, s = start_index, 1
    idx = [i]
    for _ in range(tau_p - 1):
        j = i + s
        if not 0 <= j < Q:
            s = -s
            j = i + s
        if 0 <= j < Q and abs(ports[j] - ports[i]) <= c.d_max + TOL:
            i = j
        idx.append(i)
    return Trajectory(ports[idx], kind="discrete")


def discrete_track(ps, c, reference):
    """Port-constrained counterpart of a continuous trajectory.

    Starts on the port nearest ``reference[0]``; afterwards each symbol
    moves to the reachable port nearest the reference position (lower index
    on ties). As the port set becomes dense the result converges to the
    reference itself.
    """
    ref = reference.positions if isinstance(reference, Trajectory) else as_position_array(reference)
    ports = ps.ports
    i = int(np.argmin(np.abs(ports - ref[0])))
    idx = [i]
    for target in ref[1:]:
        reach = np.flatnonzero(np.abs(ports - ports[i]) <= c.d_max + TOL)
        i = int(reach[np.argmin(np.abs(ports[reach] - target))])
        idx.append(i)
    return Trajectory(ports[idx], kind="discrete")


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    index: int | None = None
    rule: str | None = None
    message: str = "ok"

    def __bool__(self):
        return self.ok


def validate(t, c, ps=None):
    """Check bounds, speed and (optionally) port membership.

    Returns a :class:`ValidationReport` naming the first offending index and
    rule; violations are never raised.
    """
    pos = t.positions if isinstance(t, Trajectory) else np.asarray(t, dtype=float).reshape(-1)
    ports = None if ps is None else ps.ports
    for u, x in enumerate(pos.tolist()):
        if not np.isfinite(x) or x < -TOL or x > c.ell + TOL:
            return ValidationReport(
                False, u, "bounds",
                f"bounds violation at index {u}: position {x!r} outside [0, {c.ell!r}]",
            )
        if u > 0:
            step = abs(x - float(pos[u - 1]))
            if step > c.d_max + TOL:
                return ValidationReport(
                    False, u, "speed",
                    f"speed violation at index {u}: step {step:.12g} exceeds v_max*T_s = {c.d_max!r}",
                )
        if ports is not None and not np.any(ports == x):
            return ValidationReport(
                False, u, "port",
                f"port-membership violation at index {u}: position {x!r} is not a port",
            )
    return ValidationReport(True)


def write_csv(t, path):
    """Write a single ``position`` column with header."""
    pos = t.positions if isinstance(t, Trajectory) else as_position_array(t)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["position"])
        for x in pos:
            writer.writerow([repr(float(x))])


def read_csv(path, kind="continuous"):
    """Read a trajectory written by :func:`write_csv`.

    Raises
    ------
    DomainError
        If the header is missing or a row is not a single finite number.
    """
    with open(Path(path), newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(cell.strip() for cell in r)]
    if not rows or [cell.strip() for cell in rows[0]] != ["position"]:
        raise DomainError(f"{path}: expected header 'position'")
    values = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != 1:
            raise DomainError(f"{path}:{lineno}: expected one column, got {len(row)}")
        try:
            values.append(float(row[0]))
        except ValueError:
            raise DomainError(f"{path}:{lineno}: not a number: {row[0]!r}") from None
    if not values:
        raise DomainError(f"{path}: no positions")
    return Trajectory(np.array(values), kind=kind)
