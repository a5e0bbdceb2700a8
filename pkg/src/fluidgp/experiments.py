"""Monte Carlo experiments comparing continuous and port-based FA sampling.

Each scheme is scored per serving UE-AP pair by the lowest NMSE among a
structured family of admissible trajectories:

* continuous: the family selected by ``ExperimentSpec.trajectory``
  (``"oscillatory"``: triangle waves centred on the target with amplitudes
  0, d_max, 2 d_max, ...; ``"sweep"``: the full-speed linear sweep from 0;
  ``"random"``: ``n_random`` random admissible walks);
* discrete: the round-robin port sweep from every start port, plus the
  port-constrained counterpart of every continuous candidate.

The continuous family never depends on ``Q``. Per-pair NMSE is a
deterministic function of beta and the positions, so randomness enters only
through the network geometry and shadowing. Realization ``r`` draws from the
stream ``SeedSequence(master_seed, spawn_key=(r, ...))``; results are
reduced in realization order, hence independent of the thread count.
"""

from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from ._validation import DomainError, check_int
from .estimator import (
    EstimationProblem,
    PilotConfig,
    lmmse_estimate,
    make_pilot_book,
    nmse,
    nmse_batch,
    simulate_pilot_phase,
    theoretical_mse,
)
from .gaussfield import PositionSet, joint_covariance, psd_factor, sample_field
from .kernel import JAKES, SpatialKernel
from .network import NetworkConfig, export_network, generate_network, normalize_beta
from .trajectory import (
    TOL,
    MotionConstraint,
    PortSet,
    discrete_greedy,
    discrete_track,
    linear_sweep,
    oscillatory,
    random_admissible,
)

__all__ = [
    "SCHEMES",
    "ExperimentSpec",
    "ResultTable",
    "EmpiricalReport",
    "DominanceReport",
    "continuous_candidates",
    "discrete_candidates",
    "evaluate_pair",
    "ecdf",
    "run_cdf",
    "run_sweep",
    "check_dominance",
    "empirical_check",
]

SCHEMES = ("continuous", "discrete")
TRAJECTORY_FAMILIES = ("oscillatory", "sweep", "random")
SWEEP_KINDS = ("none", "tau_p", "ell", "Q")
ECDF_POINTS = 200
_EMPIRICAL_KEY = 1 << 32


@dataclass(frozen=True)
class ExperimentSpec:
    network: NetworkConfig = field(default_factory=NetworkConfig)
    pilot: PilotConfig = field(default_factory=PilotConfig)
    motion: MotionConstraint = field(default_factory=MotionConstraint)
    kernel: SpatialKernel = JAKES
    trajectory: str = "oscillatory"
    Q: int = 8
    x_target: float | None = None
    sweep: str = "none"
    values: tuple = ()
    realizations: int = 200
    master_seed: int = 0
    beta_normalization: str = "none"
    n_random: int = 8

    def __post_init__(self):
        if self.trajectory not in TRAJECTORY_FAMILIES:
            raise DomainError(f"trajectory must be one of {TRAJECTORY_FAMILIES}")
        if self.sweep not in SWEEP_KINDS:
            raise DomainError(f"sweep must be one of {SWEEP_KINDS}")
        check_int(self.Q, "Q", minimum=1)
        check_int(self.realizations, "realizations", minimum=1)
        check_int(self.n_random, "n_random", minimum=1)
        seed = check_int(self.master_seed, "master_seed", minimum=0)
        if seed >= 1 << 64:
            raise DomainError("master_seed must fit in 64 bits")
        if self.beta_normalization not in ("none", "median-one"):
            raise DomainError("beta_normalization must be 'none' or 'median-one'")
        values = tuple(self.values)
        if self.sweep != "none":
            if not values:
                raise DomainError(f"{self.sweep} sweep needs at least one value")
            if any(b <= a for a, b in zip(values, values[1:])):
                raise DomainError(f"{self.sweep} sweep values must be strictly increasing")
            if self.sweep in ("tau_p", "Q"):
                values = tuple(check_int(v, self.sweep, minimum=1) for v in values)
            else:
                values = tuple(float(v) for v in values)
        object.__setattr__(self, "values", values)
        self.target  # validates x_target against ell

    @property
    def target(self):
        x = self.motion.ell / 2.0 if self.x_target is None else float(self.x_target)
        if not 0.0 <= x <= self.motion.ell:
            raise DomainError(f"x_target={x} outside [0, {self.motion.ell}]")
        return x

    @property
    def port_set(self):
        return PortSet(self.Q, self.motion.ell)

    def at(self, value):
        """Copy with the sweep parameter set to ``value`` (no sweep)."""
        if self.sweep == "none" or value is None:
            return replace(self, sweep="none", values=())
        if self.sweep == "tau_p":
            return replace(self, pilot=replace(self.pilot, tau_p=value), sweep="none", values=())
        if self.sweep == "ell":
            return replace(self, motion=replace(self.motion, ell=value), sweep="none", values=())
        return replace(self, Q=value, sweep="none", values=())


def _stream(seed, *key):
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


def continuous_candidates(spec, realization=0):
    c, tau, x = spec.motion, spec.pilot.tau_p, spec.target
    if spec.trajectory == "sweep":
        return [linear_sweep(c, tau, 0.0)]
    if spec.trajectory == "oscillatory":
        reach = min(x, c.ell - x)
        n = int(np.floor(reach / c.d_max + TOL))
        return [oscillatory(c, tau, x, min(j * c.d_max, reach)) for j in range(n + 1)]
    return [
        random_admissible(c, tau, _stream(spec.master_seed, realization, 1, j))
        for j in range(spec.n_random)
    ]


def discrete_candidates(spec, continuous):
    ps, c, tau = spec.port_set, spec.motion, spec.pilot.tau_p
    out = [discrete_greedy(ps, c, tau, i) for i in range(spec.Q)]
    out.extend(discrete_track(ps, c, t) for t in continuous)
    return out


def evaluate_pair(beta, traj, pilot, kernel=JAKES, x_target=None):
    """NMSE of one UE-AP pair sampled along ``traj``."""
    pos = traj.positions if hasattr(traj, "positions") else np.asarray(traj, dtype=float)
    if x_target is None:
        raise DomainError("x_target is required")
    return nmse(EstimationProblem.from_positions(pos, x_target, beta, pilot=pilot, kernel=kernel))


def _family_nmse(cands, spec, betas):
    curves = [nmse_batch(t.positions, spec.target, betas, spec.pilot, spec.kernel) for t in cands]
    return np.min(curves, axis=0)


def _realization(spec, values, r, export_dir=None):
    net = generate_network(spec.network, _stream(spec.master_seed, r, 0))
    if export_dir is not None:
        export_network(net, Path(export_dir) / f"r{r}")
    net = normalize_beta(net, spec.beta_normalization)
    pairs = net.pairs()
    betas = net.pair_betas()
    out = []
    for v in values:
        sv = spec.at(v)
        cont = continuous_candidates(sv, r)
        disc = discrete_candidates(sv, cont)
        out.append((_family_nmse(cont, sv, betas), _family_nmse(disc, sv, betas)))
    return pairs, betas, out


def _map_realizations(fn, n, threads):
    threads = max(1, int(threads))
    if threads == 1:
        return [fn(r) for r in range(n)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(n)))


@dataclass(eq=False)
class ResultTable:
    """Per-pair rows plus aggregates.

    ``raw`` maps column name to array: ``sweep_value`` (NaN when there is no
    sweep), ``scheme``, ``realization``, ``ue``, ``ap``, ``beta``, ``nmse``.
    ``summary`` rows carry ``sweep_value, scheme, mean_nmse, p10, p50, p90``;
    ``ecdf`` rows carry ``scheme, nmse_grid, cdf``.
    """

    raw: dict
    summary: list
    ecdf: list | None = None

    RAW_COLUMNS = ("sweep_value", "scheme", "realization", "ue", "ap", "beta", "nmse")
    SUMMARY_COLUMNS = ("sweep_value", "scheme", "mean_nmse", "p10", "p50", "p90")
    ECDF_COLUMNS = ("scheme", "nmse_grid", "cdf")

    def select(self, scheme, sweep_value=None):
        mask = self.raw["scheme"] == scheme
        if sweep_value is not None:
            mask &= self.raw["sweep_value"] == sweep_value
        return self.raw["nmse"][mask]

    def mean_nmse(self, scheme):
        """Mean NMSE per sweep value, in sweep order."""
        return np.array([row["mean_nmse"] for row in self.summary if row["scheme"] == scheme])

    def ecdf_curve(self, scheme):
        rows = [row for row in self.ecdf if row["scheme"] == scheme]
        return np.array([r["nmse_grid"] for r in rows]), np.array([r["cdf"] for r in rows])

    def to_csv(self, out_dir):
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "raw.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(self.RAW_COLUMNS)
            cols = [self.raw[c] for c in self.RAW_COLUMNS]
            for row in zip(*cols):
                w.writerow(_fmt_row(row))
        with open(out / "summary.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(self.SUMMARY_COLUMNS)
            for row in self.summary:
                w.writerow(_fmt_row(row[c] for c in self.SUMMARY_COLUMNS))
        if self.ecdf is not None:
            with open(out / "ecdf.csv", "w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(self.ECDF_COLUMNS)
                for row in self.ecdf:
                    w.writerow(_fmt_row(row[c] for c in self.ECDF_COLUMNS))

    def summary_text(self):
        lines = [",".join(self.SUMMARY_COLUMNS)]
        for row in self.summary:
            lines.append(",".join(_fmt_row(row[c] for c in self.SUMMARY_COLUMNS)))
        return "\n".join(lines)


def _fmt(v):
    if isinstance(v, (str, np.str_)):
        return str(v)
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    if np.isnan(v):
        return "none"
    return repr(v)


def _fmt_row(row):
    return [_fmt(v) for v in row]


def ecdf(samples, grid):
    """Fraction of ``samples`` that are ``<= g`` for every ``g`` in ``grid``."""
    s = np.sort(np.asarray(samples, dtype=float))
    return np.searchsorted(s, np.asarray(grid, dtype=float), side="right") / s.size


def _collect(spec, values, threads, export_dir=None):
    results = _map_realizations(
        lambda r: _realization(spec, values, r, export_dir), spec.realizations, threads
    )
    cols = {c: [] for c in ResultTable.RAW_COLUMNS}
    summary = []
    for iv, v in enumerate(values):
        sv = np.nan if v is None else float(v)
        for isch, scheme in enumerate(SCHEMES):
            block = []
            for r, (pairs, betas, per_value) in enumerate(results):
                vals = per_value[iv][isch]
                block.append(vals)
                n = len(pairs)
                cols["sweep_value"].append(np.full(n, sv))
                cols["scheme"].append(np.full(n, scheme, dtype=object))
                cols["realization"].append(np.full(n, r))
                cols["ue"].append(np.array([k for k, _ in pairs], dtype=int))
                cols["ap"].append(np.array([l for _, l in pairs], dtype=int))
                cols["beta"].append(betas)
                cols["nmse"].append(vals)
            block = np.concatenate(block)
            p10, p50, p90 = np.percentile(block, [10, 50, 90])
            summary.append(
                dict(sweep_value=sv, scheme=scheme, mean_nmse=float(np.mean(block)),
                     p10=float(p10), p50=float(p50), p90=float(p90))
            )
    raw = {c: np.concatenate(v) for c, v in cols.items()}
    return raw, summary


def run_cdf(spec, threads=1, export_dir=None):
    """Pooled per-pair NMSE for both schemes plus their ECDFs.

    The ECDF grid has 200 points spanning the pooled minimum and maximum
    NMSE of both schemes.
    """
    if spec.sweep != "none":
        raise DomainError("run_cdf needs sweep='none'")
    raw, summary = _collect(spec, [None], threads, export_dir)
    lo, hi = float(raw["nmse"].min()), float(raw["nmse"].max())
    grid = np.linspace(lo, hi, ECDF_POINTS)
    rows = []
    for scheme in SCHEMES:
        cdf = ecdf(raw["nmse"][raw["scheme"] == scheme], grid)
        rows.extend(dict(scheme=scheme, nmse_grid=g, cdf=p) for g, p in zip(grid, cdf))
    return ResultTable(raw, summary, rows)


def run_sweep(spec, threads=1, export_dir=None):
    """Mean NMSE along ``spec.values`` of the swept parameter.

    Network realizations are shared across sweep values and schemes.
    """
    if spec.sweep == "none":
        raise DomainError("run_sweep needs sweep in {'tau_p', 'ell', 'Q'}")
    raw, summary = _collect(spec, list(spec.values), threads, export_dir)
    return ResultTable(raw, summary, None)


@dataclass(frozen=True)
class DominanceReport:
    pairs: int
    max_excess: float
    violations: int
    family_max_excess: float

    @property
    def passed(self):
        return self.violations == 0


def check_dominance(spec, threads=1, slack=1e-12):
    """Per pair, compare the round-robin port sweep from port 0 with the best
    continuous candidate, the port sweep itself included (it is admissible
    for the continuous model too).

    ``max_excess`` is the largest ``min_continuous - discrete`` over pairs;
    ``family_max_excess`` does the same for the two scheme scores.
    """
    spec = spec.at(None)

    def work(r):
        net = normalize_beta(
            generate_network(spec.network, _stream(spec.master_seed, r, 0)),
            spec.beta_normalization,
        )
        betas = net.pair_betas()
        cont = continuous_candidates(spec, r)
        greedy = discrete_greedy(spec.port_set, spec.motion, spec.pilot.tau_p, 0)
        d = nmse_batch(greedy.positions, spec.target, betas, spec.pilot, spec.kernel)
        fam_c = _family_nmse(cont, spec, betas)
        fam_d = _family_nmse(discrete_candidates(spec, cont), spec, betas)
        return np.minimum(fam_c, d) - d, fam_c - fam_d

    res = _map_realizations(work, spec.realizations, threads)
    excess = np.concatenate([a for a, _ in res])
    fam = np.concatenate([b for _, b in res])
    return DominanceReport(
        pairs=int(excess.size),
        max_excess=float(excess.max()),
        violations=int(np.sum(excess > slack)),
        family_max_excess=float(fam.max()),
    )


@dataclass(frozen=True)
class EmpiricalReport:
    empirical_mse: float
    theoretical_mse: float
    std_error: float
    trials: int

    @property
    def deviation(self):
        """Distance between empirical and closed-form MSE in standard errors."""
        diff = abs(self.empirical_mse - self.theoretical_mse)
        if diff == 0.0:
            return 0.0
        return np.inf if self.std_error == 0.0 else diff / self.std_error

    @property
    def passed(self):
        return self.deviation <= 5.0


def empirical_check(spec, trials=100_000, beta=1.0, positions=None, x_target=None,
                    chunk=5_000):
    """Simulate field draws, pilots and estimation; compare with the closed form.

    All ``min(K, tau_p)`` UEs transmit orthogonal pilots; UE 0 is estimated.
    ``positions`` defaults to the full-speed linear sweep from 0.
    """
    trials = check_int(trials, "trials", minimum=1000)
    spec = spec.at(None)
    x = spec.target if x_target is None else float(x_target)
    if positions is None:
        positions = linear_sweep(spec.motion, spec.pilot.tau_p, 0.0).positions
    ell = max(spec.motion.ell, float(np.max(positions)), x)
    prob = EstimationProblem(PositionSet(positions, ell), x, beta, spec.kernel, spec.pilot)
    n_ue = min(spec.network.K, spec.pilot.tau_p)
    book = make_pilot_book(n_ue, spec.pilot.tau_p)
    powers = np.full(n_ue, spec.pilot.eta_p)
    factor = psd_factor(joint_covariance(prob.positions, x, beta, spec.kernel))
    rng = _stream(spec.master_seed, _EMPIRICAL_KEY)
    errs = []
    done = 0
    while done < trials:
        m = min(chunk, trials - done)
        draws = [sample_field(factor, rng, size=m) for _ in range(n_ue)]
        obs = simulate_pilot_phase(draws, book, powers, spec.pilot.sigma2, rng)
        h_hat = lmmse_estimate(obs[0], prob)
        errs.append(np.abs(draws[0].target_value - h_hat) ** 2)
        done += m
    errs = np.concatenate(errs)
    se = float(np.std(errs, ddof=1) / np.sqrt(trials))
    return EmpiricalReport(float(np.mean(errs)), theoretical_mse(prob), se, trials)
