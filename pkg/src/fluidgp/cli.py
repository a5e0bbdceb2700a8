"""Command-line front end.

Commands: ``cdf``, ``sweep-pilots``, ``sweep-length``, ``sweep-ports``,
``estimate`` and ``validate``. Run parameters come from defaults, then an
optional ``--config`` file of ``key = value`` lines (``#`` starts a comment),
then command-line flags, later sources winning.

Exit codes: 0 success, 1 trajectory violation (``validate``), 2 invalid
configuration or input, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import secrets
import sys
from dataclasses import dataclass, field

import numpy as np

from ._validation import DomainError
from .estimator import EstimationProblem, PilotConfig, nmse, theoretical_mse
from .experiments import ExperimentSpec, empirical_check, run_cdf, run_sweep
from .gaussfield import PositionSet
from .kernel import SpatialKernel
from .network import NetworkConfig
from .trajectory import MotionConstraint, PortSet, read_csv, validate

EXIT_OK, EXIT_VIOLATION, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3

# key -> (parser, help). Keys double as flag names with '_' -> '-'.
_INT, _FLOAT, _STR = "int", "float", "str"
KEYS = {
    "aps": (_INT, "number of access points L"),
    "users": (_INT, "number of users K"),
    "area_side": (_FLOAT, "side of the square area in meters"),
    "alpha": (_FLOAT, "path-loss exponent"),
    "shadow_sigma_db": (_FLOAT, "log-normal shadowing std in dB"),
    "cluster_size": (_INT, "serving APs per user"),
    "ref_distance": (_FLOAT, "path-loss reference distance in meters"),
    "min_distance": (_FLOAT, "minimum UE-AP distance in meters"),
    "tau_p": (_INT, "pilot length (comma list for sweep-pilots)"),
    "eta_p": (_FLOAT, "pilot power, linear"),
    "sigma2": (_FLOAT, "noise power, linear"),
    "v_max": (_FLOAT, "maximum antenna speed, wavelengths per symbol time"),
    "t_s": (_FLOAT, "symbol duration"),
    "ell": (_FLOAT, "antenna segment length in wavelengths (comma list for sweep-length)"),
    "q": (_INT, "number of ports (comma list for sweep-ports)"),
    "x_target": (_FLOAT, "target antenna position in wavelengths (default ell/2)"),
    "kernel": (_STR, "spatial kernel"),
    "trajectory": (_STR, "continuous trajectory family: oscillatory, sweep or random"),
    "n_random": (_INT, "number of random trajectories for --trajectory random"),
    "realizations": (_INT, "number of network realizations"),
    "seed": (_INT, "master seed (unsigned 64-bit)"),
    "threads": (_INT, "worker threads"),
    "beta_normalization": (_STR, "none or median-one"),
    "out": (_STR, "output directory"),
}
LIST_KEYS = {"sweep-pilots": "tau_p", "sweep-length": "ell", "sweep-ports": "q"}
SWEEP_KIND = {"tau_p": "tau_p", "ell": "ell", "q": "Q"}
DEFAULT_SWEEPS = {"tau_p": "10,20,40", "ell": "1,2,4", "q": "8,16,32,64"}
DEFAULTS = {
    "aps": "64", "users": "10", "area_side": "400", "alpha": "3.2",
    "shadow_sigma_db": "8", "cluster_size": "8", "ref_distance": "1",
    "min_distance": "1", "tau_p": "10", "eta_p": "10", "sigma2": "1",
    "v_max": "0.3", "t_s": "1", "ell": "2", "q": "8", "kernel": "jakes",
    "trajectory": "oscillatory", "n_random": "8", "realizations": "200",
    "threads": "1", "beta_normalization": "none", "out": "results",
}


class ConfigError(Exception):
    def __init__(self, key, message):
        super().__init__(f"invalid value for '{key}': {message}")
        self.key = key


@dataclass
class RunConfig:
    """Raw ``key -> string`` settings with typed accessors."""

    values: dict = field(default_factory=dict)

    @classmethod
    def from_file(cls, path):
        values = {}
        with open(path) as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigError(f"line {lineno}", f"expected 'key = value', got {line!r}")
                key, value = (s.strip() for s in line.split("=", 1))
                key = key.replace("-", "_")
                if key not in KEYS:
                    raise ConfigError(key, "unknown key")
                values[key] = value
        return cls(values)

    def merged(self, overrides):
        out = dict(self.values)
        out.update({k: v for k, v in overrides.items() if v is not None})
        return RunConfig(out)

    def raw(self, key):
        return self.values.get(key, DEFAULTS.get(key))

    def get(self, key):
        kind = KEYS[key][0]
        raw = self.raw(key)
        if raw is None:
            return None
        return _parse(key, kind, raw)

    def get_list(self, key):
        kind = KEYS[key][0]
        raw = self.raw(key)
        items = [s.strip() for s in str(raw).split(",") if s.strip()]
        if not items:
            raise ConfigError(key, "empty list")
        return [_parse(key, kind, s) for s in items]


def _parse(key, kind, raw):
    raw = str(raw).strip()
    try:
        if kind == _INT:
            return int(raw)
        if kind == _FLOAT:
            value = float(raw)
            if not np.isfinite(value):
                raise ValueError
            return value
    except ValueError:
        raise ConfigError(key, f"expected {kind}, got {raw!r}") from None
    if "," in raw and key not in LIST_KEYS.values():
        raise ConfigError(key, f"expected a single value, got {raw!r}")
    return raw


def _build_spec(cfg, command):
    list_key = LIST_KEYS.get(command)
    scalar = {k: cfg.get(k) for k in KEYS if k != list_key and KEYS[k][0] != _STR}
    for k in ("tau_p", "ell", "q"):
        if k != list_key and "," in str(cfg.raw(k)):
            raise ConfigError(k, f"expected a single value, got {cfg.raw(k)!r}")
    sweep, values = "none", ()
    if list_key is not None:
        sweep = SWEEP_KIND[list_key]
        values = tuple(cfg.get_list(list_key))
    seed = cfg.get("seed")
    builders = [
        ("aps", lambda: NetworkConfig(
            L=scalar["aps"], K=scalar["users"], area_side=scalar["area_side"],
            alpha=scalar["alpha"], shadow_sigma_db=scalar["shadow_sigma_db"],
            cluster_size=scalar["cluster_size"], ref_distance=scalar["ref_distance"],
            min_distance=scalar["min_distance"])),
        ("tau_p", lambda: PilotConfig(
            tau_p=scalar.get("tau_p", 10) if list_key != "tau_p" else values[0],
            eta_p=scalar["eta_p"], sigma2=scalar["sigma2"])),
        ("v_max", lambda: MotionConstraint(
            v_max=scalar["v_max"], T_s=scalar["t_s"],
            ell=scalar["ell"] if list_key != "ell" else max(values))),
        ("kernel", lambda: SpatialKernel(cfg.get("kernel"))),
    ]
    parts = []
    for key, build in builders:
        try:
            parts.append(build())
        except DomainError as exc:
            raise ConfigError(key, str(exc)) from None
    network, pilot, motion, kernel = parts
    try:
        return ExperimentSpec(
            network=network, pilot=pilot, motion=motion, kernel=kernel,
            trajectory=cfg.get("trajectory"),
            Q=scalar["q"] if list_key != "q" else values[0],
            x_target=scalar["x_target"], sweep=sweep, values=values,
            realizations=scalar["realizations"], master_seed=seed,
            beta_normalization=cfg.get("beta_normalization"),
            n_random=scalar["n_random"],
        )
    except DomainError as exc:
        raise ConfigError(_guess_key(str(exc)), str(exc)) from None


def _guess_key(message):
    for key in KEYS:
        if message.startswith(key) or f" {key}" in message:
            return key
    for name, key in (("master_seed", "seed"), ("Q", "q"), ("x_target", "x_target")):
        if name in message:
            return key
    return "config"


def _add_key_flags(p, keys):
    for key in keys:
        flag = "--" + key.replace("_", "-")
        aliases = [flag]
        if key == "eta_p":
            aliases.append("--eta")
        p.add_argument(*aliases, dest=key, default=None, metavar=key.upper(),
                       help=KEYS[key][1])


def _parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=None, help="key = value configuration file")
    _add_key_flags(common, ["out", "seed", "threads", "realizations", "trajectory",
                            "beta_normalization"])
    model = argparse.ArgumentParser(add_help=False)
    _add_key_flags(model, [k for k in KEYS if k not in
                           ("out", "seed", "threads", "realizations", "trajectory",
                            "beta_normalization")])

    parser = argparse.ArgumentParser(
        prog="fluidgp",
        description="Continuous vs port-based fluid-antenna channel estimation experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in [
        ("cdf", "per-pair NMSE distribution of both schemes"),
        ("sweep-pilots", "mean NMSE versus pilot length"),
        ("sweep-length", "mean NMSE versus antenna segment length"),
        ("sweep-ports", "mean NMSE versus number of ports"),
    ]:
        p = sub.add_parser(name, parents=[common, model], help=help_)
        if name == "cdf":
            p.add_argument("--export-network", action="store_true",
                           help="also write each realization's geometry and beta under OUT/network/")

    p = sub.add_parser("estimate", parents=[common, model], help="closed-form NMSE of one problem")
    p.add_argument("--positions", required=True, help="comma-separated sampling positions")
    p.add_argument("--beta", default="1", help="large-scale fading coefficient")
    p.add_argument("--empirical", default=None, metavar="N",
                   help="also run N Monte Carlo trials")

    p = sub.add_parser("validate", parents=[common, model], help="check a trajectory CSV")
    p.add_argument("trajectory_file", help="CSV with a single 'position' column; "
                   "setting q (flag or config) also checks port membership")
    return parser


def _config(args):
    base = RunConfig()
    if args.config is not None:
        base = RunConfig.from_file(args.config)
    flags = {k: getattr(args, k, None) for k in KEYS}
    return base.merged(flags)


def _seeded(cfg, err):
    if cfg.raw("seed") is not None:
        seed = cfg.get("seed")
        if not 0 <= seed < 1 << 64:
            raise ConfigError("seed", "must be an unsigned 64-bit integer")
        return cfg
    seed = secrets.randbits(63)
    print(f"generated seed: {seed}", file=err)
    return cfg.merged({"seed": str(seed)})


def _run_experiment(args, cfg, out, err):
    cfg = _seeded(cfg, err)
    spec = _build_spec(cfg, args.command)
    threads = cfg.get("threads")
    if threads < 1:
        raise ConfigError("threads", "must be >= 1")
    out_dir = cfg.get("out")
    if args.command == "cdf":
        export = f"{out_dir}/network" if args.export_network else None
        table = run_cdf(spec, threads=threads, export_dir=export)
    else:
        table = run_sweep(spec, threads=threads)
    table.to_csv(out_dir)
    print(table.summary_text(), file=out)
    return EXIT_OK


def _positions(raw):
    try:
        vals = [float(s) for s in raw.split(",") if s.strip()]
    except ValueError:
        raise ConfigError("positions", f"expected comma-separated numbers, got {raw!r}") from None
    if not vals or not np.all(np.isfinite(vals)):
        raise ConfigError("positions", "expected at least one finite position")
    return np.array(vals)


def _run_estimate(args, cfg, out, err):
    pos = _positions(args.positions)
    beta = _parse("beta", _FLOAT, args.beta)
    if beta == 0:
        raise ConfigError("beta", "beta = 0 makes the NMSE normalization undefined")
    if beta < 0:
        raise ConfigError("beta", "must be > 0")
    ell = cfg.get("ell")
    x = cfg.get("x_target")
    x = ell / 2.0 if x is None else x
    try:
        pilot = PilotConfig(cfg.get("tau_p"), cfg.get("eta_p"), cfg.get("sigma2"))
    except DomainError as exc:
        raise ConfigError(_guess_key(str(exc)), str(exc)) from None
    try:
        prob = EstimationProblem(PositionSet(pos, ell), x, beta, SpatialKernel(cfg.get("kernel")), pilot)
    except DomainError as exc:
        raise ConfigError("positions" if "positions" in str(exc) else _guess_key(str(exc)),
                          str(exc)) from None
    print(f"nmse = {nmse(prob)!r}", file=out)
    print(f"theoretical_mse = {theoretical_mse(prob)!r}", file=out)
    if args.empirical is not None:
        trials = _parse("empirical", _INT, args.empirical)
        cfg = _seeded(cfg, err)
        spec = ExperimentSpec(
            pilot=pilot,
            motion=MotionConstraint(cfg.get("v_max"), cfg.get("t_s"), ell),
            x_target=x, master_seed=cfg.get("seed"),
            network=NetworkConfig(K=1, L=1, cluster_size=1),
        )
        try:
            rep = empirical_check(spec, trials=trials, beta=beta, positions=pos, x_target=x)
        except DomainError as exc:
            raise ConfigError("empirical", str(exc)) from None
        print(f"empirical_mse = {rep.empirical_mse!r}", file=out)
        print(f"std_error = {rep.std_error!r}", file=out)
        print(f"deviation_se = {rep.deviation!r}", file=out)
        print(f"empirical_check = {'pass' if rep.passed else 'fail'}", file=out)
    return EXIT_OK


def _run_validate(args, cfg, out, err):
    try:
        c = MotionConstraint(cfg.get("v_max"), cfg.get("t_s"), cfg.get("ell"))
        ps = PortSet(cfg.get("q"), c.ell) if "q" in cfg.values else None
    except DomainError as exc:
        raise ConfigError(_guess_key(str(exc)), str(exc)) from None
    try:
        traj = read_csv(args.trajectory_file)
    except DomainError as exc:
        print(f"error: malformed trajectory file: {exc}", file=err)
        return EXIT_CONFIG
    report = validate(traj, c, ps)
    print(report.message, file=out)
    return EXIT_OK if report.ok else EXIT_VIOLATION


def main(argv=None, out=None, err=None):
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = _parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config(args)
        if args.command == "estimate":
            return _run_estimate(args, cfg, out, err)
        if args.command == "validate":
            return _run_validate(args, cfg, out, err)
        return _run_experiment(args, cfg, out, err)
    except ConfigError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: I/O failure: {exc}", file=err)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
