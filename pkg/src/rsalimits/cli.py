"""Command-line entry point.

Exit status: 0 on success, 1 when an experiment's verdict fails, 2 on
invalid input. Settings are resolved as defaults < ``--config`` file <
``RSALIMITS_*`` environment variables < command-line flags.
"""

import argparse
import os
import sys
from dataclasses import dataclass, fields

import numpy as np

from . import bounds, chain, ctime, diffusion, fluid, graph_oracle, stats, validation
from .errors import InvalidConfigError, RsaError
from .io import dumps_json, ensure_dir, kernel_from_spec, load_config, write_csv, write_json

COMMANDS = ("simulate", "graph", "fluid", "diffusion", "clt", "lln", "bounds", "ctime", "validate")
SEEDED = {"simulate", "graph", "clt", "lln", "ctime"}
ENV_PREFIX = "RSALIMITS_"


@dataclass
class ExperimentConfig:
    command: str
    kernel_type: str = "er"
    N: int = 10_000
    c: float = 1.0
    table: str | None = None
    gamma: list | None = None
    psi: list | None = None
    C_L: float | None = None
    runs: int = 1
    seed: int | None = None
    run_index: int = 0
    dt: float = 1e-3
    t_max: float = 10.0
    lam: float = 1.0
    threads: int = 1
    output_dir: str = "."
    T: float = 1.0
    h: float | None = None
    preset: str = "er-c1"

    def validate(self):
        if self.command not in COMMANDS:
            raise InvalidConfigError(f"unknown command {self.command!r}")
        if int(self.N) != self.N or self.N < 1:
            raise InvalidConfigError(f"N must be a positive integer, got {self.N!r}")
        if self.runs < 1:
            raise InvalidConfigError("runs must be positive")
        if self.threads < 1:
            raise InvalidConfigError("threads must be positive")
        if not (0 < self.dt <= 1e-2):
            raise InvalidConfigError("dt must lie in (0, 1e-2]")
        if not self.t_max > 0:
            raise InvalidConfigError("t_max must be positive")
        if not self.lam > 0:
            raise InvalidConfigError("lambda must be positive")
        if not self.T > 0:
            raise InvalidConfigError("T must be positive")
        if self.h is not None and not self.h > 0:
            raise InvalidConfigError("h must be positive")
        if self.command in SEEDED and self.seed is None:
            raise InvalidConfigError(f"'{self.command}' needs an explicit --seed")
        if self.seed is not None and self.seed < 0:
            raise InvalidConfigError("seed must be non-negative")
        if self.command == "validate" and self.preset not in validation.PRESETS:
            raise InvalidConfigError(f"unknown preset {self.preset!r}; "
                                     f"choose from {sorted(validation.PRESETS)}")

    def kernel(self):
        spec = {"type": self.kernel_type, "N": self.N, "c": self.c}
        if self.kernel_type == "table":
            spec.update(table=self.table, gamma=self.gamma, psi=self.psi, C_L=self.C_L)
        return kernel_from_spec(spec)


# config-file / env key -> ExperimentConfig field
_ALIASES = {"type": "kernel_type", "lambda": "lam", "tmax": "t_max"}
_FIELDS = {f.name for f in fields(ExperimentConfig)}
_INTS = {"N", "runs", "seed", "run_index", "threads"}
_FLOATS = {"c", "C_L", "dt", "t_max", "lam", "T", "h"}


def _coerce(name, value):
    try:
        if name in _INTS:
            return int(value)
        if name in _FLOATS:
            return float(value)
    except (TypeError, ValueError):
        raise InvalidConfigError(f"{name}: cannot parse {value!r}") from None
    return value


def _env_settings(environ):
    out = {}
    for key, value in environ.items():
        if not key.startswith(ENV_PREFIX):
            continue
        name = key[len(ENV_PREFIX):].lower()
        name = _ALIASES.get(name, name)
        if name == "n":
            name = "N"
        if name not in _FIELDS or name == "command":
            raise InvalidConfigError(f"unknown environment override {key}")
        out[name] = _coerce(name, value)
    return out


def build_parser():
    p = argparse.ArgumentParser(prog="rsalimits", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--config")
        s.add_argument("--kernel-type", dest="kernel_type", choices=("er", "table"))
        s.add_argument("--table")
        s.add_argument("--N", type=int)
        s.add_argument("--c", type=float)
        s.add_argument("--runs", type=int)
        s.add_argument("--seed", type=int)
        s.add_argument("--run-index", dest="run_index", type=int)
        s.add_argument("--dt", type=float)
        s.add_argument("--tmax", dest="t_max", type=float)
        s.add_argument("--lambda", dest="lam", type=float)
        s.add_argument("--threads", type=int)
        s.add_argument("--output-dir", dest="output_dir")
        s.add_argument("--T", type=float)
        s.add_argument("--h", type=float)
        if name == "validate":
            s.add_argument("--preset")
    return p


def resolve_config(args, environ=None):
    environ = os.environ if environ is None else environ
    settings = {}
    if args.config:
        data = load_config(args.config)
        for key, value in {**data["kernel"], **data["run"]}.items():
            name = _ALIASES.get(key, key)
            settings[name] = _coerce(name, value) if name in _INTS | _FLOATS else value
    settings.update(_env_settings(environ))
    for f in fields(ExperimentConfig):
        if f.name == "command":
            continue
        v = getattr(args, f.name, None)
        if v is not None:
            settings[f.name] = v
    cfg = ExperimentConfig(command=args.command, **settings)
    cfg.validate()
    return cfg


def _trajectory_columns(traj):
    steps = np.arange(len(traj.z_values))
    return ["step", "Z", "M"], [steps, traj.z_values, traj.m_values]


def cmd_simulate(cfg, out):
    k = cfg.kernel()
    if cfg.runs == 1:
        tr = chain.simulate(k, cfg.seed, cfg.run_index)
        write_csv(out / "trajectory.csv", *_trajectory_columns(tr))
    b = chain.simulate_batch(k, cfg.runs, cfg.seed, threads=cfg.threads, run_start=cfg.run_index)
    summary = b.summary()
    write_json(out / "summary.json", summary)
    return summary, True


def cmd_graph(cfg, out):
    k = cfg.kernel()
    if cfg.runs == 1:
        run = graph_oracle.explore_er_graph(cfg.N, cfg.c, cfg.seed, cfg.run_index)
        z = np.concatenate([[0], run.explored_trace])
        comp = np.concatenate([[0.0], np.cumsum(1.0 + k.gamma_N(z[:-1]))])
        write_csv(out / "trajectory.csv", ["step", "Z", "M"], [np.arange(len(z)), z, z - comp])
    counts = graph_oracle.explore_batch(cfg.N, cfg.c, cfg.runs, cfg.seed, threads=cfg.threads,
                                        run_start=cfg.run_index)
    h = counts / cfg.N
    summary = {
        "runs": cfg.runs, "N": cfg.N, "c": cfg.c,
        "mean_hitting_fraction": float(h.mean()),
        "var_hitting_fraction": float(h.var(ddof=1)) if cfg.runs > 1 else 0.0,
        "seed": cfg.seed, "source": "graph",
    }
    write_json(out / "summary.json", summary)
    return summary, True


def cmd_fluid(cfg, out):
    sol = fluid.solve_fluid(cfg.kernel(), dt=cfg.dt, t_max=cfg.t_max)
    write_csv(out / "fluid.csv", ["t", "z"], [sol.t, sol.z])
    summary = {"c": cfg.c, "dt": cfg.dt, "t_max": cfg.t_max, "T_star": sol.T_star}
    write_json(out / "fluid.json", summary)
    return summary, True


def cmd_diffusion(cfg, out):
    k = cfg.kernel()
    sol = fluid.solve_fluid(k, dt=cfg.dt, t_max=cfg.t_max)
    d = diffusion.solve_variance_ode(sol, k)
    write_csv(out / "diffusion.csv", ["t", "beta", "m"], [d.t, d.beta, d.m])
    summary = {"T_star": sol.T_star, "sigma_sq": d.sigma_sq}
    write_json(out / "diffusion.json", summary)
    return summary, True


def cmd_clt(cfg, out):
    k = cfg.kernel()
    pred = diffusion.clt_prediction(k, fluid.solve_fluid(k, dt=cfg.dt, t_max=cfg.t_max))
    s = stats.run_clt_experiment(k, cfg.runs, cfg.seed, pred, threads=cfg.threads)
    passed = all(stats.clt_checks(s).values())
    write_csv(out / "clt_samples.csv", ["run", "w"], [np.arange(s.runs), s.clt_samples])
    verdict = s.verdict("clt", passed)
    write_json(out / "clt.json", verdict)
    return verdict, passed


def cmd_lln(cfg, out):
    k = cfg.kernel()
    sol = fluid.solve_fluid(k, dt=cfg.dt, t_max=cfg.t_max)
    s = stats.run_lln_experiment(k, cfg.runs, cfg.seed, fluid=sol, threads=cfg.threads)
    w = bounds.omega(k, 1.0)
    passed = s.sup_dev_mean <= w
    verdict = s.verdict("lln", passed)
    verdict["sup_dev_mean"] = s.sup_dev_mean
    verdict["omega_N"] = w
    write_json(out / "lln.json", verdict)
    return verdict, passed


def cmd_bounds(cfg, out):
    budget = bounds.error_budget(cfg.kernel(), cfg.T, cfg.h).to_dict()
    write_json(out / "bounds.json", budget)
    return budget, True


def cmd_ctime(cfg, out):
    model = ctime.CtimeModel(cfg.kernel(), cfg.lam)
    t_max = max(cfg.t_max, 3.0)
    sol = ctime.solve_ctime_fluid(model, dt=cfg.dt, t_max=t_max)
    write_csv(out / "ctime_fluid.csv", ["t", "z"], [sol.t, sol.z])
    if cfg.runs == 1:
        tr = ctime.simulate_ctime(model, cfg.seed, cfg.run_index)
        write_csv(out / "ctime_trajectory.csv", ["time", "Z", "M"],
                  [tr.times, tr.z_values, tr.m_values])
    b = ctime.simulate_ctime_batch(model, cfg.runs, cfg.seed, fluid=sol, t_sup=3.0,
                                   threads=cfg.threads, run_start=cfg.run_index)
    h = b.jump_counts / cfg.N
    summary = {
        "runs": cfg.runs, "N": cfg.N, "c": cfg.c, "lambda": cfg.lam,
        "mean_hitting_fraction": float(h.mean()),
        "var_hitting_fraction": float(h.var(ddof=1)) if cfg.runs > 1 else 0.0,
        "mean_sup_dev_t3": float(b.sup_dev.mean()),
        "soft_hit": sol.T_star,
        "seed": cfg.seed,
    }
    write_json(out / "ctime.json", summary)
    return summary, True


def cmd_validate(cfg, out):
    checks = validation.run_preset(cfg.preset, cfg.threads)
    for chk in checks:
        print(chk.line(), file=sys.stderr)
    passed = all(c.passed for c in checks)
    report = {"preset": cfg.preset, "pass": passed, "checks": [c.to_dict() for c in checks]}
    write_json(out / "validate.json", report)
    return {"preset": cfg.preset, "pass": passed}, passed


HANDLERS = {name: globals()[f"cmd_{name}"] for name in COMMANDS}


def run(cfg):
    """Execute a validated config. Returns the process exit status."""
    out = ensure_dir(cfg.output_dir)
    result, passed = HANDLERS[cfg.command](cfg, out)
    sys.stdout.write(dumps_json(result))
    return 0 if passed else 1


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
    except RsaError as e:
        print(f"rsalimits: error: {e}", file=sys.stderr)
        return 2
    except TypeError as e:
        print(f"rsalimits: error: {e}", file=sys.stderr)
        return 2
    try:
        return run(cfg)
    except RsaError as e:
        print(f"rsalimits: error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"rsalimits: io error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
