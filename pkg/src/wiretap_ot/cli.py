"""Command-line runner: capacity tables, Monte Carlo sweeps, exact oracles, IH checks.

Exit codes: 0 success, 2 invalid configuration, 3 budget or resource
problem (oracle too large, unwritable output), 4 property-suite failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import __version__
from .adversaries import ATTACK_KINDS, AttackSpec
from .analysis import capacities, rate_region
from .analysis.montecarlo import monte_carlo
from .analysis.oracle import FAMILIES, ORACLE_BUDGET, OracleBudgetError, exact_leakage_oracle, tiny_params
from .interactive_hashing import property_report
from .protocols.params import VARIANTS, derive_params, variant_capacity

EXIT_OK, EXIT_CONFIG, EXIT_RESOURCE, EXIT_PROPERTY = 0, 2, 3, 4


class ConfigError(ValueError):
    pass


class ResourceError(RuntimeError):
    pass


def provenance(command: str, config: dict, seed=None) -> dict:
    return {"artifact_version": __version__, "command": command, "config": config, "master_seed": seed}


def _sweep(value, name: str) -> list[float]:
    """Scalar, list, or {"start", "stop", "step"} (stop inclusive) to a list."""
    if isinstance(value, (int, float)):
        return [float(value)]
    if isinstance(value, list):
        if not value:
            raise ConfigError(f"{name}: empty list")
        return [float(v) for v in value]
    if isinstance(value, dict) and set(value) == {"start", "stop", "step"}:
        start, stop, step = (float(value[k]) for k in ("start", "stop", "step"))
        if step <= 0 or stop < start:
            raise ConfigError(f"{name}: sweep range must have start <= stop and step > 0")
        count = int(round((stop - start) / step)) + 1
        return [round(start + i * step, 12) for i in range(count)]
    raise ConfigError(f"{name}: expected a number, a list, or a start/stop/step range")


@dataclass
class ExperimentConfig:
    """Inputs of the simulate command; see the README for the JSON schema."""

    variant: str = "c2p"
    eps1: object = 0.5
    eps2: object = 0.5
    r: float | None = None
    rate_fraction: float | None = None
    n: list = field(default_factory=lambda: [20000])
    N: int = 2
    trials: int = 100
    attack: dict = field(default_factory=lambda: {"kind": "honest", "strength": 0})
    master_seed: int | None = None
    delta: float | None = None
    delta_tilde: float | None = None
    delta_prime: float | None = None
    r_c: float | None = None
    tune_n: bool = False
    workers: int = 1
    output: str | None = None
    raw_output: str | None = None
    format: str = "csv"
    plot: str | None = None

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        cfg = cls(**d)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if self.variant not in VARIANTS:
            raise ConfigError(f"unknown variant {self.variant!r}")
        if self.master_seed is None:
            raise ConfigError("master_seed is required")
        if (self.r is None) == (self.rate_fraction is None):
            raise ConfigError("give exactly one of r and rate_fraction")
        if self.rate_fraction is not None and not 0 < self.rate_fraction < 1:
            raise ConfigError("rate_fraction must lie in (0, 1)")
        if isinstance(self.n, int):
            self.n = [self.n]
        if not self.n or any(not isinstance(v, int) or v < 1 for v in self.n):
            raise ConfigError("n must be a positive integer or a list of them")
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        if self.format not in ("csv", "json"):
            raise ConfigError("format must be csv or json")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")
        try:
            AttackSpec(**self.attack)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"attack: {exc}") from exc
        _sweep(self.eps1, "eps1")
        _sweep(self.eps2, "eps2")

    def points(self):
        for e1 in _sweep(self.eps1, "eps1"):
            for e2 in _sweep(self.eps2, "eps2"):
                for n in self.n:
                    yield e1, e2, n

    def rate_for(self, e1: float, e2: float) -> float:
        if self.r is not None:
            return self.r
        return self.rate_fraction * variant_capacity(self.variant, e1, e2, self.N)

    def to_dict(self) -> dict:
        return asdict(self)

    def provenance_config(self) -> dict:
        # Output locations and worker count do not affect results.
        return {k: v for k, v in self.to_dict().items() if k not in ("output", "raw_output", "plot", "workers")}


# output helpers

def _open_output(path):
    if path is None or path == "-":
        return sys.stdout, False
    try:
        return open(path, "w", newline=""), True
    except OSError as exc:
        raise ResourceError(f"cannot write {path}: {exc.strerror}") from exc


def _finite(v):
    # NaN (no completed sessions) is written as null / an empty cell.
    if isinstance(v, float) and v != v:
        return None
    if isinstance(v, dict):
        return {k: _finite(x) for k, x in v.items()}
    return v


def _write_rows(rows: list[dict], path, fmt: str, header: dict) -> None:
    rows = [_finite(r) for r in rows]
    fh, close = _open_output(path)
    try:
        if fmt == "json":
            json.dump({**header, "rows": rows}, fh, indent=2, sort_keys=True, default=_json_default)
            fh.write("\n")
        else:
            buf = io.StringIO()
            for key, value in header.items():
                buf.write(f"# {key}: {json.dumps(value, sort_keys=True, default=_json_default)}\n")
            columns = []
            for row in rows:
                columns += [k for k in row if k not in columns]
            writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
            writer.writeheader()
            for row in rows:
                writer.writerow({k: _csv_value(row.get(k)) for k in columns})
            fh.write(buf.getvalue())
    finally:
        if close:
            fh.close()


def _csv_value(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, dict)):
        return json.dumps(v, sort_keys=True)
    return v


def _json_default(v):
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.floating):
        return float(v)
    if isinstance(v, np.ndarray):
        return v.tolist()
    raise TypeError(f"cannot serialise {type(v).__name__}")


def _plot_target(path):
    if path and not Path(path).parent.exists():
        raise ResourceError(f"cannot write {path}: directory does not exist")
    return path


# subcommands

def cmd_capacity(args) -> int:
    if args.grid is not None:
        if not 0 < args.grid < 1:
            raise ConfigError("grid step must lie in (0, 1)")
        steps = int(round(1 / args.grid))
        values = [round(i * args.grid, 12) for i in range(1, steps)]
        points = [(e1, e2) for e1 in values for e2 in values]
    else:
        if args.eps1 is None or args.eps2 is None:
            raise ConfigError("give --eps1 and --eps2, or --grid")
        points = [(args.eps1, args.eps2)]
    rows = []
    for e1, e2 in points:
        try:
            rows.append(capacities(e1, e2, args.N).to_dict())
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    config = {"eps1": args.eps1, "eps2": args.eps2, "N": args.N, "grid": args.grid}
    header = provenance("capacity", config)
    if args.region:
        if args.grid is not None:
            raise ConfigError("--region needs a single --eps1/--eps2 point")
        region = rate_region(args.eps1, args.eps2)
        rows[0]["inner_vertices"] = [list(v) for v in region.inner.vertices]
        rows[0]["outer_vertices"] = [list(v) for v in region.outer.vertices]
    plot = _plot_target(args.plot)
    region_plot = _plot_target(args.region_plot)
    _write_rows(rows, args.output, args.format, header)
    if plot or region_plot:
        from . import plotting

        if plot:
            if args.eps2 is None:
                raise ConfigError("--plot draws curves at a fixed --eps2")
            plotting.plot_capacity_curves(args.eps2, plot, args.N)
        if region_plot:
            if args.eps1 is None or args.eps2 is None:
                raise ConfigError("--region-plot needs --eps1 and --eps2")
            plotting.plot_rate_region(rate_region(args.eps1, args.eps2), region_plot)
    return EXIT_OK


_SIM_FLAGS = ("variant", "eps1", "eps2", "r", "rate_fraction", "n", "N", "trials", "master_seed", "delta",
              "delta_tilde", "delta_prime", "r_c", "workers", "output", "raw_output", "format", "plot")


def load_config(args) -> ExperimentConfig:
    data = {}
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc.strerror}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
    for name in _SIM_FLAGS:
        value = getattr(args, name, None)
        if value is not None:
            data[name] = value
    if args.tune_n:
        data["tune_n"] = True
    if args.attack is not None or args.attack_strength is not None:
        attack = dict(data.get("attack", {"kind": "honest", "strength": 0}))
        if args.attack is not None:
            attack["kind"] = args.attack
        if args.attack_strength is not None:
            strength = args.attack_strength
            attack["strength"] = int(strength) if strength.is_integer() else strength
        data["attack"] = attack
    return ExperimentConfig.from_dict(data)


def cmd_simulate(args) -> int:
    cfg = load_config(args)
    attack = AttackSpec(**cfg.attack)
    summaries, raw = [], []
    for e1, e2, n in cfg.points():
        try:
            params = derive_params(cfg.variant, cfg.rate_for(e1, e2), e1, e2, n, N=cfg.N, delta=cfg.delta,
                                   delta_tilde=cfg.delta_tilde, delta_prime=cfg.delta_prime, r_c=cfg.r_c,
                                   tune_n=cfg.tune_n)
            attack.check(params)
        except ValueError as exc:
            raise ConfigError(f"eps1={e1}, eps2={e2}, n={n}: {exc}") from exc
        stats = monte_carlo(cfg.variant, params, attack, cfg.trials, cfg.master_seed, workers=cfg.workers)
        row = stats.summary_row()
        row["abort_sites"] = stats.abort_sites
        summaries.append(row)
        for r in stats.rows:
            raw.append({"eps1": e1, "eps2": e2, "n": params.n, **r})
    header = provenance("simulate", cfg.provenance_config(), cfg.master_seed)
    _write_rows(summaries, cfg.output, cfg.format, header)
    if cfg.raw_output:
        _write_rows(raw, cfg.raw_output, "csv", header)
    if cfg.plot:
        from . import plotting

        plotting.plot_capacity_curves(summaries[0]["eps2"], _plot_target(cfg.plot), cfg.N)
    return EXIT_OK


def cmd_oracle(args) -> int:
    try:
        params = tiny_params(args.variant, args.eps1, args.eps2)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if args.n is not None:
        params = params.with_sizes(n=args.n)
    report = exact_leakage_oracle(args.variant, params, family=args.family, budget=args.budget)
    config = {"variant": args.variant, "n": params.n, "eps1": params.eps1, "eps2": params.eps2,
              "family": args.family, "budget": args.budget}
    data = {**provenance("oracle", config), "report": report.to_dict()}
    fh, close = _open_output(args.output)
    try:
        json.dump(data, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")
    finally:
        if close:
            fh.close()
    return EXIT_OK


def cmd_ih_check(args) -> int:
    try:
        results = property_report(args.k_max, tuple(args.p5_k), trials=args.trials, seed=args.seed)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    lines = [f"{'PASS' if r.passed else 'FAIL'} {r.name}: {r.detail}" for r in results]
    if args.output:
        config = {"k_max": args.k_max, "p5_k": list(args.p5_k), "trials": args.trials}
        data = {**provenance("ih-check", config, args.seed), "results": [asdict(r) for r in results]}
        fh, close = _open_output(args.output)
        try:
            json.dump(data, fh, indent=2, sort_keys=True)
            fh.write("\n")
        finally:
            if close:
                fh.close()
    print("\n".join(lines))
    return EXIT_OK if all(r.passed for r in results) else EXIT_PROPERTY


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wiretap-ot", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("capacity", help="capacity formulas at a point or on a grid")
    p.add_argument("--eps1", type=float)
    p.add_argument("--eps2", type=float)
    p.add_argument("--N", type=int, default=2)
    p.add_argument("--grid", type=float, metavar="STEP", help="sweep both erasure probabilities in steps of STEP")
    p.add_argument("--region", action="store_true", help="include rate-region vertices")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output", help="output file (default stdout)")
    p.add_argument("--plot", metavar="FILE", help="draw capacity curves against eps1 at --eps2")
    p.add_argument("--region-plot", metavar="FILE", help="draw the rate region at --eps1/--eps2")
    p.set_defaults(func=cmd_capacity)

    p = sub.add_parser("simulate", help="Monte Carlo sweep from a JSON config; flags override the file")
    p.add_argument("--config", help="JSON experiment config")
    p.add_argument("--variant", choices=VARIANTS)
    p.add_argument("--eps1", type=float)
    p.add_argument("--eps2", type=float)
    p.add_argument("--r", type=float)
    p.add_argument("--rate-fraction", dest="rate_fraction", type=float)
    p.add_argument("--n", type=int, nargs="+")
    p.add_argument("--N", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--attack", choices=ATTACK_KINDS)
    p.add_argument("--attack-strength", dest="attack_strength", type=float)
    p.add_argument("--seed", dest="master_seed", type=int)
    p.add_argument("--delta", type=float)
    p.add_argument("--delta-tilde", dest="delta_tilde", type=float)
    p.add_argument("--delta-prime", dest="delta_prime", type=float)
    p.add_argument("--r-c", dest="r_c", type=float)
    p.add_argument("--tune-n", dest="tune_n", action="store_true")
    p.add_argument("--workers", type=int)
    p.add_argument("--output")
    p.add_argument("--raw-output", dest="raw_output")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--plot", metavar="FILE", help="capacity curves at the first eps2 of the sweep")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("oracle", help="exact leakage at toy block length")
    p.add_argument("--variant", choices=("c2p", "degraded"), default="c2p")
    p.add_argument("--n", type=int)
    p.add_argument("--eps1", type=float)
    p.add_argument("--eps2", type=float)
    p.add_argument("--family", choices=FAMILIES, default="full")
    p.add_argument("--budget", type=int, default=ORACLE_BUDGET)
    p.add_argument("--output")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("ih-check", help="interactive hashing property suite")
    p.add_argument("--k-max", dest="k_max", type=int, default=3)
    p.add_argument("--p5-k", dest="p5_k", type=int, nargs="*", default=[8, 10, 12])
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output")
    p.set_defaults(func=cmd_ih_check)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except OracleBudgetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except ResourceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
