"""Monte Carlo runner: many independent sessions reduced to summary statistics.

Trial ``i`` draws everything from ``SeedSequence([master_seed, i])``, so a
run is reproducible trial by trial and independent of worker count.
"""

from __future__ import annotations

import csv
import json
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import Callable, Iterator

import numpy as np

from ..adversaries import AttackSpec
from ..protocols import PartyInputs, ProtocolParams, SessionOutcome, run_session
from .residual import residual_report

RAW_COLUMNS = ("trial", "aborted", "abort_site", "abort_party", "correct", "residual", "margin", "leakage_bound")


def trial_seeds(master_seed: int, index: int) -> tuple[np.random.SeedSequence, np.random.SeedSequence]:
    """(inputs seed, session seed) for one trial."""
    return tuple(np.random.SeedSequence([master_seed, index]).spawn(2))


def run_trial(params: ProtocolParams, attack: AttackSpec, master_seed: int, index: int) -> SessionOutcome:
    inputs_seed, session_seed = trial_seeds(master_seed, index)
    inputs = PartyInputs.random(params, np.random.default_rng(inputs_seed))
    return run_session(params, inputs, session_seed, attack.strategies())


def iter_outcomes(params: ProtocolParams, attack: AttackSpec | None = None, trials: int = 1,
                  master_seed: int = 0) -> Iterator[tuple[int, SessionOutcome]]:
    attack = attack or AttackSpec()
    attack.check(params)
    for i in range(trials):
        yield i, run_trial(params, attack, master_seed, i)


def _summarise(params, attack, master_seed, probe, index) -> dict:
    outcome = run_trial(params, attack, master_seed, index)
    rep = residual_report(outcome)
    row = {
        "trial": index,
        "aborted": outcome.aborted,
        "abort_site": outcome.abort_site or "",
        "abort_party": outcome.abort_party or "",
        "correct": outcome.correct(),
        "residual": rep["residual"] if rep else None,
        "margin": rep["margin"] if rep else None,
        "leakage_bound": rep["leakage_bound"] if rep else None,
    }
    if probe is not None:
        row.update(probe(outcome))
    return row


@dataclass
class Stats:
    variant: str
    params: dict
    attack: dict
    master_seed: int
    trials: int
    rows: list = field(repr=False)

    @property
    def aborts(self) -> int:
        return sum(r["aborted"] for r in self.rows)

    @property
    def abort_sites(self) -> dict:
        return dict(sorted(Counter(r["abort_site"] for r in self.rows if r["aborted"]).items()))

    @property
    def completed(self) -> int:
        return self.trials - self.aborts

    @property
    def correct(self) -> int:
        return sum(bool(r["correct"]) for r in self.rows if not r["aborted"])

    @property
    def failures(self) -> int:
        return self.completed - self.correct

    @property
    def abort_rate(self) -> float:
        return self.aborts / self.trials

    @property
    def correct_rate(self) -> float:
        return self.correct / self.completed if self.completed else math.nan

    @property
    def detection_rate(self) -> float | None:
        """Abort rate when someone cheats; None for honest runs."""
        return self.abort_rate if self.attack["kind"] != "honest" else None

    @property
    def margins(self) -> list[int]:
        return [r["margin"] for r in self.rows if r["margin"] is not None]

    @property
    def rate(self) -> float:
        return self.params["key_len"] / self.params["n"]

    def margin_histogram(self) -> dict[int, int]:
        return dict(sorted(Counter(self.margins).items()))

    def summary_row(self) -> dict:
        margins = self.margins
        row = {
            "variant": self.variant,
            "n": self.params["n"],
            "eps1": self.params["eps1"],
            "eps2": self.params["eps2"],
            "rate": self.rate,
            "trials": self.trials,
            "correct_rate": self.correct_rate,
            "abort_rate": self.abort_rate,
            "mean_residual_margin": float(np.mean(margins)) if margins else math.nan,
            "min_residual_margin": min(margins) if margins else math.nan,
        }
        if self.detection_rate is not None:
            row["attack"] = self.attack["kind"]
            row["attack_strength"] = self.attack["strength"]
            row["detection_rate"] = self.detection_rate
        return row

    def to_dict(self) -> dict:
        return {
            "summary": self.summary_row(),
            "abort_sites": self.abort_sites,
            "margin_histogram": {str(k): v for k, v in self.margin_histogram().items()},
            "params": self.params,
            "attack": self.attack,
            "master_seed": self.master_seed,
            "trials": self.rows,
        }

    def write_csv(self, path, raw: bool = False, header: dict | None = None) -> None:
        """Summary row, or one row per trial when ``raw``; ``header`` lines go first as comments."""
        rows = self.rows if raw else [self.summary_row()]
        columns = list(rows[0]) if rows else list(RAW_COLUMNS)
        with open(path, "w", newline="") as fh:
            for key, value in (header or {}).items():
                fh.write(f"# {key}: {json.dumps(value, sort_keys=True)}\n")
            writer = csv.DictWriter(fh, fieldnames=columns, lineterminator="\n")
            writer.writeheader()
            for row in rows:
                writer.writerow({k: _csv_value(row.get(k)) for k in columns})

    def write_json(self, path, header: dict | None = None) -> None:
        data = {**(header or {}), **self.to_dict()}
        with open(path, "w") as fh:
            json.dump(data, fh, indent=2, sort_keys=True, default=_json_default)
            fh.write("\n")


def _csv_value(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return v


def _json_default(v):
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.floating):
        return float(v)
    if isinstance(v, np.ndarray):
        return v.tolist()
    raise TypeError(f"cannot serialise {type(v).__name__}")


def monte_carlo(variant: str, params: ProtocolParams, attack: AttackSpec | None = None, trials: int = 100,
                master_seed: int = 0, workers: int = 1,
                probe: Callable[[SessionOutcome], dict] | None = None) -> Stats:
    """Run ``trials`` sessions and reduce them to a Stats record.

    ``probe`` adds columns computed from each outcome; with several workers
    it must be a picklable top-level function.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if variant != params.variant:
        raise ValueError(f"parameters are for {params.variant}, not {variant}")
    attack = attack or AttackSpec()
    attack.check(params)
    job = partial(_summarise, params, attack, master_seed, probe)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(job, range(trials), chunksize=max(1, trials // (4 * workers))))
    else:
        rows = [job(i) for i in range(trials)]
    return Stats(variant, params.to_dict(), attack.to_dict(), master_seed, trials, rows)
