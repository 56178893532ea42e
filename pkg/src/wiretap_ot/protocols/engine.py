"""Session engine: per-party views, logged steps, and the replay validator.

A protocol is written as a sequence of steps. Each step is a plain function
``fn(view, params)`` executed for one party; it sees only that party's view
(inputs, private randomness, channel observations, public transcript) plus
the public parameters. ``Session.send`` publishes the returned records,
``Session.compute`` keeps the result private. Every step is logged so that
``replay_validate`` can re-run each party from a fresh copy of its own view
and confirm that every message was a function of what that party held at
send time.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from ..channel import ChannelConfig, Topology, transmit
from ..gf2 import BitMatrix
from ..hashing import HashFn
from .params import ProtocolParams
from .transcript import Transcript

PARTIES = ("alice", "bob", "eve", "cathy")
_STREAMS = ("nature", "alice", "bob", "cathy")


class Abort(Exception):
    """Raised inside a step when the executing party aborts the protocol."""

    def __init__(self, site: str):
        super().__init__(site)
        self.site = site


@dataclass(frozen=True)
class PartyInputs:
    """Alice's strings, Bob's choice and, for the independent pair, Cathy's."""

    strings: tuple
    choice: int
    cathy_strings: tuple = ()
    cathy_choice: int | None = None

    def __post_init__(self):
        strings = tuple(np.asarray(s, dtype=np.uint8) for s in self.strings)
        if len(strings) < 2:
            raise ValueError("Alice needs at least two strings")
        if len({s.size for s in strings}) != 1:
            raise ValueError("Alice's strings must have equal length")
        if not 0 <= self.choice < len(strings):
            raise ValueError("Bob's choice is out of range")
        object.__setattr__(self, "strings", strings)
        cathy = tuple(np.asarray(s, dtype=np.uint8) for s in self.cathy_strings)
        if cathy:
            if len(cathy) != 2 or cathy[0].size != cathy[1].size:
                raise ValueError("Cathy's pair must be two equal-length strings")
            if self.cathy_choice not in (0, 1):
                raise ValueError("Cathy's choice must be 0 or 1")
        object.__setattr__(self, "cathy_strings", cathy)

    @classmethod
    def random(cls, params: ProtocolParams, rng: np.random.Generator) -> "PartyInputs":
        strings = tuple(rng.integers(0, 2, params.key_len, dtype=np.uint8) for _ in range(params.N))
        choice = int(rng.integers(params.N))
        if params.cathy_key_len:
            cathy = tuple(rng.integers(0, 2, params.cathy_key_len, dtype=np.uint8) for _ in range(2))
            return cls(strings, choice, cathy, int(rng.integers(2)))
        return cls(strings, choice)


@dataclass
class View:
    """Everything one party holds.

    ``state`` is scratch memory for values the party derived from the rest
    of its view; it adds no information.
    """

    party: str
    inputs: dict
    seed: np.random.SeedSequence | None
    observations: dict
    transcript: Transcript
    strategy: Any = None
    state: dict = field(default_factory=dict)
    rng: np.random.Generator | None = None

    def __post_init__(self):
        if self.seed is not None and self.rng is None:
            self.rng = np.random.default_rng(self.seed)

    def fresh(self, transcript: Transcript) -> "View":
        return View(self.party, self.inputs, self.seed, self.observations, transcript, self.strategy)


@dataclass(frozen=True)
class Step:
    party: str
    fn: Callable
    position: int
    published: bool
    result: Any


@dataclass
class SessionOutcome:
    variant: str
    params: ProtocolParams
    seed: Any
    aborted: bool
    abort_site: str | None
    abort_party: str | None
    k_hat: np.ndarray | None
    views: dict
    transcript: Transcript
    steps: list
    j_hat: np.ndarray | None = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def inputs(self) -> PartyInputs:
        return self.diagnostics["inputs"]

    def correct(self) -> bool | None:
        """Whether every receiver decoded its chosen string (None if aborted)."""
        if self.aborted:
            return None
        inp = self.inputs
        ok = self.k_hat is not None and np.array_equal(self.k_hat, inp.strings[inp.choice])
        if inp.cathy_strings:
            ok = ok and self.j_hat is not None and np.array_equal(self.j_hat, inp.cathy_strings[inp.cathy_choice])
        return bool(ok)


def as_seed_sequence(seed) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(seed)


class Session:
    """One execution; owns the transcript, the views and the step log."""

    def __init__(self, variant: str, params: ProtocolParams, cfg: ChannelConfig, seed,
                 inputs: PartyInputs, strategies: dict | None = None, grants: dict | None = None):
        self.variant = variant
        self.params = params
        self.cfg = cfg
        self.seed = as_seed_sequence(seed)
        self.inputs = inputs
        streams = dict(zip(_STREAMS, self.seed.spawn(len(_STREAMS))))
        self.nature = np.random.default_rng(streams["nature"])
        self.transcript = Transcript()
        strategies = strategies or {}
        self.grants = grants or {}
        party_inputs = {
            "alice": {"K": inputs.strings, "J": inputs.cathy_strings},
            "bob": {"U": inputs.choice},
            "eve": {},
            "cathy": {"W": inputs.cathy_choice} if inputs.cathy_strings else {},
        }
        self.views = {
            p: View(p, party_inputs[p], streams.get(p) if p != "eve" else None, {},
                    self.transcript, strategies.get(p))
            for p in PARTIES
        }
        self.steps: list[Step] = []
        self.abort: tuple[str, str] | None = None
        self.diagnostics: dict = {"inputs": inputs}

    def _run(self, party: str, fn: Callable, published: bool):
        position = len(self.transcript)
        try:
            result = fn(self.views[party], self.params)
        except Abort as exc:
            self.steps.append(Step(party, fn, position, published, ("abort", exc.site)))
            self.transcript.append("abort", party, exc.site, kind="text")
            self.abort = (party, exc.site)
            raise
        self.steps.append(Step(party, fn, position, published, result))
        return result

    def send(self, party: str, fn: Callable) -> dict:
        """Run a step whose result (label -> payload) is broadcast."""
        records = self._run(party, fn, True)
        for label, payload in records.items():
            self.transcript.append(label, party, payload)
        return records

    def compute(self, party: str, fn: Callable):
        """Run a private step; its result stays in the party's state."""
        return self._run(party, fn, False)

    def broadcast_channel(self, x: np.ndarray, receiver: str = "bob", wiretapper: str = "eve") -> None:
        y, z = transmit(x, self.cfg, self.nature)
        self.views[receiver].observations["Y"] = y
        if z is not None:
            self.views[wiretapper].observations["Z"] = z
            for party, granted in self.grants.items():
                if wiretapper in granted:
                    self.views[party].observations["Z"] = z

    def outcome(self, k_hat=None, j_hat=None) -> SessionOutcome:
        aborted = self.abort is not None
        return SessionOutcome(
            variant=self.variant,
            params=self.params,
            seed=self.seed.entropy if not self.seed.spawn_key else (self.seed.entropy, self.seed.spawn_key),
            aborted=aborted,
            abort_site=self.abort[1] if aborted else None,
            abort_party=self.abort[0] if aborted else None,
            k_hat=None if aborted else k_hat,
            j_hat=None if aborted else j_hat,
            views=self.views,
            transcript=self.transcript,
            steps=self.steps,
            diagnostics=self.diagnostics,
        )


def channel_topology_check(cfg: ChannelConfig, *allowed: Topology) -> None:
    if cfg.topology not in allowed:
        names = ", ".join(t.value for t in allowed)
        raise ValueError(f"this protocol runs over the {names} topology, not {cfg.topology.value}")


def canonical(value) -> bytes:
    """Byte encoding used to compare step results during replay."""
    if value is None:
        return b"N"
    if isinstance(value, (bool, int, np.integer)):
        return b"i" + str(int(value)).encode()
    if isinstance(value, float):
        return b"f" + repr(value).encode()
    if isinstance(value, str):
        return b"s" + value.encode()
    if isinstance(value, HashFn):
        value = value.matrix
    if isinstance(value, BitMatrix):
        return b"m%d,%d:" % value.shape + value.words.tobytes()
    if isinstance(value, np.ndarray):
        return b"a" + str(value.dtype).encode() + str(value.shape).encode() + value.tobytes()
    if isinstance(value, dict):
        return b"d{" + b";".join(canonical(k) + b"=" + canonical(v) for k, v in value.items()) + b"}"
    if isinstance(value, (tuple, list)):
        return b"t(" + b";".join(canonical(v) for v in value) + b")"
    if hasattr(value, "__dataclass_fields__"):
        return b"o" + type(value).__name__.encode() + canonical(
            {k: getattr(value, k) for k in value.__dataclass_fields__})
    raise TypeError(f"cannot canonicalise {type(value).__name__}")


def replay_validate(outcome: SessionOutcome) -> list[str]:
    """Re-run every party's steps from a fresh copy of its own view.

    Each step sees only the transcript prefix that existed when it ran.
    Returns a list of mismatches (empty when every message and private
    result is reproduced exactly).
    """
    problems = []
    fresh = {p: v.fresh(Transcript()) for p, v in outcome.views.items()}
    for i, step in enumerate(outcome.steps):
        view = fresh[step.party]
        view.transcript = outcome.transcript.prefix(step.position)
        try:
            result = step.fn(view, outcome.params)
        except Abort as exc:
            result = ("abort", exc.site)
        if canonical(result) != canonical(step.result):
            name = getattr(step.fn, "__qualname__", repr(step.fn))
            problems.append(f"step {i} ({step.party}: {name}) is not reproducible from its view")
    return problems
