"""Concrete cheating strategies and view merging for collusion analysis.

The swap and pack Bobs collude with Eve: the engine hands them Z as well as
Y, and they act on the merged view Psi. Alice's probe only changes her
channel input distribution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ERASED, merge_psi
from .gf2 import int_to_bits
from .index_codec import string_to_subset_onto, subset_rank
from .protocols.common import bob_erasures, decrypt, sample_ordered
from .protocols.engine import PARTIES, SessionOutcome, View
from .protocols.malicious import HonestBobGtHalf, HonestBobLeHalf, gt_half_codec, le_half_codec
from .protocols.transcript import Transcript

ATTACK_KINDS = ("honest", "bob_swap", "bob_pack", "alice_probe")


@dataclass(frozen=True)
class AttackSpec:
    """Which party cheats and how hard.

    ``strength`` is the swap count for ``bob_swap`` and the probability of a
    one for ``alice_probe``; the other kinds ignore it.
    """

    kind: str = "honest"
    strength: float = 0

    def __post_init__(self):
        if self.kind not in ATTACK_KINDS:
            raise ValueError(f"unknown attack {self.kind!r}; expected one of {', '.join(ATTACK_KINDS)}")
        if self.kind == "bob_swap" and (self.strength < 0 or self.strength != int(self.strength)):
            raise ValueError("the swap count must be a nonnegative integer")
        if self.kind == "alice_probe" and not 0 <= self.strength <= 1:
            raise ValueError("the probe bias must be a probability")

    @property
    def malicious(self) -> bool:
        return self.kind != "honest"

    def check(self, params) -> None:
        if self.kind == "bob_swap":
            if params.variant != "mal_le_half":
                raise ValueError("the swap attack targets the eps1 <= 1/2 malicious protocol")
            if self.strength > params.beta_n:
                raise ValueError(f"cannot swap more than beta*n = {params.beta_n} positions")
        if self.kind == "bob_pack" and params.variant != "mal_gt_half":
            raise ValueError("the packing attack targets the eps1 > 1/2 malicious protocol")

    def strategies(self) -> dict:
        if self.kind == "bob_swap":
            return {"bob": bob_swap_strategy(int(self.strength))}
        if self.kind == "bob_pack":
            return {"bob": bob_pack_strategy()}
        if self.kind == "alice_probe":
            return {"alice": alice_probe(float(self.strength))}
        return {}

    def to_dict(self) -> dict:
        return {"kind": self.kind, "strength": self.strength}


def psi(view) -> np.ndarray:
    """Merged Bob+Eve channel view; just Y when no Z was granted."""
    y = view.observations["Y"]
    z = view.observations.get("Z")
    return y if z is None else merge_psi(y, z)


class _PsiKnowledge:
    colludes_with_eve = True

    def knows(self, view, positions):
        v = psi(view)[positions]
        return np.where(v == ERASED, 0, v).astype(np.uint8), v != ERASED

    def _best_bits(self, view, positions) -> np.ndarray:
        bits, known = self.knows(view, positions)
        return np.where(known, bits, 0).astype(np.uint8)


class SwapBob(_PsiKnowledge, HonestBobLeHalf):
    """Moves Psi-known positions into the bad tuple, erased ones into the good tuple.

    The bad tuple's slots outside J are meant to be erased for Bob. Up to
    ``s`` of those that are erased even in Psi are exchanged with random
    slots of the good tuple, so Bob learns more about the other string at the
    cost of unknown positions in the tuple whose co-output slots get checked.
    """

    def __init__(self, s: int):
        self.s = s

    def select(self, view, p) -> dict:
        records = super().select(view, p)
        if self.s == 0:
            return records
        u = view.inputs["U"]
        good, bad = (view.state["tuples"][i].copy() for i in (u, 1 - u))
        j = string_to_subset_onto(le_half_codec(p), view.state["S"])
        outside = np.setdiff1d(np.arange(p.beta_n), j)
        candidates = outside[psi(view)[bad[outside]] == ERASED]
        count = min(self.s, len(candidates))
        slots_bad = sample_ordered(candidates, count, view.rng)
        slots_good = sample_ordered(np.arange(p.beta_n), count, view.rng)
        good[slots_good], bad[slots_bad] = bad[slots_bad], good[slots_good]
        view.state["swapped"] = count
        return self._publish(view, view.state["S"], good, bad)

    def decrypt(self, view, p) -> np.ndarray:
        u = view.inputs["U"]
        t = view.state["tuples"][u]
        return decrypt(view.transcript.get(f"C{u}"), view.transcript.get(f"F{u}"), self._best_bits(view, t))


class PackBob(_PsiKnowledge, HonestBobGtHalf):
    """Feeds interactive hashing the rank of a set made only of Psi-known positions."""

    def choose_s(self, view, p) -> np.ndarray:
        bob_erasures(view, p)
        known = np.flatnonzero(psi(view) != ERASED)
        if len(known) >= p.beta_n:
            chosen = sample_ordered(known, p.beta_n, view.rng)
        else:
            rest = np.flatnonzero(psi(view) == ERASED)
            chosen = np.concatenate([known, sample_ordered(rest, p.beta_n - len(known), view.rng)])
        view.state["packed"] = np.sort(chosen)
        return int_to_bits(subset_rank(gt_half_codec(p), chosen), p.ih_bits)

    def decrypt(self, view, p) -> np.ndarray:
        u, phi = view.inputs["U"], view.state["phi"]
        l0, l1 = view.state["sets"]
        mine = np.setdiff1d((l0, l1)[phi], np.intersect1d(l0, l1))
        return decrypt(view.transcript.get(f"C{u}"), view.transcript.get(f"F{u}"), self._best_bits(view, mine))


class ProbeAlice:
    """Alice who sends Bernoulli(bias) bits instead of fair ones."""

    def __init__(self, bias: float):
        self.bias = bias

    def channel_input(self, view, p) -> np.ndarray:
        return (view.rng.random(p.n) < self.bias).astype(np.uint8)


def bob_swap_strategy(s: int) -> SwapBob:
    if s < 0:
        raise ValueError("swap count must be nonnegative")
    return SwapBob(int(s))


def bob_pack_strategy() -> PackBob:
    return PackBob()


def alice_probe(bias: float) -> ProbeAlice:
    if not 0 <= bias <= 1:
        raise ValueError("bias must be a probability")
    return ProbeAlice(bias)


def merge_views(outcome: SessionOutcome, parties) -> View:
    """Union of the listed parties' views.

    Inputs, observations and derived state are merged key by key; per-party
    seeds land in ``state["seeds"]``. The transcript is shared by anyone in
    the coalition; the empty coalition gets an empty view.
    """
    parties = set(parties)
    unknown = parties - set(PARTIES)
    if unknown:
        raise ValueError(f"unknown parties: {', '.join(sorted(unknown))}")
    if not parties:
        return View("", {}, None, {}, Transcript())
    order = [p for p in PARTIES if p in parties]
    inputs, observations, state, seeds = {}, {}, {}, {}
    for p in order:
        v = outcome.views[p]
        inputs.update(v.inputs)
        observations.update(v.observations)
        state.update(v.state)
        if v.seed is not None:
            seeds[p] = v.seed
    state["seeds"] = seeds
    if "alice" in parties and "X" in state:
        observations["X"] = state["X"]
    return View("+".join(order), inputs, None, observations, outcome.transcript, state=state)
