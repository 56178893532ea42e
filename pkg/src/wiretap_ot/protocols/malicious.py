"""Protocols secure against malicious users (eps1 <= 1/2 and eps1 > 1/2).

Bob's decisions go through a strategy object so that honest and cheating
Bobs share one engine. Strategies keep per-session data in ``view.state``
only, which lets the replay validator re-run them.
"""

from __future__ import annotations

import math

import numpy as np

from ..channel import ERASED, ChannelConfig, Topology
from ..gf2 import bits_to_int, int_to_bits, random_bits
from ..index_codec import SubsetCodec, string_to_subset_onto, subset_rank, subset_unrank
from ..interactive_hashing import HonestSender, ih_challenge, ih_finish, ih_respond
from .common import alice_transmit, bob_erasures, decrypt, hash_and_encrypt, known_bits, sample_ordered
from .engine import Abort, PartyInputs, Session, SessionOutcome, channel_topology_check
from .params import ProtocolParams

P3_COUNTS = "step 2: insufficient erasures/non-erasures"
P3_OVERLAP = "step 4: tuples not disjoint"
P3_CHECK = "step 7: revealed bits mismatch"
P4_COUNTS = "step 2: insufficient non-erasures"
P4_RANGE = "step 5: hashing output outside the codec range"
P4_WINDOW = "step 6: overlap size outside window"
P4_CHECK = "step 8: revealed bits mismatch"


def le_half_codec(p: ProtocolParams) -> SubsetCodec:
    return SubsetCodec(p.beta_n, p.gamma_n)


def gt_half_codec(p: ProtocolParams) -> SubsetCodec:
    return SubsetCodec(p.n, p.beta_n)


def _complement(size: int, subset) -> np.ndarray:
    mask = np.ones(size, dtype=bool)
    mask[np.asarray(subset, dtype=np.int64)] = False
    return np.flatnonzero(mask)


def _ih_outputs(view) -> tuple[np.ndarray, np.ndarray]:
    out = ih_finish(view.transcript.get("ih.M"), view.transcript.get("ih.Pi"))
    return out.s0, out.s1


def _phi(view, s0, s1) -> int:
    s = view.state["S"]
    if np.array_equal(s, s0):
        return 0
    if np.array_equal(s, s1):
        return 1
    raise AssertionError("Bob's hashing input is not among the outputs")


class HonestBobLeHalf:
    """Honest Bob for the eps1 <= 1/2 protocol."""

    def select(self, view, p: ProtocolParams) -> dict:
        e, ebar = bob_erasures(view, p)
        bn, gn = p.beta_n, p.gamma_n
        if len(ebar) < bn + gn or len(e) < bn - gn:
            raise Abort(P3_COUNTS)
        rng = view.rng
        s = random_bits(p.ih_bits, rng)
        j = string_to_subset_onto(le_half_codec(p), s)
        good = sample_ordered(ebar, bn, rng)
        bad = np.empty(bn, dtype=np.int64)
        bad[j] = sample_ordered(np.setdiff1d(ebar, good), gn, rng)
        bad[_complement(bn, j)] = sample_ordered(e, bn - gn, rng)
        return self._publish(view, s, good, bad)

    @staticmethod
    def _publish(view, s, good, bad) -> dict:
        view.state["S"] = s
        u = view.inputs["U"]
        tuples = (bad, good) if u else (good, bad)
        view.state["tuples"] = tuples
        return {"T0": tuples[0], "T1": tuples[1]}

    def ih_sender(self, view, p):
        return HonestSender(view.state["S"])

    def knows(self, view, positions) -> tuple[np.ndarray, np.ndarray]:
        """(bit values, known mask) Bob holds at ``positions``."""
        y = view.observations["Y"][positions]
        return np.where(y == ERASED, 0, y).astype(np.uint8), y != ERASED

    def reveal(self, view, p: ProtocolParams) -> dict:
        s0, s1 = _ih_outputs(view)
        phi = _phi(view, s0, s1)
        theta = phi ^ view.inputs["U"]
        view.state["phi"] = phi
        codec = le_half_codec(p)
        j = (string_to_subset_onto(codec, s0), string_to_subset_onto(codec, s1))
        t0, t1 = view.state["tuples"]
        records = {"Theta": theta}
        for label, positions in (("R0", t0[j[1 - theta]]), ("R1", t1[j[theta]])):
            bits, known = self.knows(view, positions)
            if not known.all():
                guess = random_bits(int(np.count_nonzero(~known)), view.rng)
                bits = bits.copy()
                bits[~known] = guess
            records[label] = bits
        return records

    def decrypt(self, view, p: ProtocolParams) -> np.ndarray:
        u = view.inputs["U"]
        t = view.state["tuples"][u]
        return decrypt(view.transcript.get(f"C{u}"), view.transcript.get(f"F{u}"),
                       known_bits(view.observations["Y"], t))


class HonestBobGtHalf:
    """Honest Bob for the eps1 > 1/2 protocol."""

    def choose_s(self, view, p: ProtocolParams) -> np.ndarray:
        _, ebar = bob_erasures(view, p)
        if len(ebar) < p.beta_n:
            raise Abort(P4_COUNTS)
        codec = gt_half_codec(p)
        rng = view.rng
        fill = math.exp(math.log(codec.count) - p.ih_bits * math.log(2))
        if rng.random() < fill:
            good = sample_ordered(ebar, p.beta_n, rng)
            return int_to_bits(subset_rank(codec, good), p.ih_bits)
        while True:
            s = random_bits(p.ih_bits, rng)
            if not codec.in_range(s):
                return s

    def select(self, view, p: ProtocolParams) -> dict:
        view.state["S"] = self.choose_s(view, p)
        return {}

    def ih_sender(self, view, p):
        return HonestSender(view.state["S"])

    def knows(self, view, positions) -> tuple[np.ndarray, np.ndarray]:
        y = view.observations["Y"][positions]
        return np.where(y == ERASED, 0, y).astype(np.uint8), y != ERASED

    def reveal(self, view, p: ProtocolParams) -> dict:
        s0, s1 = _ih_outputs(view)
        phi = _phi(view, s0, s1)
        view.state["phi"] = phi
        codec = gt_half_codec(p)
        l0, l1 = (subset_unrank(codec, bits_to_int(s)) for s in (s0, s1))
        view.state["sets"] = (l0, l1)
        common = np.intersect1d(l0, l1)
        bits, known = self.knows(view, common)
        if not known.all():
            bits = bits.copy()
            bits[~known] = random_bits(int(np.count_nonzero(~known)), view.rng)
        return {"Theta": phi ^ view.inputs["U"], "R": bits}

    def decrypt(self, view, p: ProtocolParams) -> np.ndarray:
        u, phi = view.inputs["U"], view.state["phi"]
        l0, l1 = view.state["sets"]
        mine = (l0, l1)[phi]
        source = known_bits(view.observations["Y"], np.setdiff1d(mine, np.intersect1d(l0, l1)))
        return decrypt(view.transcript.get(f"C{u}"), view.transcript.get(f"F{u}"), source)


# Step functions. Each runs for one party on that party's view.

def bob_select(view, p):
    return view.strategy.select(view, p)


def bob_ih_respond(view, p):
    return {"ih.Pi": ih_respond(view.strategy.ih_sender(view, p), view.transcript.get("ih.M"))}


def bob_reveal(view, p):
    return view.strategy.reveal(view, p)


def bob_decrypt(view, p):
    return view.strategy.decrypt(view, p)


def alice_ih_challenge(view, p):
    return {"ih.M": ih_challenge(p.ih_bits, view.rng)}


def alice_check_tuples(view, p):
    t0, t1 = view.transcript.get("T0"), view.transcript.get("T1")
    for t in (t0, t1):
        if t.size != p.beta_n or len(np.unique(t)) != t.size or t.min() < 0 or t.max() >= p.n:
            raise Abort(P3_OVERLAP)
    if np.intersect1d(t0, t1).size:
        raise Abort(P3_OVERLAP)
    return True


def alice_check_reveal_le(view, p):
    x = view.state["X"]
    s0, s1 = _ih_outputs(view)
    codec = le_half_codec(p)
    j = (string_to_subset_onto(codec, s0), string_to_subset_onto(codec, s1))
    theta = int(view.transcript.get("Theta"))
    t0, t1 = view.transcript.get("T0"), view.transcript.get("T1")
    if theta not in (0, 1):
        raise Abort(P3_CHECK)
    checked = (("R0", t0[j[1 - theta]]), ("R1", t1[j[theta]]))
    for label, positions in checked:
        r = view.transcript.get(label)
        if r.size != positions.size or not np.array_equal(r, x[positions]):
            raise Abort(P3_CHECK)
    view.state["revealed"] = np.concatenate([pos for _, pos in checked])
    return True


def alice_encrypt_le(view, p):
    x = view.state["X"]
    sources = [x[view.transcript.get("T0")], x[view.transcript.get("T1")]]
    return hash_and_encrypt(view, view.inputs["K"], sources, p.key_len)


def alice_check_range(view, p):
    s0, s1 = _ih_outputs(view)
    codec = gt_half_codec(p)
    if not (codec.in_range(s0) and codec.in_range(s1)):
        raise Abort(P4_RANGE)
    sets = tuple(subset_unrank(codec, bits_to_int(s)) for s in (s0, s1))
    view.state["sets"] = sets
    overlap = np.intersect1d(*sets).size / p.beta_n
    if not p.beta - p.delta <= overlap <= p.beta + p.delta:
        raise Abort(P4_WINDOW)
    return True


def alice_check_reveal_gt(view, p):
    x = view.state["X"]
    l0, l1 = view.state["sets"]
    common = np.intersect1d(l0, l1)
    r = view.transcript.get("R")
    if int(view.transcript.get("Theta")) not in (0, 1) or r.size != common.size or not np.array_equal(r, x[common]):
        raise Abort(P4_CHECK)
    return True


def alice_encrypt_gt(view, p):
    x = view.state["X"]
    l0, l1 = view.state["sets"]
    common = np.intersect1d(l0, l1)
    theta = int(view.transcript.get("Theta"))
    first, second = (l0, l1) if theta == 0 else (l1, l0)
    sources = [x[np.setdiff1d(first, common)], x[np.setdiff1d(second, common)]]
    return hash_and_encrypt(view, view.inputs["K"], sources, p.key_len)


def _session(params, inputs, cfg, rng, alice, bob, default_bob):
    bob = bob or default_bob
    grants = {"bob": {"eve"}} if getattr(bob, "colludes_with_eve", False) else {}
    return Session(params.variant, params, cfg, rng, inputs, {"alice": alice, "bob": bob}, grants)


def run_malicious_le_half(params: ProtocolParams, inputs: PartyInputs, cfg: ChannelConfig, rng,
                          alice=None, bob=None) -> SessionOutcome:
    """OT against malicious users when eps1 <= 1/2 (tuples, hashing, bit checks)."""
    if params.variant != "mal_le_half":
        raise ValueError("parameters are not for the eps1 <= 1/2 malicious protocol")
    channel_topology_check(cfg, Topology.INDEPENDENT)
    s = _session(params, inputs, cfg, rng, alice, bob, HonestBobLeHalf())
    k_hat = None
    try:
        x = s.compute("alice", alice_transmit)
        s.broadcast_channel(x)
        s.send("bob", bob_select)
        s.compute("alice", alice_check_tuples)
        s.send("alice", alice_ih_challenge)
        s.send("bob", bob_ih_respond)
        s.send("bob", bob_reveal)
        s.compute("alice", alice_check_reveal_le)
        s.send("alice", alice_encrypt_le)
        k_hat = s.compute("bob", bob_decrypt)
    except Abort:
        pass
    return s.outcome(k_hat)


def run_malicious_gt_half(params: ProtocolParams, inputs: PartyInputs, cfg: ChannelConfig, rng,
                          alice=None, bob=None) -> SessionOutcome:
    """OT against malicious users when eps1 > 1/2 (hashing picks the second set)."""
    if params.variant != "mal_gt_half":
        raise ValueError("parameters are not for the eps1 > 1/2 malicious protocol")
    channel_topology_check(cfg, Topology.INDEPENDENT)
    s = _session(params, inputs, cfg, rng, alice, bob, HonestBobGtHalf())
    k_hat = None
    try:
        x = s.compute("alice", alice_transmit)
        s.broadcast_channel(x)
        s.compute("bob", bob_select)
        s.send("alice", alice_ih_challenge)
        s.send("bob", bob_ih_respond)
        s.compute("alice", alice_check_range)
        s.send("bob", bob_reveal)
        s.compute("alice", alice_check_reveal_gt)
        s.send("alice", alice_encrypt_gt)
        k_hat = s.compute("bob", bob_decrypt)
    except Abort:
        pass
    return s.outcome(k_hat)
