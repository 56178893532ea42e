"""Honest-but-curious protocols where Bob publishes his index selections.

Covers the 2-private and 1-private 1-of-2 protocols, their 1-of-N
generalisations, the two-party erasure-channel protocol, and the
independent pair (Bob's phase followed by a two-party phase for Cathy).
"""

from __future__ import annotations

import numpy as np

from ..channel import ERASED, ChannelConfig, Topology
from .common import (
    alice_transmit,
    bob_erasures,
    decrypt,
    hash_and_encrypt,
    known_bits,
    sample_ordered,
    sample_set,
    xor,
)
from .engine import Abort, PartyInputs, Session, SessionOutcome, channel_topology_check
from .params import ProtocolParams

SITE_COUNTS = "insufficient erasures/non-erasures"
SITE_CATHY_BLOCK = "insufficient erasures for Cathy's block"
SITE_CATHY_COUNTS = "cathy: insufficient erasures/non-erasures"

_ONE_PRIVATE = ("c1p", "oneofN_1p")


def _assign(good, bad_list, u: int) -> dict:
    sels = list(bad_list)
    sels.insert(u, good)
    return {f"L{i}": np.sort(s) for i, s in enumerate(sels)}


def counts_abort(erased: int, received: int, p: ProtocolParams) -> bool:
    """Whether Bob's erasure counts are too small for his selections."""
    bad_need = p.nr if p.variant in _ONE_PRIVATE else p.beta_n
    return received < p.beta_n or erased < (p.N - 1) * bad_need


def bob_select(view, p: ProtocolParams) -> dict:
    e, ebar = bob_erasures(view, p)
    rng, u, N, bn = view.rng, view.inputs["U"], p.N, p.beta_n
    if counts_abort(len(e), len(ebar), p):
        raise Abort(SITE_COUNTS)
    if p.variant in _ONE_PRIVATE:
        core = sample_ordered(e, (N - 1) * p.nr, rng)
        good = sample_ordered(ebar, bn, rng)
        pool = np.union1d(np.setdiff1d(ebar, good), np.setdiff1d(e, core))
        extra = sample_ordered(pool, (N - 1) * (bn - p.nr), rng)
        step = bn - p.nr
        bads = [np.concatenate([core[i * p.nr:(i + 1) * p.nr], extra[i * step:(i + 1) * step]])
                for i in range(N - 1)]
        return _assign(good, bads, u)
    good = sample_ordered(ebar, bn, rng)
    bad = sample_ordered(e, (N - 1) * bn, rng)
    records = _assign(good, [bad[i * bn:(i + 1) * bn] for i in range(N - 1)], u)
    if p.cathy_len:
        rest = np.setdiff1d(e, bad)
        if len(rest) < p.cathy_len:
            raise Abort(SITE_CATHY_BLOCK)
        records["L"] = sample_set(rest, p.cathy_len, rng)
    elif p.variant == "independent_pair":
        records["L"] = np.empty(0, dtype=np.int64)
    return records


def alice_encrypt(view, p: ProtocolParams) -> dict:
    x = view.state["X"]
    sources = [x[view.transcript.get(f"L{i}")] for i in range(p.N)]
    keys = view.inputs["K"]
    if p.variant == "two_party":
        return {f"C{i}": xor(k, src) for i, (k, src) in enumerate(zip(keys, sources))}
    return hash_and_encrypt(view, keys, sources, p.key_len)


def bob_decrypt(view, p: ProtocolParams) -> np.ndarray:
    u = view.inputs["U"]
    pad_source = known_bits(view.observations["Y"], view.transcript.get(f"L{u}"))
    cipher = view.transcript.get(f"C{u}")
    if p.variant == "two_party":
        return xor(cipher, pad_source)
    return decrypt(cipher, view.transcript.get(f"F{u}"), pad_source)


def cathy_select(view, p: ProtocolParams) -> dict:
    block = view.transcript.get("L")
    z = view.observations["Z"][block]
    erased, received = block[z == ERASED], block[z != ERASED]
    m = p.cathy_key_len
    if len(erased) < m or len(received) < m:
        raise Abort(SITE_CATHY_COUNTS)
    good = sample_set(received, m, view.rng)
    bad = sample_set(erased, m, view.rng)
    sels = [bad, good] if view.inputs["W"] else [good, bad]
    return {"M0": sels[0], "M1": sels[1]}


def alice_encrypt_cathy(view, p: ProtocolParams) -> dict:
    x = view.state["X"]
    return {f"D{i}": xor(j, x[view.transcript.get(f"M{i}")]) for i, j in enumerate(view.inputs["J"])}


def cathy_decrypt(view, p: ProtocolParams) -> np.ndarray:
    w = view.inputs["W"]
    pad = known_bits(view.observations["Z"], view.transcript.get(f"M{w}"))
    return xor(view.transcript.get(f"D{w}"), pad)


def _check_inputs(params: ProtocolParams, inputs: PartyInputs) -> None:
    if len(inputs.strings) != params.N or inputs.strings[0].size != params.key_len:
        raise ValueError(f"Alice needs {params.N} strings of length {params.key_len}")


def _run(params, inputs, cfg, seed, alice=None) -> SessionOutcome:
    _check_inputs(params, inputs)
    s = Session(params.variant, params, cfg, seed, inputs, {"alice": alice})
    k_hat = None
    try:
        x = s.compute("alice", alice_transmit)
        s.broadcast_channel(x)
        s.send("bob", bob_select)
        s.send("alice", alice_encrypt)
        k_hat = s.compute("bob", bob_decrypt)
    except Abort:
        pass
    return s.outcome(k_hat)


def _require(params: ProtocolParams, *variants: str) -> None:
    if params.variant not in variants:
        raise ValueError(f"parameters are for {params.variant}, expected {' or '.join(variants)}")


def run_c2p(params: ProtocolParams, inputs: PartyInputs, cfg: ChannelConfig, rng, alice=None) -> SessionOutcome:
    """2-private 1-of-2 OT over the independent broadcast channel."""
    _require(params, "c2p")
    channel_topology_check(cfg, Topology.INDEPENDENT)
    return _run(params, inputs, cfg, rng, alice)


def run_c1p(params: ProtocolParams, inputs: PartyInputs, cfg: ChannelConfig, rng, alice=None) -> SessionOutcome:
    """1-private 1-of-2 OT: the bad selection only needs nr erased positions."""
    _require(params, "c1p")
    channel_topology_check(cfg, Topology.INDEPENDENT)
    return _run(params, inputs, cfg, rng, alice)


def run_one_of_n(params: ProtocolParams, inputs: PartyInputs, cfg: ChannelConfig, rng, alice=None) -> SessionOutcome:
    """1-of-N OT; with N = 2 it follows exactly the 1-of-2 random path."""
    _require(params, "oneofN_2p", "oneofN_1p", "c2p", "c1p")
    channel_topology_check(cfg, Topology.INDEPENDENT)
    return _run(params, inputs, cfg, rng, alice)


def run_two_party(params: ProtocolParams, inputs: PartyInputs, cfg: ChannelConfig, rng, alice=None) -> SessionOutcome:
    """Two-party OT over BEC(eps1): raw channel bits are the pads."""
    _require(params, "two_party")
    channel_topology_check(cfg, Topology.SINGLE)
    return _run(params, inputs, cfg, rng, alice)


def run_independent_pair(params: ProtocolParams, inputs: PartyInputs, cfg: ChannelConfig, rng) -> SessionOutcome:
    """OT to Bob over BEC(eps1) and, on Bob's spare erasures, two-party OT to Cathy."""
    _require(params, "independent_pair")
    channel_topology_check(cfg, Topology.INDEPENDENT)
    _check_inputs(params, inputs)
    if params.cathy_key_len and len(inputs.cathy_strings) != 2:
        raise ValueError("Cathy's strings are required when her rate is positive")
    s = Session(params.variant, params, cfg, rng, inputs)
    k_hat = j_hat = None
    try:
        x = s.compute("alice", alice_transmit)
        s.broadcast_channel(x, wiretapper="cathy")
        s.send("bob", bob_select)
        s.send("alice", alice_encrypt)
        k_hat = s.compute("bob", bob_decrypt)
        if params.cathy_len:
            s.send("cathy", cathy_select)
            s.send("alice", alice_encrypt_cathy)
            j_hat = s.compute("cathy", cathy_decrypt)
    except Abort:
        pass
    return s.outcome(k_hat, j_hat)
