"""1-private OT over the degraded (cascade) erasure broadcast channel.

Bob never publishes L0 and L1 directly: Eve's erasures contain Bob's, so the
all-erased bad set would give his choice away. He publishes the complements
G~ and B~ and sends the membership string Q over L0 u L1 encrypted with a key
hashed from X on the front of G~.
"""

from __future__ import annotations

import numpy as np

from ..channel import ChannelConfig, Topology
from ..hashing import apply_hash, sample_hash
from .common import alice_transmit, bob_erasures, decrypt, hash_and_encrypt, known_bits, sample_set, xor
from .engine import Abort, PartyInputs, Session, SessionOutcome, channel_topology_check
from .params import ProtocolParams

SITE_COUNTS = "step 2: insufficient erasures/non-erasures"
SITE_UNDERFLOW = "degraded: G~ underflow"
SITE_RECONSTRUCT = "step 7: published sets inconsistent"


def carve(gt: np.ndarray, p: ProtocolParams) -> tuple[np.ndarray, np.ndarray]:
    """G~_L and G~_S: consecutive runs of the sorted G~."""
    gt = np.sort(gt)
    return gt[:p.gl_len], gt[p.gl_len:p.gl_len + p.gs_len]


def membership(l0: np.ndarray, l1: np.ndarray) -> np.ndarray:
    """Q: for each element of sorted L0 u L1, 0 if it is in L0 and 1 if in L1."""
    union = np.union1d(l0, l1)
    return np.isin(union, l1).astype(np.uint8)


def split_membership(union: np.ndarray, q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    union = np.sort(union)
    return union[q == 0], union[q == 1]


def abort_site(erased: int, received: int, p: ProtocolParams) -> str | None:
    """Bob's abort decision from his erasure counts alone."""
    if received < (1 - p.eps1 - p.delta) * p.n or erased < (p.eps1 - p.delta) * p.n \
            or min(erased, received) < p.sel_len:
        return SITE_COUNTS
    if received - p.sel_len < p.gl_len + p.gs_len:
        return SITE_UNDERFLOW
    return None


def bob_select(view, p: ProtocolParams) -> dict:
    e, ebar = bob_erasures(view, p)
    site = abort_site(len(e), len(ebar), p)
    if site:
        raise Abort(site)
    rng, u = view.rng, view.inputs["U"]
    good = sample_set(ebar, p.sel_len, rng)
    bad = sample_set(e, p.sel_len, rng)
    gt, bt = np.setdiff1d(ebar, good), np.setdiff1d(e, bad)
    sels = (bad, good) if u else (good, bad)
    view.state["L"] = sels
    return {"Gt": gt, "Bt": bt}


def bob_encrypt_q(view, p: ProtocolParams) -> dict:
    l0, l1 = view.state["L"]
    gl, _ = carve(view.transcript.get("Gt"), p)
    f = sample_hash(p.gl_len, 2 * p.sel_len, view.rng)
    pad = apply_hash(f, known_bits(view.observations["Y"], gl))
    return {"FL": f, "Qc": xor(membership(l0, l1), pad)}


def alice_reconstruct(view, p: ProtocolParams):
    x = view.state["X"]
    gt, bt = view.transcript.get("Gt"), view.transcript.get("Bt")
    published = np.concatenate([gt, bt])
    if published.size and (published.min() < 0 or published.max() >= p.n) \
            or len(np.unique(published)) != published.size or len(gt) < p.gl_len + p.gs_len:
        raise Abort(SITE_RECONSTRUCT)
    union = np.setdiff1d(np.arange(p.n), published)
    qc = view.transcript.get("Qc")
    if union.size != 2 * p.sel_len or qc.size != union.size:
        raise Abort(SITE_RECONSTRUCT)
    gl, _ = carve(gt, p)
    q = decrypt(qc, view.transcript.get("FL"), x[gl])
    l0, l1 = split_membership(union, q)
    if l0.size != p.sel_len:
        raise Abort(SITE_RECONSTRUCT)
    view.state["L"] = (l0, l1)
    return l0, l1


def key_sources(sels, gs) -> list[np.ndarray]:
    return [np.union1d(sel, gs) for sel in sels]


def alice_encrypt(view, p: ProtocolParams) -> dict:
    x = view.state["X"]
    _, gs = carve(view.transcript.get("Gt"), p)
    sources = [x[pos] for pos in key_sources(view.state["L"], gs)]
    return hash_and_encrypt(view, view.inputs["K"], sources, p.key_len)


def bob_decrypt(view, p: ProtocolParams) -> np.ndarray:
    u = view.inputs["U"]
    _, gs = carve(view.transcript.get("Gt"), p)
    pos = key_sources(view.state["L"], gs)[u]
    return decrypt(view.transcript.get(f"C{u}"), view.transcript.get(f"F{u}"),
                   known_bits(view.observations["Y"], pos))


def run_degraded(params: ProtocolParams, inputs: PartyInputs, cfg: ChannelConfig, rng,
                 alice=None) -> SessionOutcome:
    """1-private OT over the degraded channel with an encrypted membership string."""
    if params.variant != "degraded":
        raise ValueError("parameters are not for the degraded-channel protocol")
    channel_topology_check(cfg, Topology.DEGRADED)
    if len(inputs.strings) != 2 or inputs.strings[0].size != params.key_len:
        raise ValueError(f"Alice needs 2 strings of length {params.key_len}")
    s = Session(params.variant, params, cfg, rng, inputs, {"alice": alice})
    k_hat = None
    try:
        x = s.compute("alice", alice_transmit)
        s.broadcast_channel(x)
        s.send("bob", bob_select)
        s.send("bob", bob_encrypt_q)
        s.compute("alice", alice_reconstruct)
        s.send("alice", alice_encrypt)
        k_hat = s.compute("bob", bob_decrypt)
    except Abort:
        pass
    return s.outcome(k_hat)

