"""OT protocols over erasure broadcast channels, run on a shared session engine."""

from __future__ import annotations

from ..channel import ChannelConfig, Topology
from .degraded import run_degraded
from .engine import Abort, PartyInputs, SessionOutcome, View, replay_validate
from .malicious import HonestBobGtHalf, HonestBobLeHalf, run_malicious_gt_half, run_malicious_le_half
from .params import VARIANTS, ParameterError, ProtocolParams, derive_params
from .selection import run_c1p, run_c2p, run_independent_pair, run_one_of_n, run_two_party
from .transcript import Record, Transcript

RUNNERS = {
    "c2p": run_c2p,
    "c1p": run_c1p,
    "oneofN_2p": run_one_of_n,
    "oneofN_1p": run_one_of_n,
    "two_party": run_two_party,
    "independent_pair": run_independent_pair,
    "degraded": run_degraded,
    "mal_le_half": run_malicious_le_half,
    "mal_gt_half": run_malicious_gt_half,
}


def topology_for(variant: str) -> Topology:
    if variant == "degraded":
        return Topology.DEGRADED
    if variant == "two_party":
        return Topology.SINGLE
    return Topology.INDEPENDENT


def channel_for(params: ProtocolParams) -> ChannelConfig:
    return ChannelConfig(params.eps1, params.eps2, topology_for(params.variant))


def run_session(params: ProtocolParams, inputs: PartyInputs, seed, strategies: dict | None = None,
                cfg: ChannelConfig | None = None) -> SessionOutcome:
    """Run one session of ``params.variant`` with optional cheating strategies."""
    strategies = dict(strategies or {})
    runner = RUNNERS[params.variant]
    cfg = cfg or channel_for(params)
    kwargs = {}
    if "alice" in strategies:
        if params.variant == "independent_pair":
            raise ValueError("the independent-pair runner takes no strategies")
        kwargs["alice"] = strategies.pop("alice")
    if "bob" in strategies:
        if params.variant not in ("mal_le_half", "mal_gt_half"):
            raise ValueError("only the malicious protocols accept a Bob strategy")
        kwargs["bob"] = strategies.pop("bob")
    if strategies:
        raise ValueError(f"unsupported strategies for {', '.join(strategies)}")
    return runner(params, inputs, cfg, seed, **kwargs)


__all__ = [
    "Abort", "HonestBobGtHalf", "HonestBobLeHalf", "ParameterError", "PartyInputs", "ProtocolParams",
    "RUNNERS", "Record", "SessionOutcome", "Transcript", "VARIANTS", "View", "channel_for", "derive_params",
    "replay_validate", "run_c1p", "run_c2p", "run_degraded", "run_independent_pair", "run_malicious_gt_half",
    "run_malicious_le_half", "run_one_of_n", "run_session", "run_two_party", "topology_for",
]
