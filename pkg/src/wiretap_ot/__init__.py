"""Oblivious transfer over erasure broadcast channels with an eavesdropper.

Subpackages: ``protocols`` (the session engine and every protocol variant),
``analysis`` (capacities, Monte Carlo statistics, exact leakage oracles).
"""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.0.0+local"

from .adversaries import AttackSpec
from .analysis import capacities, rate_region
from .channel import ChannelConfig, Topology
from .protocols import PartyInputs, ProtocolParams, SessionOutcome, derive_params, replay_validate, run_session

__all__ = [
    "AttackSpec", "ChannelConfig", "PartyInputs", "ProtocolParams", "SessionOutcome", "Topology",
    "capacities", "derive_params", "rate_region", "replay_validate", "run_session", "__version__",
]
