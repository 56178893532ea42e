"""Capacities, rate regions, exact leakage oracles and Monte Carlo statistics."""

from .capacity import CapacityReport, Polygon, RateRegion, capacities, rate_region

_LAZY = {
    "exact_leakage_oracle": "oracle",
    "LeakageReport": "oracle",
    "OracleBudgetError": "oracle",
    "estimate_oracle_size": "oracle",
    "tiny_params": "oracle",
    "iter_outcomes": "montecarlo",
    "monte_carlo": "montecarlo",
    "Stats": "montecarlo",
    "residual_min_entropy": "residual",
    "residual_report": "residual",
}


def __getattr__(name):
    # Oracle and Monte Carlo depend on the protocol engine, which itself
    # needs the capacity formulas; load them on first use.
    if name in _LAZY:
        import importlib

        module = importlib.import_module(f".{_LAZY[name]}", __name__)
        return getattr(module, name)
    raise AttributeError(name)


__all__ = ["CapacityReport", "Polygon", "RateRegion", "capacities", "rate_region", *_LAZY]
