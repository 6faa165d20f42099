"""Deterministic multichain NFT marketplace simulator."""

from .errors import SimError
from .invariants import Violation, check_invariants
from .marketplace import commission_for
from .scenario import RunReport, load_scenario, parse_scenario, run_scenario
from .token import ContractId
from .world import WorldState

__all__ = [
    "ContractId",
    "RunReport",
    "SimError",
    "Violation",
    "WorldState",
    "check_invariants",
    "commission_for",
    "load_scenario",
    "parse_scenario",
    "run_scenario",
]

__version__ = "0.1.0"
