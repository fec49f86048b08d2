"""Timed rule automata: model, zones, symbolic and discrete-time reachability."""

from .discrete import DiscreteResult, reach_discrete
from .model import ClockAtom, ClockConstraint, Location, RuleAutomaton, Transition, validate_automaton
from .network import (
    Network, ReachResult, ReplayError, SymbolicState, TraceStep, enabled, initial_state, reach, replay,
)
from .zone import (
    Zone, zone_and, zone_canon, zone_empty, zone_extrapolate, zone_reset, zone_subtract, zone_up,
)

__all__ = [
    "ClockAtom", "ClockConstraint", "DiscreteResult", "Location", "Network", "ReachResult",
    "ReplayError", "RuleAutomaton", "SymbolicState", "TraceStep", "Transition", "Zone",
    "enabled", "initial_state", "reach", "reach_discrete", "replay", "validate_automaton",
    "zone_and", "zone_canon", "zone_empty", "zone_extrapolate", "zone_reset", "zone_subtract",
    "zone_up",
]
