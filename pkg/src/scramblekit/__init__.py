"""Stabilizer simulation of tunable-range scrambling circuits."""

from .clifford import Clifford2, sample_clifford2
from .models import (
    CircuitSchedule,
    GateEvent,
    Model,
    ShuffleMap,
    build_schedule,
    coupling_norm,
    pwr2_schedule,
    riffle_schedule,
    shuffle,
    wraa_schedule,
)
from .observables import (
    RegionSpec,
    default_regions,
    mutual_information,
    pstar_indicator,
    tripartite_mi,
)
from .tableau import InitState, Tableau, apply_gate, new_tableau, renyi2_entropy

__all__ = [
    "CircuitSchedule",
    "Clifford2",
    "GateEvent",
    "InitState",
    "Model",
    "RegionSpec",
    "ShuffleMap",
    "Tableau",
    "apply_gate",
    "build_schedule",
    "coupling_norm",
    "default_regions",
    "mutual_information",
    "new_tableau",
    "pstar_indicator",
    "pwr2_schedule",
    "renyi2_entropy",
    "riffle_schedule",
    "sample_clifford2",
    "shuffle",
    "tripartite_mi",
    "wraa_schedule",
]
