"""Omnidirectional relay networking: topology, rate regions, simulation."""

from .binning import (
    BinAssignment,
    alphabet_size,
    build_binning,
    decode_from_side_info,
    verify_binning_property,
)
from .errors import (
    CapacityLimitError,
    DecodeError,
    ModelViolationError,
    PreconditionError,
    TopologyFormatError,
)
from .mac_region import (
    EPS_BITS,
    HelperCarrier,
    MacInstance,
    MultiBlockInstance,
    MultiBlockResult,
    TwoBlockInstance,
    decodable_subset,
    mac_feasible,
    multi_block_decodable_subset,
    multi_block_feasible,
    peel_decodable_subset,
    self_decodable,
    two_block_feasible,
)
from .protocol_sim import (
    DecodeRecord,
    InterferenceReport,
    PayloadReport,
    SimulationTrace,
    Transmission,
    interference_accounting,
    payload_demo,
    run_distance_regulated,
    run_schedule,
)
from .rate_analysis import (
    CheckWitness,
    ConditionEntry,
    RateReport,
    RegularLineCheck,
    allcast_rate_bound,
    max_achievable_rate,
    ordered_line_conditions,
    verify_regular_line_achievability,
)
from .topology import (
    GainFunction,
    NeighborSets,
    PowerMatrix,
    Schedule,
    ScheduleViolation,
    Topology,
    arc,
    build_power_matrix,
    canonical_text,
    constant,
    coverage_check,
    distance_ordering_check,
    distance_regulated_schedule,
    exponential,
    general_line,
    k_hop_neighbors,
    load_topology_file,
    parse_topology_text,
    power_law,
    regular_line,
    ring,
    schedule_from_sets,
    topology_from_distances,
    topology_from_positions,
    validate_schedule,
)

__version__ = "0.1.0"

__all__ = [
    "BinAssignment",
    "CapacityLimitError",
    "CheckWitness",
    "ConditionEntry",
    "DecodeError",
    "DecodeRecord",
    "EPS_BITS",
    "GainFunction",
    "HelperCarrier",
    "InterferenceReport",
    "MacInstance",
    "ModelViolationError",
    "MultiBlockInstance",
    "MultiBlockResult",
    "NeighborSets",
    "PayloadReport",
    "PowerMatrix",
    "PreconditionError",
    "RateReport",
    "RegularLineCheck",
    "Schedule",
    "ScheduleViolation",
    "SimulationTrace",
    "Topology",
    "TopologyFormatError",
    "Transmission",
    "TwoBlockInstance",
    "alphabet_size",
    "allcast_rate_bound",
    "arc",
    "build_binning",
    "build_power_matrix",
    "canonical_text",
    "constant",
    "coverage_check",
    "decodable_subset",
    "decode_from_side_info",
    "distance_ordering_check",
    "distance_regulated_schedule",
    "exponential",
    "general_line",
    "interference_accounting",
    "k_hop_neighbors",
    "load_topology_file",
    "mac_feasible",
    "max_achievable_rate",
    "multi_block_decodable_subset",
    "multi_block_feasible",
    "ordered_line_conditions",
    "parse_topology_text",
    "payload_demo",
    "peel_decodable_subset",
    "power_law",
    "regular_line",
    "ring",
    "run_distance_regulated",
    "run_schedule",
    "schedule_from_sets",
    "self_decodable",
    "topology_from_distances",
    "topology_from_positions",
    "two_block_feasible",
    "validate_schedule",
    "verify_binning_property",
    "verify_regular_line_achievability",
]
