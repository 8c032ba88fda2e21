"""Directed expander decompositions with exact, replayable certificates."""
from .cutmatch import CutMatchingOutcome, potential, potential_trace, run_cut_matching
from .decomp import (
    DecompositionResult,
    acyclicity_check,
    load_result,
    strong_decomposition,
    weak_decomposition,
)
from .errors import (
    ContractError,
    DegenerateCutError,
    ExdecError,
    InputError,
    ReplayError,
    SizeGuardError,
    StructureError,
    ZeroWeightError,
)
from .flow import FlowInstance, exact_max_flow, push_relabel_bounded
from .graph import (
    CutCertificate,
    Graph,
    Weighting,
    conductance,
    degree_weighting,
    induced_subgraph,
    parse_edge_list,
    read_edge_list,
    regularized_weighting,
)
from .linkcut import LinkCutForest
from .oracle import ValidationReport, min_conductance, validate_decomposition
from .ppr import ValidState
from .trim import TrimOutcome, trim
from .witness import Witness, verify_witness

__all__ = [
    "ContractError", "CutCertificate", "CutMatchingOutcome", "DecompositionResult",
    "DegenerateCutError", "ExdecError", "FlowInstance", "Graph", "InputError", "LinkCutForest",
    "ReplayError", "SizeGuardError", "StructureError", "TrimOutcome", "ValidState",
    "ValidationReport", "Weighting", "Witness", "ZeroWeightError", "acyclicity_check",
    "conductance", "degree_weighting", "exact_max_flow", "induced_subgraph", "load_result",
    "min_conductance", "parse_edge_list", "potential", "potential_trace", "push_relabel_bounded",
    "read_edge_list", "regularized_weighting", "run_cut_matching", "strong_decomposition", "trim",
    "validate_decomposition", "verify_witness", "weak_decomposition",
]
