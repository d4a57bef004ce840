"""Threshold analysis for universal quantum computation on a bilinear
nearest-neighbor array under the [[7,1,3]] code."""

from ftlab._backend import BACKEND_NAME
from ftlab.census import (
    AffineCount,
    CensusError,
    CensusSet,
    ExRecCensus,
    LocationKind,
    count_at,
    load_census,
    paper_census,
    save_census,
    validate,
)
from ftlab.failure_model import (
    FailureVector,
    PhysicalSetting,
    gadget_failure,
    level1_failures,
    mc_oracle,
    recurse_failures,
)
from ftlab.ft_verifier import (
    FaultReport,
    FaultSite,
    PauliOperator,
    RecoveryTable,
    StabilizerTableau,
    UnsupportedOperationError,
    enumerate_single_faults,
    simulate_stabilizer,
    verify_component,
    verify_single_fault_tolerance,
)
from ftlab.lattice_circuits import (
    Circuit,
    GADGET_NAMES,
    OpKind,
    Operation,
    QubitRole,
    Site,
    assemble_exrec,
    build_encode,
    build_mesh,
    build_single_error_swap,
    build_syndrome_extraction,
    check_layout,
    export_circuit,
    extract_census,
)
from ftlab.threshold_solver import (
    CurveTable,
    NoThresholdError,
    Ratios,
    SweepTable,
    ThresholdResult,
    asymptotic_threshold,
    failure_curve,
    level_threshold,
    sweep,
)

__version__ = "0.1.0"

__all__ = [
    "AffineCount",
    "BACKEND_NAME",
    "CensusError",
    "CensusSet",
    "Circuit",
    "CurveTable",
    "ExRecCensus",
    "FailureVector",
    "FaultReport",
    "FaultSite",
    "GADGET_NAMES",
    "LocationKind",
    "NoThresholdError",
    "OpKind",
    "Operation",
    "PauliOperator",
    "PhysicalSetting",
    "QubitRole",
    "Ratios",
    "RecoveryTable",
    "Site",
    "StabilizerTableau",
    "SweepTable",
    "ThresholdResult",
    "UnsupportedOperationError",
    "assemble_exrec",
    "asymptotic_threshold",
    "build_encode",
    "build_mesh",
    "build_single_error_swap",
    "build_syndrome_extraction",
    "check_layout",
    "count_at",
    "enumerate_single_faults",
    "export_circuit",
    "extract_census",
    "failure_curve",
    "gadget_failure",
    "level1_failures",
    "level_threshold",
    "load_census",
    "mc_oracle",
    "paper_census",
    "recurse_failures",
    "save_census",
    "simulate_stabilizer",
    "sweep",
    "validate",
    "verify_component",
    "verify_single_fault_tolerance",
]
