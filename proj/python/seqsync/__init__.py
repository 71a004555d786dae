"""Dual-sequence synchronization stability of grid-following converters."""

import math

from ._core import (
    Binding,
    BranchImpedance,
    CircuitParameters,
    CurrentReference,
    DegenerateNetwork,
    FaultSpec,
    FaultType,
    InstabilityType,
    LosSignature,
    Scenario,
    Sequence,
    SingularSystem,
    SyncConfig,
    SyncMode,
    classify,
    compare_with_model,
    compute_coefficients,
    decoupled_limit,
    ohms_to_pu,
    region_boundary,
    run_scenario,
    solve_equilibrium,
    traversal_limit,
)

__all__ = [
    "Binding",
    "BranchImpedance",
    "CircuitParameters",
    "CurrentReference",
    "DegenerateNetwork",
    "FaultSpec",
    "FaultType",
    "InstabilityType",
    "LosSignature",
    "Scenario",
    "Sequence",
    "SingularSystem",
    "SyncConfig",
    "SyncMode",
    "classify",
    "compare_with_model",
    "compute_coefficients",
    "current",
    "decoupled_limit",
    "ohms_to_pu",
    "reference_coefficients",
    "region_boundary",
    "run_scenario",
    "solve_equilibrium",
    "traversal_limit",
]


def reference_coefficients(fault, z_f_ohm=0.01):
    """Coefficients of the reference circuit under `fault` (a FaultType or its name)."""
    if isinstance(fault, str):
        fault = getattr(FaultType, fault.upper())
    spec = FaultSpec(fault, complex(ohms_to_pu(z_f_ohm), 0.0))
    return compute_coefficients(CircuitParameters.reference(), spec)


def current(pos="0@0", neg="0@0"):
    """CurrentReference from two `A@D` strings (amplitude @ degrees)."""

    def polar(text):
        amp, _, deg = text.partition("@")
        return float(amp), math.radians(float(deg or 0.0))

    ip, tp = polar(pos)
    ineg, tn = polar(neg)
    return CurrentReference(ip, tp, ineg, tn)
