"""Cavity-network entanglement simulator.

Thin wrapper over the compiled core. States are addressed by canonical label
strings such as "site1=(u+,1,0);site2=(v,0,0)|port1=(0,1);port2=(0,0)"; see
StateVector.amplitudes().
"""

import json as _json

from ._core import (
    EmptyAcceptanceError,
    Error,
    IoError,
    ScatteringMatrix,
    StateVector,
    Trajectory,
    ValidationError,
    dark_state,
    enumerate_outcomes,
    enumerate_protocol,
    fidelity,
    ideal_emit_superposition,
    ideal_map_to_photon,
    ideal_single_map,
    inner_product,
    leak_all,
    leak_cavity_direct,
    leak_cavity_through_network,
    one_per_port_patterns,
    photonic_singlet_reference,
    prepare_phi0,
    project_onto_pattern,
    run_full_protocol,
    run_mapping,
    singlet_reference,
    stirap_transfer,
    strong_coupling_ratio,
    w_state_reference,
    w_state_reference_phased,
)

__all__ = [
    "EmptyAcceptanceError",
    "Error",
    "IoError",
    "ScatteringMatrix",
    "StateVector",
    "Trajectory",
    "ValidationError",
    "dark_state",
    "enumerate_outcomes",
    "enumerate_protocol",
    "fidelity",
    "ideal_emit_superposition",
    "ideal_map_to_photon",
    "ideal_single_map",
    "inner_product",
    "leak_all",
    "leak_cavity_direct",
    "leak_cavity_through_network",
    "one_per_port_patterns",
    "photonic_singlet_reference",
    "prepare_phi0",
    "project_onto_pattern",
    "report_to_dict",
    "run_full_protocol",
    "run_mapping",
    "singlet_reference",
    "stirap_transfer",
    "strong_coupling_ratio",
    "w_state_reference",
    "w_state_reference_phased",
]


def report_to_dict(report_json):
    """Parse a report produced by run_full_protocol into a dict."""
    return _json.loads(report_json)
