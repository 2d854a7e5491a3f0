"""CNOT-distance classification and minimal-CNOT synthesis for two- and three-qubit pure states."""

from .canonical import (AcinForm, GhzForm, InvariantTriple, SchmidtForm, WForm, acin_form, ghz_form,
                        hyperdeterminant, lu_equivalent, purity_invariants, schmidt_two_qubit, tangle, w_form)
from .classifier import StateClass, classify_from_ghz, classify_from_zero, classify_two_qubit
from .oracle import OracleReport, min_cnot_search, probe_max_distance
from .state import (Circuit, Gate, apply_circuit, basis_state, fidelity, ghz_state, haar_sample,
                    product_state, w_state, zero_state)
from .synthesizer import (ConvergenceFailure, DegenerateAngles, SynthesisError, SynthesisResult,
                          ghz_class1_angles, ghz_to_half_I1_angles, prepare_from_ghz, prepare_from_zero,
                          template_fit, transform_any, two_qubit_transform, w_to_half_I1_angles)

__all__ = [
    "AcinForm", "Circuit", "ConvergenceFailure", "DegenerateAngles", "Gate", "GhzForm", "InvariantTriple",
    "OracleReport", "SchmidtForm", "StateClass", "SynthesisError", "SynthesisResult", "WForm",
    "acin_form", "apply_circuit", "basis_state", "classify_from_ghz", "classify_from_zero",
    "classify_two_qubit", "fidelity", "ghz_class1_angles", "ghz_form", "ghz_state", "ghz_to_half_I1_angles",
    "haar_sample", "hyperdeterminant", "lu_equivalent", "min_cnot_search", "prepare_from_ghz",
    "prepare_from_zero", "probe_max_distance", "product_state", "purity_invariants", "schmidt_two_qubit",
    "tangle", "template_fit", "transform_any", "two_qubit_transform", "w_form", "w_state",
    "w_to_half_I1_angles", "zero_state",
]
