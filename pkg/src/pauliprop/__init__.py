"""Heisenberg-picture Pauli propagation with bit-packed Pauli strings."""

from .gates import (AmplitudeDamping, CliffordGate, PauliNoise, PauliRotation, ProjectorZero,
                    TGate, TransferMapGate, build_clifford_table, ptm_from_channel)
from .overlaps import (ProductStabilizerState, correlation_lookup, overlap, overlap_with_computational,
                       overlap_with_pauli_sum, overlap_with_plus, overlap_with_product_stabilizer,
                       overlap_with_zero)
from .pauli_bits import (commutes, decode, encode, from_symbols, get_pauli, pauli_product, set_pauli,
                         to_symbols, weight, xy_weight, yz_weight)
from .pauli_sum import (NO_TRUNCATION, PathCoefficient, PauliSum, TruncationConfig, norms,
                        scalar_product, truncate)
from .propagation import Circuit, PropagationReport, count_paths, iter_layers, propagate, propagate_tracked

__version__ = "0.1.0"

__all__ = [
    "AmplitudeDamping", "CliffordGate", "PauliNoise", "PauliRotation", "ProjectorZero", "TGate",
    "TransferMapGate", "build_clifford_table", "ptm_from_channel",
    "ProductStabilizerState", "correlation_lookup", "overlap", "overlap_with_computational",
    "overlap_with_pauli_sum", "overlap_with_plus", "overlap_with_product_stabilizer", "overlap_with_zero",
    "commutes", "decode", "encode", "from_symbols", "get_pauli", "pauli_product", "set_pauli",
    "to_symbols", "weight", "xy_weight", "yz_weight",
    "NO_TRUNCATION", "PathCoefficient", "PauliSum", "TruncationConfig", "norms", "scalar_product",
    "truncate",
    "Circuit", "PropagationReport", "count_paths", "iter_layers", "propagate", "propagate_tracked",
]
