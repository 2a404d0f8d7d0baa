"""Exact tensor-network contraction, reductions and non-zero certificates."""
from .core import Scalar, TensorNetwork, TensorNode, node_entry, validate_network
from .contract import (
    ContractionPlan,
    brute_force_value,
    contract_closed,
    contract_edge,
    contract_open,
    evaluate,
    evaluate_vectors,
    plan_contraction,
)
from .reduce import (
    Cnf2,
    GtnzInstance,
    SimpleGraph,
    add_scalar,
    build_bell_mps,
    compile_clh,
    compile_edge_coloring,
    compile_sharp2sat,
)
from .certify import (
    ExactOracle,
    NonNegWitness,
    basis_witness_peel,
    check_injective,
    count_via_gtnz,
    decide_at_least_k,
    injective_certificate,
    search_nonneg_witness,
    verify_nonneg_witness,
)

__version__ = "0.1.0"
