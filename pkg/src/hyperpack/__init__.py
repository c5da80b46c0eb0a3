"""Randomized packing of pseudo-random k-graphs into type-ell Hamilton cycles."""

from hyperpack.errors import CapExceeded, ParameterError, ValidationError
from hyperpack.hypergraph import (
    KGraph,
    Params,
    complete_kgraph,
    count_extensions,
    derive_params,
    generate_random_kgraph,
    remove_edges,
)
from hyperpack.reduction import (
    ShiftDigraph,
    TypeLCycle,
    build_digraph,
    check_ownership_partition,
    lift_cycle,
    precedes,
    validate_type_l_cycle,
    window_edges,
)
from hyperpack.labeling import (
    ProcedureParams,
    compute_procedure_params,
    condensed_count,
    coverage_histogram,
    partner_edges,
    run_procedure1,
)
from hyperpack.packer import (
    DiPacking,
    Digraph,
    audit_digraph_regularity,
    exact_max_packing,
    pack_hamilton_cycles,
)
from hyperpack.regularity import audit_definition1, audit_L_property
from hyperpack.peeling import (
    compute_schedule,
    run_peeling,
    verify_schedule_inequality,
)

__version__ = "0.1.0"
