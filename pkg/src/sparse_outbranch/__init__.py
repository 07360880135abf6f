"""Kernelization toolkit for rooted out-branching problems on sparse digraphs."""

from .digraph import (
    Arc,
    OutBranching,
    RootedDigraph,
    bfs_out_branching,
    contract_arc,
    cut_edges,
    cut_structure,
    cut_vertices,
    is_connected,
    planarity_witness_check,
    private_neighbors,
    reachable,
    remove_vertices,
    shortcut_vertex,
    split_lonely_branching,
)
from .instance_io import (
    InstanceFile,
    ParseError,
    load_instance,
    parse_instance,
    save_instance,
    serialize_instance,
)
from .iob_kernel import (
    AuxiliaryBipartite,
    CrownDecomposition,
    IobInstance,
    apply_crown_rule,
    build_aux_graph,
    crown_in_class,
    kernelize_iob,
    vc_or_solution,
)
from .lob_analyzer import (
    Bag,
    BipathDecomposition,
    ContractedGraph,
    LobCertificate,
    WeakBipath,
    analyze,
    build_contracted,
    certificate,
    classify_masters_slaves,
    decompose_bipaths,
    isolated_vertices,
    size_report,
    special_vertices,
)
from .lob_reducer import (
    LobInstance,
    ReductionTrace,
    RuleApplication,
    find_rule,
    reduce_to_fixpoint,
    replay_trace,
)
from .oracle import (
    BudgetExceeded,
    EnumerationBudget,
    SolveMode,
    SolveResult,
    brute_force_out_branchings,
    check_equivalence,
    enumerate_out_branchings,
    max_internal_exact,
    maxleaf_exact,
    solve_branch_and_bound,
)
from .outcomes import KernelOutcome, NoOutcome, ReducedOutcome, YesOutcome
from .sparsity import (
    DegeneracyOrdering,
    NeighborhoodClassing,
    classify_by_modulator,
    degeneracy,
    heavy_degree_sum_check,
)

__version__ = "0.1.0"
