"""Random-graph laboratory for rainbow 2-colorings.

Core pieces: immutable bitset graphs with a coupled weighted edge process,
edge colorings with rainbow-connectivity checks, dangerous-pair analysis and
budget audits, the two-round constructive coloring, flag-and-recolor, exact
small-graph oracles, and a Monte Carlo experiment harness with CLI.
"""

from .coloring import (
    EdgeColoring,
    UnassignedEdgeError,
    color_edges_random,
    is_rainbow_connected,
    rainbow_two_path_count,
    read_coloring,
    restrict_coloring,
    write_coloring,
)
from .danger import (
    DEFAULT_D,
    Fix,
    LemmaAudit,
    MAuditReport,
    PairReport,
    audit_property_M,
    audit_whp_lemmas,
    classify_pairs,
    exclusive_fix_counts,
    find_exclusive_fixes,
    find_fixes,
)
from .experiments import (
    CertificationRecord,
    ChernoffTolerance,
    ExperimentConfig,
    InvariantViolationError,
    certify_tau_coincidence,
    chernoff_tolerance,
    derive_trial_seed,
    hitting_time,
    run_corollary_experiment,
    run_hitting_experiment,
    run_lemma_audit_experiment,
    run_random_k_coloring_experiment,
    trial_rng,
)
from .graphs import (
    Graph,
    ProcessSequence,
    common_neighbors,
    diameter,
    gen_gnp,
    gen_weighted_process,
    graph_from_text,
    graph_to_text,
    has_diameter_at_most_2,
    make_graph,
    pair_count,
    read_graph,
    snapshot,
    threshold_graph,
    write_graph,
)
from .oracle import (
    BudgetExceededError,
    OracleBudget,
    find_rc2_coloring,
    rc_at_most_2,
    rc_exact,
    rc_exact_with_witness,
)
from .recolor import (
    RecolorFailure,
    RecolorTrace,
    recolor,
    verify_rc2_coloring,
)
from .tworound import (
    TwoRoundOutput,
    TwoRoundParams,
    build_two_round,
    round_probabilities,
    second_round_probability,
)

__version__ = "0.1.0"
