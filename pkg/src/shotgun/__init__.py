"""Graph shotgun assembly toolkit.

Reconstruction of graphs from their rooted r-neighbourhood collections,
certified non-reconstructibility witnesses, and Monte Carlo sweeps that
map the phase transitions between the two regimes.
"""

from __future__ import annotations

from shotgun.canon import (
    BallRecord,
    CanonicalCode,
    EdgeCode,
    EdgeRootedGraph,
    PLAIN_CODE_CAP,
    PlainCodeCapError,
    ball_invariant,
    ball_multiset,
    balls_unique,
    canonical_code_coloured,
    canonical_code_edge_rooted,
    canonical_code_plain,
    canonical_code_rooted,
    degree_profile,
    degree_profiles_unique,
    induced_edge_rooted,
    read_ball_file,
    write_ball_file,
)
from shotgun.graph import (
    GnpParams,
    Graph,
    RootedBall,
    ball_frontier,
    components,
    derive_seed,
    extract_ball,
    format_edge_list,
    parse_edge_list,
    read_edge_list,
    sample_gnp,
    splitmix64,
    write_edge_list,
)
from shotgun.reconstruct import (
    FAST,
    FULL,
    BallCollection,
    ColouredStar,
    EdgeColour,
    Outcome,
    ReconstructionResult,
    assemble_small_components,
    colour_edge_fast,
    colour_edge_full,
    hybrid_high_low_reconstruct,
    overlap_reconstruct,
    star_colouring_reconstruct,
    two_ball_reconstruct,
)
from shotgun.harness import (
    CSV_HEADER,
    THRESHOLDS,
    CellSummary,
    SweepConfig,
    SweepRecord,
    read_sweep_csv,
    records_to_csv,
    resolve_p,
    run_sweep,
    summarize,
    wilson_interval,
    write_sweep_csv,
)
from shotgun.witness import (
    BALL2_CLASS_EDGE,
    BALL3_CLASS_EDGE,
    COMPONENT_MULTISET,
    DEGREE_CLASS_EDGE,
    EXACT_ISO_CHECK,
    NonIsoCertificate,
    SwapWitness,
    VerificationReport,
    apply_swap,
    evaluate_certificate,
    find_path_pair_witness,
    find_r1_witness,
    find_r2_witness,
    find_r3_witness,
    good_edge,
    path_component_count,
    read_witness_file,
    verify_witness,
    write_witness_file,
)

__all__ = [
    "Graph",
    "GnpParams",
    "RootedBall",
    "sample_gnp",
    "extract_ball",
    "ball_frontier",
    "components",
    "format_edge_list",
    "parse_edge_list",
    "write_edge_list",
    "read_edge_list",
    "splitmix64",
    "derive_seed",
    "CanonicalCode",
    "EdgeCode",
    "EdgeRootedGraph",
    "PLAIN_CODE_CAP",
    "PlainCodeCapError",
    "BallRecord",
    "canonical_code_rooted",
    "canonical_code_edge_rooted",
    "canonical_code_plain",
    "canonical_code_coloured",
    "induced_edge_rooted",
    "ball_multiset",
    "balls_unique",
    "ball_invariant",
    "degree_profile",
    "degree_profiles_unique",
    "write_ball_file",
    "read_ball_file",
    "Outcome",
    "ReconstructionResult",
    "BallCollection",
    "EdgeColour",
    "ColouredStar",
    "FULL",
    "FAST",
    "assemble_small_components",
    "overlap_reconstruct",
    "colour_edge_full",
    "colour_edge_fast",
    "star_colouring_reconstruct",
    "two_ball_reconstruct",
    "hybrid_high_low_reconstruct",
    "COMPONENT_MULTISET",
    "DEGREE_CLASS_EDGE",
    "BALL2_CLASS_EDGE",
    "BALL3_CLASS_EDGE",
    "EXACT_ISO_CHECK",
    "NonIsoCertificate",
    "SwapWitness",
    "VerificationReport",
    "apply_swap",
    "evaluate_certificate",
    "verify_witness",
    "path_component_count",
    "find_path_pair_witness",
    "find_r1_witness",
    "find_r2_witness",
    "good_edge",
    "find_r3_witness",
    "write_witness_file",
    "read_witness_file",
    "THRESHOLDS",
    "SweepConfig",
    "SweepRecord",
    "CellSummary",
    "CSV_HEADER",
    "resolve_p",
    "run_sweep",
    "summarize",
    "records_to_csv",
    "write_sweep_csv",
    "read_sweep_csv",
    "wilson_interval",
]

__version__ = "0.1.0"
