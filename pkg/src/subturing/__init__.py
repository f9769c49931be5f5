"""Desk-scale workbench for subTuring reducibility between partial functions.

A five-instruction register machine with a bijective program numbering
hosts the sequential oracle dialogue model: each round either halts with
a value or emits a query the oracle must answer, and a query outside the
oracle's domain freezes the computation forever.  On top of that sit the
degree algebra (restriction, join, meet, graph coding, jump operators),
bounded reduction verification and search, and finite-stage executions
of the classical degree constructions, every stage backed by replayable
dialogue evidence.
"""

__version__ = "0.1.0"

from .machine import (
    Budget,
    DEFAULT_BUDGET,
    DialogueOutcome,
    Instr,
    Program,
    certify_divergence,
    format_program,
    parse_program,
    run_dialogue,
    step_functional,
)
from .numbering import (
    apply_pca,
    decode,
    encode,
    enumerate_programs,
    inflation_index,
    monotone_transfer,
    pad,
    probe_index,
)
from .codegen import compose_programs, hardcode_join_left
from .partialfn import (
    EMPTY,
    DialogueOf,
    FiniteTable,
    GraphOf,
    Join,
    JumpAnswer,
    JumpOf,
    Meet,
    PartialFn,
    Restriction,
    TotalByProgram,
    canonical_witnesses,
    graph_encode,
    join,
    k0,
    k0_oracle,
    k_jump,
    k_oracle,
    meet,
    meet_point,
    meet_universality,
    program_for_table,
    restrict,
)
from .search import (
    EquivalenceReport,
    NonReductionCertificate,
    ReductionWitness,
    VerificationFailure,
    anti_cupping_replay,
    ce_enumerate,
    check_equivalence,
    search_reduction,
    trace_queries,
    verify_reduction,
)
from .constructions import (
    CONSTRUCTIONS,
    ConstructionRefused,
    dumps_transcript,
    replay_transcript,
    run_construction,
)
