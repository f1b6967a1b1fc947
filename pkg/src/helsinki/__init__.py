"""Constraint-satisfaction engine and analyses for the Helsinki flavor model."""

from .analysis import (
    ALL_INPUT_TRIPLES,
    ConsistencyReport,
    InputTriple,
    NonlocalWitness,
    RetroWitness,
    StateTable,
    Transform,
    canonicalize_inputs,
    check_all_inputs,
    consistency_sweep,
    hidden_state_set,
    input_classes,
    nonlocality_witnesses,
    retro_witnesses,
    state_table,
)
from .loops import (
    ALL_CHANNELS,
    Channel,
    LoopSolution,
    LoopSweepReport,
    channel_to_string,
    loop_exclusions,
    loop_universality,
    parse_channel,
    solve_loop,
)
from .model import (
    ALL_PERMUTATIONS,
    FLAVORS,
    annihilation_output,
    apply_permutation,
    node_admissible,
    production_completions,
)
from .prob import (
    CompletionDistribution,
    EmptySupportError,
    completion_distribution,
    epistemic_state,
    marginal,
    signalling_score,
    total_variation,
)
from .render import render
from .solver import (
    SolveResult,
    brute_force_complete,
    complete,
    count_completions,
    has_completion,
    is_admissible,
)
from .structure import (
    Endpoint,
    InvalidStructureError,
    ParseError,
    Scenario,
    Structure,
    Violation,
    build_chain,
    build_h_cell,
    intervention_edges,
    longest_node_path,
    observation_edges,
    hidden_edges,
    parse_scenario,
    parse_scenario_document,
    reverse_time,
    serialize_scenario,
    validate_topology,
)

__version__ = "0.1.0"
