"""Trust-learning over directed multi-agent networks with adversaries.

Legitimate agents receive noisy per-round trust observations about their
in-neighbors and propagate opinions to learn who, in the whole network, is
trustworthy. The package simulates the dynamics, analyzes the induced
substochastic update matrices, and reproduces the reference experiments.
"""

from .analysis import (
    ContractionResult,
    FiniteTimeBounds,
    PartitionedUpdate,
    absorption_bound,
    build_partitioned_update,
    contraction_summary,
    convergence_oracle,
    digraph_of,
    finite_time_bounds,
    index_of_contraction,
    is_weakly_chained,
    legit_trusted_sets,
    replay_error,
)
from .errors import (
    BoundUndefinedError,
    ConfigRejectedError,
    DegenerateMarginError,
    GraphGenerationError,
    InvalidGraphSizeError,
    NotSubstochasticError,
    ProtocolViolationError,
    TrustpropError,
    UndefinedDiameterError,
    UnknownPresetError,
)
from .experiments import (
    AggregateStats,
    ExperimentConfig,
    ExperimentResult,
    build_instance,
    emit_table1,
    preset,
    run_experiment,
    run_single_trial,
)
from .graph import (
    AssumptionReport,
    DirectedGraph,
    NetworkInstance,
    TargetPartition,
    all_legit_instance,
    attach_malicious,
    build_cyclic_legit,
    build_erdos_renyi_legit,
    default_er_edge_prob,
    diameter,
    is_strongly_connected,
    max_in_degree,
    read_edge_list,
    target_partition,
    verify_assumptions,
    write_edge_list,
)
from .observation import (
    DEFAULT_MODEL,
    Margins,
    TrustObservationModel,
    margins,
    sample_alpha,
)
from .protocol import (
    AdversaryPolicy,
    AgentState,
    Simulation,
    SimulationTrace,
    adversary_emit,
    max_error,
    mse,
    run_trial,
    trusted_in_neighbors,
    update_beta,
    update_opinions,
)

__version__ = "0.1.0"
