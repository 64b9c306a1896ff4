"""Commutator-derived Hamiltonians for combinatorial optimization.

Builds the antisymmetrized product of a transverse-field driver and a
diagonal cost Hamiltonian, evolves product states under it (and under its
higher-order corrected variants), and benchmarks the resulting approximation
ratios and ground-state probabilities against depth-one and depth-p phase
splitting circuits, closed-form ring solutions, and certified locality
bounds.
"""

from ._version import __version__
from .dynamics import (
    ConvergenceError,
    Metrics,
    OptimumReport,
    StateVector,
    evolve,
    evolve_h1_general,
    evolve_qz_exp,
    evolve_qz_exp_corrected,
    hf_diagonal,
    measure,
    optimize_time,
    plus_state,
    time_sweep,
)
from .harness import (
    ConfigError,
    ExperimentConfig,
    RecipeError,
    SeriesEvolver,
    emit_plotdata,
    run_bound,
    run_bound_scan,
    run_compare,
    run_experiment,
    run_gen,
    run_sweep,
)
from .instances import (
    DegenerateSpectrumError,
    DiagonalSpectrum,
    Graph,
    InvalidInstanceError,
    ResourceLimitError,
    diagonal_spectrum,
    gen_erdos_renyi,
    gen_random_regular,
    gen_ring,
    gen_sk,
    generate,
    instance_id,
    load_instances,
    save_instances,
)
from .locality import (
    LRBReport,
    SubgraphSpec,
    get_subgraph,
    load_subgraph_catalog,
    local_edge_estimate,
    lrb_cut_bound,
    lrb_epsilon,
    subgraph_time_estimate,
    worst_case_bound,
    worst_case_over_time,
)
from .pauli import (
    PauliString,
    PauliSum,
    TermBudgetError,
    build_h1,
    build_hf,
    build_hi,
    build_hqz_series,
    commutator_over_2i,
    normalize_energy,
    pauli_mul,
    trace_product,
)
from .qaoa import (
    QAOAReport,
    SubgraphQAOAReport,
    qaoa_optimize,
    qaoa_state,
    ring_subgraph_qaoa,
)
from .ringfermion import (
    ring_energy_and_pgs,
    ring_ground_energy,
    ring_metrics,
    ring_modes,
    ring_optimize,
)
from .transfer import (
    DenseOperator,
    HermiticityError,
    LPAReport,
    OrthogonalStatesError,
    SingleQubitReport,
    TrivialTransferError,
    apply_f,
    hopt_from_states,
    lpa_evolve,
    lpa_metrics,
    lpa_operator_dense,
    path_length,
    pauli_expand,
    single_qubit_optimal,
    transfer_time,
)

__all__ = [
    "__version__",
    "ConfigError",
    "ConvergenceError",
    "DegenerateSpectrumError",
    "DenseOperator",
    "DiagonalSpectrum",
    "ExperimentConfig",
    "Graph",
    "HermiticityError",
    "InvalidInstanceError",
    "LPAReport",
    "LRBReport",
    "Metrics",
    "OptimumReport",
    "OrthogonalStatesError",
    "PauliString",
    "PauliSum",
    "QAOAReport",
    "RecipeError",
    "ResourceLimitError",
    "SeriesEvolver",
    "SingleQubitReport",
    "StateVector",
    "SubgraphQAOAReport",
    "SubgraphSpec",
    "TermBudgetError",
    "TrivialTransferError",
    "apply_f",
    "build_h1",
    "build_hf",
    "build_hi",
    "build_hqz_series",
    "commutator_over_2i",
    "diagonal_spectrum",
    "emit_plotdata",
    "evolve",
    "evolve_h1_general",
    "evolve_qz_exp",
    "evolve_qz_exp_corrected",
    "gen_erdos_renyi",
    "gen_random_regular",
    "gen_ring",
    "gen_sk",
    "generate",
    "get_subgraph",
    "hf_diagonal",
    "hopt_from_states",
    "instance_id",
    "load_instances",
    "load_subgraph_catalog",
    "local_edge_estimate",
    "lpa_evolve",
    "lpa_metrics",
    "lpa_operator_dense",
    "lrb_cut_bound",
    "lrb_epsilon",
    "measure",
    "normalize_energy",
    "optimize_time",
    "path_length",
    "pauli_expand",
    "pauli_mul",
    "plus_state",
    "qaoa_optimize",
    "qaoa_state",
    "ring_energy_and_pgs",
    "ring_ground_energy",
    "ring_metrics",
    "ring_modes",
    "ring_optimize",
    "ring_subgraph_qaoa",
    "run_bound",
    "run_bound_scan",
    "run_compare",
    "run_experiment",
    "run_gen",
    "run_sweep",
    "save_instances",
    "single_qubit_optimal",
    "subgraph_time_estimate",
    "time_sweep",
    "trace_product",
    "transfer_time",
    "worst_case_bound",
    "worst_case_over_time",
]
