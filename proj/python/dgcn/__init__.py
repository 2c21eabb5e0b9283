"""Spectral graph convolutional networks for directed graphs.

The heavy lifting lives in the compiled extension; this package re-exports
the public surface: graph loading and preprocessing, the random-walk
transition matrix and its stationary distribution, the symmetric directed
propagation matrix, and the full seeded training pipeline.
"""

from dgcn._core import (
    DirectedGraph,
    ExperimentResult,
    ModelParams,
    NodeData,
    PerronVector,
    RunResult,
    TrainConfig,
    TransitionMatrix,
    __version__,
    add_self_loops,
    baseline_sym_propagation,
    build_features,
    confidence_interval,
    directed_laplacian,
    evaluate,
    generate_directed_sbm,
    is_strongly_connected,
    largest_scc_subgraph,
    load_edgelist,
    load_node_data,
    perron_vector,
    propagation_matrix,
    run_experiment,
    split_nodes,
    strongly_connected_components,
    train,
    transition_matrix,
    write_edgelist,
)

__all__ = [
    "DirectedGraph",
    "ExperimentResult",
    "ModelParams",
    "NodeData",
    "PerronVector",
    "RunResult",
    "TrainConfig",
    "TransitionMatrix",
    "__version__",
    "add_self_loops",
    "baseline_sym_propagation",
    "build_features",
    "confidence_interval",
    "directed_laplacian",
    "evaluate",
    "generate_directed_sbm",
    "is_strongly_connected",
    "largest_scc_subgraph",
    "load_edgelist",
    "load_node_data",
    "perron_vector",
    "propagation_matrix",
    "run_experiment",
    "split_nodes",
    "strongly_connected_components",
    "train",
    "transition_matrix",
    "write_edgelist",
]
