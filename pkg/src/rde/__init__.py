"""Regularized discriminant embeddings for local descriptors.

Learns linear maps that pull matching descriptor pairs together and pushes
non-matching ones apart, with separate weights for the four kNN-based pair
subsets (Rel-Near, Rel-Far, Irr-Near, Irr-Far), and evaluates embeddings by
distance-distribution overlap and closest-pair matching.
"""

from .data import BetaWeights, DescriptorSet, EmbeddingModel, ModelConfig, ValidationError
from .evaluation import (
    EvalReport,
    MatchingRecord,
    closest_cross_pairs,
    eval_report,
    overlap_error,
    subset_distances,
)
from .pairing import (
    PairPartition,
    PartitionConfig,
    enumerate_pairs,
    merge_near_far,
    partition_pairs,
)
from .scatter import ScatterPair, build_scatter, objective, squared_distance, weighted_scatter
from .solver import (
    SolverConfig,
    fit,
    generalized_eigs,
    preset_lde,
    preset_lfda_like,
    preset_rde,
    principal_angles,
    project,
)
from .synthesis import ScenarioSpec, generate

__version__ = "0.1.0"

__all__ = [
    "BetaWeights",
    "DescriptorSet",
    "EmbeddingModel",
    "EvalReport",
    "MatchingRecord",
    "ModelConfig",
    "PairPartition",
    "PartitionConfig",
    "ScatterPair",
    "ScenarioSpec",
    "SolverConfig",
    "ValidationError",
    "build_scatter",
    "closest_cross_pairs",
    "enumerate_pairs",
    "eval_report",
    "fit",
    "generalized_eigs",
    "generate",
    "merge_near_far",
    "objective",
    "overlap_error",
    "partition_pairs",
    "preset_lde",
    "preset_lfda_like",
    "preset_rde",
    "principal_angles",
    "project",
    "squared_distance",
    "subset_distances",
    "weighted_scatter",
]
