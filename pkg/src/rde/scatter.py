"""Pairwise squared distances, weighted scatter matrices, and the ratio objective.

The objective is a ratio of weighted sums of squared projected pair distances,

    J(T) = [b_in * sum_IN d_ij(T) + b_if * sum_IF d_ij(T)]
           / [b_rn * sum_RN d_ij(T) + b_rf * sum_RF d_ij(T)],

with d_ij(T) = ||T (x_i - x_j)||^2.  Each sum equals trace(T S T') for the
scatter matrix S of its pair set, so the ratio is also computable from one
numerator and one denominator matrix; ``objective`` keeps the direct-summation
form as the reference semantics the matrix path is tested against.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import BetaWeights, DescriptorSet, ValidationError
from .pairing import PairPartition


class DegenerateScatterError(ValueError):
    """A scatter required to be nonzero vanished (no pairs or zero weights)."""


@dataclass
class ScatterPair:
    """Numerator (irrelevant-side) and denominator (relevant-side) scatter."""

    s_num: np.ndarray
    s_den: np.ndarray

    def __post_init__(self):
        for name in ("s_num", "s_den"):
            m = np.ascontiguousarray(np.asarray(getattr(self, name), dtype=np.float64))
            setattr(self, name, m)
            if m.ndim != 2 or m.shape[0] != m.shape[1]:
                raise ValidationError(f"{name} must be square, got shape {m.shape}")
            scale = np.abs(m).max()
            if scale > 0 and np.abs(m - m.T).max() > 1e-12 * scale:
                raise ValidationError(f"{name} is not symmetric within 1e-12 relative")
            w = np.linalg.eigvalsh(m)
            if w[0] < -1e-10 * max(w[-1], np.finfo(float).tiny):
                raise ValidationError(f"{name} is not positive semidefinite (min eig {w[0]:g})")
        if self.s_num.shape != self.s_den.shape:
            raise ValidationError("s_num and s_den must have equal shape")


def squared_distance(projection: np.ndarray, x_i: np.ndarray, x_j: np.ndarray) -> float:
    """||T (x_i - x_j)||^2 for a single descriptor pair."""
    t = np.asarray(projection, dtype=np.float64)
    xi = np.asarray(x_i, dtype=np.float64).ravel()
    xj = np.asarray(x_j, dtype=np.float64).ravel()
    if xi.shape != xj.shape:
        raise ValidationError(f"descriptor shapes differ: {xi.shape} vs {xj.shape}")
    if t.ndim != 2 or t.shape[1] != xi.shape[0]:
        raise ValidationError(f"projection shape {t.shape} incompatible with dimension {xi.shape[0]}")
    z = t @ (xi - xj)
    return float(z @ z)


def weighted_scatter(dset: DescriptorSet, pairs: np.ndarray, weight: float) -> np.ndarray:
    """weight * sum over pairs of (x_i - x_j)(x_i - x_j)'; empty pairs give zero."""
    if weight < 0 or not np.isfinite(weight):
        raise ValidationError(f"weight must be finite and >= 0, got {weight}")
    d = dset.dim
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    if len(pairs) == 0:
        return np.zeros((d, d))
    if pairs.min() < 0 or pairs.max() >= dset.n:
        raise ValidationError("pair index out of range")
    diff = dset.values[pairs[:, 0]] - dset.values[pairs[:, 1]]
    s = weight * (diff.T @ diff)
    return (s + s.T) / 2.0


def build_scatter(dset: DescriptorSet, partition: PairPartition, betas: BetaWeights) -> ScatterPair:
    """Assemble the numerator/denominator scatter matrices of the objective."""
    s_num = weighted_scatter(dset, partition.irr_near, betas.beta_in) + weighted_scatter(
        dset, partition.irr_far, betas.beta_if
    )
    s_den = weighted_scatter(dset, partition.rel_near, betas.beta_rn) + weighted_scatter(
        dset, partition.rel_far, betas.beta_rf
    )
    if not np.any(s_den):
        raise DegenerateScatterError(
            "degenerate denominator: relevant-side scatter is identically zero "
            "(no relevant pairs, zero weights, or coincident descriptors)"
        )
    return ScatterPair(s_num=s_num, s_den=s_den)


def _pair_distance_sum(y: np.ndarray, pairs: np.ndarray) -> float:
    if len(pairs) == 0:
        return 0.0
    diff = y[pairs[:, 0]] - y[pairs[:, 1]]
    return float(np.sum(diff * diff))


def objective(
    projection: np.ndarray,
    dset: DescriptorSet,
    partition: PairPartition,
    betas: BetaWeights,
) -> float:
    """The ratio J(T) by direct pair summation (reference semantics)."""
    t = np.asarray(projection, dtype=np.float64)
    if t.ndim != 2 or t.shape[1] != dset.dim:
        raise ValidationError(f"projection shape {t.shape} incompatible with dimension {dset.dim}")
    y = dset.values @ t.T
    num = betas.beta_in * _pair_distance_sum(y, partition.irr_near) + betas.beta_if * _pair_distance_sum(
        y, partition.irr_far
    )
    den = betas.beta_rn * _pair_distance_sum(y, partition.rel_near) + betas.beta_rf * _pair_distance_sum(
        y, partition.rel_far
    )
    if den == 0.0:
        raise DegenerateScatterError("projected denominator is zero for this projection")
    return num / den
