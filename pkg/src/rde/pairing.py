"""Pair enumeration and the four-way near/far partition.

Matching (same-group) and non-matching (different-group) pairs are split into
Rel-Near, Rel-Far, Irr-Near and Irr-Far.  A pair (i, j) is "near" when i is
among the k nearest same-relevance candidates of j, or vice versa, ranked by
squared Euclidean distance in the original feature space with ties broken by
lower descriptor index.  Ranking always runs against every candidate in the
set, never just the sampled pairs, and the partition is fixed once before any
learning happens.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import DescriptorSet, ValidationError
from .rng import SplitMix64


class DegenerateLabelingError(ValueError):
    """The labeling admits neither a matching nor a non-matching pair."""


@dataclass(frozen=True)
class PartitionConfig:
    """Knobs for pair mining.

    ``max_irrelevant_per_point`` caps how many non-matching partners each
    descriptor nominates (None = keep every cross-group pair); matching pairs
    are never subsampled.  ``seed`` drives the cap sampling.
    """

    k: int = 5
    max_irrelevant_per_point: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise ValidationError(f"k must be >= 1, got {self.k}")
        if self.max_irrelevant_per_point is not None and self.max_irrelevant_per_point < 1:
            raise ValidationError("max_irrelevant_per_point must be >= 1 or None")


SUBSET_NAMES = ("rel_near", "rel_far", "irr_near", "irr_far")


def _as_pair_array(pairs) -> np.ndarray:
    arr = np.asarray(pairs, dtype=np.int64)
    if arr.size == 0:
        return np.empty((0, 2), dtype=np.int64)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValidationError(f"pair list must have shape (m, 2), got {arr.shape}")
    return np.ascontiguousarray(arr)


@dataclass
class PairPartition:
    """The four disjoint pair subsets, each as an (m, 2) index array with i < j."""

    rel_near: np.ndarray
    rel_far: np.ndarray
    irr_near: np.ndarray
    irr_far: np.ndarray

    def __post_init__(self):
        seen: set[tuple[int, int]] = set()
        for name in SUBSET_NAMES:
            arr = _as_pair_array(getattr(self, name))
            setattr(self, name, arr)
            if arr.size and (np.any(arr[:, 0] >= arr[:, 1]) or np.any(arr[:, 0] < 0)):
                raise ValidationError(f"{name}: every pair must satisfy 0 <= i < j")
            for i, j in arr:
                key = (int(i), int(j))
                if key in seen:
                    raise ValidationError(f"pair {key} appears in more than one subset")
                seen.add(key)

    def subsets(self) -> dict[str, np.ndarray]:
        return {name: getattr(self, name) for name in SUBSET_NAMES}

    @property
    def total_pairs(self) -> int:
        return sum(len(getattr(self, name)) for name in SUBSET_NAMES)


def enumerate_pairs(dset: DescriptorSet, config: PartitionConfig = PartitionConfig()):
    """All matching pairs plus (optionally capped) non-matching pairs.

    Relevant pairs are exhaustive.  With a cap c, each descriptor i (ascending)
    nominates min(c, #candidates) non-matching partners drawn uniformly without
    replacement from its candidates in ascending index order; nominated pairs
    are deduplicated and returned in lexicographic order.  Deterministic given
    (dset, config).

    Returns
    -------
    (relevant, irrelevant) : pair index arrays of shape (m, 2), i < j.
    """
    g = dset.group_ids
    n = dset.n
    same = g[:, None] == g[None, :]
    iu, ju = np.triu_indices(n, k=1)
    rel_mask = same[iu, ju]
    relevant = np.stack([iu[rel_mask], ju[rel_mask]], axis=1).astype(np.int64)

    cap = config.max_irrelevant_per_point
    if cap is None:
        irr_mask = ~rel_mask
        irrelevant = np.stack([iu[irr_mask], ju[irr_mask]], axis=1).astype(np.int64)
    else:
        rng = SplitMix64(config.seed)
        chosen: set[tuple[int, int]] = set()
        for i in range(n):
            cands = np.where(~same[i])[0]
            m = min(cap, len(cands))
            if m == 0:
                continue
            for pos in rng.sample(len(cands), m):
                j = int(cands[pos])
                chosen.add((i, j) if i < j else (j, i))
        irrelevant = _as_pair_array(sorted(chosen))

    if len(relevant) == 0 and len(irrelevant) == 0:
        raise DegenerateLabelingError("labeling admits no matching and no non-matching pairs")
    return relevant, irrelevant


def _near_matrix(d2: np.ndarray, allowed: np.ndarray, k: int) -> np.ndarray:
    """near[j, i] = True iff i is among the k nearest allowed candidates of j.

    Ranking key is (squared distance, index): a stable argsort over ascending
    candidate indices implements the lower-index tie rule exactly.
    """
    n = d2.shape[0]
    near = np.zeros((n, n), dtype=bool)
    for j in range(n):
        cands = np.where(allowed[j])[0]
        if len(cands) == 0:
            continue
        order = np.argsort(d2[j, cands], kind="stable")
        near[j, cands[order[: min(k, len(cands))]]] = True
    return near


def partition_pairs(
    dset: DescriptorSet,
    relevant: np.ndarray,
    irrelevant: np.ndarray,
    config: PartitionConfig = PartitionConfig(),
) -> PairPartition:
    """Split pairs into the four subsets by the symmetric k-nearest rule.

    Input pair order is preserved within each subset.  O(N^2) memory in the
    descriptor count.
    """
    relevant = _as_pair_array(relevant)
    irrelevant = _as_pair_array(irrelevant)
    g = dset.group_ids
    for name, pairs, want_same in (("relevant", relevant, True), ("irrelevant", irrelevant, False)):
        if pairs.size and not np.all((g[pairs[:, 0]] == g[pairs[:, 1]]) == want_same):
            raise ValidationError(f"{name} pairs disagree with group labels")

    x = dset.values
    sq = (x * x).sum(axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (x @ x.T)
    np.maximum(d2, 0.0, out=d2)

    n = dset.n
    same = g[:, None] == g[None, :]
    np.fill_diagonal(same, False)
    diff = g[:, None] != g[None, :]

    near_match = _near_matrix(d2, same, config.k)
    near_non = _near_matrix(d2, diff, config.k)

    def split(pairs, near):
        if pairs.size == 0:
            empty = np.empty((0, 2), dtype=np.int64)
            return empty, empty.copy()
        i, j = pairs[:, 0], pairs[:, 1]
        is_near = near[i, j] | near[j, i]
        return pairs[is_near], pairs[~is_near]

    rn, rf = split(relevant, near_match)
    inear, ifar = split(irrelevant, near_non)
    return PairPartition(rel_near=rn, rel_far=rf, irr_near=inear, irr_far=ifar)


def merge_near_far(partition: PairPartition) -> PairPartition:
    """Collapse the near/far split, pooling pairs by relevance only."""
    rel = np.concatenate([partition.rel_near, partition.rel_far], axis=0)
    irr = np.concatenate([partition.irr_near, partition.irr_far], axis=0)
    empty = np.empty((0, 2), dtype=np.int64)
    return PairPartition(rel_near=rel, rel_far=empty, irr_near=irr, irr_far=empty.copy())
