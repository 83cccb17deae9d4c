"""Distance-distribution evaluation: per-subset distances, overlap errors,
balanced reports, and closest-cross-pair matching.

The overlap error between two distance samples is the intersection of their
unit-mass histograms on a shared equal-width binning: 1.0 for identical
distributions, 0.0 for disjoint supports.  Reports compute two statistics:
``err_rel_irr`` pools matching vs non-matching pairs, ``err_rfar_inear``
compares the two challenging subsets (far matching vs near non-matching).
Subsets are balanced to a common size by seeded subsampling before either
statistic is computed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .data import DescriptorSet, EmbeddingModel, ValidationError
from .pairing import SUBSET_NAMES, PairPartition
from .rng import SplitMix64

REPORT_VERSION = "rde-report-v1"
DEFAULT_BINS = 100
BALANCE_CAP = 20000


class EmptySubsetError(ValueError):
    """A report requires all four subsets to be nonempty."""


@dataclass
class MatchingRecord:
    """The m closest cross-set pairs and the fraction that truly match."""

    m: int
    pairs: np.ndarray
    precision: float

    def __post_init__(self):
        self.pairs = np.asarray(self.pairs, dtype=np.int64).reshape(-1, 2)
        if len(self.pairs) != self.m:
            raise ValidationError("matching record must hold exactly m pairs")
        if not 0.0 <= self.precision <= 1.0:
            raise ValidationError("precision must lie in [0, 1]")


@dataclass
class EvalReport:
    bins: int
    hist_range: tuple[float, float]
    samples: dict[str, np.ndarray]
    hist: dict[str, np.ndarray]
    err_rel_irr: float
    err_rfar_inear: float
    short_subsets: tuple[str, ...] = ()
    matching: MatchingRecord | None = None

    def __post_init__(self):
        for err in (self.err_rel_irr, self.err_rfar_inear):
            if not 0.0 <= err <= 1.0:
                raise ValidationError(f"overlap error {err} outside [0, 1]")
        lo, hi = self.hist_range
        for name, s in self.samples.items():
            if len(s) and (s.min() < lo or s.max() > hi):
                raise ValidationError(f"histogram range does not cover subset {name}")


def subset_distances(
    dset: DescriptorSet,
    partition: PairPartition,
    model: EmbeddingModel | None = None,
) -> dict[str, np.ndarray]:
    """Euclidean distances per subset, in pair order, under model or identity."""
    y = dset.values if model is None else dset.values @ model.projection.T
    out = {}
    for name, pairs in partition.subsets().items():
        if len(pairs) == 0:
            out[name] = np.empty(0)
            continue
        diff = y[pairs[:, 0]] - y[pairs[:, 1]]
        out[name] = np.sqrt(np.sum(diff * diff, axis=1))
    return out


def overlap_error(samples_a, samples_b, bins: int = DEFAULT_BINS) -> float:
    """Histogram-intersection overlap of two real samples, in [0, 1].

    Histograms share the range [min(all), max(all)] with ``bins`` equal-width
    bins and are normalized to unit mass before the bin-wise min is summed.
    1.0 means identical histograms, 0.0 disjoint supports.
    """
    a = np.asarray(samples_a, dtype=np.float64).ravel()
    b = np.asarray(samples_b, dtype=np.float64).ravel()
    if len(a) == 0 or len(b) == 0:
        raise EmptySubsetError("overlap_error requires two nonempty samples")
    if bins < 2:
        raise ValidationError(f"bins must be >= 2, got {bins}")
    lo = min(a.min(), b.min())
    hi = max(a.max(), b.max())
    if hi == lo:
        return 1.0
    ha = np.histogram(a, bins=bins, range=(lo, hi))[0] / len(a)
    hb = np.histogram(b, bins=bins, range=(lo, hi))[0] / len(b)
    return float(np.minimum(ha, hb).sum())


def _balance(
    distances: dict[str, np.ndarray], balance: int | None, seed: int
) -> tuple[dict[str, np.ndarray], tuple[str, ...]]:
    sizes = {name: len(v) for name, v in distances.items()}
    if balance is None:
        target = min(min(sizes.values()), BALANCE_CAP)
    else:
        target = balance
    rng = SplitMix64(seed)
    out, short = {}, []
    for name in SUBSET_NAMES:
        v = distances[name]
        if len(v) > target:
            idx = sorted(rng.sample(len(v), target))
            v = v[idx]
        elif len(v) < target:
            short.append(name)
        out[name] = v
    return out, tuple(short)


def eval_report(
    dset: DescriptorSet,
    partition: PairPartition,
    model: EmbeddingModel | None = None,
    bins: int = DEFAULT_BINS,
    balance: int | None = None,
    seed: int = 0,
    match_set: DescriptorSet | None = None,
    match_m: int = 15,
) -> EvalReport:
    """Balanced distance-distribution report with both overlap errors.

    ``balance`` requests a per-subset sample size; subsets smaller than the
    request are kept whole and flagged in ``short_subsets``.  By default every
    subset is subsampled to the smallest subset size, capped at 20000.
    Passing ``match_set`` appends a closest-cross-pair record against it.
    """
    distances = subset_distances(dset, partition, model)
    for name, v in distances.items():
        if len(v) == 0:
            raise EmptySubsetError(f"subset {name} has no pairs")
    balanced, short = _balance(distances, balance, seed)

    rel = np.concatenate([balanced["rel_near"], balanced["rel_far"]])
    irr = np.concatenate([balanced["irr_near"], balanced["irr_far"]])
    err_rel_irr = overlap_error(rel, irr, bins)
    err_rfar_inear = overlap_error(balanced["rel_far"], balanced["irr_near"], bins)

    pooled = np.concatenate(list(balanced.values()))
    lo, hi = float(pooled.min()), float(pooled.max())
    if hi == lo:
        hi = lo + 1.0
    hist = {
        name: np.histogram(v, bins=bins, range=(lo, hi))[0] / len(v)
        for name, v in balanced.items()
    }

    matching = None
    if match_set is not None:
        pairs, precision = closest_cross_pairs(dset, match_set, model, match_m)
        matching = MatchingRecord(m=match_m, pairs=pairs, precision=precision)

    return EvalReport(
        bins=bins,
        hist_range=(lo, hi),
        samples=balanced,
        hist=hist,
        err_rel_irr=err_rel_irr,
        err_rfar_inear=err_rfar_inear,
        short_subsets=short,
        matching=matching,
    )


def closest_cross_pairs(
    set_a: DescriptorSet,
    set_b: DescriptorSet,
    model: EmbeddingModel | None = None,
    m: int = 15,
):
    """The m smallest-distance cross pairs (a from set_a, b from set_b).

    Ties are broken by (a index, b index).  Ground truth is shared group ids:
    precision is the fraction of returned pairs whose ids agree.
    """
    if set_a.dim != set_b.dim:
        raise ValidationError("descriptor sets have different dimensions")
    if model is not None and model.input_dim != set_a.dim:
        raise ValidationError("model dimension does not match the sets")
    total = set_a.n * set_b.n
    if not 1 <= m <= total:
        raise ValidationError(f"need 1 <= m <= {total}, got {m}")
    ya = set_a.values if model is None else set_a.values @ model.projection.T
    yb = set_b.values if model is None else set_b.values @ model.projection.T
    d2 = ((ya[:, None, :] - yb[None, :, :]) ** 2).sum(axis=2).ravel()
    # row-major flattening puts equal distances in (i, j) lex order; stable sort keeps it
    order = np.argsort(d2, kind="stable")[:m]
    pairs = np.stack(np.unravel_index(order, (set_a.n, set_b.n)), axis=1).astype(np.int64)
    hits = set_a.group_ids[pairs[:, 0]] == set_b.group_ids[pairs[:, 1]]
    return pairs, float(np.mean(hits))


def save_report(report: EvalReport, path) -> None:
    doc = {
        "version": REPORT_VERSION,
        "bins": report.bins,
        "hist_range": list(report.hist_range),
        "samples": {k: v.tolist() for k, v in report.samples.items()},
        "hist": {k: v.tolist() for k, v in report.hist.items()},
        "err_rel_irr": report.err_rel_irr,
        "err_rfar_inear": report.err_rfar_inear,
        "short_subsets": list(report.short_subsets),
        "matching": None
        if report.matching is None
        else {
            "m": report.matching.m,
            "pairs": report.matching.pairs.tolist(),
            "precision": report.matching.precision,
        },
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_report(path) -> EvalReport:
    from .io import FormatError, VersionError  # local import to avoid a cycle

    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: not a valid report document: {exc}") from exc
    version = doc.get("version")
    if version != REPORT_VERSION:
        raise VersionError(f"{path}: expected version {REPORT_VERSION}, found {version!r}")
    try:
        matching = None
        if doc["matching"] is not None:
            matching = MatchingRecord(
                m=doc["matching"]["m"],
                pairs=np.asarray(doc["matching"]["pairs"], dtype=np.int64),
                precision=doc["matching"]["precision"],
            )
        return EvalReport(
            bins=doc["bins"],
            hist_range=tuple(doc["hist_range"]),
            samples={k: np.asarray(v, dtype=np.float64) for k, v in doc["samples"].items()},
            hist={k: np.asarray(v, dtype=np.float64) for k, v in doc["hist"].items()},
            err_rel_irr=doc["err_rel_irr"],
            err_rfar_inear=doc["err_rfar_inear"],
            short_subsets=tuple(doc["short_subsets"]),
            matching=matching,
        )
    except KeyError as exc:
        raise FormatError(f"{path}: report document missing field {exc}") from exc
