"""Core domain types: descriptor sets, objective weights, and fitted models."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class ValidationError(ValueError):
    """An object violates one of its declared invariants."""


@dataclass
class DescriptorSet:
    """N local descriptors of dimension D with part-group labels.

    Descriptors with equal ``group_ids`` entries depict the same local part;
    pairs within a group are "matching" (relevant), pairs across groups are
    "non-matching" (irrelevant). ``source_tags`` is provenance only.
    """

    values: np.ndarray
    group_ids: np.ndarray
    source_tags: tuple[str, ...] | None = None

    def __post_init__(self):
        self.values = np.ascontiguousarray(np.asarray(self.values, dtype=np.float64))
        self.group_ids = np.ascontiguousarray(np.asarray(self.group_ids, dtype=np.int64))
        if self.values.ndim != 2:
            raise ValidationError(f"values must be a 2-d matrix, got shape {self.values.shape}")
        n, d = self.values.shape
        if n < 2:
            raise ValidationError(f"need at least 2 descriptors, got {n}")
        if d < 1:
            raise ValidationError("descriptor dimension must be >= 1")
        if not np.all(np.isfinite(self.values)):
            bad = np.argwhere(~np.isfinite(self.values))[0]
            raise ValidationError(f"non-finite value at row {bad[0]}, column {bad[1]}")
        if self.group_ids.shape != (n,):
            raise ValidationError(
                f"group_ids has {self.group_ids.shape[0] if self.group_ids.ndim == 1 else '?'} "
                f"entries for {n} descriptors"
            )
        if np.any(self.group_ids < 0):
            bad = int(np.argmax(self.group_ids < 0))
            raise ValidationError(f"negative group id at row {bad}")
        if self.source_tags is not None:
            self.source_tags = tuple(str(t) for t in self.source_tags)
            if len(self.source_tags) != n:
                raise ValidationError("source_tags length does not match descriptor count")

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def dim(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class BetaWeights:
    """The four subset weights of the discriminant ratio.

    Order throughout the package: (rel-near, rel-far, irr-near, irr-far).
    Both the relevant pair and the irrelevant pair must carry positive total
    weight, otherwise the ratio is degenerate before any data is seen.
    """

    beta_rn: float
    beta_rf: float
    beta_in: float
    beta_if: float

    def __post_init__(self):
        vals = (self.beta_rn, self.beta_rf, self.beta_in, self.beta_if)
        for name, v in zip(("beta_rn", "beta_rf", "beta_in", "beta_if"), vals):
            if not np.isfinite(v) or v < 0:
                raise ValidationError(f"{name} must be finite and >= 0, got {v}")
        if self.beta_rn + self.beta_rf <= 0:
            raise ValidationError("beta_rn + beta_rf must be > 0")
        if self.beta_in + self.beta_if <= 0:
            raise ValidationError("beta_in + beta_if must be > 0")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.beta_rn, self.beta_rf, self.beta_in, self.beta_if)


@dataclass(frozen=True)
class ModelConfig:
    """Full training configuration captured on a fitted model."""

    k: int
    betas: BetaWeights
    epsilon: float
    solver_mode: str
    input_dim: int
    output_dim: int
    seed: int

    def __post_init__(self):
        if self.solver_mode not in ("ratio-trace", "trace-ratio"):
            raise ValidationError(f"unknown solver_mode {self.solver_mode!r}")
        if not 1 <= self.output_dim <= self.input_dim:
            raise ValidationError(
                f"output_dim must satisfy 1 <= d <= {self.input_dim}, got {self.output_dim}"
            )
        if self.epsilon < 0 or not np.isfinite(self.epsilon):
            raise ValidationError(f"epsilon must be finite and >= 0, got {self.epsilon}")


@dataclass
class EmbeddingModel:
    """A learned linear map distances are measured under.

    ``projection`` has one row per output dimension; rows produced by the
    solver are normalized against the regularized relevant scatter
    (v' (S_den + eps I) v = 1) with a deterministic sign.  ``eigenvalues``
    holds the per-row generalized Rayleigh quotients, non-increasing.
    ``objective`` records the ratio value achieved at fit time.
    """

    projection: np.ndarray
    eigenvalues: np.ndarray
    config: ModelConfig
    objective: float = field(default=0.0)

    def __post_init__(self):
        self.projection = np.ascontiguousarray(np.asarray(self.projection, dtype=np.float64))
        self.eigenvalues = np.ascontiguousarray(np.asarray(self.eigenvalues, dtype=np.float64))
        if self.projection.ndim != 2:
            raise ValidationError("projection must be a 2-d matrix")
        d, din = self.projection.shape
        if (din, d) != (self.config.input_dim, self.config.output_dim):
            raise ValidationError(
                f"projection shape {self.projection.shape} does not match config dims "
                f"({self.config.output_dim}, {self.config.input_dim})"
            )
        if not np.all(np.isfinite(self.projection)):
            raise ValidationError("projection contains non-finite entries")
        if self.eigenvalues.shape != (d,):
            raise ValidationError("need one eigenvalue per projection row")
        if np.any(self.eigenvalues < 0):
            raise ValidationError("eigenvalues must be nonnegative")
        if np.any(np.diff(self.eigenvalues) > 0):
            raise ValidationError("eigenvalues must be sorted non-increasing")

    @property
    def input_dim(self) -> int:
        return self.projection.shape[1]

    @property
    def output_dim(self) -> int:
        return self.projection.shape[0]
