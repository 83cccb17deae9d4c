"""Maximizers of the discriminant ratio and the beta-regime presets.

Two solution modes:

* ``ratio-trace`` (default): rows of T are the top-d generalized eigenvectors
  of the pencil (S_num, S_den + eps I), the classical relaxation used by the
  discriminant-embedding family this objective generalizes.
* ``trace-ratio``: the exact iterative maximizer of
  trace(T S_num T') / trace(T (S_den + eps I) T') over orthonormal T.
  Given lambda_t, T_t collects the top-d eigenvectors of
  S_num - lambda_t (S_den + eps I) and lambda_{t+1} is the trace ratio at T_t;
  the lambda sequence is non-decreasing and the iteration stops when
  |lambda_{t+1} - lambda_t| <= tol * (1 + |lambda_t|).

Rows of every returned model are rescaled to v' (S_den + eps I) v = 1 with the
largest-magnitude coordinate positive, and are ordered by their generalized
Rayleigh quotient, so serialized models are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .data import BetaWeights, DescriptorSet, EmbeddingModel, ModelConfig, ValidationError
from .pairing import PairPartition, PartitionConfig
from .scatter import DegenerateScatterError, build_scatter

DEFAULT_PRESET_RATIO = 10.0


class NotPositiveDefiniteError(ValueError):
    """Regularized denominator scatter is not positive definite."""


class NonConvergenceError(RuntimeError):
    """Trace-ratio iteration hit max_iters; carries the last ratio reached."""

    def __init__(self, message: str, last_ratio: float):
        super().__init__(message)
        self.last_ratio = last_ratio


class SolverError(RuntimeError):
    """A numerical guarantee of the solver failed."""


@dataclass(frozen=True)
class SolverConfig:
    mode: str = "ratio-trace"
    output_dim: int | None = None  # None: keep full dimension
    epsilon_scale: float = 1e-6
    max_iters: int = 100
    tol: float = 1e-10

    def __post_init__(self):
        if self.mode not in ("ratio-trace", "trace-ratio"):
            raise ValidationError(f"unknown solver mode {self.mode!r}")
        if self.output_dim is not None and self.output_dim < 1:
            raise ValidationError("output_dim must be >= 1")
        if self.epsilon_scale < 0:
            raise ValidationError("epsilon_scale must be >= 0")
        if self.max_iters < 1:
            raise ValidationError("max_iters must be >= 1")
        if self.tol <= 0:
            raise ValidationError("tol must be > 0")


def preset_lde() -> BetaWeights:
    """All four subsets equally important."""
    return BetaWeights(1.0, 1.0, 1.0, 1.0)


def preset_lfda_like(r: float = DEFAULT_PRESET_RATIO) -> BetaWeights:
    """Near pairs dominate on both sides: (r, 1, r, 1), r > 1."""
    if r <= 1:
        raise ValidationError(f"preset ratio must be > 1, got {r}")
    return BetaWeights(r, 1.0, r, 1.0)


def preset_rde(r: float = DEFAULT_PRESET_RATIO) -> BetaWeights:
    """Emphasize far matching and near non-matching pairs: (1, r, r, 1), r > 1."""
    if r <= 1:
        raise ValidationError(f"preset ratio must be > 1, got {r}")
    return BetaWeights(1.0, r, r, 1.0)


def _fix_signs(rows: np.ndarray) -> np.ndarray:
    for v in rows:
        if v[np.argmax(np.abs(v))] < 0:
            v *= -1.0
    return rows


def generalized_eigs(s_num: np.ndarray, s_den_reg: np.ndarray, d: int):
    """Top-d eigenpairs of the symmetric-definite pencil (s_num, s_den_reg).

    Returns (eigenvalues descending, eigenvectors as d x D rows) with each row
    normalized to v' s_den_reg v = 1 and relative residual
    ||s_num v - lam s_den_reg v|| / (||s_num v|| + |lam| ||s_den_reg v||) <= 1e-8.

    Raises NotPositiveDefiniteError when s_den_reg has no Cholesky factor;
    increase the epsilon ridge in that case.
    """
    a = np.asarray(s_num, dtype=np.float64)
    b = np.asarray(s_den_reg, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValidationError("pencil matrices must be square and equally sized")
    if not 1 <= d <= a.shape[0]:
        raise ValidationError(f"need 1 <= d <= {a.shape[0]}, got {d}")
    try:
        np.linalg.cholesky(b)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError(
            "regularized denominator scatter is not positive definite; "
            "increase epsilon_scale"
        ) from exc
    vals, vecs = scipy.linalg.eigh(a, b)
    vals = vals[::-1][:d]
    rows = np.ascontiguousarray(vecs[:, ::-1][:, :d].T)
    # scipy already B-normalizes; renormalize to pin the convention exactly
    for v in rows:
        v /= np.sqrt(v @ b @ v)
    _fix_signs(rows)
    for lam, v in zip(vals, rows):
        res = np.linalg.norm(a @ v - lam * (b @ v))
        scale = np.linalg.norm(a @ v) + abs(lam) * np.linalg.norm(b @ v)
        if scale > 0 and res / scale > 1e-8:
            raise SolverError(f"generalized eigen residual {res / scale:g} exceeds 1e-8")
    return vals, rows


def _trace_ratio_iterate(s_num: np.ndarray, s_den_reg: np.ndarray, d: int, max_iters: int, tol: float):
    """Run the trace-ratio fixed-point iteration; returns (rows, lambda history)."""
    lam = 0.0
    history: list[float] = []
    rows = None
    for _ in range(max_iters):
        m = s_num - lam * s_den_reg
        m = (m + m.T) / 2.0
        _, vecs = np.linalg.eigh(m)
        rows = np.ascontiguousarray(vecs[:, ::-1][:, :d].T)
        lam_next = float(
            np.trace(rows @ s_num @ rows.T) / np.trace(rows @ s_den_reg @ rows.T)
        )
        if history and lam_next < history[-1] - 1e-12 * (1.0 + abs(history[-1])):
            raise SolverError("trace-ratio sequence decreased beyond tolerance")
        history.append(lam_next)
        if abs(lam_next - lam) <= tol * (1.0 + abs(lam)):
            return rows, history
        lam = lam_next
    raise NonConvergenceError(
        f"trace-ratio iteration did not converge in {max_iters} iterations "
        f"(last ratio {lam:.12g})",
        last_ratio=lam,
    )


def fit(
    dset: DescriptorSet,
    partition: PairPartition,
    betas: BetaWeights,
    config: SolverConfig = SolverConfig(),
    partition_config: PartitionConfig | None = None,
) -> EmbeddingModel:
    """Learn the projection maximizing the discriminant ratio.

    ``partition_config`` is provenance only: its k and seed are recorded in
    the model config (pair files do not carry them).
    """
    sp = build_scatter(dset, partition, betas)
    din = dset.dim
    d = config.output_dim if config.output_dim is not None else din
    if not 1 <= d <= din:
        raise ValidationError(f"output_dim must satisfy 1 <= d <= {din}, got {d}")
    if not np.any(sp.s_num):
        raise DegenerateScatterError(
            "degenerate numerator: irrelevant-side scatter is identically zero"
        )
    eps = config.epsilon_scale * float(np.trace(sp.s_den)) / din
    s_den_reg = sp.s_den + eps * np.eye(din)

    if config.mode == "ratio-trace":
        vals, rows = generalized_eigs(sp.s_num, s_den_reg, d)
    else:
        rows, history = _trace_ratio_iterate(
            sp.s_num, s_den_reg, d, config.max_iters, config.tol
        )
        rows = rows.copy()
        for v in rows:
            v /= np.sqrt(v @ s_den_reg @ v)
        vals = np.array([(v @ sp.s_num @ v) / (v @ s_den_reg @ v) for v in rows])
        order = np.argsort(-vals, kind="stable")
        rows, vals = rows[order], vals[order]
        _fix_signs(rows)

    achieved = float(np.trace(rows @ sp.s_num @ rows.T) / np.trace(rows @ s_den_reg @ rows.T))
    if config.mode == "trace-ratio":
        achieved = history[-1]
    pc = partition_config if partition_config is not None else PartitionConfig()
    model_config = ModelConfig(
        k=pc.k,
        betas=betas,
        epsilon=eps,
        solver_mode=config.mode,
        input_dim=din,
        output_dim=d,
        seed=pc.seed,
    )
    return EmbeddingModel(
        projection=rows,
        eigenvalues=np.maximum(vals, 0.0),
        config=model_config,
        objective=achieved,
    )


def project(model: EmbeddingModel, dset: DescriptorSet) -> DescriptorSet:
    """Map descriptors through the model; labels and tags are preserved."""
    if dset.dim != model.input_dim:
        raise ValidationError(
            f"model expects dimension {model.input_dim}, set has {dset.dim}"
        )
    return DescriptorSet(
        values=dset.values @ model.projection.T,
        group_ids=dset.group_ids.copy(),
        source_tags=dset.source_tags,
    )


def principal_angles(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Principal angles (radians) between the row spans of a and b.

    Uses the sine formulation (singular values of the projection of one basis
    onto the other's orthogonal complement), which stays accurate for angles
    near zero where the cosine route bottoms out at sqrt(machine eps).
    """
    qa = np.linalg.qr(np.asarray(a, dtype=np.float64).T)[0]
    qb = np.linalg.qr(np.asarray(b, dtype=np.float64).T)[0]
    sines = np.linalg.svd(qb - qa @ (qa.T @ qb), compute_uv=False)
    return np.arcsin(np.clip(np.sort(sines), -1.0, 1.0))
