"""File formats for descriptor sets, pair partitions, and models.

CSV descriptors: one row per descriptor, D numeric columns then a ``g=<int>``
label column; an optional header line names the columns ``c0,...,c{D-1},g``.
Values are written with shortest round-trip decimal form (17 significant
digits suffice), so a save/load cycle reproduces them exactly.

Binary descriptors: magic ``RDE1``, little-endian u64 N and D, N*D float64
values row-major, then N u64 group ids.  Bit-exact by construction.

Model files: a versioned JSON document (version ``rde-model-v1``) holding the
training config, eigenvalues, objective, and the projection row-major.

Partition files: one line per pair, ``<subset> <i> <j>`` with subset in
{RN, RF, IN, IF}.
"""

from __future__ import annotations

import json
import struct

import numpy as np

from .data import BetaWeights, DescriptorSet, EmbeddingModel, ModelConfig
from .pairing import PairPartition

MODEL_VERSION = "rde-model-v1"
BINARY_MAGIC = b"RDE1"
_SUBSET_TAGS = {"rel_near": "RN", "rel_far": "RF", "irr_near": "IN", "irr_far": "IF"}
_TAG_SUBSETS = {v: k for k, v in _SUBSET_TAGS.items()}


class FormatError(ValueError):
    """File contents do not conform to the declared format."""


class VersionError(FormatError):
    """Version tag of a document does not match this implementation."""


# ---------------------------------------------------------------------------
# descriptor sets


def save_descriptors(dset: DescriptorSet, path, format: str = "csv") -> None:
    if format == "csv":
        _save_csv(dset, path)
    elif format == "binary":
        _save_binary(dset, path)
    else:
        raise FormatError(f"unknown descriptor format {format!r}")


def load_descriptors(path, format: str = "csv") -> DescriptorSet:
    if format == "auto":
        with open(path, "rb") as fh:
            format = "binary" if fh.read(4) == BINARY_MAGIC else "csv"
    if format == "csv":
        return _load_csv(path)
    if format == "binary":
        return _load_binary(path)
    raise FormatError(f"unknown descriptor format {format!r}")


def _save_csv(dset: DescriptorSet, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join([f"c{i}" for i in range(dset.dim)] + ["g"]) + "\n")
        for row, gid in zip(dset.values, dset.group_ids):
            fh.write(",".join(repr(float(v)) for v in row) + f",g={int(gid)}\n")


def _load_csv(path) -> DescriptorSet:
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh]
    lines = [ln for ln in lines if ln.strip() != ""]
    if not lines:
        raise FormatError(f"{path}: empty file")
    start = 0
    first = [c.strip() for c in lines[0].split(",")]
    if first and first[-1] == "g":  # header row
        ncols = len(first)
        start = 1
        if len(lines) > 1 and len(lines[1].split(",")) != ncols:
            raise FormatError(
                f"{path}: malformed header: {ncols} columns named, "
                f"{len(lines[1].split(','))} found in row 2"
            )
    values, groups = [], []
    width = None
    for lineno, line in enumerate(lines[start:], start=start + 1):
        cells = [c.strip() for c in line.split(",")]
        if len(cells) < 2:
            raise FormatError(f"{path}: row {lineno}: need at least one value and a g= label")
        label = cells[-1]
        if not label.startswith("g="):
            raise FormatError(f"{path}: row {lineno}, column {len(cells)}: expected g=<int>, got {label!r}")
        try:
            gid = int(label[2:])
        except ValueError:
            raise FormatError(f"{path}: row {lineno}: bad group id {label!r}") from None
        row = []
        for col, cell in enumerate(cells[:-1], start=1):
            try:
                v = float(cell)
            except ValueError:
                raise FormatError(f"{path}: row {lineno}, column {col}: not a number: {cell!r}") from None
            if not np.isfinite(v):
                raise FormatError(f"{path}: row {lineno}, column {col}: non-finite value {cell!r}")
            row.append(v)
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise FormatError(f"{path}: row {lineno}: expected {width} values, found {len(row)}")
        values.append(row)
        groups.append(gid)
    return DescriptorSet(values=np.array(values), group_ids=np.array(groups))


def _save_binary(dset: DescriptorSet, path) -> None:
    with open(path, "wb") as fh:
        fh.write(BINARY_MAGIC)
        fh.write(struct.pack("<QQ", dset.n, dset.dim))
        fh.write(dset.values.astype("<f8").tobytes(order="C"))
        fh.write(dset.group_ids.astype("<u8").tobytes(order="C"))


def _load_binary(path) -> DescriptorSet:
    with open(path, "rb") as fh:
        raw = fh.read()
    if raw[:4] != BINARY_MAGIC:
        raise FormatError(f"{path}: bad magic {raw[:4]!r}, expected {BINARY_MAGIC!r}")
    if len(raw) < 20:
        raise FormatError(f"{path}: truncated header")
    n, d = struct.unpack_from("<QQ", raw, 4)
    expected = 20 + 8 * n * d + 8 * n
    if len(raw) != expected:
        raise FormatError(f"{path}: expected {expected} bytes for N={n}, D={d}, found {len(raw)}")
    values = np.frombuffer(raw, dtype="<f8", count=n * d, offset=20).reshape(n, d)
    gids = np.frombuffer(raw, dtype="<u8", count=n, offset=20 + 8 * n * d)
    if not np.all(np.isfinite(values)):
        bad = np.argwhere(~np.isfinite(values))[0]
        raise FormatError(f"{path}: non-finite value at row {bad[0]}, column {bad[1]}")
    if np.any(gids > np.iinfo(np.int64).max):
        raise FormatError(f"{path}: group id exceeds signed 64-bit range")
    return DescriptorSet(values=values.copy(), group_ids=gids.astype(np.int64))


# ---------------------------------------------------------------------------
# models


def save_model(model: EmbeddingModel, path) -> None:
    cfg = model.config
    doc = {
        "version": MODEL_VERSION,
        "k": cfg.k,
        "betas": {
            "rn": cfg.betas.beta_rn,
            "rf": cfg.betas.beta_rf,
            "in": cfg.betas.beta_in,
            "if": cfg.betas.beta_if,
        },
        "epsilon": cfg.epsilon,
        "solver_mode": cfg.solver_mode,
        "input_dim": cfg.input_dim,
        "output_dim": cfg.output_dim,
        "seed": cfg.seed,
        "objective": model.objective,
        "eigenvalues": model.eigenvalues.tolist(),
        "projection": model.projection.ravel(order="C").tolist(),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_model(path) -> EmbeddingModel:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: not a valid model document: {exc}") from exc
    version = doc.get("version")
    if version != MODEL_VERSION:
        raise VersionError(f"{path}: expected version {MODEL_VERSION}, found {version!r}")
    try:
        betas = BetaWeights(
            beta_rn=doc["betas"]["rn"],
            beta_rf=doc["betas"]["rf"],
            beta_in=doc["betas"]["in"],
            beta_if=doc["betas"]["if"],
        )
        cfg = ModelConfig(
            k=doc["k"],
            betas=betas,
            epsilon=doc["epsilon"],
            solver_mode=doc["solver_mode"],
            input_dim=doc["input_dim"],
            output_dim=doc["output_dim"],
            seed=doc["seed"],
        )
        projection = np.asarray(doc["projection"], dtype=np.float64).reshape(
            doc["output_dim"], doc["input_dim"]
        )
        return EmbeddingModel(
            projection=projection,
            eigenvalues=np.asarray(doc["eigenvalues"], dtype=np.float64),
            config=cfg,
            objective=doc["objective"],
        )
    except KeyError as exc:
        raise FormatError(f"{path}: model document missing field {exc}") from exc


# ---------------------------------------------------------------------------
# partitions


def save_partition(partition: PairPartition, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for name, tag in _SUBSET_TAGS.items():
            for i, j in getattr(partition, name):
                fh.write(f"{tag} {i} {j}\n")


def load_partition(path) -> PairPartition:
    buckets: dict[str, list[tuple[int, int]]] = {name: [] for name in _SUBSET_TAGS}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if line.strip() == "":
                continue
            parts = line.split()
            if len(parts) != 3:
                raise FormatError(f"{path}: line {lineno}: expected '<subset> <i> <j>'")
            tag, si, sj = parts
            if tag not in _TAG_SUBSETS:
                raise FormatError(f"{path}: line {lineno}: unknown subset tag {tag!r}")
            try:
                i, j = int(si), int(sj)
            except ValueError:
                raise FormatError(f"{path}: line {lineno}: bad pair indices") from None
            buckets[_TAG_SUBSETS[tag]].append((i, j))
    return PairPartition(**{name: np.array(v, dtype=np.int64).reshape(-1, 2) for name, v in buckets.items()})
