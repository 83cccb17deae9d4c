"""Deterministic synthetic descriptor sets for the qualitative claims.

Three scenarios, all driven by the package's portable SplitMix64 generator so
equal specs produce bit-identical sets on every platform:

* ``diagonal-intra``: two classes in the plane, each a short chain of
  isotropic clusters along its own diagonal line (44.5 and 39.7 degrees); the
  chains are offset so the between-class direction is not the within-class
  diagonal.  Near same-class pairs are isotropic cluster noise while the true
  intra-class spread runs along the diagonals, which punishes near-dominated
  weightings.
* ``boundary-shape``: two elongated classes in the plane, each a chain of
  clusters on a parabolic arc of opposite curvature, so the boundary between
  them is curved; the direction of maximal inter-class variance cuts through
  the boundary region while a different direction keeps the classes apart.
* ``gaussian-groups``: ``n_groups`` isotropic (or per-dimension anisotropic)
  Gaussian clusters, one group per cluster, with centers spread per dimension
  by ``between_spread`` and an optional minimum center separation enforced by
  rejection.

Draw order (fixture contract): for the toy scenarios, one generator drives
class 0 then class 1; each class draws its points in order, point p taking
its cluster round-robin (cluster p mod C) and two normals (x then y).  For
gaussian-groups the centers are drawn first (one candidate = D normals,
rejected candidates consume their draws), then points group-major with D
normals each.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .data import DescriptorSet, ValidationError
from .rng import SplitMix64

SCENARIOS = ("diagonal-intra", "boundary-shape", "gaussian-groups")

# diagonal-intra geometry: (angle degrees, positions along the line, origin)
DIAG_CHAINS = (
    (44.5, (0.0, 18.0), (0.0, 0.0)),
    (39.7, (0.0, 18.6), (-3.4, -6.3)),
)

# boundary-shape geometry: cluster centers on y = curv * x^2 + lift
BOUNDARY_ARCS = (
    (-0.1446, 0.0, (0.0, 8.85, 17.7)),
    (0.1775, 6.66, (4.18, 23.28)),
)

_TOY_DEFAULT_N = {"diagonal-intra": 24, "boundary-shape": 48}


@dataclass(frozen=True)
class ScenarioSpec:
    """Parameters of one synthetic scenario.

    ``n_per_group`` defaults to the pinned fixture size of the scenario
    (24 for diagonal-intra, 48 for boundary-shape, 12 for gaussian-groups).
    ``between_spread`` and ``within_spread`` accept a scalar (isotropic) or a
    per-dimension sequence; they apply to gaussian-groups only.
    ``min_center_separation`` rejects gaussian-groups centers closer than the
    given distance to an earlier center (0 disables thinning).
    """

    scenario: str
    n_per_group: int | None = None
    dim: int = 2
    noise_scale: float = 1.0
    seed: int = 0
    n_groups: int = 8
    between_spread: float | tuple = 4.0
    within_spread: float | tuple = 1.0
    min_center_separation: float = 0.0

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ValidationError(f"unknown scenario {self.scenario!r}")
        if self.scenario != "gaussian-groups" and self.dim != 2:
            raise ValidationError(f"{self.scenario} requires dim = 2")
        if self.n_per_group is not None and self.n_per_group < 1:
            raise ValidationError("n_per_group must be >= 1")
        if self.noise_scale <= 0:
            raise ValidationError("noise_scale must be > 0")
        if self.scenario == "gaussian-groups":
            if self.n_groups < 2:
                raise ValidationError("gaussian-groups needs at least 2 groups")
            if self.min_center_separation < 0:
                raise ValidationError("min_center_separation must be >= 0")

    def resolved_n(self) -> int:
        if self.n_per_group is not None:
            return self.n_per_group
        return _TOY_DEFAULT_N.get(self.scenario, 12)


def _spread_vector(value, dim: int, name: str) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(value, dtype=np.float64))
    if arr.ndim != 1 or (len(arr) not in (1, dim)):
        raise ValidationError(f"{name} must be a scalar or a length-{dim} sequence")
    if len(arr) == 1:
        arr = np.full(dim, arr[0])
    if np.any(arr < 0) or not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} entries must be finite and >= 0")
    return arr


def _chain_points(rng: SplitMix64, centers: np.ndarray, n: int, sigma: float) -> list[list[float]]:
    pts = []
    for p in range(n):
        c = centers[p % len(centers)]
        pts.append([c[0] + sigma * rng.normal(), c[1] + sigma * rng.normal()])
    return pts


def _diag_centers() -> list[np.ndarray]:
    out = []
    for angle, ts, origin in DIAG_CHAINS:
        d = np.array([math.cos(math.radians(angle)), math.sin(math.radians(angle))])
        out.append(np.array([np.asarray(origin) + t * d for t in ts]))
    return out


def _boundary_centers() -> list[np.ndarray]:
    out = []
    for curv, lift, xs in BOUNDARY_ARCS:
        out.append(np.array([[x, curv * x * x + lift] for x in xs]))
    return out


def _generate_two_class(spec: ScenarioSpec, centers_per_class) -> DescriptorSet:
    rng = SplitMix64(spec.seed)
    n = spec.resolved_n()
    pts, gids = [], []
    for cls, centers in enumerate(centers_per_class):
        pts.extend(_chain_points(rng, centers, n, spec.noise_scale))
        gids.extend([cls] * n)
    return DescriptorSet(values=np.array(pts), group_ids=np.array(gids))


def _generate_gaussian_groups(spec: ScenarioSpec) -> DescriptorSet:
    dim = spec.dim
    between = _spread_vector(spec.between_spread, dim, "between_spread")
    within = _spread_vector(spec.within_spread, dim, "within_spread")
    rng = SplitMix64(spec.seed)
    centers: list[np.ndarray] = []
    attempts = 0
    while len(centers) < spec.n_groups:
        attempts += 1
        if attempts > 1000 * spec.n_groups:
            raise ValidationError(
                "min_center_separation too large: could not place all group centers"
            )
        cand = np.array([between[d] * rng.normal() for d in range(dim)])
        if spec.min_center_separation > 0 and any(
            np.linalg.norm(cand - c) < spec.min_center_separation for c in centers
        ):
            continue
        centers.append(cand)
    n = spec.resolved_n()
    scale = spec.noise_scale
    pts, gids = [], []
    for gid, center in enumerate(centers):
        for _ in range(n):
            pts.append([center[d] + scale * within[d] * rng.normal() for d in range(dim)])
            gids.append(gid)
    return DescriptorSet(values=np.array(pts), group_ids=np.array(gids))


def generate(spec: ScenarioSpec) -> DescriptorSet:
    """Generate the scenario's descriptor set; bit-identical for equal specs."""
    if spec.scenario == "diagonal-intra":
        return _generate_two_class(spec, _diag_centers())
    if spec.scenario == "boundary-shape":
        return _generate_two_class(spec, _boundary_centers())
    return _generate_gaussian_groups(spec)
