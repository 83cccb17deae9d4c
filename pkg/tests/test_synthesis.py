import math

import numpy as np
import pytest

import rde
from rde.data import ValidationError
from rde.synthesis import DIAG_CHAINS, ScenarioSpec, generate


def test_determinism_bit_identical():
    for scenario in ("diagonal-intra", "boundary-shape"):
        a = generate(ScenarioSpec(scenario=scenario, seed=5))
        b = generate(ScenarioSpec(scenario=scenario, seed=5))
        assert a.values.tobytes() == b.values.tobytes()
        assert np.array_equal(a.group_ids, b.group_ids)
    a = generate(ScenarioSpec(scenario="gaussian-groups", seed=5, dim=3, n_groups=4, n_per_group=6))
    b = generate(ScenarioSpec(scenario="gaussian-groups", seed=5, dim=3, n_groups=4, n_per_group=6))
    assert a.values.tobytes() == b.values.tobytes()


def test_seed_changes_data():
    a = generate(ScenarioSpec(scenario="diagonal-intra", seed=1))
    b = generate(ScenarioSpec(scenario="diagonal-intra", seed=2))
    assert not np.array_equal(a.values, b.values)


def test_group_sizes_exact():
    s = generate(ScenarioSpec(scenario="diagonal-intra", n_per_group=30, seed=0))
    assert s.n == 60
    assert np.sum(s.group_ids == 0) == 30 and np.sum(s.group_ids == 1) == 30
    g = generate(ScenarioSpec(scenario="gaussian-groups", dim=3, n_groups=5, n_per_group=7, seed=0))
    assert g.n == 35
    for gid in range(5):
        assert np.sum(g.group_ids == gid) == 7


def test_toy_scenarios_require_dim2():
    with pytest.raises(ValidationError):
        ScenarioSpec(scenario="diagonal-intra", dim=3)


def test_unknown_scenario():
    with pytest.raises(ValidationError):
        ScenarioSpec(scenario="spiral")


def test_diagonal_within_class_covariance_aligned():
    # construction check: each class's top covariance eigenvector stays within
    # 5 degrees of its chain direction once n_per_group >= 200
    s = generate(ScenarioSpec(scenario="diagonal-intra", n_per_group=200, seed=3))
    for cls, (angle_deg, _, _) in enumerate(DIAG_CHAINS):
        x = s.values[s.group_ids == cls]
        cov = np.cov(x.T)
        w, v = np.linalg.eigh(cov)
        top = v[:, -1]
        chain = np.array([math.cos(math.radians(angle_deg)), math.sin(math.radians(angle_deg))])
        tilt = math.degrees(math.acos(min(1.0, abs(float(top @ chain)))))
        assert tilt < 5.0, f"class {cls} tilted {tilt:.2f} degrees"


def test_gaussian_groups_zero_within_limit():
    # vanishing within-spread: relevant distances collapse, overlap error -> 0
    spec = ScenarioSpec(
        scenario="gaussian-groups", dim=3, n_groups=6, n_per_group=8,
        between_spread=5.0, within_spread=1e-9, seed=2,
    )
    s = generate(spec)
    pc = rde.PartitionConfig(k=3)
    rel, irr = rde.enumerate_pairs(s, pc)
    part = rde.partition_pairs(s, rel, irr, pc)
    rep = rde.eval_report(s, part, None)
    assert rep.err_rel_irr < 0.02


def test_gaussian_groups_anisotropic_vectors():
    spec = ScenarioSpec(
        scenario="gaussian-groups", dim=4, n_groups=4, n_per_group=50,
        between_spread=(5.0, 5.0, 0.0, 0.0), within_spread=(0.1, 0.1, 2.0, 2.0), seed=1,
    )
    s = generate(spec)
    per_group_std = np.stack([s.values[s.group_ids == g].std(axis=0) for g in range(4)])
    assert per_group_std[:, 2:].mean() > 10 * per_group_std[:, :2].mean()
    centers = np.stack([s.values[s.group_ids == g].mean(axis=0) for g in range(4)])
    assert centers[:, :2].std() > 5 * per_group_std[:, :2].mean()  # informative separation


def test_min_center_separation_enforced():
    spec = ScenarioSpec(
        scenario="gaussian-groups", dim=3, n_groups=12, n_per_group=2,
        between_spread=4.0, within_spread=0.01, min_center_separation=3.0, seed=0,
    )
    s = generate(spec)
    centers = np.stack([s.values[s.group_ids == g].mean(axis=0) for g in range(12)])
    d = np.sqrt(((centers[:, None] - centers[None, :]) ** 2).sum(-1))
    np.fill_diagonal(d, np.inf)
    assert d.min() > 2.8  # centers respect the floor up to cluster noise


def test_min_center_separation_infeasible():
    spec = ScenarioSpec(
        scenario="gaussian-groups", dim=2, n_groups=50, n_per_group=2,
        between_spread=0.1, within_spread=0.01, min_center_separation=10.0, seed=0,
    )
    with pytest.raises(ValidationError, match="min_center_separation"):
        generate(spec)


def test_bad_spread_vector():
    with pytest.raises(ValidationError):
        generate(ScenarioSpec(scenario="gaussian-groups", dim=3, within_spread=(1.0, 2.0)))


def test_scenario_comparative_claims():
    # the headline qualitative behavior on the pinned defaults: the far/near
    # reweighting beats the near-heavy and uniform weightings
    def one_dim_err(scenario, betas, seed, k=10):
        s = generate(ScenarioSpec(scenario=scenario, seed=seed))
        pc = rde.PartitionConfig(k=k)
        rel, irr = rde.enumerate_pairs(s, pc)
        part = rde.partition_pairs(s, rel, irr, pc)
        model = rde.fit(s, part, betas, rde.SolverConfig(output_dim=1), partition_config=pc)
        return rde.eval_report(s, part, model, seed=seed).err_rel_irr

    assert one_dim_err("diagonal-intra", rde.preset_rde(), 1) < one_dim_err(
        "diagonal-intra", rde.preset_lfda_like(), 1
    )
    assert one_dim_err("boundary-shape", rde.preset_rde(), 0) < one_dim_err(
        "boundary-shape", rde.preset_lde(), 0
    )
