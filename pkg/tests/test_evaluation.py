import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rde.data import DescriptorSet, ValidationError
from rde.evaluation import (
    EmptySubsetError,
    closest_cross_pairs,
    eval_report,
    load_report,
    overlap_error,
    save_report,
    subset_distances,
)
from rde.pairing import PairPartition, PartitionConfig, enumerate_pairs, partition_pairs
from rde.solver import SolverConfig, fit, preset_lde, project


def line_partition():
    # four hand-built subsets, one pair each, all distance 1 in 1-d
    s = DescriptorSet(
        values=[[0.0], [1.0], [10.0], [11.0], [100.0], [101.0], [1000.0], [1001.0]],
        group_ids=[0, 0, 1, 1, 2, 3, 4, 5],
    )
    part = PairPartition(
        rel_near=[[0, 1]], rel_far=[[2, 3]], irr_near=[[4, 5]], irr_far=[[6, 7]]
    )
    return s, part


def fitted_problem(seed=0, n=40, d=4, groups=4, k=3):
    rng = np.random.default_rng(seed)
    s = DescriptorSet(values=rng.normal(size=(n, d)), group_ids=np.arange(n) % groups)
    pc = PartitionConfig(k=k)
    rel, irr = enumerate_pairs(s, pc)
    part = partition_pairs(s, rel, irr, pc)
    model = fit(s, part, preset_lde(), SolverConfig(output_dim=2), partition_config=pc)
    return s, part, model


class TestSubsetDistances:
    def test_identity_distance(self):
        s = DescriptorSet(values=[[0.0, 0.0], [3.0, 4.0]], group_ids=[0, 0])
        part = PairPartition(rel_near=[[0, 1]], rel_far=[], irr_near=[], irr_far=[])
        d = subset_distances(s, part, None)
        assert d["rel_near"][0] == 5.0

    def test_zero_projection(self):
        s, part, model = fitted_problem()
        model.projection = np.zeros_like(model.projection)
        d = subset_distances(s, part, model)
        for v in d.values():
            assert np.all(v == 0.0)

    def test_matches_projected_space(self):
        s, part, model = fitted_problem(3)
        direct = subset_distances(s, part, model)
        embedded = subset_distances(project(model, s), part, None)
        for name in direct:
            assert np.allclose(direct[name], embedded[name], atol=1e-10)

    def test_pair_order_preserved(self):
        s = DescriptorSet(values=[[0.0], [1.0], [3.0]], group_ids=[0, 0, 0])
        part = PairPartition(rel_near=[[1, 2], [0, 1], [0, 2]], rel_far=[], irr_near=[], irr_far=[])
        d = subset_distances(s, part, None)
        assert list(d["rel_near"]) == [2.0, 1.0, 3.0]


class TestOverlapError:
    def test_identical_samples_exactly_one(self):
        xs = np.array([0.3, 1.0, 2.7, 2.7, 5.1])
        assert overlap_error(xs, xs.copy(), bins=17) == 1.0

    def test_disjoint_supports_zero(self):
        a = np.linspace(0.0, 1.0, 200)
        b = np.linspace(10.0, 11.0, 150)
        assert overlap_error(a, b, bins=100) == 0.0

    def test_gaussian_analytic_value(self):
        # two unit Gaussians 3 sigma apart: min-density mass is 2 Phi(-1.5)
        rng = np.random.default_rng(2024)
        a = rng.normal(0.0, 1.0, 100_000)
        b = rng.normal(3.0, 1.0, 100_000)
        analytic = math.erfc(1.5 / math.sqrt(2.0))
        assert analytic == pytest.approx(0.13361440253771617, rel=1e-12)
        assert overlap_error(a, b, bins=100) == pytest.approx(analytic, abs=0.01)

    def test_degenerate_equal_samples(self):
        assert overlap_error([2.0, 2.0], [2.0, 2.0, 2.0], bins=10) == 1.0

    def test_empty_rejected(self):
        with pytest.raises(EmptySubsetError):
            overlap_error([], [1.0], bins=10)

    def test_bins_validated(self):
        with pytest.raises(ValidationError):
            overlap_error([1.0], [2.0], bins=1)

    @given(
        st.lists(st.floats(0, 100, allow_nan=False), min_size=1, max_size=60),
        st.lists(st.floats(0, 100, allow_nan=False), min_size=1, max_size=60),
        st.integers(2, 128),
    )
    @settings(max_examples=60, deadline=None)
    def test_symmetric_bounded_permutation_invariant(self, a, b, bins):
        e1 = overlap_error(a, b, bins)
        e2 = overlap_error(b, a, bins)
        assert e1 == pytest.approx(e2, abs=1e-12)
        assert 0.0 <= e1 <= 1.0 + 1e-12
        rng = np.random.default_rng(0)
        assert overlap_error(rng.permutation(a), b, bins) == pytest.approx(e1, abs=1e-12)

    @given(
        st.lists(st.floats(0.001, 100, allow_nan=False), min_size=2, max_size=40),
        st.lists(st.floats(0.001, 100, allow_nan=False), min_size=2, max_size=40),
        st.floats(0.01, 50.0),
    )
    @settings(max_examples=40, deadline=None)
    def test_common_scaling_invariant(self, a, b, c):
        a, b = np.asarray(a), np.asarray(b)
        base = overlap_error(a, b, bins=32)
        scaled = overlap_error(c * a, c * b, bins=32)
        assert scaled == pytest.approx(base, abs=1e-9)


class TestEvalReport:
    def test_identical_multisets_full_overlap(self):
        s, part = line_partition()
        rep = eval_report(s, part, None, bins=50)
        assert rep.err_rel_irr == 1.0
        assert rep.err_rfar_inear == 1.0

    def test_perfect_separation(self):
        # every relevant distance below every irrelevant distance
        s = DescriptorSet(
            values=[[0.0], [0.5], [10.0], [10.4], [30.0], [60.0], [90.0], [120.0]],
            group_ids=[0, 0, 1, 1, 2, 3, 4, 5],
        )
        part = PairPartition(
            rel_near=[[0, 1]], rel_far=[[2, 3]], irr_near=[[4, 5]], irr_far=[[6, 7]]
        )
        rep = eval_report(s, part, None, bins=40)
        assert rep.err_rel_irr == 0.0

    def test_scripted_recomputation_oracle(self):
        s, part, model = fitted_problem(11, n=48, d=5, groups=6)
        rep = eval_report(s, part, model, bins=32, seed=4)
        # recompute everything from scratch
        y = s.values @ model.projection.T
        dist = {}
        for name, pairs in part.subsets().items():
            dist[name] = np.sqrt(((y[pairs[:, 0]] - y[pairs[:, 1]]) ** 2).sum(1))
        target = min(len(v) for v in dist.values())
        from rde.rng import SplitMix64

        rng = SplitMix64(4)
        bal = {}
        for name in ("rel_near", "rel_far", "irr_near", "irr_far"):
            v = dist[name]
            if len(v) > target:
                v = v[sorted(rng.sample(len(v), target))]
            bal[name] = v
        rel = np.concatenate([bal["rel_near"], bal["rel_far"]])
        irr = np.concatenate([bal["irr_near"], bal["irr_far"]])

        def olap(a, b, bins):
            lo, hi = min(a.min(), b.min()), max(a.max(), b.max())
            ha = np.histogram(a, bins, (lo, hi))[0] / len(a)
            hb = np.histogram(b, bins, (lo, hi))[0] / len(b)
            return float(np.minimum(ha, hb).sum())

        assert rep.err_rel_irr == pytest.approx(olap(rel, irr, 32), abs=1e-12)
        assert rep.err_rfar_inear == pytest.approx(olap(bal["rel_far"], bal["irr_near"], 32), abs=1e-12)

    def test_balancing_deterministic_and_sized(self):
        s, part, model = fitted_problem(2)
        r1 = eval_report(s, part, model, balance=5, seed=9)
        r2 = eval_report(s, part, model, balance=5, seed=9)
        for name in r1.samples:
            assert np.array_equal(r1.samples[name], r2.samples[name])
            assert len(r1.samples[name]) <= 5

    def test_short_subset_flagged(self):
        s, part = line_partition()
        rep = eval_report(s, part, None, balance=3)
        assert set(rep.short_subsets) == {"rel_near", "rel_far", "irr_near", "irr_far"}

    def test_empty_subset_rejected(self):
        s = DescriptorSet(values=[[0.0], [1.0], [2.0]], group_ids=[0, 0, 1])
        part = PairPartition(rel_near=[[0, 1]], rel_far=[], irr_near=[[0, 2]], irr_far=[[1, 2]])
        with pytest.raises(EmptySubsetError, match="rel_far"):
            eval_report(s, part, None)

    def test_range_covers_samples(self):
        s, part, model = fitted_problem(5)
        rep = eval_report(s, part, model)
        lo, hi = rep.hist_range
        for v in rep.samples.values():
            assert v.min() >= lo and v.max() <= hi

    def test_report_roundtrip(self, tmp_path):
        s, part, model = fitted_problem(6)
        other = DescriptorSet(values=s.values[::-1].copy(), group_ids=s.group_ids[::-1].copy())
        rep = eval_report(s, part, model, match_set=other, match_m=7)
        p = tmp_path / "report.json"
        save_report(rep, p)
        rep2 = load_report(p)
        assert rep2.err_rel_irr == rep.err_rel_irr
        assert rep2.err_rfar_inear == rep.err_rfar_inear
        assert rep2.bins == rep.bins
        for name in rep.samples:
            assert np.array_equal(rep2.samples[name], rep.samples[name])
            assert np.array_equal(rep2.hist[name], rep.hist[name])
        assert rep2.matching.m == 7
        assert rep2.matching.precision == rep.matching.precision
        assert np.array_equal(rep2.matching.pairs, rep.matching.pairs)

    def test_report_version_error(self, tmp_path):
        from rde.io import VersionError

        s, part, model = fitted_problem(6)
        rep = eval_report(s, part, model)
        p = tmp_path / "report.json"
        save_report(rep, p)
        p.write_text(p.read_text().replace("rde-report-v1", "rde-report-v0"))
        with pytest.raises(VersionError):
            load_report(p)


class TestClosestCrossPairs:
    def test_self_match_full_precision(self):
        rng = np.random.default_rng(1)
        vals = rng.normal(size=(10, 3))
        a = DescriptorSet(values=vals, group_ids=np.arange(10))
        b = DescriptorSet(values=vals.copy(), group_ids=np.arange(10))
        pairs, precision = closest_cross_pairs(a, b, None, m=10)
        assert precision == 1.0
        assert {(int(i), int(j)) for i, j in pairs} == {(i, i) for i in range(10)}

    def test_disjoint_groups_zero_precision(self):
        rng = np.random.default_rng(2)
        a = DescriptorSet(values=rng.normal(size=(6, 2)), group_ids=[0, 1, 2, 3, 4, 5])
        b = DescriptorSet(values=rng.normal(size=(6, 2)), group_ids=[10, 11, 12, 13, 14, 15])
        for m in (1, 5, 36):
            _, precision = closest_cross_pairs(a, b, None, m=m)
            assert precision == 0.0

    def test_exhaustive_sort_oracle(self):
        rng = np.random.default_rng(3)
        a = DescriptorSet(values=rng.normal(size=(9, 4)), group_ids=rng.integers(0, 4, 9))
        b = DescriptorSet(values=rng.normal(size=(11, 4)), group_ids=rng.integers(0, 4, 11))
        pairs, precision = closest_cross_pairs(a, b, None, m=15)
        flat = sorted(
            ((np.sum((a.values[i] - b.values[j]) ** 2), i, j) for i in range(9) for j in range(11)),
        )
        expect = [(i, j) for _, i, j in flat[:15]]
        assert [tuple(p) for p in pairs.tolist()] == expect
        hits = [a.group_ids[i] == b.group_ids[j] for i, j in expect]
        assert precision == pytest.approx(np.mean(hits))

    def test_tie_break_by_index_order(self):
        a = DescriptorSet(values=[[0.0], [0.0]], group_ids=[0, 1])
        b = DescriptorSet(values=[[1.0], [1.0]], group_ids=[0, 1])
        pairs, _ = closest_cross_pairs(a, b, None, m=3)
        assert [tuple(p) for p in pairs.tolist()] == [(0, 0), (0, 1), (1, 0)]

    def test_orthogonal_gauge_invariance(self):
        s, part, model = fitted_problem(7)
        jitter = np.random.default_rng(70).normal(size=s.values.shape) * 0.01
        other = DescriptorSet(values=s.values + jitter, group_ids=s.group_ids)
        p1, prec1 = closest_cross_pairs(s, other, model, m=12)
        theta = 0.7
        q = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
        model.projection = q @ model.projection
        p2, prec2 = closest_cross_pairs(s, other, model, m=12)
        assert np.array_equal(p1, p2)
        assert prec1 == prec2

    def test_m_bounds(self):
        a = DescriptorSet(values=[[0.0], [1.0]], group_ids=[0, 1])
        with pytest.raises(ValidationError):
            closest_cross_pairs(a, a, None, m=5)

    def test_row_permutation_invariance(self):
        rng = np.random.default_rng(8)
        a = DescriptorSet(values=rng.normal(size=(8, 3)), group_ids=rng.integers(0, 3, 8))
        b = DescriptorSet(values=rng.normal(size=(7, 3)), group_ids=rng.integers(0, 3, 7))
        pairs, precision = closest_cross_pairs(a, b, None, m=10)
        pa = rng.permutation(8)
        pb = rng.permutation(7)
        a2 = DescriptorSet(values=a.values[pa], group_ids=a.group_ids[pa])
        b2 = DescriptorSet(values=b.values[pb], group_ids=b.group_ids[pb])
        pairs2, precision2 = closest_cross_pairs(a2, b2, None, m=10)
        assert precision2 == precision
        back = {(int(pa[i]), int(pb[j])) for i, j in pairs2}
        assert back == {(int(i), int(j)) for i, j in pairs}
