import math
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gso.dataset import Dataset, SentimentLabel, generate_synthetic
from gso.errors import DegenerateInput, EmptyVocabulary, LengthMismatch
from gso.features import (
    FeatureSpace,
    SparseVector,
    build_vocabulary,
    cfs_select,
    featurize,
    featurize_dataset,
    load_space,
    save_space,
    subset_merit,
    symmetric_uncertainty,
)
from gso.ontology import SentiPairSequence, enumerate_pairs, make_pair

from test_dataset import make_instance


def dataset_of(forest, *pair_lists):
    instances = [
        make_instance(forest, f"g{i}", pairs, SentimentLabel.POSITIVE)
        for i, pairs in enumerate(pair_lists)
    ]
    return Dataset(instances=instances)


class TestVocabulary:
    def test_min_freq_one_counts_distinct_pairs(self, forest):
        ds = dataset_of(
            forest,
            [("cute.a.01", "dog.n.01"), ("fall.v.01", "cup.n.01")],
            [("cute.a.01", "dog.n.01")],
        )
        space = build_vocabulary(ds, min_freq=1)
        assert len(space.vocabulary) == 2

    def test_min_freq_two_keeps_shared_pair(self, forest):
        ds = dataset_of(
            forest,
            [("cute.a.01", "dog.n.01"), ("fall.v.01", "cup.n.01")],
            [("cute.a.01", "dog.n.01")],
        )
        space = build_vocabulary(ds, min_freq=2)
        assert space.vocabulary == ("cute.a.01|dog.n.01",)

    def test_three_hundred_distinct_pairs(self, forest):
        pairs = enumerate_pairs(forest, max_pairs=300)
        ds = Dataset(
            instances=[
                make_instance(forest, f"g{i}", [(p.modifier, p.noun)], SentimentLabel.POSITIVE)
                for i, p in enumerate(pairs)
            ]
        )
        space = build_vocabulary(ds, min_freq=1)
        assert space.dimension == 300

    def test_empty_vocabulary(self, forest):
        ds = dataset_of(forest, [("cute.a.01", "dog.n.01")])
        with pytest.raises(EmptyVocabulary):
            build_vocabulary(ds, min_freq=5)

    def test_canonical_order_follows_forest(self, forest):
        ds = dataset_of(
            forest,
            [("fall.v.01", "cup.n.01")],
            [("cute.a.01", "dog.n.01")],
        )
        space = build_vocabulary(ds, min_freq=1, forest=forest)
        assert space.vocabulary == ("cute.a.01|dog.n.01", "fall.v.01|cup.n.01")

    def test_representation_filter(self, forest):
        ds = dataset_of(
            forest,
            [("fall.v.01", "cup.n.01"), ("cute.a.01", "dog.n.01")],
        )
        anp = build_vocabulary(ds, representation="anp")
        vnp = build_vocabulary(ds, representation="vnp")
        assert anp.vocabulary == ("cute.a.01|dog.n.01",)
        assert vnp.vocabulary == ("fall.v.01|cup.n.01",)

    def test_space_round_trips(self, forest, tmp_path):
        ds = dataset_of(forest, [("cute.a.01", "dog.n.01"), ("fall.v.01", "cup.n.01")])
        space = build_vocabulary(ds, min_freq=1, forest=forest).with_selection([0])
        path = tmp_path / "space.json"
        save_space(space, str(path))
        assert load_space(str(path)) == space


class TestFeaturize:
    def test_empty_sequence(self, forest):
        ds = dataset_of(forest, [("cute.a.01", "dog.n.01")])
        space = build_vocabulary(ds)
        vec = featurize(SentiPairSequence(), space)
        assert vec.entries == ()
        assert vec.dimension == space.dimension

    def test_count_and_binary_modes(self, forest):
        pair = make_pair("cute.a.01", "dog.n.01", forest)
        seq = SentiPairSequence(pairs=(pair, pair))
        ds = dataset_of(forest, [("cute.a.01", "dog.n.01")])
        count_space = build_vocabulary(ds, mode="count")
        binary_space = build_vocabulary(ds, mode="binary")
        assert featurize(seq, count_space).entries == ((0, 2.0),)
        assert featurize(seq, binary_space).entries == ((0, 1.0),)

    def test_weighted_mode(self, forest):
        # shout girl: -0.4 + 0.0 = -0.4, three occurrences
        pair = make_pair("shout.v.01", "girl.n.01", forest)
        assert pair.weight == pytest.approx(-0.4)
        seq = SentiPairSequence(pairs=(pair, pair, pair))
        ds = dataset_of(forest, [("shout.v.01", "girl.n.01")])
        space = build_vocabulary(ds, mode="weighted")
        ((idx, value),) = featurize(seq, space).entries
        assert value == pytest.approx(-1.2)

    def test_unknown_pairs_ignored(self, forest):
        ds = dataset_of(forest, [("cute.a.01", "dog.n.01")])
        space = build_vocabulary(ds)
        other = make_pair("fall.v.01", "cup.n.01", forest)
        vec = featurize(SentiPairSequence(pairs=(other,)), space)
        assert vec.entries == ()

    @settings(max_examples=60, deadline=None)
    @given(st.permutations(list(range(6))))
    def test_permutation_invariance(self, forest, order):
        ids = [
            ("cute.a.01", "dog.n.01"),
            ("cute.a.01", "dog.n.01"),
            ("fall.v.01", "cup.n.01"),
            ("lovely.a.01", "girl.n.01"),
            ("shout.v.01", "girl.n.01"),
            ("smile.v.01", "girl.n.01"),
        ]
        ds = dataset_of(forest, ids)
        space = build_vocabulary(ds, mode="count")
        base = SentiPairSequence(tuple(make_pair(m, n, forest) for m, n in ids))
        shuffled = SentiPairSequence(tuple(base.pairs[i] for i in order))
        assert featurize(base, space) == featurize(shuffled, space)

    def test_sparse_vector_invariants(self):
        with pytest.raises(ValueError):
            SparseVector(entries=((1, 1.0), (1, 2.0)), dimension=3)
        with pytest.raises(ValueError):
            SparseVector(entries=((0, 0.0),), dimension=1)
        with pytest.raises(ValueError):
            SparseVector(entries=((5, 1.0),), dimension=3)


class TestSymmetricUncertainty:
    def test_self_information(self):
        x = np.array([0, 1, 0, 1, 1])
        assert symmetric_uncertainty(x, x) == pytest.approx(1.0)

    def test_independent_uniform_columns(self):
        # exact product joint: every combination equally often
        a = np.array([0, 0, 1, 1] * 5)
        b = np.array([0, 1, 0, 1] * 5)
        assert symmetric_uncertainty(a, b) == pytest.approx(0.0, abs=1e-12)

    def test_hand_computed_joint_table(self):
        # joint {(0,0):4, (0,1):1, (1,0):1, (1,1):4}
        a = np.array([0] * 5 + [1] * 5)
        b = np.array([0] * 4 + [1] + [0] + [1] * 4)
        h_marg = -(0.5 * math.log2(0.5)) * 2
        h_joint = -(2 * 0.4 * math.log2(0.4) + 2 * 0.1 * math.log2(0.1))
        expected = 2 * (2 * h_marg - h_joint) / (2 * h_marg)
        assert symmetric_uncertainty(a, b) == pytest.approx(expected)

    def test_constant_column_gives_zero(self):
        a = np.zeros(10, dtype=int)
        b = np.array([0, 1] * 5)
        assert symmetric_uncertainty(a, b) == 0.0

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            symmetric_uncertainty(np.array([0, 1]), np.array([0, 1, 2]))

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.tuples(st.integers(0, 2), st.integers(0, 2)), min_size=2, max_size=40))
    def test_symmetric_and_bounded(self, pairs):
        a = np.array([p[0] for p in pairs])
        b = np.array([p[1] for p in pairs])
        su_ab = symmetric_uncertainty(a, b)
        su_ba = symmetric_uncertainty(b, a)
        assert su_ab == pytest.approx(su_ba)
        assert -1e-12 <= su_ab <= 1.0 + 1e-12


def scratch_merit(X, y, subset):
    k = len(subset)
    rcf = sum(symmetric_uncertainty(X[:, f], y) for f in subset)
    rff = sum(symmetric_uncertainty(X[:, a], X[:, b]) for a, b in combinations(subset, 2))
    return subset_merit(rcf, rff, k)


class TestCfs:
    def test_dominant_feature_selected(self):
        rng = np.random.default_rng(0)
        y = rng.integers(0, 2, size=80)
        X = rng.integers(0, 2, size=(80, 6))
        X[:, 3] = y
        result = cfs_select(X, y)
        assert result.selected == [3]

    def test_constant_features_guarded(self):
        X = np.zeros((20, 4))
        y = np.array([0, 1] * 10)
        result = cfs_select(X, y)
        assert result.selected == []
        assert result.merit == 0.0

    def test_single_class_rejected(self):
        X = np.eye(4)
        with pytest.raises(DegenerateInput):
            cfs_select(X, np.zeros(4, dtype=int))

    def test_merit_matches_scratch_computation(self):
        rng = np.random.default_rng(7)
        y = rng.integers(0, 3, size=60)
        X = rng.integers(0, 2, size=(60, 8))
        X[:, 1] = (y == 1).astype(int)
        X[:, 5] = (y == 2).astype(int)
        result = cfs_select(X, y)
        assert result.merit == pytest.approx(scratch_merit(X, y, result.selected), abs=1e-12)

    def test_merit_invariant_under_feature_reordering(self):
        rng = np.random.default_rng(3)
        y = rng.integers(0, 2, size=60)
        X = rng.integers(0, 2, size=(60, 7))
        X[:, 2] = y
        X[:, 6] = 1 - y
        perm = [6, 0, 5, 2, 4, 1, 3]
        base = cfs_select(X, y)
        permuted = cfs_select(X[:, perm], y)
        assert permuted.merit == pytest.approx(base.merit, abs=1e-12)

    def test_selection_reproducible_on_identical_input(self):
        rng = np.random.default_rng(3)
        y = rng.integers(0, 3, size=60)
        X = rng.integers(0, 2, size=(60, 9))
        X[:, 4] = (y == 0).astype(int)
        first = cfs_select(X, y)
        second = cfs_select(X.copy(), y.copy())
        assert first.selected == second.selected
        assert first.merit == second.merit

    def test_never_beats_exhaustive_small(self):
        for seed in range(20):
            rng = np.random.default_rng(seed)
            y = rng.integers(0, 2, size=40)
            X = rng.integers(0, 2, size=(40, 6))
            X[:, seed % 6] = (y == rng.integers(0, 2)).astype(int)
            result = cfs_select(X, y)
            best = max(
                scratch_merit(X, y, s)
                for k in range(1, 7)
                for s in combinations(range(6), k)
            )
            assert result.merit <= best + 1e-9


class TestMatrixHelpers:
    def test_featurize_dataset_matches_featurize(self, forest):
        ds = generate_synthetic(forest, 30, (0.4, 0.3, 0.3), seed=6)
        space = build_vocabulary(ds, forest=forest)
        X = featurize_dataset(ds, space)
        for row, inst in zip(X, ds):
            assert np.array_equal(row, featurize(inst.sequence, space).to_dense())

    def test_selection_projects_dimension(self, forest):
        ds = generate_synthetic(forest, 30, (0.4, 0.3, 0.3), seed=6)
        space = build_vocabulary(ds, forest=forest)
        masked = space.with_selection([0, 2])
        assert masked.dimension == 2
        X = featurize_dataset(ds, masked)
        assert X.shape[1] == 2
