import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from lnnet.datasets import (BENCHMARK_PAIRS, GaussianSpec, LabeledDataset, dumps_csv, gen_gaussian_pair,
                            gen_noisy_xor, gen_random_labels, gen_benchmark_pair, gen_xor, load_csv, loads_csv,
                            save_csv)
from lnnet.errors import ParseError, ValidationError


class TestXor:
    def test_layout(self):
        d = gen_xor()
        assert d.points.shape == (2, 4)
        lab = {tuple(d.points[:, k]): int(d.labels[k]) for k in range(4)}
        assert lab[(0.0, 0.0)] == lab[(1.0, 1.0)]
        assert lab[(0.0, 1.0)] == lab[(1.0, 0.0)] != lab[(0.0, 0.0)]
        assert sorted(d.labels.tolist()) == [0, 0, 1, 1]

    def test_constant_bytes(self):
        assert dumps_csv(gen_xor()) == dumps_csv(gen_xor())


class TestGaussian:
    def test_deterministic(self):
        a = gen_benchmark_pair("offset", 64, seed=3)
        assert a == gen_benchmark_pair("offset", 64, seed=3)
        assert not (a == gen_benchmark_pair("offset", 64, seed=4))

    def test_zero_covariance(self):
        s = GaussianSpec([1.0, 2.0], np.zeros((2, 2)))
        d = gen_gaussian_pair(s, s, 5, seed=0)
        np.testing.assert_array_equal(d.points, np.tile([[1.0], [2.0]], 10))

    def test_not_psd(self):
        with pytest.raises(ValidationError):
            GaussianSpec([0, 0], [[1.0, 2.0], [2.0, 1.0]])

    def test_not_symmetric(self):
        with pytest.raises(ValidationError):
            GaussianSpec([0, 0], [[1.0, 0.5], [0.0, 1.0]])

    def test_covariance_converges(self):
        d = gen_benchmark_pair("concentric", 100_000, seed=1)
        for label, spec in zip((0, 1), BENCHMARK_PAIRS["concentric"]["specs"]):
            C = np.cov(d.class_points(label), bias=True)
            assert np.max(np.abs(C - spec.covariance)) <= 0.1

    def test_sizes(self):
        d = gen_benchmark_pair("elongated", 256, seed=0)
        assert d.size == 512 and np.sum(d.labels == 0) == 256

    def test_noisy_xor_support(self):
        d = gen_noisy_xor(50, seed=2)
        pts = {tuple(p) for p in d.points.T}
        assert pts <= {(0.0, 0.0), (1.0, 1.0), (0.0, 1.0), (1.0, 0.0)}

    def test_unknown_row(self):
        with pytest.raises(ValidationError):
            gen_benchmark_pair("5a")


class TestRandomLabels:
    def test_all_classes_present(self):
        for seed in range(50):
            assert sorted(set(gen_random_labels(4, 3, 2, seed).labels.tolist())) == [0, 1]
            assert len(set(gen_random_labels(5, 2, 5, seed).labels.tolist())) == 5

    def test_seeds_differ(self):
        assert not (gen_random_labels(64, 10, 2, 0) == gen_random_labels(64, 10, 2, 1))

    def test_too_few_points(self):
        with pytest.raises(ValidationError):
            gen_random_labels(2, 2, 3, 0)


class TestCsv:
    def test_round_trip(self, tmp_path):
        p = tmp_path / "xor.csv"
        save_csv(gen_xor(), p)
        assert load_csv(p) == gen_xor()
        assert p.read_text().splitlines()[0] == "x1,x2,label"

    @given(arrays(float, (3, 7), elements=st.floats(allow_nan=False, allow_infinity=False, width=64)),
           st.lists(st.integers(0, 9), min_size=7, max_size=7))
    def test_lossless(self, X, labels):
        d = LabeledDataset(X, np.array(labels))
        back = loads_csv(dumps_csv(d))
        np.testing.assert_array_equal(back.points, d.points)
        np.testing.assert_array_equal(back.labels, d.labels)

    def test_ragged_row(self):
        with pytest.raises(ParseError) as err:
            loads_csv("x1,x2,label\n0,1,0\n0,1,2,1\n")
        assert err.value.line == 3

    @pytest.mark.parametrize("text, line", [("", 1), ("x1,label\n", 2), ("a,b\n1,0\n", 1),
                                            ("x1,label\nfoo,0\n", 2), ("x1,label\n1.5,x\n", 2),
                                            ("x1,label\n1.5,-1\n", 2), ("x1,label\nnan,0\n", 2)])
    def test_parse_errors(self, text, line):
        with pytest.raises(ParseError) as err:
            loads_csv(text)
        assert err.value.line == line


class TestDatasetInvariants:
    def test_conflicting_duplicates(self):
        d = LabeledDataset(np.array([[0.0, 0.0], [1.0, 1.0]]), np.array([0, 1]))
        with pytest.raises(ValidationError):
            d.check_consistent()

    def test_same_label_duplicates_allowed(self):
        LabeledDataset(np.array([[0.0, 0.0], [1.0, 1.0]]), np.array([1, 1])).check_consistent()

    def test_label_count(self):
        with pytest.raises(ValidationError):
            LabeledDataset(np.zeros((2, 3)), np.array([0, 1]))
