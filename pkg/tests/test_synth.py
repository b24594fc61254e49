import numpy as np
import pytest

from iocattrib.errors import ValidationError
from iocattrib.featurize import FeatureVector, build_feature_space, vectorize_matrix
from iocattrib.ingest import load_matrix_csv
from iocattrib.streams import keyed_stream
from iocattrib.synth import (
    NoiseSpec,
    expected_positive_count,
    flip_noise,
    load_dataset_csv,
    synthesize_dataset,
    write_dataset_csv,
)

from conftest import make_dataset


class TestFlipNoise:
    def test_rate_zero_is_identity(self):
        vector = FeatureVector(np.array([1, 0, 1, 1, 0], dtype=np.uint8))
        out = flip_noise(vector, 0.0, keyed_stream(1))
        assert np.array_equal(out.bits, vector.bits)

    def test_rate_one_is_complement(self):
        vector = FeatureVector(np.array([1, 0, 1, 1, 0], dtype=np.uint8))
        out = flip_noise(vector, 1.0, keyed_stream(1))
        assert np.array_equal(out.bits, 1 - vector.bits)

    def test_mean_positive_count_monte_carlo(self):
        # 10,000 streams; analytic mean 21 + 0.1 * (304 - 42) = 47.2
        n_features, n1, rate = 304, 21, 0.1
        bits = np.zeros(n_features, dtype=np.uint8)
        bits[:n1] = 1
        vector = FeatureVector(bits)
        counts = np.array([
            flip_noise(vector, rate, keyed_stream("mc", i)).positive_count
            for i in range(10_000)
        ])
        se = counts.std(ddof=1) / np.sqrt(len(counts))
        assert abs(counts.mean() - 47.2) < 3 * se

    def test_monotone_corruption(self):
        # expected Hamming distance to the original is rate * N
        n_features = 200
        bits = np.zeros(n_features, dtype=np.uint8)
        bits[:40] = 1
        vector = FeatureVector(bits)
        for rate in (0.1, 0.3):
            distances = np.array([
                int((flip_noise(vector, rate, keyed_stream("mono", rate, i)).bits != bits).sum())
                for i in range(1_000)
            ])
            se = distances.std(ddof=1) / np.sqrt(len(distances))
            assert abs(distances.mean() - rate * n_features) < 3 * se


class TestExpectedPositiveCount:
    def test_rate_zero(self):
        assert expected_positive_count(10, 100, 0.0) == 10

    def test_all_poisons(self):
        assert expected_positive_count(0, 100, 0.3) == 30

    def test_published_means_imply_constant_flip_space(self):
        # the three published (rate, mean) pairs all solve to N - 2*n1 ~ 263
        base = 20.71
        implied = [(47.02 - base) / 0.1, (73.28 - base) / 0.2, (99.38 - base) / 0.3]
        for value in implied:
            assert abs(value - 263.0) < 1.0

    def test_out_of_range_rejected(self):
        with pytest.raises(ValidationError):
            expected_positive_count(101, 100, 0.1)


class TestSynthesizeDataset:
    def test_129_originals_become_516(self, highlevel_fixture):
        matrix = load_matrix_csv(highlevel_fixture)
        dataset = vectorize_matrix(matrix, build_feature_space(matrix))
        synthesized = synthesize_dataset(dataset, NoiseSpec(seed=9))
        assert len(synthesized) == 516
        originals = [i for i in synthesized.instances if i.provenance.is_original]
        assert len(originals) == 129

    def test_empty_rates_identity(self):
        dataset = make_dataset({"A": [[1, 0, 1]], "B": [[0, 1, 0]]})
        assert synthesize_dataset(dataset, NoiseSpec(rates=(), seed=1)) is dataset

    def test_instance_count_formula(self):
        dataset = make_dataset({"A": [[1, 0, 1]], "B": [[0, 1, 0]], "C": [[1, 1, 1]]})
        out = synthesize_dataset(dataset, NoiseSpec(rates=(0.2, 0.4), seed=1))
        assert len(out) == 3 * (1 + 2)

    def test_label_and_provenance(self):
        dataset = make_dataset({"A": [[1, 0, 1, 0]]})
        out = synthesize_dataset(dataset, NoiseSpec(seed=5))
        labels = {inst.label for inst in out.instances}
        assert labels == {"A"}
        synthesized = [i for i in out.instances if not i.provenance.is_original]
        assert sorted(i.provenance.rate for i in synthesized) == [0.1, 0.2, 0.3]
        assert all(i.provenance.seed == 5 for i in synthesized)

    def test_deterministic_and_seed_sensitive(self):
        dataset = make_dataset({"A": [[1, 0] * 50], "B": [[0, 1] * 50]})
        a = synthesize_dataset(dataset, NoiseSpec(seed=3))
        b = synthesize_dataset(dataset, NoiseSpec(seed=3))
        c = synthesize_dataset(dataset, NoiseSpec(seed=4))
        for x, y in zip(a.instances, b.instances):
            assert np.array_equal(x.vector.bits, y.vector.bits)
        assert any(
            not np.array_equal(x.vector.bits, y.vector.bits)
            for x, y in zip(a.instances, c.instances)
            if not x.provenance.is_original
        )

    def test_order_independent_streams(self):
        rows = {"A": [[1, 0, 1, 0, 1]], "B": [[0, 1, 0, 1, 0]], "C": [[1, 1, 0, 0, 1]]}
        forward = synthesize_dataset(make_dataset(rows), NoiseSpec(seed=7))
        reversed_rows = dict(reversed(list(rows.items())))
        backward = synthesize_dataset(make_dataset(reversed_rows), NoiseSpec(seed=7))
        by_key = {
            (i.label, i.provenance.rate): i.vector.bits
            for i in backward.instances
            if not i.provenance.is_original
        }
        for inst in forward.instances:
            if inst.provenance.is_original:
                continue
            assert np.array_equal(inst.vector.bits, by_key[(inst.label, inst.provenance.rate)])

    def test_double_noising_rejected(self):
        dataset = make_dataset({"A": [[1, 0]], "B": [[0, 1]]})
        once = synthesize_dataset(dataset, NoiseSpec(seed=1))
        with pytest.raises(ValidationError, match="already contains synthesized"):
            synthesize_dataset(once, NoiseSpec(seed=2))

    def test_per_rate_means_match_analytic_oracle(self, highlevel_fixture):
        matrix = load_matrix_csv(highlevel_fixture)
        dataset = vectorize_matrix(matrix, build_feature_space(matrix))
        synthesized = synthesize_dataset(dataset, NoiseSpec(seed=9))
        n_features = dataset.space.size
        n1 = np.array([inst.vector.positive_count for inst in dataset.instances], float)
        for rate in (0.1, 0.2, 0.3):
            observed = np.array([
                inst.vector.positive_count
                for inst in synthesized.instances
                if not inst.provenance.is_original and inst.provenance.rate == rate
            ], float)
            expected = np.mean([expected_positive_count(v, n_features, rate) for v in n1])
            se = np.sqrt(n_features * rate * (1 - rate) / len(observed))
            assert abs(observed.mean() - expected) < 3 * se


class TestDatasetCsvRoundtrip:
    def test_roundtrip(self, tmp_path):
        dataset = make_dataset({"A": [[1, 0, 1]], "B, unit": [[0, 1, 0]]})
        synthesized = synthesize_dataset(dataset, NoiseSpec(seed=2))
        path = tmp_path / "ds.csv"
        write_dataset_csv(synthesized, path, comment="check")
        again = load_dataset_csv(path, synthesized.level)
        assert again.space.features == synthesized.space.features
        assert len(again) == len(synthesized)
        for x, y in zip(again.instances, synthesized.instances):
            assert x.label == y.label
            assert x.provenance == y.provenance
            assert np.array_equal(x.vector.bits, y.vector.bits)
