"""Naive Bayes, KNN, and shared model-contract behavior."""

import numpy as np
import pytest

from iocattrib.errors import ModelError, ValidationError
from iocattrib.models import ModelSpec, fit

from conftest import make_dataset


NB_DATA = {"A": [[1, 0], [1, 1]], "B": [[0, 0], [0, 1]]}


class TestBernoulliNaiveBayes:
    def test_hand_computed_posteriors(self):
        # P(A) * P([1,0] | A) = 0.5 * 0.75 * 0.5  = 0.1875
        # P(B) * P([1,0] | B) = 0.5 * 0.25 * 0.5  = 0.0625
        model = fit(ModelSpec("naive_bayes", seed=1), make_dataset(NB_DATA))
        joint = np.exp(model.log_joint(np.array([[1.0, 0.0]])))[0]
        assert joint == pytest.approx([0.1875, 0.0625], abs=1e-12)
        scores = model.predict_scores(np.array([1, 0], dtype=np.uint8))
        assert scores.argmax_label() == "A"
        assert scores.scores == pytest.approx([0.75, 0.25], abs=1e-12)

    def test_scores_sum_to_one(self):
        model = fit(ModelSpec("naive_bayes", seed=1), make_dataset(NB_DATA))
        scores = model.predict_scores(np.array([0, 1], dtype=np.uint8))
        assert scores.scores.sum() == pytest.approx(1.0, abs=1e-9)

    def test_alpha_validated_before_work(self):
        with pytest.raises(ValidationError, match="alpha"):
            fit(ModelSpec("naive_bayes", params={"alpha": -1}, seed=1), make_dataset(NB_DATA))

    def test_single_class_rejected(self):
        with pytest.raises(ModelError, match="2 distinct labels"):
            fit(ModelSpec("naive_bayes", seed=1), make_dataset({"A": [[1, 0], [0, 1]]}))

    def test_length_mismatch_rejected(self):
        model = fit(ModelSpec("naive_bayes", seed=1), make_dataset(NB_DATA))
        with pytest.raises(ModelError, match="length"):
            model.predict_scores(np.array([1, 0, 1], dtype=np.uint8))


class TestKernelNaiveBayes:
    def test_agrees_with_majority_structure(self):
        data = {"A": [[1, 0, 1], [1, 0, 0]], "B": [[0, 1, 0], [0, 1, 1]]}
        model = fit(ModelSpec("naive_bayes_kernel", seed=1), make_dataset(data))
        assert model.predict_label(np.array([1, 0, 1], dtype=np.uint8)) == "A"
        assert model.predict_label(np.array([0, 1, 0], dtype=np.uint8)) == "B"

    def test_unseen_value_keeps_finite_scores(self):
        # class B never shows feature 0; querying it must not produce NaN
        data = {"A": [[1, 1], [1, 0]], "B": [[0, 1], [0, 0]]}
        model = fit(ModelSpec("naive_bayes_kernel", seed=1), make_dataset(data))
        scores = model.predict_scores(np.array([1, 1], dtype=np.uint8))
        assert np.isfinite(scores.scores).all()
        assert scores.scores.sum() == pytest.approx(1.0, abs=1e-9)


class TestKnn:
    def test_exact_match_with_k1(self):
        data = {"A": [[1, 0, 1, 0]], "B": [[0, 1, 0, 1]], "C": [[1, 1, 0, 0]]}
        model = fit(ModelSpec("knn", params={"k": 1}, seed=1), make_dataset(data))
        for label, vectors in data.items():
            assert model.predict_label(np.array(vectors[0], dtype=np.uint8)) == label

    def test_matches_exhaustive_sort_oracle(self):
        rng = np.random.default_rng(12)
        n, d, k = 40, 12, 5
        X = rng.integers(0, 2, size=(n, d)).astype(np.uint8)
        labels = [f"C{v}" for v in rng.integers(0, 4, size=n)]
        rows = {}
        for lbl, row in zip(labels, X):
            rows.setdefault(lbl, []).append(list(row))
        dataset = make_dataset(rows)
        model = fit(ModelSpec("knn", params={"k": k}, seed=1), dataset)

        # oracle over the model's own canonical training order
        train_X = model.X.astype(int)
        train_y = model.y
        classes = model.classes
        queries = rng.integers(0, 2, size=(25, d)).astype(np.uint8)
        for q in queries:
            d_all = np.abs(train_X - q).sum(axis=1)
            order = sorted(range(n), key=lambda i: (d_all[i], i))[:k]
            votes = np.bincount(train_y[order], minlength=len(classes))
            expected = classes[int(np.argmax(votes))]
            assert model.predict_label(q) == expected

    def test_vote_tie_breaks_to_lowest_class_index(self):
        # query equidistant from one A and one B neighbor, k=2
        data = {"B": [[1, 1, 0, 0]], "A": [[0, 0, 1, 1]]}
        model = fit(ModelSpec("knn", params={"k": 2}, seed=1), make_dataset(data))
        assert model.predict_label(np.array([1, 0, 1, 0], dtype=np.uint8)) == "A"


class TestOrderInvariance:
    @pytest.mark.parametrize("algorithm", ["naive_bayes", "knn", "glm", "random_forest"])
    def test_shuffled_training_order_same_predictions(self, algorithm):
        rng = np.random.default_rng(5)
        X = rng.integers(0, 2, size=(30, 8)).astype(np.uint8)
        labels = [f"C{v}" for v in rng.integers(0, 3, size=30)]
        rows = {}
        for lbl, row in zip(labels, X):
            rows.setdefault(lbl, []).append(list(row))
        shuffled = {k: list(reversed(v)) for k, v in reversed(list(rows.items()))}
        params = {"n_trees": 10} if algorithm == "random_forest" else {}
        a = fit(ModelSpec(algorithm, params=params, seed=3), make_dataset(rows))
        b = fit(ModelSpec(algorithm, params=params, seed=3), make_dataset(shuffled))
        queries = rng.integers(0, 2, size=(20, 8)).astype(np.uint8)
        assert a.predict_labels(queries) == b.predict_labels(queries)

    @pytest.mark.parametrize("algorithm", ["naive_bayes", "knn", "glm"])
    def test_repeated_fit_identical(self, algorithm):
        rng = np.random.default_rng(6)
        X = rng.integers(0, 2, size=(24, 6)).astype(np.uint8)
        labels = [f"C{v}" for v in rng.integers(0, 3, size=24)]
        rows = {}
        for lbl, row in zip(labels, X):
            rows.setdefault(lbl, []).append(list(row))
        dataset = make_dataset(rows)
        a = fit(ModelSpec(algorithm, seed=3), dataset)
        b = fit(ModelSpec(algorithm, seed=3), dataset)
        queries = rng.integers(0, 2, size=(15, 6)).astype(np.uint8)
        assert np.array_equal(a.predict_scores_matrix(queries), b.predict_scores_matrix(queries))
