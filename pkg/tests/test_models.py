from __future__ import annotations

import json

import numpy as np
import pytest

from cfpath.models import (
    GeneratorModel,
    LabeledDataset,
    LogisticClassifier,
    MlpClassifier,
    accuracy,
    load_model,
    model_to_dict,
    save_model,
    train_classifier,
)


def finite_difference_gradient(classifier, image, h=1e-3):
    """Central-difference oracle for d classify / d pixel."""
    grad = np.zeros_like(image)
    for i in range(image.shape[0]):
        for j in range(image.shape[1]):
            up = image.copy()
            up[i, j] += h
            down = image.copy()
            down[i, j] -= h
            grad[i, j] = (classifier.classify(up) - classifier.classify(down)) / (2.0 * h)
    return grad


def assert_gradient_matches_fd(classifier, image, h=1e-3, rel_tol=1e-4, abs_tol=1e-6):
    analytic = classifier.input_gradient(image)
    fd = finite_difference_gradient(classifier, image, h)
    big = np.abs(fd) >= 1e-8
    if np.any(big):
        rel = np.abs(analytic[big] - fd[big]) / np.abs(fd[big])
        assert rel.max() <= rel_tol
    if np.any(~big):
        assert np.abs(analytic[~big] - fd[~big]).max() <= abs_tol


def small_models(seed=42, height=12, width=12, hidden=6):
    rng = np.random.default_rng(seed)
    logistic = LogisticClassifier(rng.normal(0.0, 0.05, height * width), 0.1, height, width)
    mlp = MlpClassifier(rng.normal(0.0, 0.05, (hidden, height * width)),
                        rng.normal(0.0, 0.1, hidden), rng.normal(0.0, 0.5, hidden),
                        0.05, height, width)
    return logistic, mlp


class TestGenerator:
    def test_zero_latent_gives_clamped_bias(self):
        rng = np.random.default_rng(0)
        bias = rng.uniform(-0.5, 1.5, 16)
        gen = GeneratorModel(rng.normal(size=(16, 3)), bias, 4, 4)
        img = gen.generate(np.zeros(3))
        assert np.array_equal(img, np.clip(bias, 0.0, 1.0).reshape(4, 4))

    def test_zero_basis_gives_uniform_gray(self):
        gen = GeneratorModel(np.zeros((16, 3)), np.full(16, 0.5), 4, 4)
        for w in (np.zeros(3), np.array([3.0, -1.0, 9.0])):
            assert np.array_equal(gen.generate(w), np.full((4, 4), 0.5))

    def test_latent_dim_mismatch(self):
        gen = GeneratorModel(np.zeros((16, 3)), np.zeros(16), 4, 4)
        with pytest.raises(ValueError, match="dim"):
            gen.generate(np.zeros(4))

    def test_output_clamped_and_deterministic(self):
        rng = np.random.default_rng(1)
        gen = GeneratorModel(rng.normal(size=(16, 3)), rng.normal(size=16), 4, 4)
        w = rng.normal(size=3)
        a, b = gen.generate(w), gen.generate(w)
        assert a.min() >= 0.0 and a.max() <= 1.0
        assert a.tobytes() == b.tobytes()

    def test_first_layer_weights_is_basis(self):
        rng = np.random.default_rng(2)
        basis = rng.normal(size=(16, 3))
        gen = GeneratorModel(basis, np.zeros(16), 4, 4)
        assert np.array_equal(gen.first_layer_weights(), basis)
        assert not gen.first_layer_weights().flags.writeable


class TestClassify:
    def test_zero_weights_give_half(self):
        clf = LogisticClassifier(np.zeros(16), 0.0, 4, 4)
        assert clf.classify(np.random.default_rng(0).random((4, 4))) == 0.5

    def test_monotone_in_region_mean(self):
        # weights = indicator of a region: brighter region, higher score
        weights = np.zeros(16)
        weights[[0, 1, 4, 5]] = 1.0
        clf = LogisticClassifier(weights, -1.0, 4, 4)
        scores = []
        for level in np.linspace(0.0, 1.0, 7):
            img = np.full((4, 4), 0.2)
            img.ravel()[[0, 1, 4, 5]] = level
            scores.append(clf.classify(img))
        assert np.all(np.diff(scores) > 0.0)

    def test_strictly_inside_unit_interval(self):
        logistic, mlp = small_models()
        rng = np.random.default_rng(3)
        for _ in range(10):
            x = rng.random((12, 12))
            for clf in (logistic, mlp):
                s = clf.classify(x)
                assert 0.0 < s < 1.0

    def test_shape_mismatch(self):
        logistic, mlp = small_models()
        for clf in (logistic, mlp):
            with pytest.raises(ValueError, match="shape"):
                clf.classify(np.zeros((5, 5)))


class TestInputGradient:
    def test_zero_weight_logistic_gives_zero(self):
        clf = LogisticClassifier(np.zeros(16), 0.3, 4, 4)
        assert np.array_equal(clf.input_gradient(np.ones((4, 4))), np.zeros((4, 4)))

    def test_logistic_closed_form(self):
        logistic, _ = small_models()
        rng = np.random.default_rng(4)
        x = rng.random((12, 12))
        p = logistic.classify(x)
        expected = (p * (1.0 - p) * logistic.weights).reshape(12, 12)
        assert np.array_equal(logistic.input_gradient(x), expected)

    def test_matches_finite_differences(self):
        logistic, mlp = small_models()
        rng = np.random.default_rng(5)
        for clf in (logistic, mlp):
            for _ in range(5):
                assert_gradient_matches_fd(clf, rng.random((12, 12)))

    def test_mlp_relu_gating(self):
        # one hidden unit, inactive: gradient must be exactly zero
        clf = MlpClassifier(np.full((1, 4), -1.0), np.array([-10.0]), np.array([2.0]),
                            0.0, 2, 2)
        assert np.array_equal(clf.input_gradient(np.full((2, 2), 0.5)), np.zeros((2, 2)))


class TestTrainClassifier:
    def toy_separable(self, n=40, seed=0):
        # 1x2 images: label 1 iff left pixel brighter than right
        rng = np.random.default_rng(seed)
        images = rng.random((n, 1, 2))
        labels = (images[:, 0, 0] > images[:, 0, 1]).astype(int)
        if labels.min() == labels.max():  # force both classes
            images[0] = [[0.9, 0.1]]
            labels[0] = 1
            images[1] = [[0.1, 0.9]]
            labels[1] = 0
        return LabeledDataset(images, labels)

    def test_separable_toy_reaches_perfect_accuracy(self):
        data = self.toy_separable()
        clf = train_classifier(data, epochs=200, learning_rate=2.0, seed=0)
        assert accuracy(clf, data) == 1.0

    def test_mlp_trains_on_toy(self):
        data = self.toy_separable(seed=1)
        clf = train_classifier(data, epochs=200, learning_rate=2.0, seed=1,
                               architecture="one-hidden-layer", hidden=8)
        assert accuracy(clf, data) >= 0.95

    def test_zero_epochs_returns_seeded_init(self):
        data = self.toy_separable()
        a = train_classifier(data, epochs=0, learning_rate=1.0, seed=11)
        b = train_classifier(data, epochs=0, learning_rate=9.9, seed=11)
        assert a.weights.tobytes() == b.weights.tobytes() and a.bias == b.bias
        assert np.all(np.abs(a.weights) <= 0.01) and abs(a.bias) <= 0.01

    def test_single_class_rejected(self):
        images = np.random.default_rng(0).random((4, 1, 2))
        data = LabeledDataset(images, np.ones(4, dtype=int))
        with pytest.raises(ValueError, match="both classes"):
            train_classifier(data, epochs=1, learning_rate=0.1, seed=0)

    def test_deterministic_given_seed(self):
        data = self.toy_separable()
        a = train_classifier(data, epochs=50, learning_rate=1.0, seed=5)
        b = train_classifier(data, epochs=50, learning_rate=1.0, seed=5)
        assert a.weights.tobytes() == b.weights.tobytes() and a.bias == b.bias

    def test_lesion_fixture_holdout_accuracy(self, trained_classifier, dataset_split):
        _, holdout = dataset_split
        assert accuracy(trained_classifier, holdout) >= 0.95


class TestPersistence:
    def test_logistic_roundtrip_exact(self, tmp_path):
        logistic, _ = small_models()
        path = tmp_path / "clf.json"
        save_model(logistic, path)
        loaded = load_model(path)
        rng = np.random.default_rng(6)
        for _ in range(5):
            x = rng.random((12, 12))
            assert loaded.classify(x) == logistic.classify(x)

    def test_mlp_roundtrip_exact(self, tmp_path):
        _, mlp = small_models()
        path = tmp_path / "mlp.json"
        save_model(mlp, path)
        loaded = load_model(path)
        x = np.random.default_rng(7).random((12, 12))
        assert loaded.classify(x) == mlp.classify(x)
        assert loaded.hidden_width == mlp.hidden_width

    def test_generator_roundtrip_exact(self, tmp_path):
        rng = np.random.default_rng(8)
        gen = GeneratorModel(rng.normal(size=(16, 3)), rng.normal(size=16), 4, 4)
        path = tmp_path / "gen.json"
        save_model(gen, path)
        loaded = load_model(path)
        w = rng.normal(size=3)
        assert loaded.generate(w).tobytes() == gen.generate(w).tobytes()

    def test_document_shape(self):
        logistic, _ = small_models()
        doc = model_to_dict(logistic)
        assert doc["kind"] == "classifier" and doc["architecture"] == "logistic"
        json.dumps(doc)  # serializable as-is

    def test_unknown_kind_rejected(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"kind": "mystery"}')
        with pytest.raises(ValueError, match="kind"):
            load_model(path)


class TestLabeledDataset:
    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            LabeledDataset(np.zeros((0, 2, 2)), np.zeros(0, dtype=int))

    def test_rejects_bad_labels(self):
        with pytest.raises(ValueError):
            LabeledDataset(np.zeros((2, 2, 2)), np.array([0, 2]))

    def test_subset_keeps_masks(self):
        images = np.zeros((4, 2, 2))
        masks = np.zeros((4, 2, 2), dtype=bool)
        masks[1, 0, 0] = True
        data = LabeledDataset(images, np.array([0, 1, 0, 1]), masks)
        sub = data.subset([1, 2])
        assert sub.masks is not None and sub.masks[0, 0, 0]
