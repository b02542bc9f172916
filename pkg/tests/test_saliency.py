from __future__ import annotations

import numpy as np
import pytest

from cfpath.attributes import AttributeVector
from cfpath.models import GeneratorModel, LogisticClassifier, MlpClassifier
from cfpath.saliency import (
    contrastive_saliency,
    contrastive_saliency_raw,
    directional_diff,
    integrated_gradients,
    mean_threshold,
    normalize_max,
    plain_gradient,
    smoothgrad,
)
from cfpath.traversal import build_path


@pytest.fixture()
def tiny_world():
    rng = np.random.default_rng(0)
    gen = GeneratorModel(rng.normal(0.0, 0.02, (16, 3)), np.full(16, 0.5), 4, 4)
    clf = LogisticClassifier(rng.normal(0.0, 0.3, 16), 0.0, 4, 4)
    attr = AttributeVector(np.array([1.0, 0.0, 0.0]), rank=0, eigenvalue=1.0)
    return gen, clf, attr


def tiny_path(tiny_world, seed=1, alpha_min=-3.0, alpha_max=3.0, k=6):
    gen, clf, attr = tiny_world
    w = np.random.default_rng(seed).normal(0.0, 1.0, 3)
    return build_path(gen, clf, w, attr, alpha_min, alpha_max, k), clf


class TestDirectionalDiff:
    def test_identical_images_zero(self):
        x = np.random.default_rng(0).random((4, 4))
        assert np.array_equal(directional_diff(x, x), np.zeros((4, 4)))

    def test_single_pixel(self):
        a = np.zeros((3, 3))
        b = a.copy()
        b[1, 2] = 0.3
        out = directional_diff(a, b)
        assert out[1, 2] == 0.3 and out.sum() == 0.3

    def test_symmetric(self):
        rng = np.random.default_rng(1)
        for _ in range(5):
            a, b = rng.random((4, 4)), rng.random((4, 4))
            assert np.array_equal(directional_diff(a, b), directional_diff(b, a))

    def test_shape_mismatch(self):
        with pytest.raises(ValueError, match="shape"):
            directional_diff(np.zeros((2, 2)), np.zeros((3, 3)))


class TestMeanThreshold:
    def test_all_zero(self):
        assert np.array_equal(mean_threshold(np.zeros(5)), np.zeros(5))

    def test_constant_map_fully_kept(self):
        out = mean_threshold(np.full((3, 3), 0.7))
        assert np.array_equal(out, np.full((3, 3), 0.7))

    def test_hand_case(self):
        # mean |(0,0,4)| = 4/3, so only the 4 survives
        assert np.array_equal(mean_threshold(np.array([0.0, 0.0, 4.0])), [0.0, 0.0, 4.0])

    def test_uses_absolute_values(self):
        # |(-3, 1)| has mean 2: keep |-3|, drop 1
        assert np.array_equal(mean_threshold(np.array([-3.0, 1.0])), [3.0, 0.0])

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            mean_threshold(np.array([1.0, np.inf]))

    def test_survivor_set_invariant_under_scaling(self):
        rng = np.random.default_rng(2)
        for _ in range(10):
            raw = rng.normal(size=(6, 6))
            base = mean_threshold(raw) > 0.0
            for c in (0.25, 2.0, 1e3):
                assert np.array_equal(mean_threshold(c * raw) > 0.0, base)


class TestContrastiveSaliency:
    def test_zero_gradients_zero_map(self, tiny_world):
        gen, _, attr = tiny_world
        clf = LogisticClassifier(np.zeros(16), 0.0, 4, 4)
        path = build_path(gen, clf, np.zeros(3), attr, 0.0, 4.0, 4)
        assert np.array_equal(contrastive_saliency(clf, path), np.zeros((4, 4)))

    def test_query_term_annihilates(self, tiny_world):
        path, clf = tiny_path(tiny_world)
        # manual accumulation over ALL points, query included
        k = len(path) - 1
        acc = np.zeros_like(path.query_image)
        for j in range(len(path)):
            diff = np.abs(path.query_image - path.images[j])
            acc += clf.input_gradient(path.images[j]) * diff
        with_query = acc / k
        assert np.array_equal(with_query, contrastive_saliency_raw(clf, path))
        assert np.array_equal(mean_threshold(with_query), contrastive_saliency(clf, path))

    def test_nonnegative_and_shaped(self, tiny_world):
        for seed in range(5):
            path, clf = tiny_path(tiny_world, seed=seed)
            out = contrastive_saliency(clf, path)
            assert out.shape == path.query_image.shape
            assert np.all(out >= 0.0)

    def test_doubled_diffs_double_raw_map(self, tiny_world):
        path, clf = tiny_path(tiny_world)
        k = len(path) - 1
        acc = np.zeros_like(path.query_image)
        for j in range(len(path)):
            if j == path.query_index:
                continue
            doubled = 2.0 * np.abs(path.query_image - path.images[j])
            acc += clf.input_gradient(path.images[j]) * doubled
        assert np.allclose(acc / k, 2.0 * contrastive_saliency_raw(clf, path), rtol=0, atol=0)

    def test_normalize_by_alpha_divides_each_term(self, tiny_world):
        path, clf = tiny_path(tiny_world)
        k = len(path) - 1
        acc = np.zeros_like(path.query_image)
        for j in range(len(path)):
            if j == path.query_index:
                continue
            diff = np.abs(path.query_image - path.images[j]) / abs(float(path.alphas[j]))
            acc += clf.input_gradient(path.images[j]) * diff
        assert np.array_equal(acc / k, contrastive_saliency_raw(clf, path, normalize_by_alpha=True))


class TestIntegratedGradients:
    def small_logistic(self):
        rng = np.random.default_rng(3)
        return LogisticClassifier(rng.normal(0.0, 0.3, 16), 0.05, 4, 4)

    def test_equal_input_and_baseline_zero(self):
        clf = self.small_logistic()
        x = np.random.default_rng(4).random((4, 4))
        assert np.array_equal(integrated_gradients(clf, x, x, 16), np.zeros((4, 4)))

    def test_single_step_is_endpoint_product(self):
        clf = self.small_logistic()
        rng = np.random.default_rng(5)
        x, b = rng.random((4, 4)), rng.random((4, 4))
        expected = np.abs((x - b) * clf.input_gradient(x))
        assert np.array_equal(integrated_gradients(clf, x, b, 1), expected)

    def test_completeness_logistic(self):
        clf = self.small_logistic()
        rng = np.random.default_rng(6)
        for _ in range(20):
            x, b = rng.random((4, 4)), rng.random((4, 4))
            signed = integrated_gradients(clf, x, b, 512, signed=True)
            assert abs(signed.sum() - (clf.classify(x) - clf.classify(b))) <= 1e-3

    def test_completeness_mlp(self):
        rng = np.random.default_rng(7)
        clf = MlpClassifier(rng.normal(0.0, 0.1, (6, 16)), rng.normal(0.0, 0.1, 6),
                            rng.normal(0.0, 0.5, 6), 0.0, 4, 4)
        for _ in range(10):
            x, b = rng.random((4, 4)), rng.random((4, 4))
            signed = integrated_gradients(clf, x, b, 512, signed=True)
            assert abs(signed.sum() - (clf.classify(x) - clf.classify(b))) <= 1e-3

    def test_shape_mismatch_and_bad_steps(self):
        clf = self.small_logistic()
        with pytest.raises(ValueError, match="shape"):
            integrated_gradients(clf, np.zeros((4, 4)), np.zeros((2, 2)), 4)
        with pytest.raises(ValueError, match="steps"):
            integrated_gradients(clf, np.zeros((4, 4)), np.zeros((4, 4)), 0)


class TestSmoothgrad:
    def small_logistic(self):
        rng = np.random.default_rng(8)
        return LogisticClassifier(rng.normal(0.0, 0.3, 16), 0.0, 4, 4)

    def test_zero_noise_equals_abs_gradient(self):
        clf = self.small_logistic()
        x = np.random.default_rng(9).random((4, 4))
        expected = np.abs(clf.input_gradient(x))
        for samples in (1, 7):
            assert np.allclose(smoothgrad(clf, x, 0.0, samples, seed=0), expected,
                               rtol=0, atol=1e-15)

    def test_reproducible_given_seed(self):
        clf = self.small_logistic()
        x = np.random.default_rng(10).random((4, 4))
        a = smoothgrad(clf, x, 0.2, 5, seed=123)
        b = smoothgrad(clf, x, 0.2, 5, seed=123)
        assert a.tobytes() == b.tobytes()
        assert not np.array_equal(a, smoothgrad(clf, x, 0.2, 5, seed=124))

    def test_estimator_variance_shrinks_with_samples(self):
        clf = self.small_logistic()
        x = np.random.default_rng(11).random((4, 4))
        def estimator_variance(samples):
            maps = np.stack([smoothgrad(clf, x, 0.3, samples, seed=s) for s in range(20)])
            return float(maps.var(axis=0).mean())
        assert estimator_variance(64) < estimator_variance(1)

    def test_rejects_bad_arguments(self):
        clf = self.small_logistic()
        with pytest.raises(ValueError, match="samples"):
            smoothgrad(clf, np.zeros((4, 4)), 0.1, 0, seed=0)
        with pytest.raises(ValueError, match="noise_sd"):
            smoothgrad(clf, np.zeros((4, 4)), -0.1, 1, seed=0)


class TestHelpers:
    def test_plain_gradient_is_abs_input_gradient(self):
        rng = np.random.default_rng(12)
        clf = LogisticClassifier(rng.normal(0.0, 0.3, 16), 0.0, 4, 4)
        x = rng.random((4, 4))
        assert np.array_equal(plain_gradient(clf, x), np.abs(clf.input_gradient(x)))

    def test_normalize_max(self):
        assert np.array_equal(normalize_max(np.array([0.0, 2.0, 1.0])), [0.0, 1.0, 0.5])
        assert np.array_equal(normalize_max(np.zeros(3)), np.zeros(3))
