"""Saliency maps: contrastive path-weighted gradients plus standard baselines.

The contrastive map weights each path neighbor's input gradient by the
per-pixel absolute difference between that neighbor and the query, averages
over neighbors, and mean-thresholds the absolute result. Pixels that change
consistently along the attribute direction therefore dominate, while pixels
the classifier cares about for unrelated reasons are suppressed.

Baselines: integrated gradients, SmoothGrad, and the plain gradient map.
All maps are (height, width) float arrays; final maps are nonnegative.
"""

from __future__ import annotations

import numpy as np

from .models import Classifier
from .traversal import TraversalPath


def _check_same_shape(a: np.ndarray, b: np.ndarray, what: str) -> None:
    if a.shape != b.shape:
        raise ValueError(f"{what}: shapes {a.shape} and {b.shape} differ")


def directional_diff(query, neighbor) -> np.ndarray:
    """Per-pixel absolute difference |query - neighbor|."""
    q = np.asarray(query, dtype=np.float64)
    n = np.asarray(neighbor, dtype=np.float64)
    _check_same_shape(q, n, "directional_diff")
    return np.abs(q - n)


def mean_threshold(values) -> np.ndarray:
    """Keep |value| where it is >= the mean of all |values|, zero elsewhere."""
    v = np.asarray(values, dtype=np.float64)
    if not np.all(np.isfinite(v)):
        raise ValueError("mean_threshold: values must be finite")
    magnitude = np.abs(v)
    mu = magnitude.mean()
    return np.where(magnitude >= mu, magnitude, 0.0)


def contrastive_saliency_raw(classifier: Classifier, path: TraversalPath,
                             normalize_by_alpha: bool = False) -> np.ndarray:
    """Signed pre-threshold map: mean over neighbors of gradient * diff.

    The query's own term is excluded; its diff is identically zero, so
    including it would change nothing (see contrastive_saliency tests).
    With normalize_by_alpha, each diff is divided by |alpha_j|, turning it
    into a finite-difference slope along the path.
    """
    if len(path) < 2:
        raise ValueError("path must contain at least one non-query point")
    query = path.query_image
    acc = np.zeros_like(query)
    count = 0
    for j in range(len(path)):
        if j == path.query_index:
            continue
        diff = directional_diff(query, path.images[j])
        if normalize_by_alpha:
            diff = diff / abs(float(path.alphas[j]))
        acc += classifier.input_gradient(path.images[j]) * diff
        count += 1
    return acc / count


def contrastive_saliency(classifier: Classifier, path: TraversalPath,
                         normalize_by_alpha: bool = False) -> np.ndarray:
    """Mean-thresholded magnitude of the contrastive raw map."""
    return mean_threshold(contrastive_saliency_raw(classifier, path, normalize_by_alpha))


def plain_gradient(classifier: Classifier, image) -> np.ndarray:
    """Vanilla gradient magnitude |d score / d pixel|."""
    return np.abs(classifier.input_gradient(image))


def integrated_gradients(classifier: Classifier, image, baseline, steps: int,
                         signed: bool = False) -> np.ndarray:
    """Right-rectangle integrated gradients from baseline to image.

    attribution = (image - baseline) * mean of gradients at
    baseline + (t/steps) * (image - baseline), t = 1..steps. Returns the
    magnitude unless signed=True (signed attributions satisfy the
    completeness sum f(image) - f(baseline) up to quadrature error).
    """
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    x = np.asarray(image, dtype=np.float64)
    b = np.asarray(baseline, dtype=np.float64)
    _check_same_shape(x, b, "integrated_gradients")
    delta = x - b
    grad_sum = np.zeros_like(x)
    for t in range(1, steps + 1):
        grad_sum += classifier.input_gradient(b + (t / steps) * delta)
    attribution = delta * grad_sum / steps
    return attribution if signed else np.abs(attribution)


def smoothgrad(classifier: Classifier, image, noise_sd: float, samples: int,
               seed: int) -> np.ndarray:
    """Mean gradient magnitude under Gaussian input noise; seeded, reproducible."""
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    if noise_sd < 0.0:
        raise ValueError(f"noise_sd must be >= 0, got {noise_sd}")
    x = np.asarray(image, dtype=np.float64)
    rng = np.random.default_rng(seed)
    acc = np.zeros_like(x)
    for _ in range(samples):
        noisy = x + rng.normal(0.0, noise_sd, size=x.shape)
        acc += np.abs(classifier.input_gradient(noisy))
    return acc / samples


def normalize_max(values) -> np.ndarray:
    """Scale a nonnegative map so its maximum is 1 (all-zero maps stay zero)."""
    v = np.asarray(values, dtype=np.float64)
    peak = v.max()
    return v / peak if peak > 0.0 else np.zeros_like(v)
