"""Softmax Information Curves: score recovery as salient pixels are revealed.

The base image is a Gaussian blur of the query (information removed, signal
statistics kept). For each reveal fraction, the highest-saliency pixels are
copied from the query onto the base and the classifier is rescored; the score
is normalized so the base maps to 0 and the original to 1. The area under
that curve rewards maps that put true evidence first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import gaussian_filter

from .models import Classifier

DEFAULT_FRACTIONS = (0.0, 0.01, 0.02, 0.05, 0.1, 0.2, 0.3, 0.5, 0.75, 1.0)
DEFAULT_BLUR_SIGMA = 8.0


@dataclass(frozen=True)
class SicCurve:
    fractions: np.ndarray  # strictly ascending, first 0.0, last 1.0
    scores: np.ndarray  # normalized softmax in [0, 1]
    auc: float

    def __post_init__(self):
        f, s = self.fractions, self.scores
        if f.shape != s.shape or f.ndim != 1:
            raise ValueError("curve fractions and scores must be matching 1-D arrays")
        if f[0] != 0.0 or f[-1] != 1.0 or np.any(np.diff(f) <= 0.0):
            raise ValueError("fractions must ascend strictly from 0 to 1")
        f.setflags(write=False)
        s.setflags(write=False)


def _validated_fractions(fractions) -> np.ndarray:
    f = np.unique(np.asarray(fractions, dtype=np.float64))
    if f.size == 0 or np.any(f < 0.0) or np.any(f > 1.0):
        raise ValueError("fractions must lie in [0, 1]")
    if f[0] != 0.0 or f[-1] != 1.0:
        raise ValueError("fractions must include 0 and 1")
    return f


def blur_base(image, sigma: float = DEFAULT_BLUR_SIGMA) -> np.ndarray:
    """Gaussian-blurred base image (kernel truncated at 3 sigma)."""
    return gaussian_filter(np.asarray(image, dtype=np.float64), sigma=sigma, truncate=3.0)


def reveal_order(saliency) -> np.ndarray:
    """Flat pixel indices sorted by saliency descending; ties keep row-major order."""
    flat = np.asarray(saliency, dtype=np.float64).ravel()
    return np.argsort(-flat, kind="stable")


def sic_curve(classifier: Classifier, image, saliency, fractions=DEFAULT_FRACTIONS,
              blur_sigma: float = DEFAULT_BLUR_SIGMA) -> SicCurve:
    """SIC curve of one saliency map on one query, plus its trapezoid AUC."""
    x = np.asarray(image, dtype=np.float64)
    s = np.asarray(saliency, dtype=np.float64)
    if x.shape != s.shape:
        raise ValueError(f"sic_curve: image shape {x.shape} != saliency shape {s.shape}")
    fracs = _validated_fractions(fractions)

    base = blur_base(x, blur_sigma)
    score_orig = classifier.classify(x)
    score_base = classifier.classify(base)
    if score_orig == score_base:
        raise ValueError("query uninformative under blur (blurred and original scores coincide)")

    order = reveal_order(s)
    n_pixels = x.size
    x_flat = x.ravel()
    norm_scores = np.empty(fracs.size)
    for i, f in enumerate(fracs):
        n_reveal = math.ceil(f * n_pixels)
        revealed = base.ravel().copy()
        revealed[order[:n_reveal]] = x_flat[order[:n_reveal]]
        score = classifier.classify(revealed.reshape(x.shape))
        norm_scores[i] = min(max((score - score_base) / (score_orig - score_base), 0.0), 1.0)
    auc = float(np.trapezoid(norm_scores, fracs))
    return SicCurve(fractions=fracs, scores=norm_scores, auc=auc)


@dataclass(frozen=True)
class MethodComparison:
    """Per-method SIC results over a set of queries."""

    fractions: np.ndarray
    curves: dict[str, np.ndarray]  # method -> (n_queries, n_fractions) normalized scores
    aucs: dict[str, np.ndarray]  # method -> (n_queries,)

    def median_curve(self, method: str) -> np.ndarray:
        return np.median(self.curves[method], axis=0)

    def median_auc(self, method: str) -> float:
        return float(np.median(self.aucs[method]))

    def summary_rows(self) -> list[tuple[str, float]]:
        return [(name, self.median_auc(name)) for name in self.curves]

    def curve_rows(self) -> list[tuple[int, str, float, float]]:
        """(query index, method, fraction, normalized softmax) per evaluation."""
        rows = []
        for name, curve in self.curves.items():
            for qi in range(curve.shape[0]):
                for fi, frac in enumerate(self.fractions):
                    rows.append((qi, name, float(frac), float(curve[qi, fi])))
        return rows


def compare_methods(classifier: Classifier, images, maps_by_method: dict,
                    fractions=DEFAULT_FRACTIONS,
                    blur_sigma: float = DEFAULT_BLUR_SIGMA) -> MethodComparison:
    """Evaluate several saliency methods on the same queries.

    images is a sequence of queries; maps_by_method maps a method name to one
    saliency map per query. Returns per-query curves and AUCs plus medians.
    """
    if not maps_by_method:
        raise ValueError("at least one saliency method is required")
    images = [np.asarray(img, dtype=np.float64) for img in images]
    if not images:
        raise ValueError("at least one query image is required")
    for name, maps in maps_by_method.items():
        if len(maps) != len(images):
            raise ValueError(f"method {name!r} supplies {len(maps)} maps for {len(images)} queries")

    fracs = _validated_fractions(fractions)
    curves: dict[str, np.ndarray] = {}
    aucs: dict[str, np.ndarray] = {}
    for name, maps in maps_by_method.items():
        rows = np.empty((len(images), fracs.size))
        method_aucs = np.empty(len(images))
        for qi, (img, smap) in enumerate(zip(images, maps)):
            curve = sic_curve(classifier, img, smap, fracs, blur_sigma)
            rows[qi] = curve.scores
            method_aucs[qi] = curve.auc
        curves[name] = rows
        aucs[name] = method_aucs
    return MethodComparison(fractions=fracs, curves=curves, aucs=aucs)
