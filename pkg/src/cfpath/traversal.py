"""Latent-path construction around a query and counterfactual/semifactual retrieval.

A path samples w_q - alpha * direction over an ascending alpha grid that
always contains alpha = 0 (the query itself). The counterfactual is the path
point closest to the decision boundary from the opposite side of 0.5; the
semifactual is the closest point on the query's own side.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass

import numpy as np

from .attributes import AttributeVector
from .models import Classifier, GeneratorModel
from .numerics import as_vector


@dataclass(frozen=True)
class TraversalPath:
    attribute: AttributeVector
    alphas: np.ndarray  # (m,), strictly increasing, contains 0
    latents: np.ndarray  # (m, d)
    images: np.ndarray  # (m, height, width)
    scores: np.ndarray  # (m,), classifier outputs in (0, 1)
    query_index: int

    def __post_init__(self):
        m = self.alphas.shape[0]
        if not (self.latents.shape[0] == self.images.shape[0] == self.scores.shape[0] == m):
            raise ValueError("path arrays must have equal lengths")
        if np.any(np.diff(self.alphas) <= 0.0):
            raise ValueError("alphas must be strictly increasing")
        if self.alphas[self.query_index] != 0.0:
            raise ValueError("query_index must point at the alpha=0 entry")
        for a in (self.alphas, self.latents, self.images, self.scores):
            a.setflags(write=False)

    def __len__(self) -> int:
        return self.alphas.shape[0]

    @property
    def query_image(self) -> np.ndarray:
        return self.images[self.query_index]

    @property
    def query_latent(self) -> np.ndarray:
        return self.latents[self.query_index]


@dataclass(frozen=True)
class ContrastivePair:
    counterfactual: int | None  # path index with max score strictly below 0.5
    semifactual: int | None  # path index with min score strictly above 0.5


def build_path(generator: GeneratorModel, classifier: Classifier, query_latent,
               attribute: AttributeVector, alpha_min: float, alpha_max: float,
               k: int) -> TraversalPath:
    """Sample k+1 equally spaced alphas in [alpha_min, alpha_max], insert 0 if absent.

    Latent j is query - alpha_j * attribute.direction; images and scores are
    evaluated in ascending alpha order so results are bit-reproducible.
    """
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    if not alpha_min < alpha_max:
        raise ValueError(f"alpha range must satisfy alpha_min < alpha_max, got [{alpha_min}, {alpha_max}]")
    w_q = as_vector(query_latent)
    if w_q.shape[0] != attribute.dim:
        raise ValueError(f"query latent dim {w_q.shape[0]} != attribute dim {attribute.dim}")

    alphas = [alpha_min + j * (alpha_max - alpha_min) / k for j in range(k + 1)]
    if 0.0 not in alphas:
        bisect.insort(alphas, 0.0)
    alphas_arr = np.array(alphas, dtype=np.float64)
    query_index = int(np.nonzero(alphas_arr == 0.0)[0][0])

    latents = w_q[None, :] - alphas_arr[:, None] * attribute.direction[None, :]
    images = np.stack([generator.generate(w) for w in latents])
    scores = np.array([classifier.classify(img) for img in images])
    return TraversalPath(attribute=attribute, alphas=alphas_arr, latents=latents,
                         images=images, scores=scores, query_index=query_index)


def retrieve_contrastives(path: TraversalPath) -> ContrastivePair:
    """Scan the path for the boundary-nearest points on each side of 0.5.

    Scores exactly at 0.5 belong to neither side. Ties in score break toward
    the smaller |alpha| (the least-changed image), then the smaller index.
    """
    cf = None  # (score, |alpha|, index); maximize score
    sf = None  # minimize score
    for j, score in enumerate(path.scores):
        a = abs(float(path.alphas[j]))
        s = float(score)
        if s < 0.5:
            if cf is None or s > cf[0] or (s == cf[0] and a < cf[1]):
                cf = (s, a, j)
        elif s > 0.5:
            if sf is None or s < sf[0] or (s == sf[0] and a < sf[1]):
                sf = (s, a, j)
    return ContrastivePair(
        counterfactual=cf[2] if cf is not None else None,
        semifactual=sf[2] if sf is not None else None,
    )
