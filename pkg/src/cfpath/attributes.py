"""Closed-form discovery of latent attribute directions and seed-based selection.

Directions come from the eigendecomposition of A^T A, where A is the
generator's first-layer weight matrix: the top eigenvectors are the latent
axes the generator amplifies the most, i.e. its dominant visual factors.
Selection matches discovered directions against a contrast between seed
latents (examples showing the attribute) and background latents.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numerics import as_matrix, as_vector, sym_eigen

UNIT_NORM_TOL = 1e-10


@dataclass(frozen=True)
class AttributeVector:
    """Unit-norm latent direction, ranked by eigenvalue order."""

    direction: np.ndarray
    rank: int
    eigenvalue: float

    def __post_init__(self):
        d = as_vector(self.direction)
        norm = float(np.linalg.norm(d))
        if abs(norm - 1.0) > UNIT_NORM_TOL:
            raise ValueError(f"attribute direction norm {norm} is not 1 within {UNIT_NORM_TOL}")
        if self.eigenvalue < 0.0:
            raise ValueError(f"attribute eigenvalue must be >= 0, got {self.eigenvalue}")
        object.__setattr__(self, "direction", d)
        object.__setattr__(self, "eigenvalue", float(self.eigenvalue))
        d.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.direction.shape[0]

    def flipped(self) -> "AttributeVector":
        return AttributeVector(-self.direction, self.rank, self.eigenvalue)


def sefa_directions(weight_matrix, n: int) -> list[AttributeVector]:
    """Top-n unit eigenvectors of A^T A, eigenvalues descending, signs canonical.

    Eigenvalues of a Gram matrix are nonnegative; tiny negative round-off is
    clamped to zero.
    """
    a = as_matrix(weight_matrix)
    if n > a.shape[1]:
        raise ValueError(f"requested {n} directions but the matrix has only {a.shape[1]} columns")
    gram = a.T @ a
    gram = (gram + gram.T) / 2.0
    values, vectors = sym_eigen(gram)
    return [
        AttributeVector(vectors[:, i], rank=i, eigenvalue=max(float(values[i]), 0.0))
        for i in range(n)
    ]


def select_attribute(directions: list[AttributeVector], seed_latents, background_latents) -> AttributeVector:
    """Pick the direction most aligned with mean(seeds) - mean(backgrounds).

    Alignment is absolute cosine; ties go to the lower rank. The returned
    direction is oriented so that moving along +direction increases the
    seed-contrast projection (traversal then subtracts it to remove the
    attribute).
    """
    if not directions:
        raise ValueError("no candidate directions given")
    seeds = [as_vector(s) for s in seed_latents]
    backgrounds = [as_vector(b) for b in background_latents]
    if not seeds:
        raise ValueError("seed latent set is empty")
    if not backgrounds:
        raise ValueError("background latent set is empty")
    contrast = np.mean(seeds, axis=0) - np.mean(backgrounds, axis=0)
    norm = float(np.linalg.norm(contrast))
    if norm == 0.0:
        raise ValueError("seeds indistinguishable from background (zero contrast vector)")

    best = None
    best_cos = -1.0
    for cand in sorted(directions, key=lambda d: d.rank):
        cos = abs(float(cand.direction @ contrast)) / norm
        if cos > best_cos:
            best, best_cos = cand, cos
    assert best is not None
    if float(best.direction @ contrast) < 0.0:
        best = best.flipped()
    return best
