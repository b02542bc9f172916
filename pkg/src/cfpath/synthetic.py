"""Deterministic fixture world: lesion image datasets and a planted-attribute generator.

The lesion template is a bright disk with a softer inflammation-like halo.
Datasets place such lesions on noisy backgrounds with ground-truth masks.
The planted generator dedicates one latent axis to the lesion template and
fills the rest with weaker smooth background patterns, all columns mutually
orthogonal, so the dominant factorization direction is the lesion axis by
construction.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .attributes import AttributeVector
from .models import GeneratorModel, LabeledDataset
from .netpbm import write_pgm

HALO_LEVEL = 1.0 / 3.0  # halo intensity relative to the disk plateau


@dataclass(frozen=True)
class LesionSpec:
    """One lesion: disk center/radius, absolute disk brightness, halo extent."""

    center: tuple[float, float]  # (row, col)
    radius: float
    intensity: float  # absolute pixel level inside the disk, in [0, 1]
    halo_scale: float = 1.8  # halo radius = radius * halo_scale, >= 1

    def __post_init__(self):
        if self.radius <= 0.0:
            raise ValueError(f"radius must be positive, got {self.radius}")
        if not 0.0 <= self.intensity <= 1.0:
            raise ValueError(f"intensity must lie in [0, 1], got {self.intensity}")
        if self.halo_scale < 1.0:
            raise ValueError(f"halo_scale must be >= 1, got {self.halo_scale}")


def lesion_profile(height: int, width: int, spec: LesionSpec) -> np.ndarray:
    """Unit-height lesion footprint: plateau 1 inside the disk, halo decaying to 0.

    The halo starts at the softer level and fades linearly to zero at
    radius * halo_scale. Raises if the disk does not fit inside the image.
    """
    row0, col0 = spec.center
    if not (spec.radius <= row0 <= height - 1 - spec.radius
            and spec.radius <= col0 <= width - 1 - spec.radius):
        raise ValueError(
            f"lesion disk (center {spec.center}, radius {spec.radius}) "
            f"does not fit inside {height}x{width} image bounds"
        )
    rows = np.arange(height, dtype=np.float64)[:, None]
    cols = np.arange(width, dtype=np.float64)[None, :]
    dist = np.sqrt((rows - row0) ** 2 + (cols - col0) ** 2)
    profile = np.zeros((height, width))
    profile[dist <= spec.radius] = 1.0
    halo_radius = spec.radius * spec.halo_scale
    if halo_radius > spec.radius:
        in_halo = (dist > spec.radius) & (dist < halo_radius)
        profile[in_halo] = HALO_LEVEL * (halo_radius - dist[in_halo]) / (halo_radius - spec.radius)
    return profile


def make_lesion_dataset(n: int, height: int = 64, width: int = 64, seed: int = 0,
                        background_level: float = 0.5, noise_amplitude: float = 0.03,
                        radius_range: tuple[float, float] = (7.0, 11.0),
                        intensity_range: tuple[float, float] = (0.7, 0.85),
                        halo_scale: float = 1.8) -> LabeledDataset:
    """n images, half with a lesion (label 1) and masks, half background only.

    Backgrounds are background_level plus uniform noise; lesions raise the
    disk toward an absolute intensity drawn from intensity_range. Everything
    is a pure function of the arguments.
    """
    if n < 2:
        raise ValueError(f"dataset needs n >= 2, got {n}")
    if not intensity_range[0] >= background_level:
        raise ValueError("lesion intensity must be at least the background level")
    margin = math.ceil(radius_range[1] * halo_scale) + 1
    if margin >= height - margin or margin >= width - margin:
        raise ValueError(
            f"lesion radius up to {radius_range[1]} (halo x{halo_scale}) cannot fit "
            f"inside a {height}x{width} image"
        )

    rng = np.random.default_rng(seed)
    labels = np.zeros(n, dtype=np.int64)
    labels[: n // 2] = 1
    labels = labels[rng.permutation(n)]

    images = np.empty((n, height, width))
    masks = np.zeros((n, height, width), dtype=bool)
    for i in range(n):
        img = background_level + rng.uniform(-noise_amplitude, noise_amplitude, (height, width))
        if labels[i] == 1:
            spec = LesionSpec(
                center=(rng.uniform(margin, height - 1 - margin),
                        rng.uniform(margin, width - 1 - margin)),
                radius=rng.uniform(*radius_range),
                intensity=rng.uniform(*intensity_range),
                halo_scale=halo_scale,
            )
            profile = lesion_profile(height, width, spec)
            img = img + (spec.intensity - background_level) * profile
            masks[i] = profile > 0.0
        images[i] = np.clip(img, 0.0, 1.0)
    return LabeledDataset(images, labels, masks)


def _smooth_patterns(count: int, height: int, width: int, rng: np.random.Generator) -> np.ndarray:
    """Low-frequency separable sine products, one flattened pattern per row."""
    pairs = sorted(
        ((kr, kc) for kr in range(count + 1) for kc in range(count + 1)),
        key=lambda p: (p[0] + p[1], p[0]),
    )[:count]
    rows = (np.arange(height) + 0.5) / height
    cols = (np.arange(width) + 0.5) / width
    patterns = np.empty((count, height * width))
    for i, (kr, kc) in enumerate(pairs):
        phase_r, phase_c = rng.uniform(0.0, 2.0 * np.pi, 2)
        pattern = np.sin(np.pi * (kr + 1) * rows + phase_r)[:, None] * \
            np.sin(np.pi * (kc + 1) * cols + phase_c)[None, :]
        patterns[i] = pattern.ravel()
    return patterns


def make_planted_generator(latent_dim: int = 8, height: int = 64, width: int = 64,
                           lesion_axis: int = 0, seed: int = 0,
                           pixel_gain: float = 0.02, bias_level: float = 0.5,
                           radius: float | None = None, halo_scale: float = 1.8,
                           ) -> tuple[GeneratorModel, AttributeVector]:
    """Generator whose lesion_axis coordinate controls a centered lesion template.

    All basis columns are mutually orthogonal in pixel space; background
    columns get strictly descending norms at most half the template's, so the
    template is the unique dominant right-singular direction (norm gap >= 2x)
    and factorization must recover e_lesion_axis. Returns the generator and
    that ground-truth attribute.
    """
    if not 0 <= lesion_axis < latent_dim:
        raise ValueError(f"lesion_axis {lesion_axis} outside [0, {latent_dim})")
    if radius is None:
        radius = max(3.0, round(0.14 * min(height, width)))
    rng = np.random.default_rng(seed)

    spec = LesionSpec(center=((height - 1) / 2.0, (width - 1) / 2.0), radius=radius,
                      intensity=1.0, halo_scale=halo_scale)
    template = lesion_profile(height, width, spec).ravel() * pixel_gain
    template_norm = float(np.linalg.norm(template))

    raw_patterns = _smooth_patterns(latent_dim - 1, height, width, rng)
    columns = [template]
    for i in range(latent_dim - 1):
        residual = raw_patterns[i].copy()
        for col in columns:
            residual -= (residual @ col) / (col @ col) * col
        res_norm = float(np.linalg.norm(residual))
        if res_norm < 1e-8 * float(np.linalg.norm(raw_patterns[i])):
            raise RuntimeError("background pattern degenerated during orthogonalization")
        target_norm = 0.49 * template_norm * 0.85 ** i  # keeps the >= 2x norm gap with margin
        columns.append(residual * (target_norm / res_norm))

    basis = np.empty((height * width, latent_dim))
    basis[:, lesion_axis] = template
    other_axes = [j for j in range(latent_dim) if j != lesion_axis]
    for axis, col in zip(other_axes, columns[1:]):
        basis[:, axis] = col

    generator = GeneratorModel(basis, np.full(height * width, bias_level), height, width)
    direction = np.zeros(latent_dim)
    direction[lesion_axis] = 1.0
    truth = AttributeVector(direction, rank=0, eigenvalue=template_norm ** 2)
    return generator, truth


def lesion_mask(generator: GeneratorModel, lesion_axis: int) -> np.ndarray:
    """Ground-truth lesion footprint of a planted generator (template > 0)."""
    column = generator.basis[:, lesion_axis]
    return (column > 0.0).reshape(generator.height, generator.width)


def sample_abnormal_latents(n: int, latent_dim: int, lesion_axis: int, seed: int,
                            lesion_range: tuple[float, float] = (16.0, 22.0),
                            background_sd: float = 1.0) -> np.ndarray:
    """Query latents with a strong lesion coordinate and modest background coords."""
    rng = np.random.default_rng(seed)
    latents = rng.normal(0.0, background_sd, (n, latent_dim))
    latents[:, lesion_axis] = rng.uniform(*lesion_range, n)
    return latents


def export_dataset(dataset: LabeledDataset, out_dir) -> Path:
    """Write the dataset as PGM files plus a CSV index; returns the index path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    index_path = out / "index.csv"
    with index_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["filename", "label", "mask_filename"])
        for i in range(len(dataset)):
            name = f"img_{i:04d}.pgm"
            write_pgm(out / name, dataset.images[i])
            mask_name = ""
            if dataset.masks is not None:
                mask_name = f"mask_{i:04d}.pgm"
                write_pgm(out / mask_name, dataset.masks[i].astype(np.float64))
            writer.writerow([name, int(dataset.labels[i]), mask_name])
    return index_path
