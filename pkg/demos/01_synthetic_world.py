"""The deterministic desk-scale world: lesion dataset, planted generator, classifier.

Builds every fixture the other demos rely on, exports a few images so you can
look at them, and checks that the classifier actually learned the lesion.
"""

import numpy as np

from cfpath import (
    accuracy,
    make_lesion_dataset,
    make_planted_generator,
    sample_abnormal_latents,
    train_classifier,
)
from cfpath.netpbm import write_pgm
from cfpath.synthetic import export_dataset, lesion_mask
from pathlib import Path

OUT = Path(__file__).parent / "out" / "01_synthetic_world"
OUT.mkdir(parents=True, exist_ok=True)

# ---- a labeled dataset with ground-truth masks -----------------------------
dataset = make_lesion_dataset(500, seed=7)
print(f"dataset: {len(dataset)} images {dataset.height}x{dataset.width}, "
      f"{int(dataset.labels.sum())} with lesions")

export_dataset(dataset.subset(np.arange(8)), OUT / "samples")
print(f"first 8 images + masks exported under {OUT / 'samples'}")

# ---- train the reference classifier ----------------------------------------
train_set = dataset.subset(np.arange(400))
holdout = dataset.subset(np.arange(400, 500))
classifier = train_classifier(train_set, epochs=100, learning_rate=0.005, seed=9)
print(f"logistic classifier: held-out accuracy {accuracy(classifier, holdout):.3f}")

# ---- the planted generator --------------------------------------------------
generator, truth = make_planted_generator(latent_dim=8, lesion_axis=0, seed=8)
print(f"generator: latent dim {generator.latent_dim}, "
      f"lesion axis 0, template norm^2 = {truth.eigenvalue:.4f}")

# latent coordinate 0 -> flat background; large coordinate -> bright lesion
for coord in (0.0, 10.0, 20.0):
    w = np.zeros(generator.latent_dim)
    w[0] = coord
    img = generator.generate(w)
    write_pgm(OUT / f"generated_lesion_{int(coord):02d}.pgm", img)
    mask = lesion_mask(generator, 0)
    print(f"  lesion coordinate {coord:5.1f}: disk mean {img[mask].mean():.3f} "
          f"vs background {img[~mask].mean():.3f}, "
          f"classifier score {classifier.classify(img):.3f}")

# a realistic abnormal query mixes background structure with a strong lesion
query = sample_abnormal_latents(1, generator.latent_dim, 0, seed=42)[0]
write_pgm(OUT / "query.pgm", generator.generate(query))
print(f"sample abnormal query scored {classifier.classify(generator.generate(query)):.3f}; "
      f"image at {OUT / 'query.pgm'}")
