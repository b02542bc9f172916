"""Four saliency maps on the same query, with a localization scorecard.

The contrastive map weights gradients by how much each path neighbor differs
from the query, so it concentrates on the traversed attribute; the baselines
(integrated gradients, SmoothGrad, plain gradient) see the whole weight
landscape. The scorecard reports how much of each map's mass lands inside the
true lesion footprint.
"""

import numpy as np
from scipy.ndimage import binary_dilation

from cfpath import (
    build_path,
    contrastive_saliency,
    integrated_gradients,
    make_lesion_dataset,
    make_planted_generator,
    plain_gradient,
    retrieve_contrastives,
    sample_abnormal_latents,
    smoothgrad,
    train_classifier,
)
from cfpath.saliency import normalize_max
from cfpath.synthetic import lesion_mask
from cfpath.netpbm import write_pgm, write_ppm
from pathlib import Path

OUT = Path(__file__).parent / "out" / "04_saliency"
OUT.mkdir(parents=True, exist_ok=True)

dataset = make_lesion_dataset(500, seed=7)
classifier = train_classifier(dataset.subset(np.arange(400)), epochs=100,
                              learning_rate=0.005, seed=9)
generator, attribute = make_planted_generator(latent_dim=8, lesion_axis=0, seed=8)

query_latent = sample_abnormal_latents(1, 8, 0, seed=44)[0]
path = build_path(generator, classifier, query_latent, attribute, 0.0, 30.0, 30)
pair = retrieve_contrastives(path)
query = path.query_image

# counterfactual as the integration baseline: it marks absence of the lesion,
# not absence of all signal
baseline = path.images[pair.counterfactual] if pair.counterfactual is not None \
    else np.zeros_like(query)

maps = {
    "contrastive": contrastive_saliency(classifier, path),
    "integrated_gradients": integrated_gradients(classifier, query, baseline, steps=128),
    "smoothgrad": smoothgrad(classifier, query, noise_sd=0.1, samples=25, seed=5),
    "gradient": plain_gradient(classifier, query),
}

mask = binary_dilation(lesion_mask(generator, 0), iterations=2)
write_pgm(OUT / "query.pgm", query)
print(f"{'method':22s} mass inside lesion footprint")
for name, smap in maps.items():
    write_pgm(OUT / f"{name}.pgm", normalize_max(smap))
    frac = smap[mask].sum() / smap.sum()
    print(f"{name:22s} {frac:.3f}")

# composite: query in gray, contrastive saliency pushed into the red channel
s = normalize_max(maps["contrastive"])
rgb = np.stack([np.maximum(query, s), query * (1 - 0.8 * s), query * (1 - 0.8 * s)], axis=-1)
write_ppm(OUT / "composite.ppm", np.clip(rgb, 0.0, 1.0))
print(f"maps and composite written under {OUT}")
