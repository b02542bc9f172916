"""Counterfactual and semifactual retrieval along an attribute path.

Walks a confident abnormal query toward lesion removal, prints the score at
every step, and points out the two boundary-nearest images: the semifactual
("even with this much change the call stands") and the counterfactual
("this much change flips it").
"""

import numpy as np

from cfpath import (
    build_path,
    make_lesion_dataset,
    make_planted_generator,
    retrieve_contrastives,
    sample_abnormal_latents,
    train_classifier,
)
from cfpath.netpbm import write_pgm
from pathlib import Path

OUT = Path(__file__).parent / "out" / "03_contrastive"
OUT.mkdir(parents=True, exist_ok=True)

dataset = make_lesion_dataset(500, seed=7)
classifier = train_classifier(dataset.subset(np.arange(400)), epochs=100,
                              learning_rate=0.005, seed=9)
generator, attribute = make_planted_generator(latent_dim=8, lesion_axis=0, seed=8)

query = sample_abnormal_latents(1, 8, 0, seed=33)[0]
path = build_path(generator, classifier, query, attribute,
                  alpha_min=0.0, alpha_max=30.0, k=30)
pair = retrieve_contrastives(path)

print("alpha  score   role")
for j in range(len(path)):
    role = ""
    if j == path.query_index:
        role = "query"
    if j == pair.semifactual:
        role = "semifactual (last point still abnormal-side)"
    if j == pair.counterfactual:
        role = "counterfactual (first point on the normal side)"
    print(f"{path.alphas[j]:5.1f}  {path.scores[j]:.4f}  {role}")

for j, tag in ((path.query_index, "query"), (pair.semifactual, "semifactual"),
               (pair.counterfactual, "counterfactual")):
    if j is not None:
        write_pgm(OUT / f"{tag}.pgm", path.images[j])

p = path.scores[path.query_index]
print(f"\nthe query is abnormal with probability {p:.3f}")
if pair.semifactual is not None:
    print(f"even with the attribute reduced by alpha={path.alphas[pair.semifactual]:g} "
          f"the prediction would still be abnormal "
          f"(score {path.scores[pair.semifactual]:.3f})")
if pair.counterfactual is not None:
    print(f"if it were reduced by alpha={path.alphas[pair.counterfactual]:g} "
          f"the prediction would flip to normal "
          f"(score {path.scores[pair.counterfactual]:.3f})")
print(f"images written under {OUT}")
