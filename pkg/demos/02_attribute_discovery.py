"""Closed-form attribute discovery and seed-based selection.

Factors the generator's first-layer weights, prints the eigenvalue spectrum,
and shows that matching against a seed/background latent contrast picks out
the planted lesion direction, oriented so traversal removes the lesion.
"""

from cfpath import (
    make_planted_generator,
    sample_abnormal_latents,
    sefa_directions,
    select_attribute,
)

generator, truth = make_planted_generator(latent_dim=8, lesion_axis=0, seed=8)

directions = sefa_directions(generator.first_layer_weights(), 8)
print("discovered directions (eigenvalue spectrum):")
for d in directions:
    overlap = abs(float(d.direction @ truth.direction))
    marker = "  <- planted lesion axis" if overlap > 0.99 else ""
    print(f"  rank {d.rank}: eigenvalue {d.eigenvalue:.5f}, "
          f"|cos| with truth {overlap:.3f}{marker}")

# seeds stand in for expert-chosen abnormal examples; backgrounds lack the lesion
seeds = sample_abnormal_latents(10, 8, 0, seed=21)
backgrounds = sample_abnormal_latents(10, 8, 0, seed=22, lesion_range=(0.0, 0.0))
chosen = select_attribute(directions, list(seeds), list(backgrounds))
print(f"\nselected rank {chosen.rank} by seed contrast; "
      f"|cos| with planted axis = {abs(chosen.direction @ truth.direction):.4f}")

# orientation: +direction points toward the seeds, so w - alpha*direction
# walks away from the lesion
contrast = seeds.mean(axis=0) - backgrounds.mean(axis=0)
print(f"orientation check: direction . contrast = {chosen.direction @ contrast:.2f} (> 0)")
