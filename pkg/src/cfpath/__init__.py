"""cfpath: contrastive explanations along latent attribute paths.

Builds counterfactual and semifactual images by traversing a generator's
latent space along discovered attribute directions, derives a
directional-difference-weighted saliency map for the query, and scores
saliency methods with Softmax Information Curves. Ships a deterministic
synthetic lesion world so every piece is verifiable at desk scale.
"""

from .attributes import AttributeVector, sefa_directions, select_attribute
from .metrics import MethodComparison, SicCurve, compare_methods, sic_curve
from .models import (
    GeneratorModel,
    LabeledDataset,
    LogisticClassifier,
    MlpClassifier,
    accuracy,
    cross_entropy_loss,
    load_model,
    save_model,
    train_classifier,
)
from .numerics import matvec, sym_eigen
from .saliency import (
    contrastive_saliency,
    contrastive_saliency_raw,
    directional_diff,
    integrated_gradients,
    mean_threshold,
    plain_gradient,
    smoothgrad,
)
from .synthetic import (
    LesionSpec,
    lesion_mask,
    lesion_profile,
    make_lesion_dataset,
    make_planted_generator,
    sample_abnormal_latents,
)
from .traversal import ContrastivePair, TraversalPath, build_path, retrieve_contrastives

__version__ = "0.1.0"

__all__ = [
    "AttributeVector",
    "ContrastivePair",
    "GeneratorModel",
    "LabeledDataset",
    "LesionSpec",
    "LogisticClassifier",
    "MethodComparison",
    "MlpClassifier",
    "SicCurve",
    "TraversalPath",
    "accuracy",
    "build_path",
    "compare_methods",
    "contrastive_saliency",
    "contrastive_saliency_raw",
    "cross_entropy_loss",
    "directional_diff",
    "integrated_gradients",
    "lesion_mask",
    "lesion_profile",
    "load_model",
    "make_lesion_dataset",
    "make_planted_generator",
    "matvec",
    "mean_threshold",
    "plain_gradient",
    "retrieve_contrastives",
    "sample_abnormal_latents",
    "save_model",
    "sefa_directions",
    "select_attribute",
    "sic_curve",
    "smoothgrad",
    "sym_eigen",
    "train_classifier",
    "__version__",
]
