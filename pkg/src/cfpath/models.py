"""Reference generator and classifiers with exact analytic input-gradients.

The generator is affine-plus-clamp: image = clamp(basis @ w + bias, 0, 1).
That keeps it deterministic, exposes a first-layer weight matrix for
closed-form attribute factorization, and makes every downstream property
checkable by hand. Classifiers are a logistic unit and a one-hidden-layer
ReLU MLP, both with closed-form input gradients.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.special import expit

log = logging.getLogger(__name__)

LOGISTIC = "logistic"
ONE_HIDDEN_LAYER = "one-hidden-layer"


def _freeze(*arrays: np.ndarray) -> None:
    for a in arrays:
        a.setflags(write=False)


def _check_image(x, height: int, width: int) -> np.ndarray:
    img = np.asarray(x, dtype=np.float64)
    if img.shape != (height, width):
        raise ValueError(f"image shape {img.shape} does not match model dims ({height}, {width})")
    return img


@dataclass(frozen=True)
class GeneratorModel:
    """Affine generator from latent space to clamped grayscale images."""

    basis: np.ndarray  # (height*width, latent_dim)
    bias: np.ndarray  # (height*width,)
    height: int
    width: int

    def __post_init__(self):
        basis = np.asarray(self.basis, dtype=np.float64)
        bias = np.asarray(self.bias, dtype=np.float64)
        n_pixels = self.height * self.width
        if basis.ndim != 2 or basis.shape[0] != n_pixels:
            raise ValueError(f"basis shape {basis.shape} incompatible with {self.height}x{self.width} images")
        if bias.shape != (n_pixels,):
            raise ValueError(f"bias shape {bias.shape}, expected ({n_pixels},)")
        if not (np.all(np.isfinite(basis)) and np.all(np.isfinite(bias))):
            raise ValueError("generator weights must be finite")
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "bias", bias)
        _freeze(basis, bias)

    @property
    def latent_dim(self) -> int:
        return self.basis.shape[1]

    def generate(self, w) -> np.ndarray:
        """clamp(basis @ w + bias, 0, 1), reshaped to (height, width)."""
        latent = np.asarray(w, dtype=np.float64)
        if latent.shape != (self.latent_dim,):
            raise ValueError(f"latent has dim {latent.shape}, generator expects ({self.latent_dim},)")
        flat = self.basis @ latent + self.bias
        return np.clip(flat, 0.0, 1.0).reshape(self.height, self.width)

    def first_layer_weights(self) -> np.ndarray:
        """The basis matrix, read-only; input to attribute factorization."""
        return self.basis


@dataclass(frozen=True)
class LogisticClassifier:
    weights: np.ndarray  # (height*width,)
    bias: float
    height: int
    width: int
    architecture: str = field(default=LOGISTIC, init=False)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        if w.shape != (self.height * self.width,):
            raise ValueError(f"weights shape {w.shape}, expected ({self.height * self.width},)")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "bias", float(self.bias))
        _freeze(w)

    def logit(self, x) -> float:
        img = _check_image(x, self.height, self.width)
        return float(self.weights @ img.ravel() + self.bias)

    def classify(self, x) -> float:
        return float(expit(self.logit(x)))

    def input_gradient(self, x) -> np.ndarray:
        p = self.classify(x)
        return (p * (1.0 - p) * self.weights).reshape(self.height, self.width)


@dataclass(frozen=True)
class MlpClassifier:
    w1: np.ndarray  # (hidden, height*width)
    b1: np.ndarray  # (hidden,)
    w2: np.ndarray  # (hidden,)
    b2: float
    height: int
    width: int
    architecture: str = field(default=ONE_HIDDEN_LAYER, init=False)

    def __post_init__(self):
        w1 = np.asarray(self.w1, dtype=np.float64)
        b1 = np.asarray(self.b1, dtype=np.float64)
        w2 = np.asarray(self.w2, dtype=np.float64)
        n_pixels = self.height * self.width
        if w1.ndim != 2 or w1.shape[1] != n_pixels:
            raise ValueError(f"w1 shape {w1.shape} incompatible with {n_pixels} pixels")
        hidden = w1.shape[0]
        if b1.shape != (hidden,) or w2.shape != (hidden,):
            raise ValueError("hidden-layer shapes disagree")
        object.__setattr__(self, "w1", w1)
        object.__setattr__(self, "b1", b1)
        object.__setattr__(self, "w2", w2)
        object.__setattr__(self, "b2", float(self.b2))
        _freeze(w1, b1, w2)

    @property
    def hidden_width(self) -> int:
        return self.w1.shape[0]

    def logit(self, x) -> float:
        img = _check_image(x, self.height, self.width)
        pre = self.w1 @ img.ravel() + self.b1
        return float(self.w2 @ np.maximum(pre, 0.0) + self.b2)

    def classify(self, x) -> float:
        return float(expit(self.logit(x)))

    def input_gradient(self, x) -> np.ndarray:
        img = _check_image(x, self.height, self.width)
        pre = self.w1 @ img.ravel() + self.b1
        active = pre > 0.0  # ReLU subgradient 0 at the kink
        p = float(expit(self.w2 @ np.maximum(pre, 0.0) + self.b2))
        grad_flat = p * (1.0 - p) * (self.w1.T @ (self.w2 * active))
        return grad_flat.reshape(self.height, self.width)


Classifier = LogisticClassifier | MlpClassifier


@dataclass(frozen=True)
class LabeledDataset:
    """Binary-labeled image set with optional per-image ground-truth masks."""

    images: np.ndarray  # (n, height, width) in [0, 1]
    labels: np.ndarray  # (n,) in {0, 1}
    masks: np.ndarray | None = None  # (n, height, width) bool

    def __post_init__(self):
        images = np.asarray(self.images, dtype=np.float64)
        labels = np.asarray(self.labels, dtype=np.int64)
        if images.ndim != 3 or images.shape[0] == 0:
            raise ValueError("dataset must be a nonempty (n, height, width) stack")
        if labels.shape != (images.shape[0],):
            raise ValueError("labels length must match image count")
        if not np.all((labels == 0) | (labels == 1)):
            raise ValueError("labels must be 0 or 1")
        object.__setattr__(self, "images", images)
        object.__setattr__(self, "labels", labels)
        if self.masks is not None:
            masks = np.asarray(self.masks, dtype=bool)
            if masks.shape != images.shape:
                raise ValueError("masks must match image stack shape")
            object.__setattr__(self, "masks", masks)

    def __len__(self) -> int:
        return self.images.shape[0]

    @property
    def height(self) -> int:
        return self.images.shape[1]

    @property
    def width(self) -> int:
        return self.images.shape[2]

    def subset(self, indices) -> "LabeledDataset":
        idx = np.asarray(indices)
        masks = self.masks[idx] if self.masks is not None else None
        return LabeledDataset(self.images[idx], self.labels[idx], masks)


def _init_classifier(architecture: str, height: int, width: int, hidden: int,
                     rng: np.random.Generator) -> Classifier:
    # Uniform(-0.01, 0.01) initialization; draw order is part of the contract
    # because epochs=0 must return exactly this model.
    n_pixels = height * width
    if architecture == LOGISTIC:
        weights = rng.uniform(-0.01, 0.01, n_pixels)
        bias = float(rng.uniform(-0.01, 0.01))
        return LogisticClassifier(weights, bias, height, width)
    if architecture == ONE_HIDDEN_LAYER:
        w1 = rng.uniform(-0.01, 0.01, (hidden, n_pixels))
        b1 = rng.uniform(-0.01, 0.01, hidden)
        w2 = rng.uniform(-0.01, 0.01, hidden)
        b2 = float(rng.uniform(-0.01, 0.01))
        return MlpClassifier(w1, b1, w2, b2, height, width)
    raise ValueError(f"unknown architecture {architecture!r}")


def cross_entropy_loss(model: Classifier, data: LabeledDataset) -> float:
    """Mean binary cross-entropy of the model on the dataset."""
    scores = np.array([model.classify(img) for img in data.images])
    y = data.labels.astype(np.float64)
    eps = 1e-12
    return float(-np.mean(y * np.log(scores + eps) + (1.0 - y) * np.log(1.0 - scores + eps)))


def accuracy(model: Classifier, data: LabeledDataset) -> float:
    scores = np.array([model.classify(img) for img in data.images])
    return float(np.mean((scores > 0.5).astype(np.int64) == data.labels))


def train_classifier(data: LabeledDataset, epochs: int, learning_rate: float, seed: int,
                     architecture: str = LOGISTIC, hidden: int = 16,
                     batch_size: int = 32) -> Classifier:
    """Mini-batch gradient descent on cross-entropy; deterministic given seed.

    epochs=0 returns the seeded initialization unchanged. Raises ValueError if
    the dataset does not contain both classes.
    """
    if not (np.any(data.labels == 0) and np.any(data.labels == 1)):
        raise ValueError("training requires both classes present in the dataset")
    rng = np.random.default_rng(seed)
    height, width = data.height, data.width
    model = _init_classifier(architecture, height, width, hidden, rng)

    n = len(data)
    x_flat = data.images.reshape(n, -1)
    y = data.labels.astype(np.float64)

    if architecture == LOGISTIC:
        w = model.weights.copy()
        b = model.bias
        for _ in range(epochs):
            order = rng.permutation(n)
            for start in range(0, n, batch_size):
                idx = order[start:start + batch_size]
                xb, yb = x_flat[idx], y[idx]
                p = expit(xb @ w + b)
                dz = (p - yb) / idx.size
                w = w - learning_rate * (xb.T @ dz)
                b = b - learning_rate * float(np.sum(dz))
        model = LogisticClassifier(w, b, height, width)
    else:
        w1, b1 = model.w1.copy(), model.b1.copy()
        w2, b2 = model.w2.copy(), model.b2
        for _ in range(epochs):
            order = rng.permutation(n)
            for start in range(0, n, batch_size):
                idx = order[start:start + batch_size]
                xb, yb = x_flat[idx], y[idx]
                pre = xb @ w1.T + b1  # (batch, hidden)
                act = np.maximum(pre, 0.0)
                p = expit(act @ w2 + b2)
                dz2 = (p - yb) / idx.size  # (batch,)
                grad_w2 = act.T @ dz2
                grad_b2 = float(np.sum(dz2))
                dhidden = np.outer(dz2, w2) * (pre > 0.0)
                grad_w1 = dhidden.T @ xb
                grad_b1 = dhidden.sum(axis=0)
                w1 = w1 - learning_rate * grad_w1
                b1 = b1 - learning_rate * grad_b1
                w2 = w2 - learning_rate * grad_w2
                b2 = b2 - learning_rate * grad_b2
        model = MlpClassifier(w1, b1, w2, b2, height, width)

    log.info("train_classifier: final training loss %.6f", cross_entropy_loss(model, data))
    return model


# --- JSON persistence ------------------------------------------------------
# Flat decimal lists; repr-based float serialization round-trips exactly, so
# reloaded models reproduce classify outputs bit-for-bit.

def model_to_dict(model) -> dict:
    if isinstance(model, GeneratorModel):
        return {
            "kind": "generator",
            "height": model.height,
            "width": model.width,
            "latent_dim": model.latent_dim,
            "basis": model.basis.ravel().tolist(),
            "bias": model.bias.tolist(),
        }
    if isinstance(model, LogisticClassifier):
        return {
            "kind": "classifier",
            "architecture": LOGISTIC,
            "height": model.height,
            "width": model.width,
            "weights": model.weights.tolist(),
            "bias": model.bias,
        }
    if isinstance(model, MlpClassifier):
        return {
            "kind": "classifier",
            "architecture": ONE_HIDDEN_LAYER,
            "height": model.height,
            "width": model.width,
            "hidden": model.hidden_width,
            "w1": model.w1.ravel().tolist(),
            "b1": model.b1.tolist(),
            "w2": model.w2.tolist(),
            "b2": model.b2,
        }
    raise TypeError(f"cannot serialize {type(model).__name__}")


def model_from_dict(doc: dict):
    kind = doc.get("kind")
    if kind == "generator":
        height, width, d = doc["height"], doc["width"], doc["latent_dim"]
        basis = np.array(doc["basis"], dtype=np.float64).reshape(height * width, d)
        return GeneratorModel(basis, np.array(doc["bias"], dtype=np.float64), height, width)
    if kind == "classifier":
        arch = doc["architecture"]
        height, width = doc["height"], doc["width"]
        if arch == LOGISTIC:
            return LogisticClassifier(np.array(doc["weights"], dtype=np.float64),
                                      doc["bias"], height, width)
        if arch == ONE_HIDDEN_LAYER:
            hidden = doc["hidden"]
            w1 = np.array(doc["w1"], dtype=np.float64).reshape(hidden, height * width)
            return MlpClassifier(w1, np.array(doc["b1"], dtype=np.float64),
                                 np.array(doc["w2"], dtype=np.float64), doc["b2"],
                                 height, width)
        raise ValueError(f"unknown architecture {arch!r}")
    raise ValueError(f"unknown model kind {kind!r}")


def save_model(model, path) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model), sort_keys=True))


def load_model(path):
    return model_from_dict(json.loads(Path(path).read_text()))
