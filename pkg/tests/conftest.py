"""Shared fixtures: the desk-scale lesion world, trained once per session."""

from __future__ import annotations

import numpy as np
import pytest

from cfpath import make_lesion_dataset, make_planted_generator, train_classifier

HEIGHT = WIDTH = 64
LATENT_DIM = 8
LESION_AXIS = 0
DATASET_SEED = 7
GENERATOR_SEED = 8
TRAIN_SEED = 9


@pytest.fixture(scope="session")
def lesion_dataset():
    return make_lesion_dataset(500, HEIGHT, WIDTH, seed=DATASET_SEED)


@pytest.fixture(scope="session")
def dataset_split(lesion_dataset):
    n = len(lesion_dataset)
    train = lesion_dataset.subset(np.arange(0, n - 100))
    holdout = lesion_dataset.subset(np.arange(n - 100, n))
    return train, holdout


@pytest.fixture(scope="session")
def trained_classifier(dataset_split):
    train, _ = dataset_split
    return train_classifier(train, epochs=100, learning_rate=0.005, seed=TRAIN_SEED)


@pytest.fixture(scope="session")
def planted():
    """(generator, ground-truth attribute) with the lesion on axis 0."""
    return make_planted_generator(LATENT_DIM, HEIGHT, WIDTH,
                                  lesion_axis=LESION_AXIS, seed=GENERATOR_SEED)
