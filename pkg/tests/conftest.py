import numpy as np
import pytest

from segloss import one_hot


@pytest.fixture
def f1():
    """Four-pixel binary fixture used throughout the suite:
    labels [1,0,0,1], foreground probabilities [.8,.2,.3,.9]."""
    labels = np.array([1, 0, 0, 1])
    s1 = np.array([0.8, 0.2, 0.3, 0.9])
    g = one_hot(labels, 2)
    s = np.stack([1.0 - s1, s1], axis=-1)
    return g, s


@pytest.fixture
def f1_labels():
    return np.array([1, 0, 0, 1])


def random_simplex(rng, shape, num_classes):
    """Strictly interior random probabilities of shape ``shape + (C,)``."""
    s = rng.uniform(0.05, 1.0, size=tuple(shape) + (num_classes,))
    return s / s.sum(axis=-1, keepdims=True)
