import numpy as np
import pytest

from orbitmap.synthetic import smooth_raster_corpus, smooth_scene_corpus


@pytest.fixture(scope="session")
def scenes20():
    return smooth_scene_corpus(20, seed=1234)


@pytest.fixture(scope="session")
def corpus50():
    return smooth_raster_corpus(50, 32, seed=123)


@pytest.fixture()
def rng():
    return np.random.default_rng(2024)
