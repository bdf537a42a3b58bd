import random

import pytest

from rwkit.synth import SynthConfig, make_labeled_corpus


@pytest.fixture
def rng():
    return random.Random(12345)


@pytest.fixture(scope="session")
def small_corpus():
    return make_labeled_corpus(SynthConfig(seed=42, n_paragraphs=24))
