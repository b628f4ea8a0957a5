import os

import numpy as np
import pytest

import stataudit

FIXTURES = os.path.join(os.path.dirname(stataudit.__file__), "fixtures")


@pytest.fixture
def fixtures_dir():
    return FIXTURES


@pytest.fixture
def demo_corpus_dir():
    return os.path.join(FIXTURES, "demo")


@pytest.fixture
def exclusion_corpus_dir():
    return os.path.join(FIXTURES, "exclusion")


@pytest.fixture
def single_corpus_dir():
    return os.path.join(FIXTURES, "single")


@pytest.fixture
def rng():
    return np.random.default_rng(20260822)
