"""
tests/conftest.py — Shared fixtures.

The demo sentence in data/demo/table1.conll ("Investor focus shifted
quickly, traders said.") carries three predicates and five arguments and
backs most of the small, hand-checkable tests.
"""
import os

import pytest

from src import config, conll_io
from src.synthetic import generate_synthetic_corpus

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


@pytest.fixture(autouse=True)
def _no_srl_env(monkeypatch):
    for name in list(os.environ):
        if name.startswith('SRL_'):
            monkeypatch.delenv(name)


@pytest.fixture
def demo_path():
    return os.path.join(ROOT, config.EXAMPLE_SENTENCE_FILE)


@pytest.fixture
def demo_sentence(demo_path):
    return conll_io.read_corpus(demo_path)[0]


@pytest.fixture
def default_templates_path():
    return os.path.join(ROOT, config.DEFAULT_TEMPLATE_FILE)


@pytest.fixture(scope='session')
def synthetic_corpus():
    return generate_synthetic_corpus(seed=7, n_sentences=200)
