from __future__ import annotations

import time

import pytest

from corpusgen import generate_corpus
from ordo.learn import LearnConfig, learn_model


class LearnedCorpus:
    """A planted corpus, the model learned from it, and held-out files."""

    def __init__(self, planted, result, held, elapsed):
        self.planted = planted
        self.result = result
        self.model = result.model
        self.held = held
        self.elapsed = elapsed


@pytest.fixture(scope="session")
def ordered_corpus(tmp_path_factory) -> LearnedCorpus:
    root = tmp_path_factory.mktemp("ordered")
    planted = generate_corpus(root / "train", 24, seed=11, ordered=True)
    t0 = time.perf_counter()
    result = learn_model(LearnConfig(corpus_root=root / "train"))
    elapsed = time.perf_counter() - t0
    held = generate_corpus(root / "held", 10, seed=77, ordered=True)
    return LearnedCorpus(planted, result, held, elapsed)


@pytest.fixture(scope="session")
def unordered_corpus(tmp_path_factory) -> LearnedCorpus:
    root = tmp_path_factory.mktemp("unordered")
    planted = generate_corpus(root / "train", 24, seed=31, ordered=False)
    t0 = time.perf_counter()
    result = learn_model(LearnConfig(corpus_root=root / "train"))
    elapsed = time.perf_counter() - t0
    held = generate_corpus(root / "held", 8, seed=99, ordered=False)
    return LearnedCorpus(planted, result, held, elapsed)
