from __future__ import annotations

import numpy as np
import pytest

from cqsearch.corpus import Corpus, FunctionDoc, load_corpus
from cqsearch.lexicon import load_lexicon
from cqsearch.lsi import default_dims, lsi_fit
from cqsearch.session import SearchContext
from cqsearch.vecsearch import build_index


def data_path(*parts: str) -> str:
    from importlib import resources

    return str(resources.files("cqsearch").joinpath("data", *parts))


@pytest.fixture(scope="session")
def lexicon():
    return load_lexicon()


@pytest.fixture(scope="session")
def fig4_ctx(lexicon):
    corpus = load_corpus(data_path("fig4", "corpus.jsonl"))
    index = build_index(corpus)
    return SearchContext(corpus=corpus, index=index, lexicon=lexicon,
                         lsi_model=lsi_fit(index, default_dims(index)))


@pytest.fixture(scope="session")
def toy_ctx(lexicon):
    corpus = load_corpus(data_path("toy", "corpus.jsonl"))
    index = build_index(corpus)
    return SearchContext(corpus=corpus, index=index, lexicon=lexicon,
                         lsi_model=lsi_fit(index, default_dims(index)))


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """JIT-compile the scoring kernels once so timed tests measure steady
    state, not compilation."""
    from cqsearch import kernels

    kernels.accumulate_scores(
        np.array([0], dtype=np.int64), np.array([1.0]),
        np.array([0, 1], dtype=np.int64), np.array([0], dtype=np.int64),
        np.array([1.0]), 1)
    kernels.sum_rows(
        np.array([0, 1], dtype=np.int64), np.array([0], dtype=np.int64),
        np.array([1.0]), np.array([0], dtype=np.int64), 1)


def make_doc(fid: str, name: str, comment: str = "") -> FunctionDoc:
    return FunctionDoc(id=fid, name=name, comment=comment)


def make_corpus(*docs: FunctionDoc) -> Corpus:
    return Corpus(docs=list(docs))
