"""TF-IDF vector-space retrieval: index build, cosine top-k search and
Rocchio relevance feedback.

Functions and queries share one vector space so feedback can promote
results similar to accepted candidates and demote ones similar to
rejections.  An externally computed embedding table can be loaded in
place of the TF-IDF weights; everything downstream only needs vectors.
"""

from __future__ import annotations

import json
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import kernels
from .corpus import Corpus, doc_terms, split_identifier

IDF_FLOOR = 0.01  # keeps single-document corpora from producing zero vectors
DEFAULT_TOP_K = 50


class VecSearchError(Exception):
    pass


@dataclass
class Vector:
    """Sparse query/document vector: term_id -> weight, no explicit zeros."""

    entries: dict[int, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.entries = {t: w for t, w in self.entries.items() if w != 0.0}

    def norm(self) -> float:
        return math.sqrt(sum(w * w for w in self.entries.values()))

    def scaled(self, factor: float) -> "Vector":
        return Vector({t: w * factor for t, w in self.entries.items()})

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        if not self.entries:
            return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.float64)
        terms = np.array(sorted(self.entries), dtype=np.int64)
        weights = np.array([self.entries[int(t)] for t in terms], dtype=np.float64)
        return terms, weights


@dataclass
class RankedResults:
    """Ranked (function_id, cosine score) pairs plus the query vector that
    produced them.  Scores are non-increasing; ties break by id."""

    entries: list[tuple[str, float]]
    query_vector: Vector

    def __post_init__(self) -> None:
        for (_, a), (_, b) in zip(self.entries, self.entries[1:]):
            if b > a + 1e-12:
                raise VecSearchError("ranked scores must be non-increasing")

    def ids(self) -> list[str]:
        return [fid for fid, _ in self.entries]

    def rank_of(self, function_id: str) -> int | None:
        for rank, (fid, _) in enumerate(self.entries, start=1):
            if fid == function_id:
                return rank
        return None


@dataclass(frozen=True)
class RocchioParams:
    alpha: float = 1.0
    beta: float = 6.0
    gamma: float = 1.0

    def __post_init__(self) -> None:
        if self.alpha <= 0:
            raise VecSearchError("rocchio alpha must be positive")
        if self.beta < 0 or self.gamma < 0:
            raise VecSearchError("rocchio weights must be non-negative")


@dataclass
class Index:
    terms: list[str]
    idf: np.ndarray
    doc_ids: list[str]
    indptr: np.ndarray
    indices: np.ndarray
    data: np.ndarray
    k_default: int = DEFAULT_TOP_K
    term_ids: dict[str, int] = field(init=False, repr=False)
    doc_pos: dict[str, int] = field(init=False, repr=False)
    term_ptr: np.ndarray = field(init=False, repr=False)
    term_docs: np.ndarray = field(init=False, repr=False)
    term_weights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self.term_ids = {t: i for i, t in enumerate(self.terms)}
        self.doc_pos = {d: i for i, d in enumerate(self.doc_ids)}
        self._build_postings()

    def _build_postings(self) -> None:
        n_terms = len(self.terms)
        counts = np.bincount(self.indices, minlength=n_terms)
        self.term_ptr = np.zeros(n_terms + 1, dtype=np.int64)
        np.cumsum(counts, out=self.term_ptr[1:])
        self.term_docs = np.zeros(len(self.indices), dtype=np.int64)
        self.term_weights = np.zeros(len(self.data), dtype=np.float64)
        cursor = self.term_ptr[:-1].copy()
        for doc in range(len(self.doc_ids)):
            for j in range(self.indptr[doc], self.indptr[doc + 1]):
                t = self.indices[j]
                self.term_docs[cursor[t]] = doc
                self.term_weights[cursor[t]] = self.data[j]
                cursor[t] += 1

    def doc_vector(self, function_id: str) -> Vector:
        pos = self.doc_pos[function_id]
        lo, hi = self.indptr[pos], self.indptr[pos + 1]
        return Vector({int(t): float(w) for t, w in zip(self.indices[lo:hi], self.data[lo:hi])})


def _text_terms(text: str) -> list[str]:
    terms: list[str] = []
    for word in re.findall(r"[0-9A-Za-z_]+", text):
        terms.extend(split_identifier(word))
    return terms


def build_index(corpus: Corpus) -> Index:
    """Build a TF-IDF index: TF = ln(1+count), IDF = ln(N/df) floored at
    0.01, document vectors L2-normalized."""
    if len(corpus) == 0:
        raise VecSearchError("cannot index an empty corpus")
    doc_counts = [Counter(doc_terms(doc)) for doc in corpus]
    vocab = sorted({t for counts in doc_counts for t in counts})
    term_ids = {t: i for i, t in enumerate(vocab)}
    df = np.zeros(len(vocab), dtype=np.int64)
    for counts in doc_counts:
        for term in counts:
            df[term_ids[term]] += 1
    n_docs = len(corpus)
    idf = np.maximum(np.log(n_docs / df), IDF_FLOOR)

    indptr = [0]
    indices: list[int] = []
    data: list[float] = []
    for counts in doc_counts:
        row = sorted((term_ids[t], math.log1p(c)) for t, c in counts.items())
        weights = np.array([tf * idf[t] for t, tf in row], dtype=np.float64)
        norm = np.linalg.norm(weights)
        if norm > 0:
            weights /= norm
        indices.extend(t for t, _ in row)
        data.extend(weights.tolist())
        indptr.append(len(indices))
    return Index(
        terms=vocab,
        idf=idf,
        doc_ids=[doc.id for doc in corpus],
        indptr=np.array(indptr, dtype=np.int64),
        indices=np.array(indices, dtype=np.int64),
        data=np.array(data, dtype=np.float64),
    )


def embed_query(index: Index, text: str) -> Vector:
    counts = Counter(t for t in _text_terms(text) if t in index.term_ids)
    return Vector({
        index.term_ids[t]: math.log1p(c) * float(index.idf[index.term_ids[t]])
        for t, c in counts.items()
    })


def _cosine_scores(index: Index, query_vec: Vector) -> np.ndarray:
    q_terms, q_weights = query_vec.arrays()
    scores = kernels.accumulate_scores(
        q_terms, q_weights, index.term_ptr, index.term_docs, index.term_weights,
        len(index.doc_ids),
    )
    qnorm = query_vec.norm()
    return scores / qnorm if qnorm > 0 else scores


def _ranked(doc_ids: list[str], scores: dict[str, float], query_vec: Vector, k: int) -> RankedResults:
    order = sorted(doc_ids, key=lambda fid: (-scores[fid], fid))
    return RankedResults(
        entries=[(fid, scores[fid]) for fid in order[:k]],
        query_vector=query_vec,
    )


def search(index: Index, query_vec: Vector, k: int = DEFAULT_TOP_K) -> RankedResults:
    """Top-k documents by cosine similarity, ties broken by function id."""
    if k < 1:
        raise VecSearchError("k must be >= 1")
    scores = _cosine_scores(index, query_vec)
    by_id = {fid: float(scores[i]) for i, fid in enumerate(index.doc_ids)}
    return _ranked(index.doc_ids, by_id, query_vec, k)


def rerank(index: Index, query_vec: Vector, doc_ids: list[str]) -> RankedResults:
    """Re-sort a fixed result set by cosine against a new query vector.

    No result is dropped; this is the feedback path, which promotes and
    demotes but never filters.
    """
    scores = _cosine_scores(index, query_vec)
    by_id = {fid: float(scores[index.doc_pos[fid]]) for fid in doc_ids}
    return _ranked(doc_ids, by_id, query_vec, len(doc_ids))


def rocchio(
    qv: Vector,
    candidates: set[str],
    rejects: set[str],
    p: RocchioParams,
    index: Index,
) -> Vector:
    """Shift the query vector toward candidate documents and away from
    rejected ones: ``alpha*q + beta*mean(candidates) - gamma*mean(rejects)``.

    Negative weights are clamped to zero; the result is intentionally not
    normalized (cosine ranking is scale-invariant).
    """
    if candidates & rejects:
        raise VecSearchError("candidates and rejects must be disjoint")
    n_terms = len(index.terms)
    acc = np.zeros(n_terms, dtype=np.float64)
    for t, w in qv.entries.items():
        acc[t] += p.alpha * w
    if candidates and p.beta > 0:
        rows = np.array(sorted(index.doc_pos[c] for c in candidates), dtype=np.int64)
        acc += (p.beta / len(rows)) * kernels.sum_rows(
            index.indptr, index.indices, index.data, rows, n_terms)
    if rejects and p.gamma > 0:
        rows = np.array(sorted(index.doc_pos[r] for r in rejects), dtype=np.int64)
        acc -= (p.gamma / len(rows)) * kernels.sum_rows(
            index.indptr, index.indices, index.data, rows, n_terms)
    np.maximum(acc, 0.0, out=acc)
    nz = np.nonzero(acc)[0]
    return Vector({int(t): float(acc[t]) for t in nz})


def index_from_embeddings(doc_ids: list[str], vectors: np.ndarray) -> Index:
    """Wrap externally computed dense embeddings (one row per document) as
    an Index, so retrieval and feedback run unchanged on any vector space.

    Dimension labels stand in for vocabulary terms; rows are L2-normalized.
    """
    if vectors.ndim != 2 or vectors.shape[0] != len(doc_ids):
        raise VecSearchError("need one embedding row per document id")
    n_docs, dims = vectors.shape
    norms = np.linalg.norm(vectors, axis=1)
    norms[norms == 0] = 1.0
    dense = np.ascontiguousarray(vectors / norms[:, None], dtype=np.float64)
    indptr = np.arange(0, (n_docs + 1) * dims, dims, dtype=np.int64)
    indices = np.tile(np.arange(dims, dtype=np.int64), n_docs)
    return Index(
        terms=[f"dim{i:04d}" for i in range(dims)],
        idf=np.ones(dims),
        doc_ids=list(doc_ids),
        indptr=indptr,
        indices=indices,
        data=dense.ravel(),
    )


def load_embedding_file(path: str | Path) -> Index:
    """Load a JSONL embedding table (``{"id": ..., "vector": [...]}``) as an
    Index; the alternative to TF-IDF when an external model embeds the
    corpus."""
    doc_ids: list[str] = []
    rows: list[list[float]] = []
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise VecSearchError(f"cannot read embedding file {path}: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
            doc_ids.append(str(record["id"]))
            rows.append([float(x) for x in record["vector"]])
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise VecSearchError(f"embedding file line {lineno}: {exc}") from exc
    if not rows:
        raise VecSearchError(f"embedding file {path} is empty")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise VecSearchError("embedding rows must share one dimension")
    return index_from_embeddings(doc_ids, np.array(rows, dtype=np.float64))


def save_index(index: Index, directory: str | Path) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    np.savez_compressed(
        directory / "vectors.npz",
        idf=index.idf, indptr=index.indptr, indices=index.indices, data=index.data,
    )
    meta = {"terms": index.terms, "doc_ids": index.doc_ids, "k_default": index.k_default}
    (directory / "meta.json").write_text(json.dumps(meta), encoding="utf-8")


def load_index(directory: str | Path) -> Index:
    directory = Path(directory)
    try:
        meta = json.loads((directory / "meta.json").read_text(encoding="utf-8"))
        arrays = np.load(directory / "vectors.npz")
    except OSError as exc:
        raise VecSearchError(f"cannot load index from {directory}: {exc}") from exc
    return Index(
        terms=meta["terms"],
        idf=arrays["idf"],
        doc_ids=meta["doc_ids"],
        indptr=arrays["indptr"],
        indices=arrays["indices"],
        data=arrays["data"],
        k_default=meta.get("k_default", DEFAULT_TOP_K),
    )
