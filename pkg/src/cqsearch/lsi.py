"""Latent semantic indexing over the TF-IDF term-document matrix.

The truncated SVD comes from randomized subspace iteration with a fixed
seed, so keyword pools are reproducible run to run.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .vecsearch import Index

LSI_SEED = 13
POWER_ITERATIONS = 4
OVERSAMPLE = 8
DEFAULT_KEYWORD_COUNT = 25


def default_dims(index) -> int:
    """Truncation rank used when the caller does not pick one."""
    return max(1, min(64, len(index.doc_ids), len(index.terms)))


class LsiError(Exception):
    pass


@dataclass
class LsiModel:
    dims: int
    term_loadings: np.ndarray  # |vocab| x dims, rows are U * sigma
    singular_values: np.ndarray
    basis: np.ndarray  # |vocab| x dims orthonormal (left singular vectors)


def _term_doc_matrix(index: Index) -> np.ndarray:
    matrix = np.zeros((len(index.terms), len(index.doc_ids)), dtype=np.float64)
    for doc in range(len(index.doc_ids)):
        lo, hi = index.indptr[doc], index.indptr[doc + 1]
        matrix[index.indices[lo:hi], doc] = index.data[lo:hi]
    return matrix


def lsi_fit(index: Index, dims: int, seed: int = LSI_SEED) -> LsiModel:
    """Rank-``dims`` truncated SVD of the term-document matrix."""
    n_terms, n_docs = len(index.terms), len(index.doc_ids)
    if dims < 1 or dims > min(n_terms, n_docs):
        raise LsiError(f"dims must be in [1, {min(n_terms, n_docs)}], got {dims}")
    matrix = _term_doc_matrix(index)
    rng = np.random.default_rng(seed)
    width = min(dims + OVERSAMPLE, n_docs)
    sketch = matrix @ rng.standard_normal((n_docs, width))
    basis, _ = np.linalg.qr(sketch)
    for _ in range(POWER_ITERATIONS):
        basis, _ = np.linalg.qr(matrix.T @ basis)
        basis, _ = np.linalg.qr(matrix @ basis)
    projected = basis.T @ matrix
    u_small, sigma, _ = np.linalg.svd(projected, full_matrices=False)
    u = (basis @ u_small)[:, :dims]
    sigma = sigma[:dims]
    return LsiModel(
        dims=dims,
        term_loadings=u * sigma,
        singular_values=sigma,
        basis=u,
    )


def lsi_keywords(
    model: LsiModel,
    results: list[str],
    index: Index,
    m: int = DEFAULT_KEYWORD_COUNT,
) -> list[str]:
    """The ``m`` result-set terms with the largest loading magnitude inside
    the subspace spanned by the result documents' LSI representations."""
    if not results:
        raise LsiError("keyword extraction needs a non-empty result list")
    positions = [index.doc_pos[fid] for fid in results]
    eligible: set[int] = set()
    doc_reps = np.zeros((len(positions), model.dims), dtype=np.float64)
    for row, pos in enumerate(positions):
        lo, hi = index.indptr[pos], index.indptr[pos + 1]
        eligible.update(int(t) for t in index.indices[lo:hi])
        doc_reps[row] = model.basis[index.indices[lo:hi]].T @ index.data[lo:hi]
    subspace, _ = np.linalg.qr(doc_reps.T)  # dims x r orthonormal
    loadings = model.term_loadings @ subspace
    scores = np.linalg.norm(loadings, axis=1)
    ranked = sorted(eligible, key=lambda t: (-scores[t], index.terms[t]))
    return [index.terms[t] for t in ranked[:m]]
