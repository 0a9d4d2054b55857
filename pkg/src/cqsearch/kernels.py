"""Hot scoring kernels with a numba fast path and a pure-numpy fallback.

The JIT path is used when numba imports cleanly; set ``CQSEARCH_PURE_NUMPY=1``
to force the numpy implementations (useful for debugging and as the
baseline in ``benchmarks/bench_kernels.py``).
"""

from __future__ import annotations

import os

import numpy as np

_FORCE_NUMPY = os.environ.get("CQSEARCH_PURE_NUMPY", "") not in ("", "0")


def _accumulate_scores_numpy(q_terms, q_weights, term_ptr, term_docs, term_weights, n_docs):
    scores = np.zeros(n_docs, dtype=np.float64)
    for i in range(q_terms.shape[0]):
        t = q_terms[i]
        lo, hi = term_ptr[t], term_ptr[t + 1]
        # doc ids are unique within one posting list, so fancy += is safe
        scores[term_docs[lo:hi]] += q_weights[i] * term_weights[lo:hi]
    return scores


def _sum_rows_numpy(indptr, indices, data, rows, n_terms):
    out = np.zeros(n_terms, dtype=np.float64)
    for r in rows:
        lo, hi = indptr[r], indptr[r + 1]
        np.add.at(out, indices[lo:hi], data[lo:hi])
    return out


if _FORCE_NUMPY:
    _HAS_NUMBA = False
else:
    try:
        from numba import njit

        _HAS_NUMBA = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        _HAS_NUMBA = False

if _HAS_NUMBA:

    @njit(cache=True)
    def _accumulate_scores_numba(q_terms, q_weights, term_ptr, term_docs, term_weights, n_docs):
        scores = np.zeros(n_docs, dtype=np.float64)
        for i in range(q_terms.shape[0]):
            t = q_terms[i]
            w = q_weights[i]
            for j in range(term_ptr[t], term_ptr[t + 1]):
                scores[term_docs[j]] += w * term_weights[j]
        return scores

    @njit(cache=True)
    def _sum_rows_numba(indptr, indices, data, rows, n_terms):
        out = np.zeros(n_terms, dtype=np.float64)
        for i in range(rows.shape[0]):
            r = rows[i]
            for j in range(indptr[r], indptr[r + 1]):
                out[indices[j]] += data[j]
        return out

    accumulate_scores = _accumulate_scores_numba
    sum_rows = _sum_rows_numba
else:
    accumulate_scores = _accumulate_scores_numpy
    sum_rows = _sum_rows_numpy


def backend_name() -> str:
    return "numba" if _HAS_NUMBA else "numpy"
