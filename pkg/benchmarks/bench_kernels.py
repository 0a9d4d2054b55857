"""Benchmark the JIT scoring kernels against the pure-numpy fallback.

Builds a synthetic sparse index (no corpus needed) and times cosine score
accumulation and feedback row-sums on both paths.

    python3 benchmarks/bench_kernels.py --docs 200000 --terms 50000
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from cqsearch import kernels
from cqsearch.kernels import _accumulate_scores_numpy, _sum_rows_numpy


def synthetic_postings(n_docs: int, n_terms: int, nnz_per_doc: int, seed: int = 0):
    rng = np.random.default_rng(seed)
    indptr = np.arange(0, (n_docs + 1) * nnz_per_doc, nnz_per_doc, dtype=np.int64)
    # strided term picks keep (term, doc) pairs unique within a document,
    # matching what a real index guarantees
    offsets = rng.integers(0, n_terms, size=n_docs, dtype=np.int64)
    stride = np.arange(nnz_per_doc, dtype=np.int64) * 13
    indices = ((offsets[:, None] + stride[None, :]) % n_terms).ravel()
    data = rng.random(n_docs * nnz_per_doc)
    # term-major postings
    order = np.argsort(indices, kind="stable")
    term_docs = np.repeat(np.arange(n_docs, dtype=np.int64), nnz_per_doc)[order]
    term_weights = data[order]
    counts = np.bincount(indices, minlength=n_terms)
    term_ptr = np.zeros(n_terms + 1, dtype=np.int64)
    np.cumsum(counts, out=term_ptr[1:])
    return indptr, indices, data, term_ptr, term_docs, term_weights


def bench(label: str, func, *args, repeats: int = 5) -> float:
    func(*args)  # warmup (JIT compile)
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        func(*args)
        best = min(best, time.perf_counter() - start)
    print(f"  {label:22s} {best * 1e3:9.2f} ms")
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--docs", type=int, default=200_000)
    parser.add_argument("--terms", type=int, default=50_000)
    parser.add_argument("--nnz", type=int, default=40, help="terms per document")
    parser.add_argument("--query-terms", type=int, default=8)
    args = parser.parse_args()

    if kernels.backend_name() != "numba":
        raise SystemExit(
            "numba backend unavailable (is CQSEARCH_PURE_NUMPY set?); "
            "nothing to compare")

    print(f"synthetic index: {args.docs} docs x {args.nnz} terms, "
          f"vocab {args.terms}")
    indptr, indices, data, term_ptr, term_docs, term_weights = synthetic_postings(
        args.docs, args.terms, args.nnz)
    rng = np.random.default_rng(1)
    q_terms = rng.choice(args.terms, size=args.query_terms, replace=False).astype(np.int64)
    q_weights = rng.random(args.query_terms)
    rows = np.sort(rng.choice(args.docs, size=64, replace=False)).astype(np.int64)

    print("cosine score accumulation:")
    fast = bench("numba", kernels.accumulate_scores,
                 q_terms, q_weights, term_ptr, term_docs, term_weights, args.docs)
    slow = bench("numpy", _accumulate_scores_numpy,
                 q_terms, q_weights, term_ptr, term_docs, term_weights, args.docs)
    print(f"  speedup {slow / fast:.2f}x")

    print("feedback row sums:")
    fast = bench("numba", kernels.sum_rows, indptr, indices, data, rows, args.terms)
    slow = bench("numpy", _sum_rows_numpy, indptr, indices, data, rows, args.terms)
    print(f"  speedup {slow / fast:.2f}x")

    out_fast = kernels.accumulate_scores(
        q_terms, q_weights, term_ptr, term_docs, term_weights, args.docs)
    out_slow = _accumulate_scores_numpy(
        q_terms, q_weights, term_ptr, term_docs, term_weights, args.docs)
    assert np.allclose(out_fast, out_slow)
    print("results identical across backends")


if __name__ == "__main__":
    main()
