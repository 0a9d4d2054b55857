import numpy as np
import pytest

from cqsearch.corpus import Corpus, FunctionDoc
from cqsearch.lsi import LsiError, lsi_fit, lsi_keywords
from cqsearch.vecsearch import Index, build_index


def jacobi_singular_values(matrix: np.ndarray, sweeps: int = 60) -> np.ndarray:
    """One-sided Jacobi SVD oracle: orthogonalize column pairs by plane
    rotations; singular values are the final column norms."""
    a = matrix.astype(np.float64).copy()
    n = a.shape[1]
    for _ in range(sweeps):
        off = 0.0
        for i in range(n - 1):
            for j in range(i + 1, n):
                alpha = a[:, i] @ a[:, i]
                beta = a[:, j] @ a[:, j]
                gamma = a[:, i] @ a[:, j]
                off = max(off, abs(gamma))
                if abs(gamma) < 1e-15:
                    continue
                zeta = (beta - alpha) / (2.0 * gamma)
                t = np.sign(zeta) / (abs(zeta) + np.sqrt(1.0 + zeta * zeta))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = c * t
                ai = a[:, i].copy()
                a[:, i] = c * ai - s * a[:, j]
                a[:, j] = s * ai + c * a[:, j]
        if off < 1e-14:
            break
    values = np.sort(np.linalg.norm(a, axis=0))[::-1]
    return values


def index_from_matrix(matrix: np.ndarray) -> Index:
    n_terms, n_docs = matrix.shape
    indptr = [0]
    indices = []
    data = []
    for d in range(n_docs):
        col = matrix[:, d]
        nz = np.nonzero(col)[0]
        indices.extend(int(t) for t in nz)
        data.extend(float(col[t]) for t in nz)
        indptr.append(len(indices))
    return Index(
        terms=[f"t{i:03d}" for i in range(n_terms)],
        idf=np.ones(n_terms),
        doc_ids=[f"d{i:03d}" for i in range(n_docs)],
        indptr=np.array(indptr), indices=np.array(indices), data=np.array(data))


class TestLsiFit:
    def test_rank_one_exact(self):
        column = np.abs(np.random.default_rng(3).standard_normal((12, 1)))
        matrix = np.tile(column, (1, 6))
        model = lsi_fit(index_from_matrix(matrix), dims=1)
        approx = model.basis @ (model.basis.T @ matrix)
        assert np.linalg.norm(approx - matrix) < 1e-6

    def test_matches_jacobi_oracle(self):
        rng = np.random.default_rng(42)
        matrix = np.abs(rng.standard_normal((20, 12)))
        model = lsi_fit(index_from_matrix(matrix), dims=5)
        oracle = jacobi_singular_values(matrix)[:5]
        np.testing.assert_allclose(model.singular_values, oracle, rtol=1e-3)

    def test_dims_zero_rejected(self):
        matrix = np.ones((4, 3))
        with pytest.raises(LsiError):
            lsi_fit(index_from_matrix(matrix), dims=0)

    def test_dims_too_large_rejected(self):
        matrix = np.ones((4, 3))
        with pytest.raises(LsiError):
            lsi_fit(index_from_matrix(matrix), dims=4)

    def test_basis_orthonormal_on_random_matrices(self):
        rng = np.random.default_rng(7)
        for m, n in ((10, 8), (30, 20), (50, 50)):
            matrix = np.abs(rng.standard_normal((m, n)))
            dims = min(6, n)
            model = lsi_fit(index_from_matrix(matrix), dims=dims)
            gram = model.basis.T @ model.basis
            np.testing.assert_allclose(gram, np.eye(dims), atol=1e-6)

    def test_deterministic(self):
        rng = np.random.default_rng(5)
        matrix = np.abs(rng.standard_normal((15, 9)))
        index = index_from_matrix(matrix)
        m1 = lsi_fit(index, dims=4)
        m2 = lsi_fit(index, dims=4)
        np.testing.assert_array_equal(m1.term_loadings, m2.term_loadings)


class TestKeywords:
    def test_few_distinct_terms_returns_all(self):
        corpus = Corpus(docs=[
            FunctionDoc(id="a", name="alpha_beta"),
            FunctionDoc(id="b", name="beta_gamma"),
            FunctionDoc(id="c", name="alpha_gamma"),
        ])
        index = build_index(corpus)
        model = lsi_fit(index, dims=2)
        kws = lsi_keywords(model, ["a", "b"], index, m=25)
        assert sorted(kws) == ["alpha", "beta", "gamma"]

    def test_keywords_occur_in_results(self, toy_ctx):
        from cqsearch.vecsearch import embed_query, search

        ranking = search(toy_ctx.index, embed_query(toy_ctx.index, "read text from file"), 50)
        kws = lsi_keywords(toy_ctx.lsi_model, ranking.ids(), toy_ctx.index, 25)
        assert len(kws) == 25
        result_terms = set()
        for fid in ranking.ids():
            pos = toy_ctx.index.doc_pos[fid]
            lo, hi = toy_ctx.index.indptr[pos], toy_ctx.index.indptr[pos + 1]
            result_terms.update(toy_ctx.index.terms[int(t)] for t in toy_ctx.index.indices[lo:hi])
        assert set(kws) <= result_terms

    def test_empty_results_rejected(self, toy_ctx):
        with pytest.raises(LsiError):
            lsi_keywords(toy_ctx.lsi_model, [], toy_ctx.index)

    def test_golden_keywords_match_dense_oracle(self):
        """Oracle: recompute loadings with a dense numpy SVD and the same
        projection, then compare the selected keyword set."""
        rng = np.random.default_rng(9)
        matrix = np.abs(rng.standard_normal((18, 10)))
        matrix[matrix < 0.8] = 0.0
        index = index_from_matrix(matrix)
        dims = 4
        model = lsi_fit(index, dims=dims)
        results = index.doc_ids[:4]
        got = lsi_keywords(model, results, index, m=6)

        u, s, _ = np.linalg.svd(matrix, full_matrices=False)
        u, s = u[:, :dims], s[:dims]
        loadings = u * s
        positions = [index.doc_pos[fid] for fid in results]
        eligible = set()
        reps = []
        for pos in positions:
            col = matrix[:, pos]
            eligible.update(int(t) for t in np.nonzero(col)[0])
            reps.append(u.T @ col)
        q, _ = np.linalg.qr(np.array(reps).T)
        scores = np.linalg.norm(loadings @ q, axis=1)
        expected = sorted(eligible, key=lambda t: (-scores[t], index.terms[t]))[:6]
        assert got == [index.terms[t] for t in expected]
