import random

import numpy as np
import pytest

from cqsearch.corpus import Corpus, FunctionDoc
from cqsearch.kernels import _accumulate_scores_numpy, _sum_rows_numpy
from cqsearch.vecsearch import (
    IDF_FLOOR,
    Index,
    RankedResults,
    RocchioParams,
    VecSearchError,
    Vector,
    build_index,
    embed_query,
    load_index,
    rerank,
    rocchio,
    save_index,
    search,
)


def doc(fid, name, comment=""):
    return FunctionDoc(id=fid, name=name, comment=comment)


@pytest.fixture()
def small_index():
    corpus = Corpus(docs=[
        doc("a", "readTextFile", "Reads text from a file."),
        doc("b", "writeTextFile", "Writes text to a file."),
        doc("c", "parseJson", "Parses a json string."),
        doc("d", "convertIntString", "Converts an int to a string."),
    ])
    return build_index(corpus)


class TestBuildIndex:
    def test_empty_corpus_rejected(self):
        with pytest.raises(VecSearchError):
            build_index(Corpus(docs=[]))

    def test_single_doc_idf_floor_and_norm(self):
        index = build_index(Corpus(docs=[doc("a", "readFile")]))
        assert np.all(index.idf == IDF_FLOOR)
        norm = np.linalg.norm(index.data)
        assert norm == pytest.approx(1.0, abs=1e-9)

    def test_identical_docs_cosine_one(self):
        index = build_index(Corpus(docs=[
            doc("a", "readFile", "Reads."), doc("b", "readFile", "Reads.")]))
        qv = index.doc_vector("a")
        results = search(index, qv, k=2)
        assert results.entries[0][1] == pytest.approx(1.0, abs=1e-9)
        assert results.entries[1][1] == pytest.approx(1.0, abs=1e-9)

    def test_doc_vectors_unit_norm(self, small_index):
        for fid in small_index.doc_ids:
            vec = small_index.doc_vector(fid)
            assert vec.norm() == pytest.approx(1.0, abs=1e-9)

    def test_vocabulary_size_matches_independent_count(self, small_index):
        # oracle: recount distinct terms with a separate tokenization pass
        from cqsearch.corpus import doc_terms

        docs = [
            doc("a", "readTextFile", "Reads text from a file."),
            doc("b", "writeTextFile", "Writes text to a file."),
            doc("c", "parseJson", "Parses a json string."),
            doc("d", "convertIntString", "Converts an int to a string."),
        ]
        vocab = set()
        for d in docs:
            vocab.update(doc_terms(d))
        assert len(small_index.terms) == len(vocab)


class TestSearch:
    def test_query_equal_to_doc(self, small_index):
        results = search(small_index, small_index.doc_vector("c"), k=4)
        assert results.entries[0][0] == "c"
        assert results.entries[0][1] == pytest.approx(1.0, abs=1e-9)

    def test_orthogonal_query_id_order(self, small_index):
        qv = embed_query(small_index, "zzz qqq")
        results = search(small_index, qv, k=4)
        assert [fid for fid, _ in results.entries] == ["a", "b", "c", "d"]
        assert all(score == 0.0 for _, score in results.entries)

    def test_k_larger_than_corpus(self, small_index):
        assert len(search(small_index, embed_query(small_index, "text"), k=99).entries) == 4

    def test_k_must_be_positive(self, small_index):
        with pytest.raises(VecSearchError):
            search(small_index, Vector({}), k=0)

    def test_matches_brute_force_cosine(self, small_index):
        qv = embed_query(small_index, "convert int text")
        results = search(small_index, qv, k=4)
        # oracle: dense cosine over explicit doc vectors
        qnorm = qv.norm()
        expected = []
        for fid in small_index.doc_ids:
            dv = small_index.doc_vector(fid)
            dot = sum(w * dv.entries.get(t, 0.0) for t, w in qv.entries.items())
            expected.append((fid, dot / qnorm))
        expected.sort(key=lambda kv: (-kv[1], kv[0]))
        for (fid, score), (efid, escore) in zip(results.entries, expected):
            assert fid == efid
            assert score == pytest.approx(escore, abs=1e-12)

    def test_scale_invariance(self, small_index):
        qv = embed_query(small_index, "text file")
        base = [fid for fid, _ in search(small_index, qv, k=4).entries]
        scaled = [fid for fid, _ in search(small_index, qv.scaled(7.3), k=4).entries]
        assert base == scaled


def random_sparse_vector(rng, n_terms, nnz):
    terms = rng.sample(range(n_terms), nnz)
    return Vector({t: rng.uniform(0.1, 2.0) for t in terms})


def make_random_index(rng, n_docs=8, n_terms=30):
    indptr = [0]
    indices = []
    data = []
    for _ in range(n_docs):
        nnz = rng.randint(2, 6)
        row_terms = sorted(rng.sample(range(n_terms), nnz))
        weights = np.array([rng.uniform(0.1, 1.0) for _ in row_terms])
        weights /= np.linalg.norm(weights)
        indices.extend(row_terms)
        data.extend(weights.tolist())
        indptr.append(len(indices))
    return Index(
        terms=[f"t{i}" for i in range(n_terms)],
        idf=np.ones(n_terms),
        doc_ids=[f"d{i:02d}" for i in range(n_docs)],
        indptr=np.array(indptr), indices=np.array(indices), data=np.array(data))


class TestRocchio:
    def test_identity(self, small_index):
        qv = embed_query(small_index, "text file")
        out = rocchio(qv, set(), set(), RocchioParams(alpha=1.0, beta=0.0, gamma=0.0),
                      small_index)
        assert out.entries == qv.entries

    def test_empty_feedback_scales_only(self, small_index):
        qv = embed_query(small_index, "text file")
        out = rocchio(qv, set(), set(), RocchioParams(alpha=2.0, beta=1.0, gamma=1.0),
                      small_index)
        for t, w in qv.entries.items():
            assert out.entries[t] == pytest.approx(2.0 * w)
        order = [fid for fid, _ in search(small_index, out, k=4).entries]
        assert order == [fid for fid, _ in search(small_index, qv, k=4).entries]

    def test_overlap_rejected(self, small_index):
        with pytest.raises(VecSearchError):
            rocchio(Vector({}), {"a"}, {"a"}, RocchioParams(), small_index)

    def test_single_candidate_cosine_non_decreasing(self):
        rng = random.Random(7)
        for _ in range(200):
            index = make_random_index(rng)
            qv = random_sparse_vector(rng, 30, rng.randint(2, 6))
            cand = rng.choice(index.doc_ids)
            out = rocchio(qv, {cand}, set(),
                          RocchioParams(alpha=1.0, beta=rng.uniform(0.1, 4.0), gamma=0.0),
                          index)

            def cosine(vec, fid):
                dv = index.doc_vector(fid)
                dot = sum(w * dv.entries.get(t, 0.0) for t, w in vec.entries.items())
                return dot / vec.norm()

            assert cosine(out, cand) >= cosine(qv, cand) - 1e-9

    def test_matches_dense_oracle(self):
        rng = random.Random(11)
        for _ in range(50):
            index = make_random_index(rng)
            qv = random_sparse_vector(rng, 30, 4)
            cands = set(rng.sample(index.doc_ids, 3))
            rejs = set(rng.sample(sorted(set(index.doc_ids) - cands), 2))
            params = RocchioParams(alpha=1.0, beta=0.8, gamma=0.4)
            out = rocchio(qv, cands, rejs, params, index)
            # oracle: dict arithmetic, no CSR involved
            acc: dict[int, float] = {t: w for t, w in qv.entries.items()}
            for fid in cands:
                for t, w in index.doc_vector(fid).entries.items():
                    acc[t] = acc.get(t, 0.0) + params.beta * w / len(cands)
            for fid in rejs:
                for t, w in index.doc_vector(fid).entries.items():
                    acc[t] = acc.get(t, 0.0) - params.gamma * w / len(rejs)
            expected = {t: w for t, w in acc.items() if w > 0}
            assert set(out.entries) == set(expected)
            for t, w in expected.items():
                assert out.entries[t] == pytest.approx(w, abs=1e-12)

    def test_negative_weights_clamped(self, small_index):
        qv = Vector({})
        out = rocchio(qv, set(), {"a"}, RocchioParams(alpha=1.0, beta=0.0, gamma=1.0),
                      small_index)
        assert out.entries == {}


class TestKernelsAgree:
    def test_backends_equivalent(self, small_index):
        qv = embed_query(small_index, "text file json")
        q_terms, q_weights = qv.arrays()
        from cqsearch import kernels

        fast = kernels.accumulate_scores(
            q_terms, q_weights, small_index.term_ptr, small_index.term_docs,
            small_index.term_weights, len(small_index.doc_ids))
        slow = _accumulate_scores_numpy(
            q_terms, q_weights, small_index.term_ptr, small_index.term_docs,
            small_index.term_weights, len(small_index.doc_ids))
        np.testing.assert_allclose(fast, slow, atol=1e-14)

        rows = np.array([0, 2], dtype=np.int64)
        fast_sum = kernels.sum_rows(
            small_index.indptr, small_index.indices, small_index.data, rows,
            len(small_index.terms))
        slow_sum = _sum_rows_numpy(
            small_index.indptr, small_index.indices, small_index.data, rows,
            len(small_index.terms))
        np.testing.assert_allclose(fast_sum, slow_sum, atol=1e-14)


class TestPersistence:
    def test_save_load_round_trip(self, small_index, tmp_path):
        save_index(small_index, tmp_path)
        loaded = load_index(tmp_path)
        assert loaded.terms == small_index.terms
        assert loaded.doc_ids == small_index.doc_ids
        np.testing.assert_allclose(loaded.data, small_index.data)
        qv = embed_query(loaded, "text file")
        assert search(loaded, qv, 4).entries == search(small_index, qv, 4).entries

    def test_missing_dir(self, tmp_path):
        with pytest.raises(VecSearchError):
            load_index(tmp_path / "nope")


class TestRankedResults:
    def test_scores_must_be_non_increasing(self):
        with pytest.raises(VecSearchError):
            RankedResults(entries=[("a", 0.1), ("b", 0.9)], query_vector=Vector({}))

    def test_rerank_keeps_every_result(self, small_index):
        qv = embed_query(small_index, "text")
        out = rerank(small_index, qv, ["d", "a", "b"])
        assert sorted(out.ids()) == ["a", "b", "d"]
