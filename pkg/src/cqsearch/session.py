"""Session orchestration: create a refinement session for any strategy,
fetch its next question, apply answers and rerank.

This is the single entry point used by the CLI, the HTTP service and the
evaluation harness, so every strategy provably shares the same feedback
and reranking code path.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import baselines, engine
from .corpus import Corpus
from .engine import Answer, ClarifyingQuestion, RefineConfig, SessionState
from .lexicon import Lexicon
from .lsi import DEFAULT_KEYWORD_COUNT, LsiModel, lsi_keywords
from .tasks import build_task_table, extract_query_task
from .vecsearch import Index, RankedResults, embed_query, search

METHODS = ("zacq", "vdo", "kw")


class SessionError(Exception):
    pass


@dataclass
class SearchContext:
    """Immutable per-index resources shared by all sessions."""

    corpus: Corpus
    index: Index
    lexicon: Lexicon
    lsi_model: LsiModel | None = None
    docs_by_id: dict = field(init=False)

    def __post_init__(self) -> None:
        self.docs_by_id = {doc.id: doc for doc in self.corpus}


def new_session(
    ctx: SearchContext,
    query: str,
    method: str = "zacq",
    config: RefineConfig | None = None,
) -> SessionState:
    if method not in METHODS:
        raise SessionError(f"unknown refinement method {method!r}")
    config = config or RefineConfig()
    query_vector = embed_query(ctx.index, query)
    ranking = search(ctx.index, query_vector, k=config.top_k)
    result_ids = ranking.ids()
    table = build_task_table([ctx.docs_by_id[fid] for fid in result_ids], ctx.lexicon)
    state = SessionState(
        query_text=query,
        method=method,
        query_task=extract_query_task(query, ctx.lexicon),
        query_vector=query_vector,
        task_table=table,
        result_ids=result_ids,
        ranking=ranking,
        config=config,
    )
    if method == "kw":
        if ctx.lsi_model is None:
            raise SessionError("kw sessions need an LSI model in the context")
        state.kw_pool = lsi_keywords(
            ctx.lsi_model, result_ids, ctx.index, DEFAULT_KEYWORD_COUNT)
        state.kw_incidence = baselines.kw_incidence_sets(
            state.kw_pool, ctx.index, result_ids)
    return state


def next_question(state: SessionState, lex: Lexicon) -> ClarifyingQuestion | None:
    """The strategy's next question, or None once the session is done."""
    if state.done:
        return None
    if state.method == "zacq":
        return engine.next_round(state, lex)
    if state.method == "vdo":
        return baselines.vdo_next(state, lex)
    return baselines.kw_suggest(state, lex)


def apply_and_rerank(
    state: SessionState, cq: ClarifyingQuestion, answer: Answer, index: Index
) -> RankedResults:
    """Apply an answer, then run the shared partition -> Rocchio -> cosine
    re-sort pipeline."""
    if state.method == "kw":
        candidates, rejects = baselines.kw_apply(state, cq, answer)
        return engine.apply_feedback(state, index, candidates, rejects)
    engine.apply_answer(state, cq, answer)
    return engine.rerank_after_answer(state, index)


def hypothetical_candidates(
    state: SessionState, cq: ClarifyingQuestion, option: str | None
) -> set[str]:
    """Candidate functions if ``option`` were accepted (or, for
    confirmations, if the question were confirmed)."""
    if state.method == "kw":
        if option is None:
            option = cq.options[0]
        selected = state.kw_selected | {option}
        return {
            fid
            for fid, kws in state.kw_incidence.items()
            if selected <= kws and not (kws & state.kw_rejected)
        }
    attrs = {**state.accepted, **cq.aspect.defined, **cq.aspect.inferred}
    if option is not None:
        attrs = {**attrs, **cq.option_attrs[option]}
    elif cq.options:
        attrs = {**attrs, **cq.option_attrs[cq.options[0]]}
    return engine._candidate_functions(state.task_table, attrs, state.rejected_sets)
