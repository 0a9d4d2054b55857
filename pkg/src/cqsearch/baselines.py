"""Baseline refinement strategies: verb-then-object elicitation (vdo) and
LSI keyword suggestion with concept-style splitting (kw).

Both reuse the engine's answer bookkeeping and the identical Rocchio
reranking path; they differ only in how questions and candidate/reject
sets are produced.
"""

from __future__ import annotations

from dataclasses import dataclass

from .engine import (
    Answer,
    Aspect,
    ClarifyingQuestion,
    EngineError,
    SessionState,
    _option_list,
    facet_for,
    render_question,
)
from .lexicon import Lexicon


@dataclass(frozen=True)
class VdoState:
    """Derived view of a V-DO session: which attribute is being elicited."""

    phase: str  # "verb" | "object" | "done"
    chosen_v: str | None
    chosen_do: str | None
    rejected_verbs: frozenset[str]
    rejected_objects: frozenset[str]


def vdo_state(state: SessionState) -> VdoState:
    chosen_v = state.accepted.get("v")
    chosen_do = state.accepted.get("do")
    if chosen_v is None:
        phase = "verb"
    elif chosen_do is None:
        phase = "object"
    else:
        phase = "done"
    rejected_verbs = frozenset(
        r["v"] for r in state.rejected_sets if set(r) == {"v"})
    rejected_objects = frozenset(
        r["do"] for r in state.rejected_sets
        if set(r) == {"v", "do"} and r["v"] == chosen_v)
    return VdoState(phase, chosen_v, chosen_do, rejected_verbs, rejected_objects)


def vdo_next(state: SessionState, lex: Lexicon) -> ClarifyingQuestion | None:
    """Elicit the verb, then the direct object, and stop.  Never infers,
    never targets prepositional roles."""
    view = vdo_state(state)
    if view.phase == "done":
        state.done = True
        return None
    if view.phase == "verb":
        target, defined, excluded = "v", {}, view.rejected_verbs
    else:
        target, defined, excluded = "do", {"v": view.chosen_v}, view.rejected_objects
    facet = facet_for(state.task_table, defined, target, exclude_options=excluded)
    facet.options = facet.options[: state.config.max_options]
    if not facet.options:
        state.done = True
        return None
    aspect = Aspect(target=target, defined=defined)
    return render_question(aspect, facet, state, lex)


def kw_incidence_sets(pool: list[str], index, result_ids: list[str]) -> dict[str, frozenset[str]]:
    """Keyword sets per result function (restricted to the 25-keyword pool)."""
    pool_ids = {index.term_ids[k] for k in pool if k in index.term_ids}
    incidence = {}
    for fid in result_ids:
        pos = index.doc_pos[fid]
        lo, hi = index.indptr[pos], index.indptr[pos + 1]
        terms = {int(t) for t in index.indices[lo:hi]} & pool_ids
        incidence[fid] = frozenset(index.terms[t] for t in terms)
    return incidence


def kw_candidates(state: SessionState) -> set[str]:
    """Functions carrying every selected keyword and no rejected one."""
    return {
        fid
        for fid, kws in state.kw_incidence.items()
        if state.kw_selected <= kws and not (kws & state.kw_rejected)
    }


def kw_rejects(state: SessionState) -> set[str]:
    return {
        fid for fid, kws in state.kw_incidence.items() if kws & state.kw_rejected
    }


def kw_suggest(state: SessionState, lex: Lexicon) -> ClarifyingQuestion | None:
    """Suggest up to 5 unused keywords that split the candidate set most
    evenly; done once no keyword separates the remaining candidates."""
    candidates = kw_candidates(state)
    used = state.kw_selected | state.kw_rejected
    scored: list[tuple[str, int]] = []
    for keyword in state.kw_pool:
        if keyword in used:
            continue
        extent = sum(1 for fid in candidates if keyword in state.kw_incidence[fid])
        score = min(extent, len(candidates) - extent)
        if score > 0:
            scored.append((keyword, score))
    scored.sort(key=lambda kv: (-kv[1], kv[0]))
    shown = [k for k, _ in scored[: state.config.max_options]]
    if not shown:
        state.done = True
        return None
    aspect = Aspect(target=None, defined={})
    option_attrs = {k: {} for k in shown}
    if len(shown) == 1:
        text = f"Are you looking for results that mention {shown[0]}?"
        return ClarifyingQuestion("confirmation", "KW", text, shown, aspect, option_attrs)
    text = f"Are you looking for results that mention any of the following: {_option_list(shown)}?"
    return ClarifyingQuestion("elicitation", "KW", text, shown, aspect, option_attrs)


def kw_apply(state: SessionState, cq: ClarifyingQuestion, answer: Answer) -> tuple[set[str], set[str]]:
    """Record a keyword answer; returns (candidates, rejects) for reranking.

    Rejecting keywords rejects every function carrying them; candidates are
    the functions matching all selected keywords, minus those rejects.
    """
    if answer.selected is not None:
        if answer.selected not in cq.options:
            raise EngineError(f"unknown keyword {answer.selected!r}")
        state.kw_selected.add(answer.selected)
    elif answer.yes:
        state.kw_selected.add(cq.options[0])
    else:  # NoneOfThese or No: every shown keyword is rejected
        state.kw_rejected.update(cq.options)
    state.round += 1
    return kw_candidates(state), kw_rejects(state)
