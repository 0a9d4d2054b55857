"""Property tests over randomly generated task tables."""

import inspect

from hypothesis import given, settings
from hypothesis import strategies as st

from cqsearch import metrics
from cqsearch.engine import (
    Answer,
    apply_answer,
    next_round,
    partition_functions,
)
from cqsearch.lexicon import load_lexicon
from cqsearch.tasks import Task
from test_engine import make_state

LEX = load_lexicon()

VERBS = ("read", "write", "parse", "convert", "open")
OBJECTS = ("file", "text", "buffer", "stream", "log")
PREPS = ("from", "to", "into")
MODS = (None, "binary", "large")


@st.composite
def tasks(draw):
    v = draw(st.sampled_from(VERBS))
    do = draw(st.sampled_from((None,) + OBJECTS))
    if do is None:
        p = draw(st.sampled_from(PREPS))
        po = draw(st.sampled_from(OBJECTS))
        return Task(v=v, p=p, po=po, pom=draw(st.sampled_from(MODS)))
    p_po = draw(st.booleans())
    return Task(
        v=v, do=do, dom=draw(st.sampled_from(MODS)),
        p=draw(st.sampled_from(PREPS)) if p_po else None,
        po=draw(st.sampled_from(OBJECTS)) if p_po else None,
    )


@st.composite
def tables(draw):
    n = draw(st.integers(min_value=1, max_value=12))
    rows = []
    for i in range(n):
        fid = f"f{draw(st.integers(min_value=0, max_value=7)):02d}"
        rows.append((fid, draw(tasks())))
    return rows


@settings(max_examples=150, deadline=None)
@given(tables())
def test_question_kind_matches_option_count(rows):
    state = make_state(rows)
    cq = next_round(state, LEX)
    if cq is None:
        return
    assert 0 <= len(cq.options) <= 5
    assert (cq.kind == "elicitation") == (len(cq.options) >= 2)
    if cq.aspect.target is not None:
        assert cq.aspect.target not in cq.aspect.defined


@settings(max_examples=150, deadline=None)
@given(tables(), st.integers(min_value=0, max_value=4))
def test_selected_answer_keeps_candidates_consistent(rows, pick):
    state = make_state(rows)
    cq = next_round(state, LEX)
    if cq is None or cq.kind != "elicitation":
        return
    option = cq.options[pick % len(cq.options)]
    apply_answer(state, cq, Answer.pick(option))
    candidates, _ = partition_functions(state)
    by_fid = {}
    for fid, task in state.task_table.rows:
        by_fid.setdefault(fid, []).append(task)
    for fid in candidates:
        assert any(t.matches(state.accepted) for t in by_fid[fid])
    # accepted grew and no rejected set is inside it
    assert state.accepted
    from cqsearch.engine import attrs_subset

    assert not any(attrs_subset(r, state.accepted) for r in state.rejected_sets)


@settings(max_examples=100, deadline=None)
@given(tables())
def test_rounds_only_accumulate(rows):
    state = make_state(rows)
    previous_accepted: dict = {}
    previous_rejected = 0
    for _ in range(6):
        cq = next_round(state, LEX)
        if cq is None:
            break
        answer = Answer.none_of_these() if cq.kind == "elicitation" \
            else Answer.confirm(False)
        apply_answer(state, cq, answer)
        assert set(previous_accepted.items()) <= set(state.accepted.items())
        assert len(state.rejected_sets) >= previous_rejected
        previous_accepted = dict(state.accepted)
        previous_rejected = len(state.rejected_sets)


def test_metrics_take_only_ranking_and_judgments():
    for func in (metrics.reciprocal_rank, metrics.average_precision,
                 metrics.ndcg_rated):
        params = list(inspect.signature(func).parameters)
        assert params == ["ranking", "judgments"]


def test_generic_verbs_are_verbs():
    assert LEX.generic_verbs <= LEX.verbs
