"""Clarifying-question engine: aspect enumeration, attribute inference,
question templating, answer handling and feedback-based reranking.

A refinement session walks a table of tasks extracted from the current
search results.  Each round it picks one *aspect* (a target syntactic role
given already-defined attributes), renders a question for it, folds the
answer into the session, and reranks by shifting the query vector toward
candidate functions and away from rejected ones.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .lexicon import Lexicon
from .morphology import gerund
from .tasks import Task, TaskTable
from .vecsearch import (
    Index,
    RankedResults,
    RocchioParams,
    Vector,
    rerank,
    rocchio,
)

# Targets scanned in a fixed order so inference and aspect selection are
# deterministic when supports tie.
SCAN_ORDER = ("v", "o", "do", "p", "po", "or", "dom", "pom", "om")
MAX_OPTIONS = 5
DEFAULT_MIN_SUPPORT = 2
DEFAULT_MIN_CONFIDENCE = 0.5


class EngineError(Exception):
    pass


def attrs_subset(small: dict[str, str], big: dict[str, str]) -> bool:
    """Attribute-set containment with object-role abstraction."""
    for role, value in small.items():
        if role == "o":
            ok = value in (big.get("do"), big.get("po"), big.get("o"))
        elif role == "om":
            ok = value in (big.get("dom"), big.get("pom"), big.get("om"))
        elif role in ("do", "po"):
            ok = big.get(role) == value or big.get("o") == value
        elif role in ("dom", "pom"):
            ok = big.get(role) == value or big.get("om") == value
        else:
            ok = big.get(role) == value
        if not ok:
            return False
    return True


def syntactic_targets(d: dict[str, str]) -> set[str]:
    """Allowed question targets for a set of defined attributes."""
    roles = set(d)
    if not roles:
        targets = {"v", "o"}
    elif "v" not in roles:
        targets = {"om", "or"}
    else:
        targets = {"do", "p", "po"}
    if "do" in roles:
        targets.add("dom")
    if "po" in roles:
        targets.add("pom")
    return targets - roles


@dataclass
class Facet:
    """Ranked attribute values that can fill an aspect's target role.

    ``options`` pairs each value with its support (distinct candidate
    functions carrying it); ``option_attrs`` maps each value to the
    attributes accepting it would add.
    """

    options: list[tuple[str, int]] = field(default_factory=list)
    option_attrs: dict[str, dict[str, str]] = field(default_factory=dict)
    n_functions: int = 0

    def values(self) -> list[str]:
        return [v for v, _ in self.options]

    def top_support(self) -> int:
        return self.options[0][1] if self.options else 0


@dataclass(frozen=True)
class Aspect:
    target: str | None  # None for whole-set confirmations
    defined: dict[str, str]
    inferred: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.target is not None and self.target in self.defined:
            raise EngineError(f"aspect target {self.target} already defined")


@dataclass
class ClarifyingQuestion:
    kind: str  # "confirmation" | "elicitation"
    template_id: str  # "T1".."T5"
    text: str
    options: list[str]
    aspect: Aspect
    option_attrs: dict[str, dict[str, str]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        expected = "elicitation" if len(self.options) >= 2 else "confirmation"
        if self.kind != expected:
            raise EngineError(f"{self.kind} question with {len(self.options)} options")


@dataclass(frozen=True)
class RefineConfig:
    min_support: int = DEFAULT_MIN_SUPPORT
    min_confidence: float = DEFAULT_MIN_CONFIDENCE
    rocchio: RocchioParams = field(default_factory=RocchioParams)
    top_k: int = 50
    max_options: int = MAX_OPTIONS


@dataclass
class SessionState:
    """One refinement dialogue over a fixed result list."""

    query_text: str
    method: str
    query_task: Task | None
    query_vector: Vector
    task_table: TaskTable
    result_ids: list[str]
    ranking: RankedResults
    accepted: dict[str, str] = field(default_factory=dict)
    rejected_sets: list[dict[str, str]] = field(default_factory=list)
    round: int = 0
    done: bool = False
    config: RefineConfig = field(default_factory=RefineConfig)
    # baseline bookkeeping (unused by the main method)
    vdo_phase: str = "verb"
    vdo_rejected: dict[str, list[str]] = field(default_factory=lambda: {"verb": [], "object": []})
    kw_pool: list[str] = field(default_factory=list)
    kw_incidence: dict[str, frozenset[str]] = field(default_factory=dict)
    kw_selected: set[str] = field(default_factory=set)
    kw_rejected: set[str] = field(default_factory=set)


def tasks_matching(table: TaskTable, d: dict[str, str]) -> list[tuple[str, Task]]:
    """Rows whose task contains every attribute of ``d``."""
    return table.matching(d)


def _target_values(task: Task, d: dict[str, str], s: str) -> list[tuple[str, dict[str, str]]]:
    """Values this task offers for target ``s``, with the attributes that
    accepting each value would define."""
    if s in ("v", "dom", "do", "p", "pom", "po"):
        value = task.get(s)
        return [(value, {s: value})] if value else []
    if s == "o":
        slots = [r for r in ("do", "po") if r not in d]
        return [(task.get(r), {"o": task.get(r)}) for r in slots if task.get(r)]
    if s == "om":
        slots = [r for r in ("dom", "pom") if r not in d]
        return [(task.get(r), {"om": task.get(r)}) for r in slots if task.get(r)]
    if s == "or":
        branch_do = bool(task.do)
        if "o" in d:
            if task.do == d["o"]:
                branch_do = True
            elif task.po == d["o"]:
                branch_do = False
        if branch_do and task.do:
            return [(f"{task.v} {task.do}", {"v": task.v, "do": task.do})]
        if task.p and task.po:
            return [(f"{task.v} {task.p} {task.po}", {"v": task.v, "p": task.p, "po": task.po})]
        return []
    raise EngineError(f"unknown target {s!r}")


def facet_for(
    table: TaskTable,
    d: dict[str, str],
    s: str,
    rejected_sets: list[dict[str, str]] | tuple = (),
    exclude_options: set[str] | frozenset = frozenset(),
) -> Facet:
    """Build the facet for aspect (s | d): unique target values over tasks
    matching ``d``, supported by distinct candidate functions, sorted by
    support then alphabetically.  Values whose acceptance would reproduce a
    rejected attribute set are withheld."""
    support: dict[str, set[str]] = {}
    attrs_by_value: dict[str, dict[str, str]] = {}
    functions: set[str] = set()
    for fid, task in table.rows:
        if not task.matches(d):
            continue
        if any(task.matches(r) for r in rejected_sets):
            continue
        functions.add(fid)
        for value, attrs in _target_values(task, d, s):
            if value in exclude_options:
                continue
            combined = {**d, **attrs}
            if any(attrs_subset(r, combined) for r in rejected_sets):
                continue
            support.setdefault(value, set()).add(fid)
            attrs_by_value.setdefault(value, attrs)
    ordered = sorted(support.items(), key=lambda kv: (-len(kv[1]), kv[0]))
    return Facet(
        options=[(v, len(fids)) for v, fids in ordered],
        option_attrs={v: attrs_by_value[v] for v, _ in ordered},
        n_functions=len(functions),
    )


def _query_values(task: Task, s: str) -> set[str]:
    if s in ("v", "dom", "do", "p", "pom", "po"):
        value = task.get(s)
        return {value} if value else set()
    if s == "o":
        return {v for v in (task.do, task.po) if v}
    if s == "om":
        return {v for v in (task.dom, task.pom) if v}
    if s == "or":
        values = set()
        if task.do:
            values.add(f"{task.v} {task.do}")
        if task.p and task.po:
            values.add(f"{task.v} {task.p} {task.po}")
        return values
    return set()


def infer_attributes(state: SessionState) -> tuple[dict[str, str], dict[str, str]]:
    """Grow the defined set beyond the accepted attributes.

    A facet value is inferred when it also appears in the query's own task,
    or when the most common value clears the support and confidence
    thresholds.  Returns (defined, inferred-only) attribute sets.
    """
    d = dict(state.accepted)
    inferred: dict[str, str] = {}
    cfg = state.config
    while True:
        picked = None
        targets = syntactic_targets(d)
        for s in SCAN_ORDER:
            if s not in targets:
                continue
            facet = facet_for(state.task_table, d, s, state.rejected_sets)
            if not facet.options:
                continue
            if state.query_task is not None:
                wanted = _query_values(state.query_task, s)
                for value, _ in facet.options:
                    if value in wanted:
                        picked = facet.option_attrs[value]
                        break
            if picked is None:
                top_value, top_count = facet.options[0]
                if (
                    top_count >= cfg.min_support
                    and facet.n_functions > 0
                    and top_count / facet.n_functions >= cfg.min_confidence
                ):
                    picked = facet.option_attrs[top_value]
            if picked is not None:
                break
        if picked is None:
            return d, inferred
        d.update(picked)
        inferred.update(picked)


def select_aspect(
    state: SessionState, d: dict[str, str], inferred: dict[str, str] | None = None
) -> tuple[Aspect, Facet] | None:
    """Greedy aspect choice: the target whose facet holds the single
    most-supported value; ties go to the fixed scan order."""
    best: tuple[Aspect, Facet] | None = None
    best_support = 0
    for s in SCAN_ORDER:
        if s not in syntactic_targets(d):
            continue
        facet = facet_for(state.task_table, d, s, state.rejected_sets)
        if facet.options and facet.top_support() > best_support:
            best_support = facet.top_support()
            best = (Aspect(target=s, defined=dict(d), inferred=dict(inferred or {})), facet)
    return best


def _phrase(attrs: dict[str, str], lex: Lexicon, verb_form: str = "base",
            exclude: frozenset[str] = frozenset(), skip_dangling_p: bool = False) -> str:
    """Render defined attributes as a phrase: v [dom] do [p [pom] po].

    Abstract object values take the direct-object slot.  A preposition with
    no object is kept by default (question templates lean on it: "converting
    int to ...?") unless ``skip_dangling_p`` is set.
    """
    parts: list[str] = []
    if "v" in attrs and "v" not in exclude:
        parts.append(gerund(attrs["v"], lex) if verb_form == "gerund" else attrs["v"])
    have_p = "p" in attrs and "p" not in exclude
    have_po = "po" in attrs and "po" not in exclude
    for role in ("om", "dom", "do", "o", "p", "pom", "po"):
        if role not in attrs or role in exclude:
            continue
        if skip_dangling_p and role == "p" and not have_po:
            continue
        if skip_dangling_p and role in ("pom", "po") and not have_p:
            continue
        parts.append(attrs[role])
    return " ".join(parts)


def _option_list(options: list[str]) -> str:
    if len(options) == 2:
        return f"{options[0]} or {options[1]}"
    return ", ".join(options[:-1]) + ", or " + options[-1]


def _candidate_functions(
    table: TaskTable, attrs: dict[str, str], rejected_sets: list[dict[str, str]]
) -> set[str]:
    """Functions with at least one task carrying all of ``attrs`` and no
    rejected attribute set."""
    out = set()
    for fid, task in table.rows:
        if task.matches(attrs) and not any(task.matches(r) for r in rejected_sets):
            out.add(fid)
    return out


def render_question(
    aspect: Aspect, facet: Facet, state: SessionState, lex: Lexicon
) -> ClarifyingQuestion:
    """Apply the question template for the aspect's target."""
    limit = state.config.max_options
    raw_options = facet.values()[:limit]
    option_attrs = {v: facet.option_attrs[v] for v in raw_options}
    target = aspect.target
    d = aspect.defined

    if len(raw_options) >= 2:
        if target in ("v", "or"):
            shown = {}
            for value in raw_options:
                attrs = option_attrs[value]
                display = _phrase(attrs, lex, verb_form="gerund")
                shown[display] = attrs
            listing = _option_list(list(shown))
            text = f"Are you interested in doing any of the following: {listing}?"
            return ClarifyingQuestion("elicitation", "T1", text, list(shown), aspect, shown)
        if target in ("o", "do", "po"):
            text = f"Are you looking for any of the following: {_option_list(raw_options)}?"
            return ClarifyingQuestion("elicitation", "T2", text, raw_options, aspect, option_attrs)
        if target in ("om", "dom", "pom"):
            obj_role = {"om": "o", "dom": "do", "pom": "po"}[target]
            obj = d.get(obj_role, "")
            verb_phrase = _phrase(d, lex, verb_form="gerund",
                                  exclude=frozenset({obj_role, target}))
            if verb_phrase:
                text = f"What kind of {obj} are you interested in {verb_phrase}?"
            else:
                text = f"What kind of {obj} are you interested in?"
            return ClarifyingQuestion("elicitation", "T3", text, raw_options, aspect, option_attrs)
        if target == "p":
            verb_phrase = _phrase(d, lex, verb_form="base", exclude=frozenset({"p", "pom"}))
            text = f"How do you want to {verb_phrase}?"
            return ClarifyingQuestion("elicitation", "T4", text, raw_options, aspect, option_attrs)
        raise EngineError(f"no elicitation template for target {target!r}")

    # single-option confirmations collapse to T1/T2 over the merged phrase
    attrs = _complete_prep_pair(
        option_attrs[raw_options[0]] if raw_options else {}, d, state)
    merged = {**d, **attrs}
    display = raw_options
    if raw_options:
        option_attrs = {raw_options[0]: attrs}
        if target in ("v", "or"):
            display = [_phrase(attrs, lex, verb_form="gerund")]
            option_attrs = {display[0]: attrs}
    if "v" in merged:
        text = f"Are you interested in {_phrase(merged, lex, verb_form='gerund', skip_dangling_p=True)}?"
        template = "T1"
    else:
        text = f"Are you looking for {_phrase(merged, lex, skip_dangling_p=True)}?"
        template = "T2"
    return ClarifyingQuestion("confirmation", template, text, display, aspect, option_attrs)


def _complete_prep_pair(
    attrs: dict[str, str], d: dict[str, str], state: SessionState
) -> dict[str, str]:
    """A confirmation about half a prepositional phrase pulls in the other
    half when the matching tasks determine it uniquely ("resize image to"
    becomes "resize image to width")."""
    merged = {**d, **attrs}
    missing = None
    if "p" in merged and "po" not in merged:
        missing = "po"
    elif "po" in merged and "p" not in merged:
        missing = "p"
    if missing is None:
        return attrs
    values = {
        task.get(missing)
        for _, task in state.task_table.rows
        if task.matches(merged) and task.get(missing)
        and not any(task.matches(r) for r in state.rejected_sets)
    }
    if len(values) == 1:
        return {**attrs, missing: values.pop()}
    return attrs


def render_inferred_confirmation(
    state: SessionState, d: dict[str, str], inferred: dict[str, str], lex: Lexicon
) -> ClarifyingQuestion:
    """T5: confirm attributes inferred without asking, offering to surface
    the matching functions first."""
    count = len(_candidate_functions(state.task_table, d, state.rejected_sets))
    phrase = _phrase(d, lex, verb_form="gerund")
    noun, verb, pronoun = ("function", "mentions", "it") if count == 1 else (
        "functions", "mention", "them")
    text = (
        f"Found {count} {noun} that specifically {verb} {phrase}. "
        f"Would you like to see {pronoun} first?"
    )
    aspect = Aspect(target=None, defined=dict(d), inferred=dict(inferred))
    return ClarifyingQuestion("confirmation", "T5", text, [], aspect, {})


def _resolve_abstract(
    attrs: dict[str, str], state: SessionState, context: dict[str, str]
) -> dict[str, str]:
    """Pin abstract object/modifier attributes to the concrete role they
    fill among matching tasks (preferring the direct-object slots)."""
    resolved = dict(attrs)
    for abstract, (first, second) in (("o", ("do", "po")), ("om", ("dom", "pom"))):
        if abstract not in resolved:
            continue
        value = resolved.pop(abstract)
        probe = {**context, **resolved}
        hits_first = any(
            task.matches({**probe, first: value}) for _, task in state.task_table.rows)
        hits_second = any(
            task.matches({**probe, second: value}) for _, task in state.task_table.rows)
        resolved[second if hits_second and not hits_first else first] = value
    return resolved


def apply_answer(state: SessionState, cq: ClarifyingQuestion, answer: "Answer") -> SessionState:
    """Fold an answer into the session's accepted/rejected attribute sets."""
    if cq.kind == "elicitation" and not answer.is_choice():
        raise EngineError("elicitation questions take Selected or NoneOfThese")
    if cq.kind == "confirmation" and answer.is_choice():
        raise EngineError("confirmation questions take Yes or No")
    defined = cq.aspect.defined
    inferred = cq.aspect.inferred

    if answer.selected is not None:
        if answer.selected not in cq.option_attrs:
            raise EngineError(f"unknown option {answer.selected!r}")
        chosen = _resolve_abstract(cq.option_attrs[answer.selected], state, defined)
        chosen = _complete_prep_pair(chosen, {**defined, **inferred}, state)
        state.accepted = {**state.accepted, **inferred, **chosen}
    elif answer.none:
        for option in cq.options:
            rejected = {**defined, **cq.option_attrs[option]}
            if rejected not in state.rejected_sets:
                state.rejected_sets.append(rejected)
        # unconfirmed inferences are discarded with the declined options
    elif answer.yes:
        confirmed = dict(defined)
        if cq.options:
            confirmed.update(_resolve_abstract(
                cq.option_attrs[cq.options[0]], state, defined))
        state.accepted = {**state.accepted, **confirmed}
    else:  # no
        rejected = dict(defined)
        if cq.options:
            rejected.update(cq.option_attrs[cq.options[0]])
        if rejected not in state.rejected_sets:
            state.rejected_sets.append(rejected)

    for rej in state.rejected_sets:
        if attrs_subset(rej, state.accepted):
            raise EngineError("rejected attribute set became a subset of accepted")
    state.round += 1
    return state


@dataclass(frozen=True)
class Answer:
    """One of Selected(option) / NoneOfThese / Yes / No."""

    selected: str | None = None
    none: bool = False
    yes: bool = False
    no: bool = False

    def __post_init__(self) -> None:
        if sum((self.selected is not None, self.none, self.yes, self.no)) != 1:
            raise EngineError("answer must be exactly one of selected/none/yes/no")

    def is_choice(self) -> bool:
        return self.selected is not None or self.none

    @staticmethod
    def pick(option: str) -> "Answer":
        return Answer(selected=option)

    @staticmethod
    def none_of_these() -> "Answer":
        return Answer(none=True)

    @staticmethod
    def confirm(ok: bool) -> "Answer":
        return Answer(yes=ok) if ok else Answer(no=True)


def partition_functions(state: SessionState) -> tuple[set[str], set[str]]:
    """Split result functions into candidates (some task satisfies all
    accepted attributes and no rejected set) and rejects (no such task but
    some task matches a rejected set).  Task-less functions are in neither."""
    candidates: set[str] = set()
    rejects: set[str] = set()
    by_fid: dict[str, list[Task]] = {}
    for fid, task in state.task_table.rows:
        by_fid.setdefault(fid, []).append(task)
    for fid, tasks in by_fid.items():
        ok = any(
            t.matches(state.accepted)
            and not any(t.matches(r) for r in state.rejected_sets)
            for t in tasks
        )
        if ok:
            candidates.add(fid)
        elif any(t.matches(r) for t in tasks for r in state.rejected_sets):
            rejects.add(fid)
    return candidates, rejects


def _is_complete_task(attrs: dict[str, str]) -> bool:
    return "v" in attrs and ("do" in attrs or ("p" in attrs and "po" in attrs))


def next_round(
    state: SessionState, lex: Lexicon
) -> ClarifyingQuestion | None:
    """Produce the next question, or None when the session is done.

    Done means: the accepted attributes already describe a complete task
    with no remaining facet offering a real choice, or nothing is left to
    ask or confirm.
    """
    if state.done:
        return None
    d, inferred = infer_attributes(state)
    if _is_complete_task(state.accepted):
        leftovers = False
        for s in syntactic_targets(state.accepted):
            facet = facet_for(state.task_table, state.accepted, s, state.rejected_sets)
            if len(facet.options) >= 2:
                leftovers = True
                break
        if not leftovers:
            state.done = True
            return None
    selection = select_aspect(state, d, inferred)
    if selection is None:
        if inferred:
            return render_inferred_confirmation(state, d, inferred, lex)
        state.done = True
        return None
    aspect, facet = selection
    return render_question(aspect, facet, state, lex)


def rerank_after_answer(state: SessionState, index: Index) -> RankedResults:
    """Shared feedback path: partition, Rocchio update, cosine re-sort.

    Never filters: every result stays in the ranking.
    """
    candidates, rejects = partition_functions(state)
    return apply_feedback(state, index, candidates, rejects)


def apply_feedback(
    state: SessionState, index: Index, candidates: set[str], rejects: set[str]
) -> RankedResults:
    state.query_vector = rocchio(
        state.query_vector, candidates, rejects, state.config.rocchio, index)
    state.ranking = rerank(index, state.query_vector, state.result_ids)
    return state.ranking
