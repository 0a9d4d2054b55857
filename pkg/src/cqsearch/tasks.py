"""Shallow rule-based extraction of development tasks from text.

A task is a verb phrase with up to six roles: verb (v), direct object (do)
and its modifier (dom), preposition (p), prepositional object (po) and its
modifier (pom).  Extraction runs a priority tagger over clause tokens and
then chunks noun phrases around each verb; no statistical NLP involved.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .corpus import FunctionDoc, preprocess_doc
from .lexicon import CONJUNCTIONS, DETERMINERS, Lexicon
from .morphology import is_verb_form, lemmatize_verb

CONCRETE_ROLES = ("v", "dom", "do", "p", "pom", "po")

VERB, NOUN, ADJ, PREP, DET, OTHER = "VERB", "NOUN", "ADJ", "PREP", "DET", "OTHER"


@dataclass(frozen=True)
class Task:
    v: str
    dom: str | None = None
    do: str | None = None
    p: str | None = None
    pom: str | None = None
    po: str | None = None

    def __post_init__(self) -> None:
        if not self.v or not (self.do or (self.p and self.po)):
            raise ValueError(f"incomplete task: {self!r}")
        for role in CONCRETE_ROLES:
            value = getattr(self, role)
            if value is not None and (not value.strip() or value != value.lower()):
                raise ValueError(f"task role {role} must be lowercase/non-empty: {value!r}")

    def get(self, role: str) -> str | None:
        return getattr(self, role)

    def roles(self) -> dict[str, str]:
        return {r: v for r in CONCRETE_ROLES if (v := getattr(self, r)) is not None}

    def matches(self, attrs: dict[str, str]) -> bool:
        """True if every (role, value) in ``attrs`` is carried by this task.

        The abstract roles ``o`` and ``om`` match either object slot.
        """
        for role, value in attrs.items():
            if role == "o":
                if value not in (self.do, self.po):
                    return False
            elif role == "om":
                if value not in (self.dom, self.pom):
                    return False
            elif getattr(self, role) != value:
                return False
        return True


def render_task(task: Task) -> str:
    """Render the task phrase: ``v [dom] do [p [pom] po]``."""
    parts = [task.v]
    for role in ("dom", "do", "p", "pom", "po"):
        value = task.get(role)
        if value is not None:
            parts.append(value)
    return " ".join(parts)


@dataclass(frozen=True)
class TaggedToken:
    text: str
    tag: str
    lemma: str | None = None


_CLAUSE_RE = re.compile(r"[.!?;,:]+")
_WORD_RE = re.compile(r"[0-9a-z]+")


def _tag_clause(words: list[str], lex: Lexicon) -> list[TaggedToken]:
    tags: list[str | None] = [None] * len(words)
    lemmas: list[str | None] = [None] * len(words)
    for i, word in enumerate(words):
        if word in lex.prepositions:
            tags[i] = PREP
        elif word in DETERMINERS:
            tags[i] = DET
        elif word in CONJUNCTIONS:
            tags[i] = OTHER
        elif word in lex.verbs:
            tags[i] = VERB
            lemmas[i] = word
        elif word in lex.lemma_exceptions:
            tags[i] = VERB
            lemmas[i] = lex.lemma_exceptions[word]
        elif word.endswith("ly") and len(word) > 3:
            tags[i] = OTHER  # adverb, never part of a noun phrase
        elif i == 0 and is_verb_form(word, lex):
            tags[i] = VERB
            lemmas[i] = lemmatize_verb(word, lex)
    # untagged tokens default to NOUN; one immediately before a noun modifies it
    for i in range(len(words) - 1, -1, -1):
        if tags[i] is None:
            tags[i] = ADJ if i + 1 < len(words) and tags[i + 1] == NOUN else NOUN
    return [TaggedToken(w, t, l) for w, t, l in zip(words, tags, lemmas)]


def _clauses(sentence: str) -> list[list[str]]:
    out = []
    for part in _CLAUSE_RE.split(sentence.lower()):
        words = _WORD_RE.findall(part)
        if words:
            out.append(words)
    return out


def tokenize_and_tag(sentence: str, lex: Lexicon) -> list[TaggedToken]:
    tokens: list[TaggedToken] = []
    for words in _clauses(sentence):
        tokens.extend(_tag_clause(words, lex))
    return tokens


def _noun_phrase(tokens: list[TaggedToken], start: int, end: int) -> tuple[int, int] | None:
    """First contiguous ADJ/NOUN run in tokens[start:end); returns (lo, hi)."""
    i = start
    while i < end and tokens[i].tag == DET:
        i += 1
    if i >= end or tokens[i].tag not in (ADJ, NOUN):
        return None
    lo = i
    while i < end and tokens[i].tag in (ADJ, NOUN):
        i += 1
    return lo, i


def _object_from_phrase(
    tokens: list[TaggedToken], lo: int, hi: int, end: int, lex: Lexicon
) -> tuple[str, str | None, int]:
    """Resolve an object phrase: (object string, modifier, scan position after it).

    Collection heads absorb a following ``of <noun phrase>`` into the object
    string ("list of ints"), consuming the inner phrase.
    """
    head = tokens[hi - 1].text
    modifier = tokens[hi - 2].text if hi - lo >= 2 and tokens[hi - 2].tag == ADJ else None
    obj = head
    pos = hi
    while head in lex.collection_nouns and pos < end and tokens[pos].text == "of":
        inner = _noun_phrase(tokens, pos + 1, end)
        if inner is None:
            break
        ilo, ihi = inner
        obj = obj + " of " + " ".join(t.text for t in tokens[ilo:ihi])
        head = tokens[ihi - 1].text
        pos = ihi
    return obj, modifier, pos


def _extract_clause_tasks(tokens: list[TaggedToken], lex: Lexicon) -> list[Task]:
    verb_idx = [i for i, t in enumerate(tokens) if t.tag == VERB]
    found: list[tuple[int, dict[str, str]]] = []
    for n, vi in enumerate(verb_idx):
        end = verb_idx[n + 1] if n + 1 < len(verb_idx) else len(tokens)
        roles: dict[str, str] = {}
        pos = vi + 1
        # direct object: nearest noun phrase before any preposition
        while pos < end and tokens[pos].tag in (DET, OTHER):
            pos += 1
        if pos < end and tokens[pos].tag in (ADJ, NOUN):
            np = _noun_phrase(tokens, pos, end)
            if np:
                obj, mod, pos = _object_from_phrase(tokens, np[0], np[1], end, lex)
                roles["do"] = obj
                if mod:
                    roles["dom"] = mod
        # preposition and its object
        while pos < end and tokens[pos].tag != PREP:
            pos += 1
        if pos < end and tokens[pos].tag == PREP:
            np = _noun_phrase(tokens, pos + 1, end)
            if np:
                obj, mod, _ = _object_from_phrase(tokens, np[0], np[1], end, lex)
                roles["p"] = tokens[pos].text
                roles["po"] = obj
                if mod:
                    roles["pom"] = mod
        found.append((vi, roles))

    # bare verbs conjoined to a later verb share that verb's objects
    for n in range(len(found) - 2, -1, -1):
        vi, roles = found[n]
        if roles:
            continue
        gap = tokens[vi + 1 : verb_idx[n + 1]]
        if gap and all(t.tag in (DET, OTHER) for t in gap):
            found[n] = (vi, dict(found[n + 1][1]))

    tasks = []
    for vi, roles in found:
        lemma = tokens[vi].lemma or tokens[vi].text
        if roles.get("do") or (roles.get("p") and roles.get("po")):
            tasks.append(Task(v=lemma, **roles))
    return tasks


def extract_tasks(sentence: str, lex: Lexicon) -> list[Task]:
    """Extract every well-formed task from a normalized sentence."""
    tasks: list[Task] = []
    for words in _clauses(sentence):
        tasks.extend(_extract_clause_tasks(_tag_clause(words, lex), lex))
    return tasks


def _head(value: str) -> str:
    return value.split()[0]


def filter_generic(tasks: list[Task], lex: Lexicon) -> list[Task]:
    """Drop tasks whose verb or object heads are too generic to clarify."""
    kept = []
    for task in tasks:
        if task.v in lex.generic_verbs:
            continue
        if task.do and _head(task.do) in lex.generic_nouns:
            continue
        if task.po and _head(task.po) in lex.generic_nouns:
            continue
        kept.append(task)
    return kept


def extract_query_task(query: str, lex: Lexicon) -> Task | None:
    """First non-generic task extracted from a user query, if any."""
    tasks = filter_generic(extract_tasks(query, lex), lex)
    return tasks[0] if tasks else None


@dataclass
class TaskTable:
    """All (function_id, task) rows extracted from a result list."""

    rows: list[tuple[str, Task]] = field(default_factory=list)
    index: dict[str, dict[str, set[str]]] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self.index = {role: {} for role in CONCRETE_ROLES}
        for fid, task in self.rows:
            for role, value in task.roles().items():
                self.index[role].setdefault(value, set()).add(fid)

    def __len__(self) -> int:
        return len(self.rows)

    def function_ids(self) -> list[str]:
        seen: dict[str, None] = {}
        for fid, _ in self.rows:
            seen.setdefault(fid)
        return list(seen)

    def matching(self, attrs: dict[str, str]) -> list[tuple[str, Task]]:
        """Rows whose task carries every attribute in ``attrs`` (symbolic
        subset test, abstract object roles included)."""
        return [(fid, t) for fid, t in self.rows if t.matches(attrs)]


def build_task_table(results: list[FunctionDoc], lex: Lexicon) -> TaskTable:
    rows: list[tuple[str, Task]] = []
    for doc in results:
        sentence = preprocess_doc(doc)
        for task in filter_generic(extract_tasks(sentence, lex), lex):
            rows.append((doc.id, task))
    return TaskTable(rows=rows)
