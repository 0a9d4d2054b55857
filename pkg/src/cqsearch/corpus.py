"""Function corpus loading and text normalization.

A corpus is an ordered collection of functions, each carrying a stable id,
an identifier-style name and an optional comment/docstring.  The loader
accepts CodeSearchNet-style JSONL (``func_name``/``docstring``/``code``)
as well as a generic schema (``id``/``name``/``comment``/``code``).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator


class CorpusError(Exception):
    """Raised for malformed corpus files or invariant violations."""


@dataclass(frozen=True)
class FunctionDoc:
    id: str
    name: str
    comment: str = ""
    code: str = ""
    language: str = ""
    url: str = ""

    def __post_init__(self) -> None:
        if not self.id:
            raise CorpusError("function id must be non-empty")
        if not self.name:
            raise CorpusError(f"function {self.id!r}: name must be non-empty")


@dataclass
class Corpus:
    docs: list[FunctionDoc] = field(default_factory=list)

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for doc in self.docs:
            if doc.id in seen:
                raise CorpusError(f"duplicate function id {doc.id!r}")
            seen.add(doc.id)

    def __len__(self) -> int:
        return len(self.docs)

    def __iter__(self) -> Iterator[FunctionDoc]:
        return iter(self.docs)

    def get(self, doc_id: str) -> FunctionDoc:
        for doc in self.docs:
            if doc.id == doc_id:
                return doc
        raise KeyError(doc_id)


def _doc_from_record(record: dict, lineno: int) -> FunctionDoc:
    if "func_name" in record:
        name = record["func_name"]
        comment = record.get("docstring", "") or ""
        doc_id = record.get("id") or record.get("url") or ""
        if not doc_id:
            raise CorpusError(f"line {lineno}: CodeSearchNet record needs 'id' or 'url'")
    else:
        name = record.get("name", "")
        comment = record.get("comment", "") or ""
        doc_id = record.get("id", "")
        if not doc_id:
            raise CorpusError(f"line {lineno}: missing 'id'")
    if not name:
        raise CorpusError(f"line {lineno}: missing function name")
    return FunctionDoc(
        id=str(doc_id),
        name=str(name),
        comment=str(comment),
        code=str(record.get("code", "") or ""),
        language=str(record.get("language", "") or ""),
        url=str(record.get("url", "") or ""),
    )


def load_corpus(path: str | Path, format: str = "jsonl") -> Corpus:
    """Load a corpus from a JSONL file, preserving file order.

    Raises :class:`CorpusError` on IO failure, malformed lines (with the
    offending line number) or duplicate ids.
    """
    if format != "jsonl":
        raise CorpusError(f"unsupported corpus format {format!r}")
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise CorpusError(f"cannot read corpus file {path}: {exc}") from exc

    docs: list[FunctionDoc] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusError(f"line {lineno}: invalid JSON ({exc.msg})") from exc
        if not isinstance(record, dict):
            raise CorpusError(f"line {lineno}: expected a JSON object")
        docs.append(_doc_from_record(record, lineno))
    return Corpus(docs=docs)


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    """Write a corpus back out as generic-schema JSONL (round-trip safe)."""
    lines = []
    for doc in corpus:
        lines.append(json.dumps(
            {"id": doc.id, "name": doc.name, "comment": doc.comment,
             "code": doc.code, "language": doc.language, "url": doc.url},
            sort_keys=True))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


_CAMEL_RE = re.compile(r"[A-Z]+(?![a-z])|[A-Z][a-z]*|[a-z]+|[0-9]+")


def split_identifier(name: str) -> list[str]:
    """Split a camelCase/snake_case identifier into lowercase tokens.

    Tokens are maximal runs split at underscores, case transitions and
    digit boundaries; e.g. ``toUTF8String`` -> ``['to','utf','8','string']``.
    """
    tokens: list[str] = []
    for chunk in re.split(r"[^0-9A-Za-z]+", name):
        if not chunk:
            continue
        tokens.extend(m.group(0).lower() for m in _CAMEL_RE.finditer(chunk))
    return tokens


_FENCE_RE = re.compile(r"```.*?```", re.DOTALL)
_INLINE_CODE_RE = re.compile(r"`([^`]*)`")
_HTML_TAG_RE = re.compile(r"<[^>]+>")
_MARKUP_LINE_RE = re.compile(r"^\s*(@\w+|:\w+(\s+\w+)*:)")
_SENTENCE_END_RE = re.compile(r"[.!?](?=\s|$)")


def normalize_comment(comment: str) -> str:
    """Reduce a raw docstring to a single plain-text sentence.

    Drops fenced code and markup-tag lines (``@param`` style or ``:param:``
    style), strips HTML tags, collapses whitespace and truncates at the
    first sentence boundary.
    """
    text = _FENCE_RE.sub(" ", comment)
    lines = [ln for ln in text.splitlines() if not _MARKUP_LINE_RE.match(ln)]
    text = " ".join(lines)
    text = _INLINE_CODE_RE.sub(r"\1", text)
    text = _HTML_TAG_RE.sub(" ", text)
    text = re.sub(r"\s+", " ", text).strip()
    match = _SENTENCE_END_RE.search(text)
    if match:
        text = text[: match.end()]
    return text


def preprocess_doc(doc: FunctionDoc) -> str:
    """Build the parseable sentence for a function: name tokens, a period,
    then the normalized first sentence of its comment."""
    tokens = split_identifier(doc.name)
    return " ".join(tokens) + ". " + normalize_comment(doc.comment)


def doc_terms(doc: FunctionDoc) -> list[str]:
    """All index terms for a function: name tokens, comment words and
    identifier tokens appearing in the code body."""
    terms = split_identifier(doc.name)
    comment = normalize_comment(doc.comment)
    for word in re.findall(r"[0-9A-Za-z_]+", comment):
        terms.extend(split_identifier(word))
    for ident in re.findall(r"[A-Za-z_][0-9A-Za-z_]*", doc.code):
        terms.extend(split_identifier(ident))
    return terms
