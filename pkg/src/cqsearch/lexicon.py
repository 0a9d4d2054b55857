"""Word lists driving the shallow parser and question renderer.

All lists ship as editable plain-text data files (one entry per line,
``#`` comments allowed).  Exception files hold ``form lemma`` pairs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

DETERMINERS = frozenset({"a", "an", "the"})
CONJUNCTIONS = frozenset({"and", "or"})


@dataclass(frozen=True)
class Lexicon:
    verbs: frozenset[str]
    prepositions: frozenset[str]
    generic_verbs: frozenset[str]
    generic_nouns: frozenset[str]
    collection_nouns: frozenset[str]
    lemma_exceptions: dict[str, str] = field(default_factory=dict)
    gerund_exceptions: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.generic_verbs <= self.verbs:
            missing = self.generic_verbs - self.verbs
            raise ValueError(f"generic verbs missing from verb list: {sorted(missing)}")


def _read_words(path: Path) -> list[str]:
    words = []
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.split("#", 1)[0].strip().lower()
        if line:
            words.append(line)
    return words


def _read_pairs(path: Path) -> dict[str, str]:
    pairs = {}
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.split("#", 1)[0].strip().lower()
        if not line:
            continue
        form, lemma = line.split()
        pairs[form] = lemma
    return pairs


def default_lexicon_dir() -> Path:
    return Path(str(resources.files("cqsearch").joinpath("data/lexicon")))


def load_lexicon(directory: str | Path | None = None) -> Lexicon:
    """Load the lexicon from ``directory`` (default: bundled data files)."""
    base = Path(directory) if directory is not None else default_lexicon_dir()
    return Lexicon(
        verbs=frozenset(_read_words(base / "verbs.txt")),
        prepositions=frozenset(_read_words(base / "prepositions.txt")),
        generic_verbs=frozenset(_read_words(base / "generic_verbs.txt")),
        generic_nouns=frozenset(_read_words(base / "generic_nouns.txt")),
        collection_nouns=frozenset(_read_words(base / "collection_nouns.txt")),
        lemma_exceptions=_read_pairs(base / "lemma_exceptions.txt"),
        gerund_exceptions=_read_pairs(base / "gerund_exceptions.txt"),
    )
