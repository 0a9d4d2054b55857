"""Rule-based verb morphology: lemmatization and gerund inflection.

Both directions are deterministic.  The lemmatizer strips a single
inflectional suffix (-s/-es/-ies/-ed/-ing) and uses the verb lexicon to
decide doubled-consonant and silent-e restoration; irregular forms come
from an exceptions table.
"""

from __future__ import annotations

import re

from .lexicon import Lexicon

_VOWELS = "aeiou"


def _undouble(stem: str) -> str | None:
    if len(stem) >= 3 and stem[-1] == stem[-2] and stem[-1] not in "lsz":
        return stem[:-1]
    return None


def _resolve_stem(stem: str, verbs: frozenset[str]) -> str:
    """Pick the lexicon-backed variant of a bare suffix-stripped stem."""
    undoubled = _undouble(stem)
    if undoubled and undoubled in verbs:
        return undoubled
    if stem in verbs:
        return stem
    if stem + "e" in verbs:
        return stem + "e"
    return stem


def lemmatize_verb(token: str, lex: Lexicon) -> str:
    """Map an inflected verb form to its base lemma (e.g. reads -> read)."""
    token = token.lower()
    if token in lex.lemma_exceptions:
        return lex.lemma_exceptions[token]
    if token in lex.verbs:
        return token
    if token.endswith("ies") and len(token) > 4:
        return token[:-3] + "y"
    if token.endswith("es") and token[:-2].endswith(("ss", "sh", "ch", "x", "z", "o")):
        return token[:-2]
    if token.endswith("s") and not token.endswith("ss"):
        return token[:-1]
    if token.endswith("ied") and len(token) > 4:
        return token[:-3] + "y"
    if token.endswith("ed") and len(token) > 3:
        return _resolve_stem(token[:-2], lex.verbs)
    if token.endswith("ing") and len(token) > 4:
        return _resolve_stem(token[:-3], lex.verbs)
    return token


def is_verb_form(token: str, lex: Lexicon) -> bool:
    return lemmatize_verb(token, lex) in lex.verbs


def _vowel_groups(word: str) -> int:
    return len(re.findall(r"[aeiouy]+", word))


def gerund(verb: str, lex: Lexicon) -> str:
    """Inflect a base verb to its -ing form (convert -> converting)."""
    verb = verb.lower()
    if verb in lex.gerund_exceptions:
        return lex.gerund_exceptions[verb]
    if verb.endswith("ie"):
        return verb[:-2] + "ying"
    if verb.endswith("e") and not verb.endswith(("ee", "oe", "ye")):
        return verb[:-1] + "ing"
    # single-syllable CVC stems double the final consonant (get -> getting)
    if (
        len(verb) >= 3
        and verb[-1] not in _VOWELS + "wxy"
        and verb[-2] in _VOWELS
        and verb[-3] not in _VOWELS
        and _vowel_groups(verb) == 1
    ):
        return verb + verb[-1] + "ing"
    return verb + "ing"
