import pytest

from cqsearch.morphology import gerund, is_verb_form, lemmatize_verb


@pytest.mark.parametrize("form,lemma", [
    ("reads", "read"),
    ("reading", "read"),
    ("read", "read"),
    ("converts", "convert"),
    ("converted", "convert"),
    ("converting", "convert"),
    ("copies", "copy"),
    ("copied", "copy"),
    ("copying", "copy"),
    ("parses", "parse"),
    ("parsed", "parse"),
    ("parsing", "parse"),
    ("encodes", "encode"),
    ("encoded", "encode"),
    ("encoding", "encode"),
    ("writes", "write"),
    ("writing", "write"),
    ("written", "write"),
    ("wrote", "write"),
    ("getting", "get"),
    ("got", "get"),
    ("matches", "match"),
    ("passes", "pass"),
    ("is", "be"),
    ("was", "be"),
    ("has", "have"),
    ("does", "do"),
    ("found", "find"),
    ("splits", "split"),
    ("stored", "store"),
    ("removes", "remove"),
])
def test_lemmatize(form, lemma, lexicon):
    assert lemmatize_verb(form, lexicon) == lemma


@pytest.mark.parametrize("verb,form", [
    ("convert", "converting"),
    ("copy", "copying"),
    ("change", "changing"),
    ("get", "getting"),
    ("set", "setting"),
    ("remove", "removing"),
    ("return", "returning"),
    ("read", "reading"),
    ("find", "finding"),
    ("do", "doing"),
    ("encode", "encoding"),
    ("write", "writing"),
    ("open", "opening"),
    ("run", "running"),
    ("put", "putting"),
    ("display", "displaying"),
    ("be", "being"),
    ("see", "seeing"),
    ("parse", "parsing"),
    ("draw", "drawing"),
])
def test_gerund(verb, form, lexicon):
    assert gerund(verb, lexicon) == form


def test_is_verb_form(lexicon):
    assert is_verb_form("reads", lexicon)
    assert is_verb_form("converting", lexicon)
    assert not is_verb_form("reader", lexicon)
    assert not is_verb_form("priority", lexicon)
