from __future__ import annotations

import itertools

import pytest

from ik2tree.errors import FormatError, InputError, NotFoundError, ParseError
from ik2tree.layout import LevelSchedule
from ik2tree.rdf import (Dictionary, RdfDataset, choose_strategy, evaluate, ingest,
                         parse_pattern, parse_triples, pattern_class)

LINES = [
    "<alice> <knows> <bob>",
    "<alice> <knows> <carol>",
    "<bob> <knows> <carol>",
    "<alice> <age> \"30\"",
    "<carol> <type> <Person>",
    "<bob> <type> <Person>",
    "",
    "<alice> <knows> <bob>",
]


@pytest.fixture
def ds():
    return ingest(LINES)


def brute(rows, pattern):
    s, p, o = parse_pattern(pattern)
    return sorted(r for r in rows if (s is None or r[0] == s) and (p is None or r[1] == p)
                  and (o is None or r[2] == o))


def test_ingest_dictionaries(ds):
    assert len(ds) == 6
    # subjects and objects share one id space
    assert ds.index.nx == ds.index.nz == len(ds.so_dict) == 5
    assert ds.index.ysize == len(ds.p_dict) == 3
    assert ds.so_dict.decode(ds.so_dict.encode("<bob>")) == "<bob>"
    assert ds.triples() == sorted(set(filter(None, (tuple(l.split()) for l in LINES))))


def test_every_pattern_class(ds, backend):
    rows = ds.triples()
    terms = {0: {r[0] for r in rows} | {"<nobody>"}, 1: {r[1] for r in rows} | {"<nope>"},
             2: {r[2] for r in rows}}
    for bound in itertools.product([False, True], repeat=3):
        choices = [sorted(terms[i]) if b else [None] for i, b in enumerate(bound)]
        for pattern in itertools.product(*choices):
            want = brute(rows, pattern)
            for strategy in ("auto", "eager") + (("lazy",) if pattern[1] is None else ()):
                assert evaluate(ds, pattern, strategy) == want, (pattern, strategy)


def test_pattern_helpers():
    assert parse_pattern("<a> ?p ?") == ("<a>", None, None)
    assert parse_pattern(["<a>", None, "<b>"]) == ("<a>", None, "<b>")
    assert pattern_class("<a> ? <b>") == "(S,?,O)"
    assert pattern_class("? ? ?") == "(?,?,?)"
    with pytest.raises(InputError):
        parse_pattern("<a> <b>")
    with pytest.raises(InputError):
        parse_pattern(["<a>", 3, None])


def test_choose_strategy():
    assert choose_strategy("<a> ? ?", 1024) == "lazy"
    assert choose_strategy("? ? <o>", 64) == "lazy"
    assert choose_strategy("<a> ? ?", 63) == "eager"
    assert choose_strategy("<a> ? <b>", 1024) == "eager"
    assert choose_strategy("<a> <p> ?", 1024) == "eager"
    assert choose_strategy("<a> ? ?", 10, threshold=8) == "lazy"


def test_evaluate_errors(ds):
    with pytest.raises(InputError):
        evaluate(ds, "? ? ?", "fastest")
    assert evaluate(ds, "<zed> ? ?") == []


def test_parse_errors():
    with pytest.raises(ParseError) as err:
        parse_triples(["a b c", "a b"])
    assert err.value.lineno == 2


def test_dictionary():
    d = Dictionary(["b", "a", "c", "a"])
    assert d.terms == ["a", "b", "c"]
    assert "b" in d and "z" not in d
    assert d.get("z") is None
    with pytest.raises(NotFoundError):
        d.encode("z")
    with pytest.raises(NotFoundError):
        d.decode(3)
    assert Dictionary.from_text(d.to_text()) == d
    with pytest.raises(FormatError):
        Dictionary.from_text("b\na\n")
    with pytest.raises(FormatError):
        Dictionary.from_text("a b\n")


def test_save_load(ds, tmp_path):
    path = tmp_path / "d.ik2"
    ds.save(path)
    back = RdfDataset.load(path)
    assert back.triples() == ds.triples()
    assert back.so_dict == ds.so_dict and back.p_dict == ds.p_dict
    (tmp_path / "d.ik2.p.dict").write_text("<only>\n")
    with pytest.raises(FormatError):
        RdfDataset.load(path)


def test_custom_schedule_and_empty():
    ds = ingest(LINES, LevelSchedule((3, 3)))
    assert ds.index.schedule.ks == (3, 3)
    assert evaluate(ds, "<alice> ? ?") == [r for r in ds.triples() if r[0] == "<alice>"]
    empty = ingest([])
    assert len(empty) == 0
    assert evaluate(empty, "? ? ?") == []
