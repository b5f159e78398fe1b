import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bvtt import gallery
from bvtt.textformat import BuildError, FormatError, build, document_from, dumps, parse, reduce_mod

HEADER = "field Q\ngenerator e1 degree 1\ngenerator e2 degree 1\ncap 2\n"


@pytest.mark.parametrize("name", gallery.names())
def test_round_trip_on_gallery(name):
    doc = gallery.get(name).document()
    text = dumps(doc)
    again = parse(text)
    assert again == doc
    assert dumps(again) == text


def test_single_generator_document():
    doc = parse("field Q\ngenerator e1 degree 1\ncap 1\nd e1 = 0\n")
    assert [g.name for g in doc.generators] == ["e1"]
    assert doc.differential == {}


def test_coefficients():
    doc = parse(HEADER + "d e1 = 1/2 e1 e2 - 3 e1 e2\n")
    assert str(doc.differential["e1"]) == "-5/2 e1 e2"
    doc = parse(HEADER.replace("field Q", "field F 7") + "d e1 = 3 mod 7 e1 e2\n")
    assert str(doc.differential["e1"]) == "3 e1 e2"


def test_multiline_operator_block():
    doc = parse("field Q\ngenerator a degree 4 nilpotent 2\ngenerator c degree 3\ncap 4\n"
                "operator D degree -1 {\n  a -> c ;\n}\n")
    assert "D" in doc.operators


@pytest.mark.parametrize("text, line, fragment", [
    (HEADER + "d e1 = e1\n", 5, "degree mismatch"),
    (HEADER + "d e1 = e1 e9\n", 5, "unknown generator"),
    ("field Q\ngenerator y degree 2\ncap 2\n", 2, "nilpotent"),
    ("field Q\ngenerator e1 degreee 1\n", 2, "expected 'degree'"),
    ("field F 9\n", 1, "not prime"),
    ("field Q\ngenerator e1 degree 1\ncap 1\nstructure bv delta=D\n", 4, "no operator"),
    ("field Q\ngenerator e1 degree 1 bidegree 1 1\ncap 1\n", 2, "does not sum"),
    ("field Q\ngenerator e1 degree 1\nd e1 = 0\n", 3, "cap"),
])
def test_errors_carry_positions(text, line, fragment):
    with pytest.raises(FormatError) as err:
        parse(text)
    assert err.value.line == line
    assert fragment in str(err.value)


def test_build_checks_the_differential():
    doc = parse("field Q\ngenerator a degree 1\ngenerator b degree 2 nilpotent 2\n"
                "generator c degree 3\ncap 3\nd a = b\nd b = c\n")
    with pytest.raises(BuildError, match="d²"):
        build(doc)


def test_reduce_mod():
    doc = gallery.get("heisenberg").document()
    red = reduce_mod(doc, 5)
    assert red.field.characteristic() == 5
    assert build(red).bv is not None
    with pytest.raises(BuildError):
        reduce_mod(red, 7)
    half = parse(HEADER + "d e1 = 1/5 e1 e2\n")
    with pytest.raises(BuildError):
        reduce_mod(half, 5)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_round_trip_on_random_block_sums(seed):
    b = gallery.random_block_sum(random.Random(seed))
    doc = document_from(b.algebra, b.d, operators={"D": b.delta}, structure=("bv", {"delta": "D"}))
    assert parse(dumps(doc)) == doc
    assert build(parse(dumps(doc))).bv.delta == b.delta
