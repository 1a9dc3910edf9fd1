import json
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from logdelpezzo.families import non_dreamy_chain, p1xp1_diag, p2_chain, p2_conic, quadric_chain
from logdelpezzo.io import (DocumentError, chain_document_for, chain_from_dict, dumps_chain,
                            loads_chain, rows_to_csv, rows_to_json)
from logdelpezzo.kstability import beta


def _doc(pair, div):
    return chain_document_for(pair, div)


@pytest.mark.parametrize("build", [
    lambda: (p2_conic(F(1, 2)), p2_chain(p2_conic(F(1, 2)), 5, 2, 3)),
    lambda: (p2_conic(0), non_dreamy_chain()),
    lambda: (p1xp1_diag(F(1, 3)), quadric_chain(p1xp1_diag(F(1, 3)), 3, 2, 2)),
])
def test_round_trip_is_bit_exact(build):
    pair, div = build()
    text = dumps_chain(_doc(pair, div))
    doc = loads_chain(text)
    assert dumps_chain(doc) == text
    assert doc == _doc(pair, div)
    assert beta(doc.divisor()).beta == beta(div).beta


@given(st.integers(1, 40), st.integers(2, 41))
def test_coefficients_survive_as_text(p, q):
    if p >= q:
        return
    pair = p2_conic(F(p, q))
    text = dumps_chain(_doc(pair, p2_chain(pair, 2, 1, 1)))
    assert json.loads(text)["boundary"][0]["coefficient"] == str(F(p, q)).replace(" ", "")
    assert loads_chain(text).boundary.coefficient("C") == F(p, q)


def test_tangency_alias_and_defaults():
    doc = chain_from_dict({
        "base": "P2",
        "boundary": [{"curve": "C", "class": [2], "coefficient": "1/4"}],
        "aux": [{"id": "C", "class": [2]}],
        "steps": [{"on_aux": ["C"], "tangency": {"C": 1}},
                  {"on_previous_exceptional": 1, "on_aux": ["C"]}],
    })
    assert doc.steps[0].mult("C") == 1
    assert doc.divisor().log_discrepancy == 3 - 2 * F(1, 4)


@pytest.mark.parametrize("data, where", [
    ({"boundary": [], "steps": [{}]}, "base"),
    ({"base": "P3", "boundary": [], "steps": [{}]}, "base"),
    ({"base": "P2", "boundary": [{"curve": "C", "class": [2], "coefficient": 0.5}], "steps": [{}]},
     "boundary[0].coefficient"),
    ({"base": "P2", "boundary": [{"curve": "C", "class": "2", "coefficient": "1/2"}], "steps": [{}]},
     "boundary[0].class"),
    ({"base": "P2", "boundary": [], "steps": []}, "steps"),
    ({"base": "P2", "boundary": [], "steps": [{}, {"on_earlier_exceptional": [1, 2]}]}, "steps[1]"),
    ({"base": "P2", "boundary": [], "steps": [{"multiplicity": 3}]}, "steps[0].multiplicity"),
])
def test_errors_name_the_field(data, where):
    with pytest.raises(DocumentError) as info:
        chain_from_dict(data)
    assert info.value.where == where


def test_json_syntax_error_reports_line():
    with pytest.raises(DocumentError) as info:
        loads_chain('{\n  "base": "P2",\n  oops\n}')
    assert info.value.where.startswith("line 3")


def test_report_writers():
    rows = [{"a": F(1, 3), "b": True, "c": None}]
    assert rows_to_csv(rows) == "a,b,c\n1/3,true,\n"
    body = json.loads(rows_to_json(rows, section="x"))
    assert body == {"rows": [{"a": "1/3", "b": "true", "c": ""}], "section": "x"}
