import pytest

from logdelpezzo.reproduce import SECTIONS, reproduce_paper, table_rows


@pytest.mark.parametrize("section", SECTIONS)
def test_section_matches_and_is_certified(section):
    (table,) = reproduce_paper(section)
    assert table.rows
    assert table.all_match, table.first_divergence()
    assert all(r.certified for r in table.rows)
    assert table.first_divergence() is None


def test_rows_render():
    rows = table_rows(reproduce_paper("non_dreamy")[0])
    assert {"location", "quantity", "expected", "engine", "match"} <= set(rows[0])


def test_unknown_section():
    with pytest.raises(KeyError):
        reproduce_paper("nope")


def test_all_runs_every_section():
    assert [t.section for t in reproduce_paper("all")] == list(SECTIONS)
