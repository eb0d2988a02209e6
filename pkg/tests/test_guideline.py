import json

import pytest
from hypothesis import given, strategies as st

from mate.errors import FormatError, NotFoundError, ValidationError
from mate.guideline import (
    Guideline,
    MistakeSpec,
    load_guideline,
    parse_guideline,
    serialize_guideline,
)


def test_default_guideline_shape(guideline):
    assert len(guideline.entries) == 16
    assert [e.id for e in guideline.entries] == list(range(1, 17))
    exemplary = [e for e in guideline.entries if e.is_exemplary]
    assert len(exemplary) == 1
    assert exemplary[0].category_name == "Exemplary Practice"
    assert guideline.exemplary.id == 16


def test_every_entry_has_behavior_and_correction(guideline):
    for entry in guideline.entries:
        assert entry.behavior.strip()
        assert entry.correction.strip()
        assert entry.category_name.strip()


def test_get_unknown_id(guideline):
    with pytest.raises(NotFoundError):
        guideline.get(99)


def test_by_category_name_is_case_insensitive(guideline):
    entry = guideline.by_category_name("premature advice giving")
    assert entry.id == 2
    assert guideline.by_category_name("  Premature Advice Giving  ").id == 2


def _entries(n=3, exemplary_last=True):
    rows = [
        {
            "id": i,
            "category_name": f"Category {i}",
            "behavior": f"behavior {i}",
            "correction": f"correction {i}",
            "is_exemplary": False,
        }
        for i in range(1, n + 1)
    ]
    if exemplary_last:
        rows[-1]["is_exemplary"] = True
    return rows


def test_parse_rejects_duplicate_ids():
    rows = _entries(3)
    rows[1]["id"] = 1
    with pytest.raises(ValidationError):
        parse_guideline({"version": "t", "entries": rows})


def test_parse_rejects_duplicate_names():
    rows = _entries(3)
    rows[1]["category_name"] = rows[0]["category_name"]
    with pytest.raises(ValidationError):
        parse_guideline({"version": "t", "entries": rows})


def test_parse_requires_exactly_one_exemplary():
    with pytest.raises(ValidationError):
        parse_guideline({"version": "t", "entries": _entries(3, exemplary_last=False)})
    rows = _entries(3)
    rows[0]["is_exemplary"] = True
    with pytest.raises(ValidationError):
        parse_guideline({"version": "t", "entries": rows})


def test_parse_rejects_empty_fields():
    rows = _entries(2)
    rows[0]["behavior"] = "  "
    with pytest.raises(ValidationError):
        parse_guideline({"version": "t", "entries": rows})


def test_serialize_parse_round_trip(guideline):
    assert parse_guideline(serialize_guideline(guideline)) == guideline


def test_digest_lists_every_category(guideline):
    digest = guideline.digest()
    for entry in guideline.entries:
        assert f"{entry.id}. {entry.category_name}" in digest


def test_load_malformed_json_reports_line(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"version": "x",\n  "entries": [}', encoding="utf-8")
    with pytest.raises(FormatError) as err:
        load_guideline(path)
    assert "line" in str(err.value)


@given(
    n=st.integers(min_value=2, max_value=12),
    version=st.text(
        alphabet=st.characters(whitelist_categories=("L", "N")), min_size=1, max_size=8
    ),
)
def test_round_trip_property(n, version):
    g = Guideline(
        entries=tuple(
            MistakeSpec(
                id=i,
                category_name=f"Name {i}",
                behavior=f"b{i}",
                correction=f"c{i}",
                is_exemplary=(i == n),
            )
            for i in range(1, n + 1)
        ),
        version=version,
    )
    rebuilt = parse_guideline(json.loads(json.dumps(serialize_guideline(g))))
    assert rebuilt == g
