import pytest

from mate.cases import COGNITIVE_MODEL_FIELDS, parse_cases, render_case_profile
from mate.errors import FormatError, NotFoundError, ValidationError


def _case_row(case_id="c1", **overrides):
    row = {
        "id": case_id,
        "name": "Avery",
        "profile": "A 29-year-old analyst with escalating deadline anxiety.",
        "cognitive_model": {
            "core_beliefs": ["I am not good enough."],
            "intermediate_beliefs": ["If I make a mistake, everything falls apart."],
            "automatic_thoughts": ["They will notice I am a fraud."],
            "emotions": ["anxiety", "shame"],
            "situations": ["late-night deadline work"],
            "behaviors": ["rechecking work", "avoiding email"],
        },
    }
    row.update(overrides)
    return row


def test_sample_cases_load(cases):
    assert len(cases) == 6
    ids = cases.ids()
    assert len(set(ids)) == 6
    for case in cases.cases:
        assert case.profile.strip()
        assert case.cognitive_model["core_beliefs"]


def test_get_unknown_case(cases):
    with pytest.raises(NotFoundError):
        cases.get("missing-id")


def test_duplicate_ids_rejected():
    with pytest.raises(ValidationError):
        parse_cases({"cases": [_case_row("dup"), _case_row("dup")]})


def test_empty_profile_rejected():
    with pytest.raises(ValidationError):
        parse_cases({"cases": [_case_row(profile="  ")]})


def test_empty_core_beliefs_rejected():
    row = _case_row()
    row["cognitive_model"]["core_beliefs"] = []
    with pytest.raises(ValidationError):
        parse_cases({"cases": [row]})


def test_missing_cases_list_rejected():
    with pytest.raises(FormatError):
        parse_cases({"not_cases": []})


def test_render_profile_contains_every_field_verbatim():
    case = parse_cases({"cases": [_case_row()]}).cases[0]
    rendered = render_case_profile(case)
    assert case.profile in rendered
    for field in COGNITIVE_MODEL_FIELDS:
        for item in case.cognitive_model[field]:
            assert item in rendered


def test_render_profile_is_deterministic():
    case = parse_cases({"cases": [_case_row()]}).cases[0]
    assert render_case_profile(case) == render_case_profile(case)
