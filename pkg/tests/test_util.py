import json

from hypothesis import given, strategies as st

from conftest import FIXED_TIME
from mate.util import (
    atomic_write_json,
    digest_of_file,
    normalize_quote,
    normalize_text,
    now_epoch,
    now_iso,
    stable_seed,
)


def test_fixed_time_pins_both_clocks(monkeypatch):
    assert now_iso() == FIXED_TIME
    from datetime import datetime

    assert now_epoch() == datetime.fromisoformat(FIXED_TIME).timestamp()
    monkeypatch.delenv("MATE_FIXED_TIME")
    # Unpinned clocks move and roughly agree with each other.
    live = now_iso()
    assert live != FIXED_TIME
    assert abs(now_epoch() - datetime.fromisoformat(live).timestamp()) < 5


def test_normalize_text():
    assert normalize_text("  Hello   WORLD \n") == "hello world"


def test_normalize_quote_strips_surrounding_punctuation_only():
    assert normalize_quote('"You should... stop!"') == "you should... stop"
    assert normalize_quote("“Curly quotes too.”") == "curly quotes too"
    assert normalize_quote("mid-word hy-phens stay") == "mid-word hy-phens stay"


def test_stable_seed_is_deterministic_and_sensitive():
    assert stable_seed(1, "a", 2) == stable_seed(1, "a", 2)
    assert stable_seed(1, "a", 2) != stable_seed(1, "a", 3)
    assert stable_seed(1, "a") != stable_seed(1, "b")
    # Joined parts must not collide across boundaries.
    assert stable_seed("ab", "c") != stable_seed("a", "bc")


@given(parts=st.lists(st.integers(), min_size=1, max_size=4))
def test_stable_seed_fits_in_63_bits(parts):
    seed = stable_seed(*parts)
    assert 0 <= seed < 2**63


def test_atomic_write_json_round_trip(tmp_path):
    target = tmp_path / "out.json"
    atomic_write_json(target, {"a": 1})
    assert json.loads(target.read_text()) == {"a": 1}
    assert not target.with_suffix(".json.tmp").exists()


def test_digest_of_file_changes_with_content(tmp_path):
    f = tmp_path / "x"
    f.write_text("one")
    first = digest_of_file(f)
    f.write_text("two")
    assert digest_of_file(f) != first
    assert len(first) == 16
