import pytest

from gwp.config import get_config
from gwp.core_groups import GroupWord
from gwp.errors import ConfigError, ExpansionLimitError, GwpError
from gwp.registry import resolve_group, shift_letter_for
from gwp.slp import Slp, slp_power


def test_base_groups():
    for name in ("a5", "f2", "f3", "grigorchuk", "thompson"):
        spec = resolve_group(name)
        assert spec.name == name
        assert not spec.is_wreath
        assert spec.base_name == name
    assert resolve_group(" Grigorchuk ").name == "grigorchuk"


def test_wreath_selectors():
    spec = resolve_group("wreath:a5@7")
    assert spec.is_wreath
    assert spec.modulus == 7
    assert spec.base_name == "a5"
    assert "T" in spec.alphabet
    plain = resolve_group("wreath:f2")
    assert plain.modulus is None
    assert "t" in plain.alphabet
    assert resolve_group("wreath:a5@1_000").modulus == 1000


def test_unknown_selectors():
    for name in ("a6", "wreath:a6", "wreath:a5@0", "wreath:a5@x"):
        with pytest.raises(ConfigError):
            resolve_group(name)


def test_shift_letter_choice():
    assert shift_letter_for(resolve_group("a5").alphabet) == "T"
    assert shift_letter_for(resolve_group("thompson").alphabet) == "t"


def test_compressed_triviality_for_finite_and_thompson():
    a5 = resolve_group("a5")
    g = slp_power(a5.word("s"), 5 * 10 ** 20)
    assert a5.is_trivial_slp(g)
    assert not a5.is_trivial_slp(slp_power(a5.word("s"), 5 * 10 ** 20 + 1))
    thompson = resolve_group("thompson")
    assert thompson.is_trivial_slp(slp_power(thompson.word("x0 x0'"), 10 ** 15))


def test_expanding_groups_respect_the_limit(monkeypatch):
    grig = resolve_group("grigorchuk")
    assert grig.is_trivial_slp(slp_power(grig.word("a d"), 4 * 3))
    monkeypatch.setattr(get_config(), "expand_limit", 10)
    with pytest.raises(ExpansionLimitError):
        grig.is_trivial_slp(slp_power(grig.word("a d"), 4 * 3))


def test_wreath_slp():
    spec = resolve_group("wreath:a5")
    g = slp_power(spec.word("s T s' T'"), 10 ** 12 + 1)
    element = spec.evaluate_slp(g)
    assert element.shift == 0
    assert not spec.is_trivial_slp(g)
    with pytest.raises(GwpError):
        resolve_group("a5").evaluate_slp(g)
    assert isinstance(spec.word("s T"), GroupWord)
