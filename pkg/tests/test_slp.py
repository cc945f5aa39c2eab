import random

import pytest

from gwp.core_groups import FreeGroupOracle, GenAlphabet, word_inverse
from gwp.errors import (
    AlphabetError,
    ExpansionLimitError,
    PositionOutOfRangeError,
    RangeError,
    SlpCycleError,
    UndefinedVariableError,
)
from gwp.slp import (
    Slp,
    SlpBuilder,
    slp_at,
    slp_count,
    slp_depth,
    slp_expand,
    slp_expand_tokens,
    slp_from_word,
    slp_invert,
    slp_length,
    slp_morphism_tower,
    slp_power,
    slp_size,
    slp_substitute,
    slp_substring,
    slp_validate,
    slp_within_size_bound,
)

ALPHABET = GenAlphabet.from_generators(["a", "b"])


def random_slp(rng, n_vars=8, max_rhs=4):
    """Random SLP over a, a', b, b'; variable k only uses variables below k"""
    letters = ["a", "a'", "b", "b'"]
    rules = {}
    for k in range(n_vars):
        rhs = []
        for _ in range(rng.randint(1, max_rhs)):
            if k and rng.random() < 0.6:
                rhs.append(f"V{rng.randrange(k)}")
            else:
                rhs.append(rng.choice(letters))
        rules[f"V{k}"] = rhs
    return Slp(rules, f"V{n_vars - 1}", ALPHABET)


def fibonacci_slp(n):
    rules = {"F0": ["b"], "F1": ["a"]}
    for k in range(2, n + 1):
        rules[f"F{k}"] = [f"F{k - 1}", f"F{k - 2}"]
    return Slp(rules, f"F{n}", ALPHABET)


def test_fibonacci_word():
    g = fibonacci_slp(6)
    assert slp_expand(g).text() == "a b a a b a b a a b a a b"
    assert slp_length(g) == 13
    assert slp_count(g, "a") == 8
    assert slp_count(g, "b") == 5
    assert slp_depth(g) == 6


def test_huge_lengths_are_exact():
    g = fibonacci_slp(300)
    a, b = 1, 1  # lengths of F1, F0
    for _ in range(2, 301):
        a, b = a + b, a
    assert slp_length(g) == a
    assert slp_at(g, 0) == "a"
    assert slp_at(g, slp_length(g) - 1) in ("a", "b")


def test_query_ops_match_expansion_on_random_slps(size_bound):
    rng = random.Random(1234)
    for _ in range(1000):
        g = random_slp(rng, n_vars=rng.randint(1, 9))
        word = slp_expand_tokens(g)
        n = len(word)
        assert slp_length(g) == n
        assert slp_count(g, "a") == word.count("a")
        size_bound(g)
        if n == 0:
            continue
        p = rng.randrange(n)
        assert slp_at(g, p) == word[p]
        q = rng.randrange(p, n)
        size_bound(slp_substring(g, p, q))
        assert slp_expand_tokens(slp_substring(g, p, q)) == word[p:q + 1]


def test_invert_derives_inverse_word(size_bound):
    rng = random.Random(99)
    for _ in range(100):
        g = random_slp(rng)
        size_bound(slp_invert(g))
        assert slp_expand(slp_invert(g)) == word_inverse(slp_expand(g))


def test_size_and_validation_errors():
    g = Slp({"S": ["A", "A", "b"], "A": ["a", "b"]}, "S", ALPHABET)
    assert slp_size(g) == 5
    with pytest.raises(SlpCycleError):
        slp_validate(Slp({"S": ["A"], "A": ["S"]}, "S"))
    with pytest.raises(UndefinedVariableError):
        slp_validate(Slp({"S": ["a"]}, "T"))
    with pytest.raises(UndefinedVariableError):
        slp_validate(Slp({"S": ["q"]}, "S", ALPHABET))


def test_position_and_range_errors():
    g = fibonacci_slp(4)
    with pytest.raises(PositionOutOfRangeError):
        slp_at(g, 5)
    with pytest.raises(PositionOutOfRangeError):
        slp_at(g, -1)
    with pytest.raises(RangeError):
        slp_substring(g, 3, 2)
    with pytest.raises(RangeError):
        slp_substring(g, 0, 5)


def test_expansion_guard(size_bound):
    g = slp_power(ALPHABET.word("a"), 10 ** 12)
    size_bound(g)
    assert slp_length(g) == 10 ** 12
    with pytest.raises(ExpansionLimitError) as exc:
        slp_expand(g, limit=1000)
    assert exc.value.length == 10 ** 12


def test_power_is_logarithmic(size_bound):
    w = ALPHABET.word("a b")
    g = slp_power(w, 1000)
    size_bound(g, slp_power(w, 0), slp_power(w, 10 ** 40))
    assert slp_length(g) == 2000
    assert slp_size(g) < 40
    assert slp_expand(g) == w * 1000
    assert slp_length(slp_power(w, 0)) == 0


def test_builder_inverse_and_include(size_bound):
    b = SlpBuilder(alphabet=ALPHABET)
    x = b.add(("a", "b", "b"))
    y = b.power(x, 5)
    z = b.concat(y, b.inverse(y))
    g = b.build(z)
    size_bound(g)
    f2 = FreeGroupOracle(["a", "b"])
    assert slp_length(g) == 30
    assert f2.is_trivial(slp_expand(g).letters)

    inner = Slp({"S": ["a", "b"]}, "S", ALPHABET)
    b2 = SlpBuilder(alphabet=ALPHABET)
    copy = b2.include(inner, {"a": b2.add(("b", "b"))})
    assert slp_expand(b2.build(copy)).text() == "b b b"
    with pytest.raises(AlphabetError):
        SlpBuilder(alphabet=ALPHABET).include(inner, {"a": "b"}, strict=True)


def test_from_word_round_trip():
    w = ALPHABET.word("a b' a'")
    assert slp_expand(slp_from_word(w)) == w


def apply_morphism(phi, word):
    out = []
    for x in word:
        out.extend(phi.get(x, (x,)))
    return tuple(out)


def test_morphism_tower_matches_iteration(size_bound):
    phi = {"a": ("a", "b"), "b": ("a",)}
    psi = {"a": ("b", "b"), "b": ("a", "b")}
    for n in range(1, 7):
        phis = [phi if k % 2 == 0 else psi for k in range(n)]
        word = ("a",)
        for m in reversed(phis):
            word = apply_morphism(m, word)
        g = slp_morphism_tower("a", phis, ALPHABET)
        size_bound(g)
        assert slp_expand_tokens(g) == word
        assert len(g.rules) <= 2 * n + 1


def test_morphism_tower_missing_image():
    with pytest.raises(AlphabetError):
        slp_morphism_tower("a", [{"a": ("b",)}, {"a": ("b",)}])


def test_substitute_replaces_letters(size_bound):
    g = Slp({"S": ["a", "b", "a"]}, "S", ALPHABET)
    images = {
        "a": slp_power(ALPHABET.word("b"), 3),
        "b": Slp({"S": ["a"]}, "S", ALPHABET),
    }
    h = slp_substitute(g, images, ALPHABET)
    size_bound(h, *images.values())
    assert slp_expand(h).text() == "b b b a b b b"
    with pytest.raises(AlphabetError):
        slp_substitute(g, {"a": images["a"]}, ALPHABET)


def test_size_bound_is_tight_for_powers_of_three():
    g = Slp({"S": ["A", "A", "A"], "A": ["B", "B", "B"], "B": ["a", "a", "a"]}, "S", ALPHABET)
    assert slp_length(g) == 27
    assert slp_size(g) == 9
    assert slp_within_size_bound(g)
    assert slp_within_size_bound(Slp({"S": ["a"]}, "S", ALPHABET))
