import random

import pytest

from gwp.core_groups import FreeGroupOracle, a5_oracle, word_inverse
from gwp.errors import AlphabetError, GroupDefinitionError, GwpError, SupportLimitError
from gwp.selfsimilar import GrigorchukOracle
from gwp.slp import Slp, slp_expand_tokens, slp_from_word, slp_power
from gwp.thompson import ThompsonOracle
from gwp.wreath import (
    ThompsonHandle,
    WordHandle,
    WreathOracle,
    embed_slp,
    handle_for,
    phi_n_slps,
    slp_evaluate,
    wreath_alphabet,
    wreath_equal,
    wreath_eta,
    wreath_eval,
    wreath_eval_slp,
    wreath_inverse,
    wreath_multiply,
    wreath_value_at,
)

A5 = handle_for(a5_oracle())
F2 = handle_for(FreeGroupOracle.of_rank(2))
A5_LETTERS = ["s", "s'", "t", "t'", "T", "T'", "T", "T'"]
F2_LETTERS = ["x0", "x0'", "x1", "x1'", "t", "t'"]
A5_ALPHABET_WREATH = wreath_alphabet(A5, "T")


def random_word(rng, letters, max_len=30):
    return [rng.choice(letters) for _ in range(rng.randint(0, max_len))]


def test_positions_follow_prefix_shift():
    g = wreath_eval("x0 t x1 t'", F2)
    assert g.shift == 0
    assert g.support == {0: ("x0",), -1: ("x1",)}
    assert wreath_eta("x0 t t x1 t'") == 1
    h = wreath_eval("t' x0 x0", F2)
    assert h.shift == -1
    assert h.support == {1: ("x0", "x0")}


def test_a5_wreath_uses_capital_shift():
    oracle = WreathOracle(A5, shift_letter="T")
    assert "T" in oracle.alphabet and "t" in oracle.alphabet
    assert oracle.is_trivial("s s s s s")
    assert oracle.is_trivial("T s T' T s' T'")
    assert not oracle.is_trivial("s T s' T'")
    with pytest.raises(AlphabetError):
        wreath_alphabet(A5, "t")


def test_homomorphism_law():
    rng = random.Random(31)
    for _ in range(300):
        u = random_word(rng, A5_LETTERS)
        v = random_word(rng, A5_LETTERS)
        gu = wreath_eval(u, A5, shift_letter="T")
        gv = wreath_eval(v, A5, shift_letter="T")
        guv = wreath_eval(u + v, A5, shift_letter="T")
        assert wreath_equal(wreath_multiply(gu, gv, A5), guv, A5)
        inv = wreath_eval(word_inverse(A5_ALPHABET_WREATH.word(u)), A5, shift_letter="T")
        assert wreath_equal(wreath_inverse(gu, A5), inv, A5)


def test_commutator_of_distinct_positions_is_trivial():
    oracle = WreathOracle(F2)
    assert oracle.is_trivial("x0 t x1 t' x0' t x1' t'")
    assert not oracle.is_trivial("x0 x1 x0' x1'")


def test_finite_quotient_agrees_for_large_modulus():
    rng = random.Random(5)
    checked_trivial = 0
    for k in range(500):
        if k % 5 == 0:
            # base commutator at two distinct positions: trivial in both
            a, b = rng.choice(["s", "t"]), rng.choice(["s", "t"])
            gap = rng.randint(1, 4)
            word = [a] + ["T"] * gap + [b] + ["T'"] * gap + [a + "'"] + ["T"] * gap + [b + "'"] + ["T'"] * gap
        else:
            word = random_word(rng, A5_LETTERS, 20)
        s = len(word)
        t = 2 * s + 1
        in_z = WreathOracle(A5, shift_letter="T").is_trivial(word)
        in_zt = WreathOracle(A5, modulus=t, shift_letter="T").is_trivial(word)
        assert in_z == in_zt
        checked_trivial += in_z
    assert checked_trivial >= 100


def test_small_modulus_counterexamples():
    word = "s T s' T'"
    assert not WreathOracle(A5, shift_letter="T").is_trivial(word)
    assert WreathOracle(A5, modulus=1, shift_letter="T").is_trivial(word)
    assert WreathOracle(A5, modulus=3, shift_letter="T").is_trivial("T T T")
    assert not WreathOracle(A5, shift_letter="T").is_trivial("T T T")


def random_wreath_slp(rng, letters, n_vars=8):
    rules = {}
    for k in range(n_vars):
        rhs = []
        for _ in range(rng.randint(1, 3)):
            if k and rng.random() < 0.6:
                rhs.append(f"V{rng.randrange(k)}")
            else:
                rhs.append(rng.choice(letters))
        rules[f"V{k}"] = rhs
    return Slp(rules, f"V{n_vars - 1}")


def test_compressed_evaluation_matches_expansion(size_bound):
    rng = random.Random(77)
    for _ in range(300):
        g = random_wreath_slp(rng, A5_LETTERS, rng.randint(1, 10))
        size_bound(g)
        word = slp_expand_tokens(g)
        for modulus in (None, 7):
            direct = wreath_eval(word, A5, modulus, "T")
            compressed = wreath_eval_slp(g, A5, modulus, shift_letter="T")
            assert wreath_equal(direct, compressed, A5)


def test_value_at_matches_support():
    rng = random.Random(8)
    for _ in range(100):
        g = random_wreath_slp(rng, F2_LETTERS, rng.randint(1, 8))
        full = wreath_eval_slp(g, F2)
        positions = set(full.support) | {0, 1, -1, 5}
        for p in positions:
            value = wreath_value_at(g, F2, p)
            assert F2.same(value, full.support.get(p, F2.one))


def test_support_guard():
    g = slp_power(A5_ALPHABET_WREATH.word("s T"), 1000)
    assert len(wreath_eval_slp(g, A5, shift_letter="T").support) == 1000
    with pytest.raises(SupportLimitError):
        wreath_eval_slp(g, A5, support_limit=10, shift_letter="T")


def test_huge_shift_is_exact(size_bound):
    g = slp_power(A5_ALPHABET_WREATH.word("T"), 10 ** 30)
    size_bound(g)
    h = wreath_eval_slp(g, A5, shift_letter="T")
    assert h.shift == 10 ** 30
    assert not h.support
    assert wreath_eval_slp(g, A5, modulus=10 ** 6, shift_letter="T").is_trivial()


def test_rejects_foreign_letters():
    with pytest.raises(AlphabetError):
        wreath_eval_slp(Slp({"S": ["q"]}, "S"), A5, shift_letter="T")


def test_slp_evaluate_in_base_groups():
    a5 = a5_oracle()
    g = slp_power(a5.alphabet.word("s t"), 5 * 2 ** 40)
    assert A5.is_one(slp_evaluate(g, A5))
    w = a5.alphabet.word("s t s")
    assert slp_evaluate(slp_from_word(w), A5) == a5.element(w)

    thompson = ThompsonHandle()
    h = slp_from_word(ThompsonOracle().word("x0 x1 x1' x0'"))
    assert thompson.is_one(slp_evaluate(h, thompson))


def test_handles_by_group():
    assert isinstance(handle_for(GrigorchukOracle()), WordHandle)
    grig = handle_for(GrigorchukOracle())
    assert grig.is_one(grig.mul(grig.letter("b"), grig.mul(grig.letter("c"), grig.letter("d"))))
    oracle = WreathOracle(grig)
    assert not oracle.is_trivial("a t b")
    assert oracle.is_trivial("a t b t' a t b t'")
    assert oracle.is_trivial("a t b t' a t' t b t'")


def apply_images(images, word):
    out = []
    for x in word:
        out.extend(images[x])
    return tuple(out)


TOY_PHI1 = {"a": ("a", "b"), "b": ("b",), "t": ("a",)}


def test_phi_n_matches_iterated_substitution(size_bound):
    base_images = {"a": ("a", "b"), "b": ("b",), "a'": ("b'", "a'"), "b'": ("b'",), "1": ("1",)}
    sizes = []
    for n in range(1, 6):
        emb = phi_n_slps(TOY_PHI1, 2, n)
        size_bound(*emb.slps.values())
        assert emb.modulus == 2 ** n
        expected_a = ("a",)
        for _ in range(n):
            expected_a = apply_images(base_images, expected_a)
        assert slp_expand_tokens(emb.slps["a"]) == expected_a
        assert emb.image_length("a") == len(expected_a)

        towers = []
        tower = ("a",)  # phi1(t)
        for _ in range(n):
            towers.append(tower)
            tower = apply_images(base_images, tower)
        expected_t = tuple(x for part in reversed(towers) for x in part)
        assert slp_expand_tokens(emb.slps["t"]) == expected_t
        inverse = tuple(x + "'" if not x.endswith("'") else x[:-1] for x in reversed(expected_t))
        assert slp_expand_tokens(emb.slps["t'"]) == inverse
        sizes.append(sum(len(g.rules) for g in emb.slps.values()))
    assert sizes[-1] - sizes[-2] == sizes[-2] - sizes[-3]


def test_phi_n_rejects_bad_tables():
    with pytest.raises(GroupDefinitionError):
        phi_n_slps({"a": ("a",)}, 2, 1)
    with pytest.raises(GroupDefinitionError):
        phi_n_slps({"a": ("b",), "a'": ("b",), "b": ("b",), "t": ("a",)}, 2, 1)
    with pytest.raises(AlphabetError):
        phi_n_slps({"a": ("t",), "t": ("a",)}, 2, 1)
    with pytest.raises(GwpError):
        phi_n_slps(TOY_PHI1, 2, 0)
    with pytest.raises(GwpError):
        phi_n_slps(TOY_PHI1, 1, 2)


def test_embed_slp_with_n_one_is_letterwise(size_bound):
    g = Slp({"S": ["A", "t", "A", "t'"], "A": ["a", "b'"]}, "S")
    emb = phi_n_slps(TOY_PHI1, 2, 1)
    images = {"a": ("a", "b"), "b'": ("b'",), "t": ("a",), "t'": ("a'",)}
    size_bound(embed_slp(g, emb))
    assert slp_expand_tokens(embed_slp(g, emb)) == apply_images(images, slp_expand_tokens(g))


def test_embedded_slp_matches_iterated_images(size_bound):
    g = Slp({"S": ["A", "t", "A", "t'"], "A": ["a", "b'"]}, "S")
    for n in range(1, 5):
        emb = phi_n_slps(TOY_PHI1, 2, n)
        images = {x: slp_expand_tokens(emb.slps[x]) for x in ("a", "b'", "t", "t'")}
        embedded = embed_slp(g, emb)
        size_bound(embedded)
        assert slp_expand_tokens(embedded) == apply_images(images, slp_expand_tokens(g))
