import pytest

from gwp.barrington import nested_commutator
from gwp.core_groups import a5_oracle, commutator_word
from gwp.errors import GwpError
from gwp.sens import (
    PROVIDERS,
    A5Provider,
    F2Provider,
    F3Provider,
    commutator_table,
    get_provider,
    next_pow2,
)
from gwp.wreath import handle_for


def test_next_pow2():
    assert [next_pow2(n) for n in (0, 1, 2, 3, 4, 5, 16, 17)] == [1, 1, 2, 4, 4, 8, 16, 32]


def test_every_a5_element_is_a_commutator():
    oracle = a5_oracle()
    words = oracle.element_words()
    table = commutator_table(oracle)
    assert len(table) == 60
    for g, (h1, h2) in table.items():
        assert oracle.element(commutator_word(words[h1], words[h2])) == g


def test_a5_leaves_rebuild_the_root():
    provider = A5Provider()
    oracle = provider.oracle
    root = oracle.letter_image("s")
    for d in range(4):
        word = nested_commutator(provider, d)
        assert oracle.element(word) == root
        assert len(word) == 4 ** d * provider.leaf_length(d)


def test_a5_internal_nodes_are_commutators():
    provider = A5Provider()
    oracle = provider.oracle
    perm = handle_for(oracle)
    for v in ("", "0", "1", "01", "110"):
        parent = provider.element_at(v)
        left = provider.element_at(v + "0")
        right = provider.element_at(v + "1")
        commutator = perm.mul(perm.mul(perm.inverse(left), perm.inverse(right)), perm.mul(left, right))
        assert commutator == parent
        assert oracle.element(provider.leaf(len(v), v)) == parent


@pytest.mark.parametrize("name", sorted(PROVIDERS))
def test_leaves_share_one_power_of_two_length(name):
    provider = get_provider(name)
    for d in range(4):
        length = provider.leaf_length(d)
        assert length & (length - 1) == 0
        for k in range(2 ** d):
            v = format(k, f"0{d}b") if d else ""
            assert len(provider.leaf(d, v)) == length


@pytest.mark.parametrize("name", ["a5", "f2", "f3", "grigorchuk", "thompson"])
def test_nested_commutators_are_nontrivial(name):
    provider = get_provider(name)
    for d in range(4 if name != "thompson" else 3):
        assert not provider.oracle.is_trivial(nested_commutator(provider, d))


def test_f2_leaves_are_conjugates():
    provider = F2Provider()
    assert provider.leaf(2, "10").text() == "x0' x0' x1 x0 x0 1 1 1 1 1 1 1 1 1 1 1"
    assert provider.leaf_length(0) == 4


def test_f3_neighbours_differ():
    provider = F3Provider()
    assert [provider.leaf(2, v).text() for v in ("00", "01", "10", "11")] == ["x0", "x1", "x2", "x0"]


def test_bad_labels_and_names():
    provider = get_provider("a5")
    with pytest.raises(GwpError):
        provider.leaf(2, "0")
    with pytest.raises(GwpError):
        provider.leaf(1, "2")
    with pytest.raises(GwpError):
        provider.leaf(-1, "")
    with pytest.raises(GwpError):
        get_provider("baumslag")
    assert get_provider("A5") is provider
