import itertools
import random

import pytest

from gwp.core_groups import a5_oracle
from gwp.cwp_reduction import (
    DagCircuit,
    build_pipeline,
    check_superdecreasing,
    circuit_to_subsetsum,
    claim_values,
    gate_order,
    greedy_subsetsum,
    is_central,
    is_one_hot,
    is_preprocessed,
    leafstring_brute,
    one_hot_witness,
    pipeline_lengths,
    preprocess_inputs,
    superdecreasing_slp,
    verify_pipeline,
)
from gwp.errors import (
    AlphabetError,
    CircuitError,
    GwpError,
    NotPreprocessedError,
    NotSuperDecreasingError,
    OneHotError,
)
from gwp.slp import slp_at, slp_expand_tokens, slp_length
from gwp.wreath import handle_for

A5 = a5_oracle()
A5_BASE = handle_for(A5)


def parity_circuit():
    """y0 = x2, y1 = not x2; already preprocessed"""
    gates = {
        "nx1": ("x1", "c1"),
        "nx2": ("x2", "c1"),
        "g": ("nx2", "c1"),
        "y0": ("nx2", "c1"),
        "y1": ("g", "c1"),
    }
    return DagCircuit(2, gates, ["y0", "y1"])


def constant_circuit():
    """y0 = 1, y1 = 0 on every input; inputs unread"""
    return DagCircuit(2, {"y0": ("c0", "c0"), "y1": ("c1", "c1")}, ["y0", "y1"])


def random_circuit(rng, m, n_gates, n_outputs):
    gates = {}
    sources = ["c0", "c1"] + [f"x{i}" for i in range(1, m + 1)]
    for k in range(n_gates):
        gates[f"g{k}"] = (rng.choice(sources), rng.choice(sources))
        sources.append(f"g{k}")
    outputs = []
    for i in range(n_outputs):
        name = f"y{i}"
        gates[name] = (rng.choice(sources), rng.choice(sources))
        outputs.append(name)
    return DagCircuit(m, gates, outputs)


def test_evaluate():
    c = parity_circuit()
    assert c.evaluate("00") == (0, 1)
    assert c.evaluate("01") == (1, 0)
    assert c.evaluate([1, 1]) == (1, 0)
    assert c.n == 2 and c.p == 5


def test_circuit_validation():
    with pytest.raises(CircuitError):
        DagCircuit(1, {"a": ("b", "c1"), "b": ("a", "c1"), "y": ("c0", "c0")}, ["y"])
    with pytest.raises(CircuitError):
        DagCircuit(1, {"x1": ("c0", "c0")}, ["x1"])
    with pytest.raises(CircuitError):
        DagCircuit(1, {"y": ("x2", "c0")}, ["y"])
    with pytest.raises(CircuitError):
        DagCircuit(1, {"y": ("x1", "c0"), "z": ("y", "y")}, ["y", "z"])
    with pytest.raises(CircuitError):
        DagCircuit(1, {"y": ("x1", "c0")}, [])
    with pytest.raises(CircuitError):
        DagCircuit(1, {"y": ("x1", "c0")}, ["y", "y"])
    with pytest.raises(CircuitError):
        DagCircuit(1, {"y": ("x1", "c0")}, ["c1"])


def test_preprocessing_keeps_the_function():
    rng = random.Random(3)
    for _ in range(30):
        c = random_circuit(rng, rng.randint(1, 4), rng.randint(0, 6), rng.randint(1, 3))
        pre = preprocess_inputs(c)
        assert is_preprocessed(pre)
        assert pre.p == c.p + 2 * c.m
        for bits in itertools.product("01", repeat=c.m):
            alpha = "".join(bits)
            assert pre.evaluate(alpha) == c.evaluate(alpha)


def test_gate_order_puts_input_gates_last():
    c = parity_circuit()
    assert is_preprocessed(c)
    assert gate_order(c) == ["y1", "y0", "g", "nx2", "nx1"]
    with pytest.raises(NotPreprocessedError):
        gate_order(constant_circuit())
    assert not is_preprocessed(constant_circuit())


def test_superdecreasing_checks():
    check_superdecreasing((5, 2, 1))
    check_superdecreasing(())
    with pytest.raises(NotSuperDecreasingError):
        check_superdecreasing((3, 2, 1))
    assert greedy_subsetsum(6, (5, 2, 1)) == (1, 0, 1)
    assert greedy_subsetsum(0, (5, 2, 1)) == (0, 0, 0)
    assert greedy_subsetsum(4, (5, 2, 1)) is None


def test_superdecreasing_slp_marks_subset_sums(size_bound):
    assert "".join(slp_expand_tokens(superdecreasing_slp((5, 2, 1)))) == "111101111"
    assert slp_expand_tokens(superdecreasing_slp(())) == ("1",)
    rng = random.Random(17)
    for _ in range(50):
        t = []
        rest = 0
        for _ in range(rng.randint(1, 6)):
            x = rest + 1 + rng.randint(0, 4)
            t.append(x)
            rest += x
        t = tuple(reversed(t))
        size_bound(superdecreasing_slp(t))
        word = slp_expand_tokens(superdecreasing_slp(t))
        sums = {sum(x for x, bit in zip(t, bits) if bit) for bits in itertools.product((0, 1), repeat=len(t))}
        assert len(word) == sum(t) + 1
        assert {p for p, x in enumerate(word) if x == "1"} == sums


def test_huge_superdecreasing_slp_stays_small(size_bound):
    t = tuple(4 ** k + 1 for k in range(40, 0, -1))
    check_superdecreasing(t)
    g = superdecreasing_slp(t)
    size_bound(g)
    assert slp_length(g) == sum(t) + 1
    assert len(g.rules) < 40 * 200
    rng = random.Random(40)
    for _ in range(200):
        chosen = sum(x for x in t if rng.random() < 0.5)
        assert slp_at(g, chosen) == "1"
        assert slp_at(g, chosen + 1) == "0"


@pytest.mark.parametrize("make", [parity_circuit, constant_circuit])
def test_subsetsum_encodes_the_circuit(make):
    c = make()
    if not is_preprocessed(c):
        c = preprocess_inputs(c)
    data = circuit_to_subsetsum(c)
    check_superdecreasing(data.s)
    assert len(data.s) == 3 * c.p
    for bits in itertools.product("01", repeat=c.m):
        alpha = "".join(bits)
        outputs = c.evaluate(alpha)
        for i in range(c.n):
            found = greedy_subsetsum(data.target(i, alpha), data.s) is not None
            assert found == (outputs[i] == 1), (alpha, i)


def test_subsetsum_on_random_single_output_circuits():
    rng = random.Random(21)
    for _ in range(10):
        c = preprocess_inputs(random_circuit(rng, rng.randint(1, 3), rng.randint(0, 4), 1))
        data = circuit_to_subsetsum(c)
        for bits in itertools.product("01", repeat=c.m):
            alpha = "".join(bits)
            outputs = c.evaluate(alpha)
            for i in range(c.n):
                assert (greedy_subsetsum(data.target(i, alpha), data.s) is not None) == bool(outputs[i])


def small_circuits(m, max_gates):
    """Every circuit over x1..xm with 1..max_gates nand gates

    Operand pairs are unordered and inputs are first read in index order.
    Yields the gate list together with the truth tables of the gates, as
    bit masks over the 2^m assignments; the tables dict is reused.
    """
    size = 1 << m
    mask = (1 << size) - 1
    tables = {"c0": 0, "c1": mask}
    for i in range(1, m + 1):
        tables[f"x{i}"] = sum(1 << a for a in range(size) if a >> (i - 1) & 1)

    def grow(gates, used):
        if gates:
            yield gates, tables
        if len(gates) == max_gates:
            return
        names = ["c0", "c1"] + [f"x{i}" for i in range(1, min(used + 2, m) + 1)] + [g for g, _ in gates]
        for i, a in enumerate(names):
            for b in names[i:]:
                fresh = {int(s[1:]) for s in (a, b) if s.startswith("x") and int(s[1:]) > used}
                if fresh != set(range(used + 1, used + 1 + len(fresh))):
                    continue
                name = f"g{len(gates)}"
                tables[name] = mask & ~(tables[a] & tables[b])
                yield from grow(gates + [(name, (a, b))], used + len(fresh))

    yield from grow([], 0)


def one_hot_circuits(m, max_gates):
    """The circuits of small_circuits whose sinks, taken as outputs, are one-hot"""
    size = 1 << m
    for gates, tables in small_circuits(m, max_gates):
        read = {s for _, src in gates for s in src}
        sinks = [g for g, _ in gates if g not in read]
        total = sum(bin(tables[g]).count("1") for g in sinks)
        cover = 0
        for g in sinks:
            cover |= tables[g]
        if total == size and cover == (1 << size) - 1:
            yield DagCircuit(m, dict(gates), sinks)


def check_subsetsum_encoding(c):
    data = circuit_to_subsetsum(preprocess_inputs(c))
    n = c.n
    for j in range(len(data.s)):
        assert data.s[j] - sum(data.s[j + 1:]) >= 4 ** (n - 1)
    for bits in itertools.product("01", repeat=c.m):
        alpha = "".join(bits)
        targets = [data.target(i, alpha) for i in range(n)]
        assert len(set(targets)) == n
        found = [greedy_subsetsum(t, data.s) is not None for t in targets]
        assert found == [y == 1 for y in c.evaluate(alpha)], (c.to_dict(), alpha)
        assert sum(found) == 1


def test_small_circuit_enumeration():
    one_gate = [gates for gates, _ in small_circuits(1, 1)]
    # unordered pairs over c0, c1, x1
    assert len(one_gate) == 6
    assert [("g0", ("x1", "x1"))] in one_gate
    shapes = [tuple(c.outputs) for c in one_hot_circuits(1, 3)]
    assert ("g1", "g2") in shapes


def test_subsetsum_on_every_small_one_hot_circuit():
    kept = multi_output = 0
    for m in range(1, 4):
        for c in one_hot_circuits(m, 3):
            assert is_one_hot(c)
            check_subsetsum_encoding(c)
            kept += 1
            multi_output += c.n > 1
    assert kept > 100
    assert multi_output > 10


@pytest.mark.slow
def test_subsetsum_on_every_one_hot_circuit_up_to_four_gates():
    kept = 0
    for m in range(1, 5):
        for c in one_hot_circuits(m, 4):
            check_subsetsum_encoding(c)
            kept += 1
    assert kept > 500


def test_one_hot_detection():
    assert is_one_hot(parity_circuit())
    assert is_one_hot(constant_circuit())
    both = DagCircuit(2, {"y0": ("x1", "c1"), "y1": ("x2", "c1")}, ["y0", "y1"])
    assert one_hot_witness(both) == ("00", 2)


def test_leaf_strings_by_brute_force():
    lam = leafstring_brute(parity_circuit(), ["s", "t"], 1, A5_BASE)
    expected = A5.element("t s")
    assert lam == {"0": expected, "1": expected}


def test_pipeline_rejects_bad_input():
    both = DagCircuit(2, {"y0": ("x1", "c1"), "y1": ("x2", "c1")}, ["y0", "y1"])
    with pytest.raises(OneHotError):
        build_pipeline(both, 1, ["s", "t"], A5.alphabet, shift_letter="T")
    with pytest.raises(GwpError):
        build_pipeline(parity_circuit(), 2, ["s", "t"], A5.alphabet, shift_letter="T")
    with pytest.raises(CircuitError):
        build_pipeline(parity_circuit(), 1, ["s"], A5.alphabet, shift_letter="T")
    with pytest.raises(AlphabetError):
        build_pipeline(parity_circuit(), 1, ["s", "q"], A5.alphabet, shift_letter="T")


def test_pipeline_lengths_match_the_slps(size_bound):
    for make, generators in ((parity_circuit, ["s", "t"]), (constant_circuit, ["s", "1"])):
        out = build_pipeline(make(), 1, generators, A5.alphabet, shift_letter="T")
        size_bound(out.slp_I, out.slp_J)
        lengths = pipeline_lengths(out)
        assert lengths["I"] == slp_length(out.slp_I)
        assert lengths["J"] == slp_length(out.slp_J)
        assert out.m1 + out.m2 == out.circuit.m
        summary = out.to_dict()
        assert summary["length_J"] == str(lengths["J"])


def test_claim_places_leaf_strings():
    out = build_pipeline(constant_circuit(), 1, ["s", "1"], A5.alphabet, shift_letter="T")
    claim = claim_values(out, A5_BASE)
    assert set(claim) == {"0", "1"}
    for beta in ("0", "1"):
        assert A5_BASE.same(claim[beta], A5.element("s s"))
    assert out.position("1") == -out.pi


def test_is_central():
    assert is_central(A5_BASE, A5.identity)
    assert not is_central(A5_BASE, A5.element("s"))
    # s s commutes with s but not with t
    assert is_central(A5_BASE, A5.element("s s"), ["s"])
    assert is_central(A5_BASE, A5.element("s s"), ["s", "1"])
    assert not is_central(A5_BASE, A5.element("s s"), ["s", "t"])


@pytest.mark.slow
@pytest.mark.parametrize(
    "generators,trivial",
    [(["s", "s'"], True), (["s", "t"], False), (["s", "s"], True)],
)
def test_pipeline_end_to_end(generators, trivial, size_bound):
    out = build_pipeline(parity_circuit(), 1, generators, A5.alphabet, shift_letter="T")
    size_bound(out.slp_I, out.slp_J)
    report = verify_pipeline(out, A5_BASE)
    assert report.claim_ok
    assert report.eta_J == 0
    assert report.j_trivial is trivial
    assert report.expected_trivial is trivial
    assert report.ok
    assert report.to_dict(A5_BASE)["ok"] is True
