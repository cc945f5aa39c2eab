"""
Circuit to subsetsum to SLP reduction for gwp

Handles multi-output nand circuits, their translation into super-decreasing
subsetsum instances, the SLP encoding S(t) of subset sums and the assembly
of the wreath-product SLPs I and J whose values encode the leaf strings of
a one-hot circuit.

Edge numbering: gates g_1..g_p are numbered in reverse topological order;
the two edges entering g_k are e_(2k+n-2) (first operand) and e_(2k+n-1)
(second operand); e_i is the imaginary edge leaving output y_i. A base-4
number with digits in {0, 1} is a truth assignment to these edges.
"""

import heapq
import itertools
import logging
import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .config import get_config
from .core_groups import GenAlphabet, inverse_token
from .errors import (
    AlphabetError,
    CircuitError,
    GwpError,
    InputLengthError,
    NotPreprocessedError,
    NotSuperDecreasingError,
    OneHotError,
)
from .slp import Slp, SlpBuilder, slp_expand, slp_length
from .wreath import BaseGroupHandle, Token, wreath_eta, wreath_eval, wreath_eval_slp, wreath_value_at

logger = logging.getLogger(__name__)

CONSTANTS = ("c0", "c1")
_INPUT = re.compile(r"x([1-9][0-9]*)$")

# S(t) strings are words over 0 and 1; "1" doubles as the pad letter here
BIT_ALPHABET = GenAlphabet(("0", "1"), ("0", "1"))

# pipelines whose J is at most this long are checked by plain evaluation
_SHORT_WORD = 100_000


def input_name(i: int) -> str:
    return f"x{i}"


def _bits(alpha: Union[str, Sequence[int]], m: int) -> Tuple[int, ...]:
    if isinstance(alpha, str):
        if any(ch not in "01" for ch in alpha):
            raise GwpError(f"input {alpha!r} is not a bit string")
        bits = tuple(1 if ch == "1" else 0 for ch in alpha)
    else:
        bits = tuple(int(b) for b in alpha)
    if len(bits) != m:
        raise InputLengthError(f"input has {len(bits)} bits, circuit has {m} inputs")
    return bits


@dataclass
class DagCircuit:
    """Nand circuit with inputs x1..xm, constants c0/c1 and outputs y_0..y_(n-1)

    ``gates`` maps gate names to their two sources in declaration order;
    ``outputs[i]`` is the gate acting as y_i.
    """

    m: int
    gates: Dict[str, Tuple[str, str]]
    outputs: List[str]
    _topo: List[str] = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.m < 0:
            raise CircuitError(f"negative number of inputs: {self.m}")
        self.gates = {name: tuple(src) for name, src in self.gates.items()}
        self.outputs = list(self.outputs)
        for name, src in self.gates.items():
            if name in CONSTANTS or _INPUT.match(name):
                raise CircuitError(f"gate name {name!r} is reserved")
            if len(src) != 2:
                raise CircuitError(f"gate {name!r} needs exactly two sources")
            for s in src:
                if not self.is_source(s):
                    raise CircuitError(f"gate {name!r} reads unknown source {s!r}")
        if not self.outputs:
            raise CircuitError("circuit has no outputs")
        if len(set(self.outputs)) != len(self.outputs):
            raise CircuitError("an output gate is listed twice")
        fan_out = self.fan_out()
        for i, y in enumerate(self.outputs):
            if y not in self.gates:
                raise CircuitError(f"output {i} is {y!r}, which is not a nand gate")
            if fan_out[y]:
                raise CircuitError(f"output gate {y!r} has fan-out {fan_out[y]}")
        self._topo = self._kahn(())

    @property
    def n(self) -> int:
        return len(self.outputs)

    @property
    def p(self) -> int:
        return len(self.gates)

    def is_source(self, s: str) -> bool:
        if s in CONSTANTS or s in self.gates:
            return True
        match = _INPUT.match(s)
        return bool(match) and 1 <= int(match.group(1)) <= self.m

    def fan_out(self) -> Dict[str, int]:
        counts = {s: 0 for s in itertools.chain(CONSTANTS, map(input_name, range(1, self.m + 1)), self.gates)}
        for src in self.gates.values():
            for s in src:
                counts[s] += 1
        return counts

    def _kahn(self, first: Sequence[str]) -> List[str]:
        """Topological order of the gates; ``first`` leads, ties go by declaration order"""
        position = {name: k for k, name in enumerate(self.gates)}
        indegree = {name: 0 for name in self.gates}
        successors: Dict[str, List[str]] = {name: [] for name in self.gates}
        for name, src in self.gates.items():
            for s in src:
                if s in self.gates:
                    indegree[name] += 1
                    successors[s].append(name)
        order: List[str] = []

        def emit(name: str, ready: List[Tuple[int, str]]):
            order.append(name)
            for nxt in successors[name]:
                indegree[nxt] -= 1
                if indegree[nxt] == 0 and nxt not in placed:
                    heapq.heappush(ready, (position[nxt], nxt))

        placed = set(first)
        ready = [(position[name], name) for name in self.gates if indegree[name] == 0 and name not in placed]
        heapq.heapify(ready)
        for name in first:
            if indegree[name]:
                raise CircuitError(f"gate {name!r} cannot lead the evaluation order")
            emit(name, ready)
        while ready:
            _, name = heapq.heappop(ready)
            emit(name, ready)
        if len(order) != len(self.gates):
            stuck = sorted(name for name in self.gates if indegree[name] > 0)
            raise CircuitError(f"circuit has a cycle through {stuck[0]!r}")
        return order

    def evaluate(self, alpha: Union[str, Sequence[int]]) -> Tuple[int, ...]:
        """Output bits (y_0, ..., y_(n-1)) on input alpha = b_1..b_m"""
        bits = _bits(alpha, self.m)
        value = {"c0": 0, "c1": 1}
        for i, b in enumerate(bits, 1):
            value[input_name(i)] = b
        for name in self._topo:
            a, b = self.gates[name]
            value[name] = 1 - (value[a] & value[b])
        return tuple(value[y] for y in self.outputs)

    def to_dict(self) -> Dict:
        return {
            "inputs": self.m,
            "gates": {name: list(src) for name, src in self.gates.items()},
            "outputs": list(self.outputs),
        }


@dataclass
class SubsetsumData:
    """Numbers q_i, r_i, s_j of a preprocessed circuit"""

    q: Tuple[int, ...]
    r: Tuple[int, ...]
    s: Tuple[int, ...]
    gate_order: Tuple[str, ...]  # g_1 .. g_p

    @property
    def n(self) -> int:
        return len(self.q)

    def target(self, i: int, alpha: Union[str, Sequence[int]]) -> int:
        """q_i + alpha . r"""
        bits = _bits(alpha, len(self.r))
        return self.q[i] + sum(b * r for b, r in zip(bits, self.r))

    def to_dict(self) -> Dict:
        return {
            "q": [str(x) for x in self.q],
            "r": [str(x) for x in self.r],
            "s": [str(x) for x in self.s],
            "gate_order": list(self.gate_order),
        }


def preprocess_inputs(c: DagCircuit) -> DagCircuit:
    """Route every input x_i through nand(x_i, c1) and a second negation

    Afterwards x_i has a single outgoing edge, into the new gate nx_i, and
    its former readers read nnx_i = not(not(x_i)) instead.
    """
    if c.m == 0:
        return c
    taken = set(c.gates)

    def fresh(base: str) -> str:
        name = base
        while name in taken:
            name += "_"
        taken.add(name)
        return name

    rename = {}
    gates: Dict[str, Tuple[str, str]] = {}
    for i in range(1, c.m + 1):
        x = input_name(i)
        neg = fresh(f"nx{i}")
        dbl = fresh(f"nnx{i}")
        gates[neg] = (x, "c1")
        gates[dbl] = (neg, neg)
        rename[x] = dbl
    for name, (a, b) in c.gates.items():
        gates[name] = (rename.get(a, a), rename.get(b, b))
    out = DagCircuit(c.m, gates, list(c.outputs))
    logger.debug("preprocessed circuit: %d -> %d gates", c.p, out.p)
    return out


def _input_targets(c: DagCircuit) -> Dict[int, Tuple[str, int]]:
    """Input index -> (gate, operand slot) of its edges"""
    uses: Dict[int, List[Tuple[str, int]]] = {i: [] for i in range(1, c.m + 1)}
    for name, src in c.gates.items():
        for slot, s in enumerate(src):
            match = _INPUT.match(s)
            if match:
                uses[int(match.group(1))].append((name, slot))
    bad = [i for i, u in uses.items() if len(u) != 1]
    if bad:
        raise NotPreprocessedError(
            f"input x{bad[0]} has fan-out {len(uses[bad[0]])}, expected 1"
        )
    return {i: u[0] for i, u in uses.items()}


def is_preprocessed(c: DagCircuit) -> bool:
    """Every input feeds exactly one gate, which otherwise reads only constants"""
    try:
        targets = _input_targets(c)
    except NotPreprocessedError:
        return False
    for i, (gate, slot) in targets.items():
        other = c.gates[gate][1 - slot]
        if other not in CONSTANTS:
            return False
    return True


def gate_order(c: DagCircuit) -> List[str]:
    """g_1 .. g_p: reverse topological, with nx_1 = g_p, nx_2 = g_(p-1), ..."""
    if not is_preprocessed(c):
        raise NotPreprocessedError("gate order needs a preprocessed circuit")
    targets = _input_targets(c)
    leaders = [targets[i][0] for i in range(1, c.m + 1)]
    return list(reversed(c._kahn(leaders)))


def one_hot_witness(c: DagCircuit) -> Optional[Tuple[str, int]]:
    """First input (in lexicographic order) on which not exactly one output is 1"""
    limit = get_config().brute_force_inputs
    if c.m > limit:
        raise CircuitError(f"{c.m} inputs exceed the brute-force limit {limit}")
    for bits in itertools.product("01", repeat=c.m):
        alpha = "".join(bits)
        hot = sum(c.evaluate(alpha))
        if hot != 1:
            return alpha, hot
    return None


def is_one_hot(c: DagCircuit) -> bool:
    return one_hot_witness(c) is None


def check_superdecreasing(t: Sequence[int]) -> None:
    rest = 0
    for k in range(len(t) - 1, -1, -1):
        if t[k] <= rest:
            raise NotSuperDecreasingError(
                f"term {k} ({t[k]}) does not exceed the sum of later terms ({rest})"
            )
        rest += t[k]


def circuit_to_subsetsum(c: DagCircuit) -> SubsetsumData:
    """q, r, s with: C(alpha)_i = 1 iff some delta has delta . s = q_i + alpha . r"""
    order = gate_order(c)
    n = c.n
    index = {name: k for k, name in enumerate(order, 1)}

    # source of every edge
    edge_source: Dict[int, str] = {}
    outgoing: Dict[str, List[int]] = {name: [] for name in order}
    for i, y in enumerate(c.outputs):
        edge_source[i] = y
        outgoing[y].append(i)
    for name, src in c.gates.items():
        k = index[name]
        for slot, s in enumerate(src):
            j = 2 * k + n - 2 + slot
            edge_source[j] = s
            if s in outgoing:
                outgoing[s].append(j)

    interesting = [j for j, s in edge_source.items() if s == "c1" or s in c.gates]
    total = sum(4 ** j for j in interesting)
    q = tuple(total - 4 ** i for i in range(n))

    targets = _input_targets(c)
    r = []
    for i in range(1, c.m + 1):
        gate, slot = targets[i]
        r.append(4 ** (2 * index[gate] + n - 2 + slot))

    s: List[int] = []
    for k in range(len(order), 0, -1):
        low = 4 ** (2 * k + n - 2)
        high = 4 ** (2 * k + n - 1)
        s.append(high + low + sum(4 ** j for j in outgoing[order[k - 1]]))
        s.append(3 * low)
        s.append(low)
    data = SubsetsumData(q, tuple(r), tuple(s), tuple(order))
    logger.debug("subsetsum instance: n=%d m=%d k=%d", n, c.m, len(s))
    return data


def greedy_subsetsum(target: int, s: Sequence[int]) -> Optional[Tuple[int, ...]]:
    """The unique delta with delta . s = target, or None"""
    check_superdecreasing(s)
    acc = target
    delta = []
    for x in s:
        if acc >= x:
            acc -= x
            delta.append(1)
        else:
            delta.append(0)
    return tuple(delta) if acc == 0 else None


def superdecreasing_slp(t: Sequence[int]) -> Slp:
    """SLP over {0, 1} for S(t): position p holds 1 iff p is a subset sum of t

    S() = 1 and S(t_1..t_k) = S(t_2..t_k) 0^(t_1 - t_2 - ... - t_k - 1) S(t_2..t_k).
    """
    t = tuple(t)
    check_superdecreasing(t)
    builder = SlpBuilder(alphabet=BIT_ALPHABET)
    current = "1"
    rest = 0
    for x in reversed(t):
        gap = x - rest - 1
        if gap:
            current = builder.add((current, builder.power("0", gap), current), "S")
        else:
            current = builder.add((current, current), "S")
        rest += x
    return builder.build(current, BIT_ALPHABET)


def bin_value(beta: str) -> int:
    return int(beta, 2) if beta else 0


@dataclass
class PipelineOutput:
    """SLPs I and J plus the constants they were built from"""

    slp_I: Slp
    slp_J: Slp
    circuit: DagCircuit
    subsetsum: SubsetsumData
    generators: Tuple[str, ...]
    alphabet: GenAlphabet
    shift_letter: str
    m1: int
    m2: int
    ell: int
    pi: int
    d_offset: int
    h: int

    def betas(self) -> List[str]:
        return ["".join(bits) for bits in itertools.product("01", repeat=self.m1)]

    def position(self, beta: str) -> int:
        """p_beta = -bin(beta) * pi"""
        return -bin_value(beta) * self.pi

    def to_dict(self) -> Dict:
        return {
            "generators": list(self.generators),
            "shift_letter": self.shift_letter,
            "m1": self.m1,
            "m2": self.m2,
            "ell": str(self.ell),
            "pi": str(self.pi),
            "d": str(self.d_offset),
            "h": str(self.h),
            "length_I": str(slp_length(self.slp_I)),
            "length_J": str(slp_length(self.slp_J)),
            "variables_I": len(self.slp_I.rules),
            "variables_J": len(self.slp_J.rules),
            "subsetsum": self.subsetsum.to_dict(),
        }


def build_pipeline(
    c: DagCircuit,
    m1: int,
    base_generators: Sequence[str],
    base_alphabet: Optional[GenAlphabet] = None,
    trust_one_hot: bool = False,
    shift_letter: str = "t",
) -> PipelineOutput:
    """Assemble I and J for a one-hot circuit and generator labels a_0..a_(n-1)

    f = val(I) has eta 0 and f(p_beta) is the leaf string of beta; val(J)
    is trivial iff every leaf string is central.
    """
    generators = tuple(base_generators)
    if base_alphabet is None:
        base_alphabet = GenAlphabet.from_tokens(generators)
    for a in generators:
        if a not in base_alphabet:
            raise AlphabetError(f"generator {a!r} is not a letter of the base group")
    if not is_preprocessed(c):
        c = preprocess_inputs(c)
    if len(generators) != c.n:
        raise CircuitError(f"{c.n} outputs but {len(generators)} generator labels")
    if not 1 <= m1 < c.m:
        raise GwpError(f"m1 must satisfy 1 <= m1 < {c.m}, got {m1}")

    if c.m <= get_config().brute_force_inputs:
        witness = one_hot_witness(c)
        if witness is not None:
            raise OneHotError(*witness)
    elif not trust_one_hot:
        raise CircuitError(
            f"{c.m} inputs are too many to check the one-hot property; pass trust_one_hot"
        )

    data = circuit_to_subsetsum(c)
    n = c.n
    m2 = c.m - m1
    r1, r2 = data.r[:m1], data.r[m1:]
    ell = max(sum(r1) + max(data.q) + 1, sum(data.s) - sum(r2) - min(data.q) + 1)
    ell = max(ell, n)
    pi = ell + sum(r2)
    h = sum(data.s) + 1
    d = sum(r1) + 1 + 2 ** m1 * pi

    alphabet = base_alphabet.extended([shift_letter])
    tau = shift_letter
    tau_inv = inverse_token(shift_letter)
    b = SlpBuilder(alphabet=alphabet)

    g1 = superdecreasing_slp(r1)
    g2 = superdecreasing_slp(r2)
    hs = superdecreasing_slp(data.s)

    sigma_parts: List[str] = []
    for i, a in enumerate(generators):
        t_i = b.include(hs, {"0": tau_inv, "1": b.add((a, tau_inv), "A")})
        sigma_parts.extend([b.power(tau, data.q[i]), t_i, b.power(tau, h - data.q[i])])
    sigma = b.add(sigma_parts, "Sigma")
    s2 = b.include(g2, {"0": tau, "1": b.concat(sigma, tau)})
    s1 = b.include(g1, {"0": tau, "1": b.concat(s2, b.power(tau, ell))})
    start_i = b.add((s1, b.power(tau_inv, d)), "I")

    inv_i = b.inverse(start_i)
    parts: List[str] = []
    for i, a in enumerate(generators):
        step = b.add((a, b.power(tau, pi)), "Step")
        w_i = b.add((b.power(step, 2 ** m1), b.power(tau_inv, 2 ** m1 * pi)), "W")
        j_i = b.add((inv_i, b.inverse(w_i), start_i, w_i), "J")
        if parts:
            parts.append(tau)
        parts.append(j_i)
    if n > 1:
        parts.append(b.power(tau_inv, n - 1))
    start_j = b.add(parts, "J")

    out = PipelineOutput(
        slp_I=b.build(start_i, alphabet),
        slp_J=b.build(start_j, alphabet),
        circuit=c,
        subsetsum=data,
        generators=generators,
        alphabet=alphabet,
        shift_letter=shift_letter,
        m1=m1,
        m2=m2,
        ell=ell,
        pi=pi,
        d_offset=d,
        h=h,
    )
    logger.info(
        "pipeline built: n=%d m1=%d m2=%d, |val(J)|=%d, %d variables",
        n, m1, m2, slp_length(out.slp_J), len(out.slp_J.rules),
    )
    return out


def pipeline_lengths(out: PipelineOutput) -> Dict[str, int]:
    """Closed-form lengths of the words the pipeline SLPs derive"""
    data = out.subsetsum
    n = len(out.generators)
    k = len(data.s)
    r1, r2 = data.r[: out.m1], data.r[out.m1:]
    h_i = out.h + 2 ** k
    sigma = n * (2 * out.h + 2 ** k)
    u = sum(r2) + 1 + 2 ** out.m2 * sigma
    s1 = sum(r1) + 1 + 2 ** out.m1 * (u + out.ell - 1)
    i_len = s1 + out.d_offset
    w = 2 ** out.m1 * (1 + out.pi) + 2 ** out.m1 * out.pi
    j_len = n * (2 * i_len + 2 * w) + 2 * (n - 1)
    return {"H": h_i, "sigma": sigma, "u": u, "S1": s1, "I": i_len, "w": w, "J": j_len}


def leafstring_brute(
    c: DagCircuit,
    base_generators: Sequence[str],
    m1: int,
    base: BaseGroupHandle,
) -> Dict[str, Token]:
    """lambda_beta = product over gamma (lexicographic) of a_i, i the hot output on beta gamma"""
    limit = get_config().brute_force_inputs
    if c.m > limit:
        raise CircuitError(f"{c.m} inputs exceed the brute-force limit {limit}")
    generators = tuple(base_generators)
    m2 = c.m - m1
    out: Dict[str, Token] = {}
    for beta_bits in itertools.product("01", repeat=m1):
        beta = "".join(beta_bits)
        acc = base.one
        for gamma_bits in itertools.product("01", repeat=m2):
            alpha = beta + "".join(gamma_bits)
            values = c.evaluate(alpha)
            if sum(values) != 1:
                raise OneHotError(alpha, sum(values))
            acc = base.mul(acc, base.letter(generators[values.index(1)]))
        out[beta] = acc
    return out


def claim_values(out: PipelineOutput, base: BaseGroupHandle) -> Dict[str, Token]:
    """f(p_beta) for every beta, read from val(I) one position at a time"""
    return {
        beta: wreath_value_at(out.slp_I, base, out.position(beta), shift_letter=out.shift_letter)
        for beta in out.betas()
    }


def is_central(base: BaseGroupHandle, value: Token, letters: Optional[Sequence[str]] = None) -> bool:
    """value commutes with every letter in ``letters`` (default: the generators of the base)"""
    if letters is None:
        letters = base.alphabet.generators
    for x in letters:
        a = base.letter(x)
        if not base.same(base.mul(value, a), base.mul(a, value)):
            return False
    return True


@dataclass
class PipelineReport:
    lambdas: Dict[str, Token]
    claim: Dict[str, Token]
    claim_ok: bool
    eta_J: int
    j_trivial: bool
    expected_trivial: bool

    @property
    def ok(self) -> bool:
        return self.claim_ok and self.eta_J == 0 and self.j_trivial == self.expected_trivial

    def to_dict(self, base: Optional[BaseGroupHandle] = None) -> Dict:
        show = base.describe if base is not None else str
        return {
            "ok": self.ok,
            "claim_ok": self.claim_ok,
            "eta_J": self.eta_J,
            "j_trivial": self.j_trivial,
            "expected_trivial": self.expected_trivial,
            "lambdas": {beta: show(v) for beta, v in sorted(self.lambdas.items())},
            "claim": {beta: show(v) for beta, v in sorted(self.claim.items())},
        }


def verify_pipeline(
    out: PipelineOutput,
    base: BaseGroupHandle,
    support_limit: Optional[int] = None,
) -> PipelineReport:
    """Check f(p_beta) = lambda_beta on the full support of val(I) and decide val(J) = 1"""
    lambdas = leafstring_brute(out.circuit, out.generators, out.m1, base)
    shift = out.shift_letter
    f = wreath_eval_slp(out.slp_I, base, support_limit=support_limit, shift_letter=shift)
    claim = {beta: f.support.get(out.position(beta), base.one) for beta in out.betas()}
    claim_ok = f.shift == 0 and all(base.same(claim[beta], lambdas[beta]) for beta in lambdas)

    if slp_length(out.slp_J) <= _SHORT_WORD:
        word = slp_expand(out.slp_J)
        eta = wreath_eta(word, shift)
        j_trivial = wreath_eval(word.letters, base, shift_letter=shift).is_trivial()
    else:
        g = wreath_eval_slp(out.slp_J, base, support_limit=support_limit, shift_letter=shift)
        eta = g.shift
        j_trivial = g.is_trivial()
    # J only conjugates by the chosen a_i
    expected = all(is_central(base, v, out.generators) for v in lambdas.values())
    report = PipelineReport(lambdas, claim, claim_ok, eta, j_trivial, expected)
    logger.info(
        "pipeline verified: claim %s, val(J) %s, expected %s",
        "holds" if claim_ok else "FAILS",
        "trivial" if j_trivial else "nontrivial",
        "trivial" if expected else "nontrivial",
    )
    return report
