"""
Balanced nand-tree circuits and G-programs for gwp

Handles circuit evaluation, the nested commutators of a SENS provider and
the padded compiler that turns a nand-tree circuit into a G-program whose
value is trivial exactly when the circuit outputs 0.

Every internal program family is eight equal-length blocks of its
children's families. The block table below drives both the compiler and
the random-access instruction lookup.
"""

import itertools
import logging
import random
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

from .config import get_config
from .core_groups import GenAlphabet, GroupOracle, GroupWord, commutator_word
from .errors import AlphabetError, CircuitError, GwpError, InputLengthError
from .sens import SensProvider

logger = logging.getLogger(__name__)

Bits = Union[str, Sequence[int]]

FAMILIES = ("p", "p_inv", "g", "g_inv", "one")

# family -> eight blocks of (child family, child bit)
_BLOCKS: Dict[str, Tuple[Tuple[str, int], ...]] = {
    "p": (
        ("g_inv", 0), ("g_inv", 1), ("g", 0), ("g", 1),
        ("p_inv", 1), ("p_inv", 0), ("p", 1), ("p", 0),
    ),
    "p_inv": (
        ("p_inv", 0), ("p_inv", 1), ("p", 0), ("p", 1),
        ("g_inv", 1), ("g_inv", 0), ("g", 1), ("g", 0),
    ),
    "g": (("g_inv", 0), ("g_inv", 1), ("g", 0), ("g", 1)) + (("one", 0),) * 4,
    "g_inv": (("g_inv", 1), ("g_inv", 0), ("g", 1), ("g", 0)) + (("one", 0),) * 4,
    "one": (("one", 0),) * 8,
}


def _bits(x: Bits, n: int) -> Tuple[int, ...]:
    if isinstance(x, str):
        if any(ch not in "01" for ch in x):
            raise GwpError(f"input {x!r} is not a bit string")
        bits = tuple(1 if ch == "1" else 0 for ch in x)
    else:
        bits = tuple(int(b) for b in x)
    if len(bits) != n:
        raise InputLengthError(f"input has {len(bits)} bits, expected {n}")
    return bits


@dataclass(frozen=True)
class Instruction:
    """<index, on_one, on_zero>; index counts from 1"""

    index: int
    on_one: str
    on_zero: str

    def is_constant(self) -> bool:
        return self.on_one == self.on_zero


@dataclass
class NandTreeCircuit:
    """Complete binary tree of nand gates; leaf v reads bit j and emits a or b"""

    depth: int
    n_inputs: int
    query: Dict[str, Tuple[int, int, int]]

    def __post_init__(self):
        if self.depth < 0:
            raise CircuitError(f"depth must be non-negative, got {self.depth}")
        if self.n_inputs < 1:
            raise CircuitError(f"a circuit needs at least one input, got {self.n_inputs}")
        for v in self.leaves():
            if v not in self.query:
                raise CircuitError(f"no query for leaf {v!r}")
            j, a, b = self.query[v]
            if not 1 <= j <= self.n_inputs:
                raise CircuitError(f"leaf {v!r} reads bit {j}, circuit has {self.n_inputs} inputs")
            if a not in (0, 1) or b not in (0, 1):
                raise CircuitError(f"leaf {v!r} emits non-bits ({a}, {b})")
        extra = set(self.query) - set(self.leaves())
        if extra:
            raise CircuitError(f"query labels of the wrong length: {sorted(extra)[:3]}")

    def leaves(self) -> Iterator[str]:
        for bits in itertools.product("01", repeat=self.depth):
            yield "".join(bits)

    def leaf_value(self, v: str, bits: Sequence[int]) -> int:
        j, a, b = self.query[v]
        return a if bits[j - 1] else b

    @classmethod
    def random(cls, depth: int, n_inputs: int, rng: Optional[random.Random] = None) -> "NandTreeCircuit":
        rng = rng or random.Random()
        query = {}
        for bits in itertools.product("01", repeat=depth):
            query["".join(bits)] = (rng.randint(1, n_inputs), rng.randint(0, 1), rng.randint(0, 1))
        return cls(depth, n_inputs, query)

    def to_dict(self) -> Dict:
        return {
            "depth": self.depth,
            "n_inputs": self.n_inputs,
            "query": {v: list(q) for v, q in sorted(self.query.items())},
        }


@dataclass
class GProgram:
    alphabet: GenAlphabet
    instructions: Tuple[Instruction, ...]
    n_inputs: int

    def __post_init__(self):
        self.instructions = tuple(self.instructions)
        for k, ins in enumerate(self.instructions):
            if not 1 <= ins.index <= self.n_inputs:
                raise GwpError(f"instruction {k} reads bit {ins.index}, program has {self.n_inputs} inputs")
            for letter in (ins.on_one, ins.on_zero):
                if letter not in self.alphabet:
                    raise AlphabetError(f"instruction {k} uses letter {letter!r} outside the alphabet")

    def __len__(self) -> int:
        return len(self.instructions)


@dataclass
class ProgramFamily:
    """The five programs P_v, P_v^-1, g_v, g_v^-1 and 1_v of one gate"""

    p: Tuple[Instruction, ...]
    p_inv: Tuple[Instruction, ...]
    g: Tuple[Instruction, ...]
    g_inv: Tuple[Instruction, ...]
    one: Tuple[Instruction, ...]

    def get(self, name: str) -> Tuple[Instruction, ...]:
        return getattr(self, name)


def circuit_eval(c: NandTreeCircuit, x: Bits) -> int:
    """Value of the root gate"""
    bits = _bits(x, c.n_inputs)
    level = [c.leaf_value(v, bits) for v in c.leaves()]
    while len(level) > 1:
        level = [1 - (level[i] & level[i + 1]) for i in range(0, len(level), 2)]
    return level[0]


def nested_commutator(provider: SensProvider, d: int) -> GroupWord:
    """g_{d,eps} expanded from the leaves by g_v = [g_v0, g_v1]"""
    if d < 0:
        raise GwpError(f"depth must be non-negative, got {d}")
    level = [provider.leaf(d, "".join(bits)) for bits in itertools.product("01", repeat=d)]
    while len(level) > 1:
        level = [commutator_word(level[i], level[i + 1]) for i in range(0, len(level), 2)]
    return level[0]


def _leaf_family(index: int, a: int, b: int, word: GroupWord) -> ProgramFamily:
    alphabet = word.alphabet
    pad = alphabet.pad
    inv_word = tuple(alphabet.inv(x) for x in reversed(word.letters))
    p = tuple(Instruction(index, x if a else pad, x if b else pad) for x in word.letters)
    p_inv = tuple(Instruction(index, x if a else pad, x if b else pad) for x in inv_word)
    g = tuple(Instruction(1, x, x) for x in word.letters)
    g_inv = tuple(Instruction(1, x, x) for x in inv_word)
    one = (Instruction(1, pad, pad),) * len(word)
    return ProgramFamily(p, p_inv, g, g_inv, one)


def _combine(left: ProgramFamily, right: ProgramFamily) -> ProgramFamily:
    children = (left, right)
    programs = {}
    for name in FAMILIES:
        parts: List[Instruction] = []
        for child_name, bit in _BLOCKS[name]:
            parts.extend(children[bit].get(child_name))
        programs[name] = tuple(parts)
    return ProgramFamily(**programs)


def _leaf_families(c: NandTreeCircuit, provider: SensProvider) -> List[Tuple[str, ProgramFamily]]:
    out = []
    length = provider.leaf_length(c.depth)
    for v in c.leaves():
        word = provider.leaf(c.depth, v)
        if len(word) != length:
            raise GwpError(f"provider {provider.name} gave a leaf of length {len(word)}, expected {length}")
        j, a, b = c.query[v]
        out.append((v, _leaf_family(j, a, b, word)))
    return out


def compile_families(c: NandTreeCircuit, provider: SensProvider) -> Dict[str, ProgramFamily]:
    """All five program families for every gate, keyed by gate label"""
    families: Dict[str, ProgramFamily] = {}
    level = _leaf_families(c, provider)
    families.update(level)
    while len(level) > 1:
        nxt = []
        for i in range(0, len(level), 2):
            v = level[i][0][:-1]
            nxt.append((v, _combine(level[i][1], level[i + 1][1])))
        families.update(nxt)
        level = nxt
    return families


def compile_program(c: NandTreeCircuit, provider: SensProvider) -> GProgram:
    """P_eps for the circuit; trivial on x iff the circuit outputs 0 on x"""
    level = [fam for _, fam in _leaf_families(c, provider)]
    while len(level) > 1:
        level = [_combine(level[i], level[i + 1]) for i in range(0, len(level), 2)]
    program = GProgram(provider.alphabet, level[0].p, c.n_inputs)
    logger.debug(
        "compiled depth %d circuit with %s: %d instructions", c.depth, provider.name, len(program)
    )
    return program


def program_length(c: NandTreeCircuit, provider: SensProvider) -> int:
    """2^(3d) * L(d)"""
    return 8 ** c.depth * provider.leaf_length(c.depth)


def instruction_at(c: NandTreeCircuit, provider: SensProvider, i: int) -> Instruction:
    """The i-th instruction (from 0) of the compiled program, without building it"""
    total = program_length(c, provider)
    if not 0 <= i < total:
        raise IndexError(f"instruction {i} out of range for a program of length {total}")
    family = "p"
    v = ""
    block = total
    for _ in range(c.depth):
        block //= 8
        child_family, bit = _BLOCKS[family][i // block]
        i %= block
        family = child_family
        v += str(bit)
    if family == "one":
        pad = provider.alphabet.pad
        return Instruction(1, pad, pad)
    leaf = _leaf_family(*c.query[v], provider.leaf(c.depth, v))
    return leaf.get(family)[i]


def run_program(p: GProgram, x: Bits) -> GroupWord:
    """P[x]: per instruction, on_one if the bit is set else on_zero"""
    bits = _bits(x, p.n_inputs)
    return GroupWord(
        p.alphabet,
        tuple(ins.on_one if bits[ins.index - 1] else ins.on_zero for ins in p.instructions),
    )


@dataclass
class SweepMismatch:
    input: str
    circuit_value: int
    program_trivial: bool

    def to_dict(self) -> Dict:
        return {
            "input": self.input,
            "circuit_value": self.circuit_value,
            "program_trivial": self.program_trivial,
        }


def sweep(c: NandTreeCircuit, program: GProgram, oracle: GroupOracle) -> List[SweepMismatch]:
    """Inputs where program triviality disagrees with circuit output 0"""
    limit = get_config().brute_force_inputs
    if c.n_inputs > limit:
        raise GwpError(f"{c.n_inputs} inputs exceed the brute-force limit {limit}")
    if program.n_inputs != c.n_inputs:
        raise InputLengthError(
            f"program reads {program.n_inputs} inputs, circuit has {c.n_inputs}"
        )
    mismatches = []
    for bits in itertools.product("01", repeat=c.n_inputs):
        x = "".join(bits)
        value = circuit_eval(c, x)
        trivial = oracle.is_trivial(run_program(program, x))
        if trivial != (value == 0):
            mismatches.append(SweepMismatch(x, value, trivial))
    logger.info("swept %d inputs, %d mismatches", 2 ** c.n_inputs, len(mismatches))
    return mismatches

