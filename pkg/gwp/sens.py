"""
SENS providers for gwp

A provider hands out the leaves g_{d,v} of a balanced nested commutator:
words of one power-of-two length L(d) for every v in {0,1}^d, such that
the root g_{d,eps} = [g_{d,0}, g_{d,1}] (recursively) is nontrivial.
"""

import logging
from abc import ABC, abstractmethod
from typing import Callable, Dict, Tuple

from .core_groups import (
    FreeGroupOracle,
    GenAlphabet,
    GroupOracle,
    GroupWord,
    PermGroupOracle,
    a5_oracle,
    perm_inverse,
    perm_mul,
)
from .errors import GroupDefinitionError, GwpError
from .selfsimilar import GRIG_LEAF_LENGTH, GrigorchukOracle, grig_sens_leaf
from .thompson import ThompsonOracle, thompson_leaf_length, thompson_sens_leaf

logger = logging.getLogger(__name__)


def next_pow2(n: int) -> int:
    """Smallest power of two >= n (1 for n <= 1)"""
    return 1 << max(n - 1, 0).bit_length()


def _check_label(d: int, v: str):
    if d < 0:
        raise GwpError(f"depth must be non-negative, got {d}")
    if len(v) != d or any(ch not in "01" for ch in v):
        raise GwpError(f"leaf label {v!r} is not a bit string of length {d}")


class SensProvider(ABC):
    """Leaves of the nested commutators g_{d,v}"""

    name: str
    alphabet: GenAlphabet
    oracle: GroupOracle

    @abstractmethod
    def leaf(self, d: int, v: str) -> GroupWord:
        """g_{d,v} for |v| = d, padded to leaf_length(d)"""

    @abstractmethod
    def leaf_length(self, d: int) -> int:
        ...

    def __repr__(self) -> str:
        return f"{type(self).__name__}()"


def commutator_table(oracle: PermGroupOracle) -> Dict[Tuple[int, ...], Tuple[Tuple[int, ...], Tuple[int, ...]]]:
    """Lexicographically least (h1, h2) with [h1, h2] = g, for every element g

    Elements are ordered as the breadth-first enumeration lists them.
    """
    elements = list(oracle.element_words())

    table: Dict[Tuple[int, ...], Tuple[Tuple[int, ...], Tuple[int, ...]]] = {}
    for h1 in elements:
        h1_inv = perm_inverse(h1)
        for h2 in elements:
            c = perm_mul(perm_mul(h1_inv, perm_inverse(h2)), perm_mul(h1, h2))
            if c not in table:
                table[c] = (h1, h2)
        if len(table) == len(elements):
            break
    if len(table) != len(elements):
        raise GroupDefinitionError(
            f"only {len(table)} of {len(elements)} elements are commutators"
        )
    return table


class A5Provider(SensProvider):
    """Walks the commutator table of A5 from the element of s

    Bit 0 moves to h1 and bit 1 to h2 of the current element's entry, so
    every internal node satisfies z_v = [z_v0, z_v1] by construction.
    """

    name = "a5"

    def __init__(self, oracle: PermGroupOracle = None):
        self.oracle = oracle or a5_oracle()
        self.alphabet = self.oracle.alphabet
        self._words = self.oracle.element_words()
        self._table = commutator_table(self.oracle)
        self._root = self.oracle.letter_image(self.alphabet.generators[0])
        self._length = next_pow2(max(len(w) for w in self._words.values()))
        logger.debug("A5 commutator table ready, leaf length %d", self._length)

    def element_at(self, v: str) -> Tuple[int, ...]:
        state = self._root
        for bit in v:
            state = self._table[state][1 if bit == "1" else 0]
        return state

    def leaf(self, d: int, v: str) -> GroupWord:
        _check_label(d, v)
        return self._words[self.element_at(v)].padded(self._length)

    def leaf_length(self, d: int) -> int:
        return self._length


class F2Provider(SensProvider):
    """g_v = x0^-bin(v) x1 x0^bin(v)"""

    name = "f2"

    def __init__(self):
        self.oracle = FreeGroupOracle.of_rank(2)
        self.alphabet = self.oracle.alphabet

    def leaf(self, d: int, v: str) -> GroupWord:
        _check_label(d, v)
        k = int(v, 2) if v else 0
        letters = ("x0'",) * k + ("x1",) + ("x0",) * k
        return GroupWord(self.alphabet, letters).padded(self.leaf_length(d))

    def leaf_length(self, d: int) -> int:
        # pad length 2^ceil(log2(2 * 2^d + 1)) = 2^(d+2); leaves have at most 2^(d+1) - 1 letters
        return 1 << (2 << d).bit_length()


class F3Provider(SensProvider):
    """g_v = x_(bin(v) mod 3); neighbouring leaves never share a generator"""

    name = "f3"

    def __init__(self):
        self.oracle = FreeGroupOracle.of_rank(3)
        self.alphabet = self.oracle.alphabet

    def leaf(self, d: int, v: str) -> GroupWord:
        _check_label(d, v)
        k = int(v, 2) if v else 0
        return GroupWord(self.alphabet, (f"x{k % 3}",))

    def leaf_length(self, d: int) -> int:
        return 1


class GrigorchukProvider(SensProvider):
    name = "grigorchuk"

    def __init__(self):
        self.oracle = GrigorchukOracle()
        self.alphabet = self.oracle.alphabet

    def leaf(self, d: int, v: str) -> GroupWord:
        _check_label(d, v)
        return grig_sens_leaf(d, v)

    def leaf_length(self, d: int) -> int:
        return GRIG_LEAF_LENGTH


class ThompsonProvider(SensProvider):
    name = "thompson"

    def __init__(self):
        self.oracle = ThompsonOracle()
        self.alphabet = self.oracle.alphabet

    def leaf(self, d: int, v: str) -> GroupWord:
        _check_label(d, v)
        return thompson_sens_leaf(d, v)

    def leaf_length(self, d: int) -> int:
        return thompson_leaf_length(d)


PROVIDERS: Dict[str, Callable[[], SensProvider]] = {
    "a5": A5Provider,
    "f2": F2Provider,
    "f3": F3Provider,
    "grigorchuk": GrigorchukProvider,
    "thompson": ThompsonProvider,
}

_instances: Dict[str, SensProvider] = {}


def get_provider(name: str) -> SensProvider:
    """Shared provider instance by group name"""
    key = name.lower()
    if key not in PROVIDERS:
        known = ", ".join(sorted(PROVIDERS))
        raise GwpError(f"no SENS provider for group {name!r} (known: {known})")
    if key not in _instances:
        _instances[key] = PROVIDERS[key]()
    return _instances[key]
