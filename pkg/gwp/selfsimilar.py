"""
The Grigorchuk group for gwp

Words over the involutions a, b, c, d act on the binary tree from the
right: (xv)^g = x^pi v^(g@x) with

    a = swap, sections (1, 1)
    b = (a, c)    c = (a, d)    d = (1, b)

Two independent word-problem algorithms are provided: exact recursion on
sections (the reference) and enumeration of a ball of vertices.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Tuple

from .core_groups import GenAlphabet, GroupOracle, GroupWord, PAD, WordLike, coerce_word
from .errors import GwpError

logger = logging.getLogger(__name__)

GRIG_ALPHABET = GenAlphabet.from_generators("abcd", self_inverse="abcd")

# letter -> (swaps the first level, section at 0, section at 1)
_SECTIONS: Dict[str, Tuple[bool, str, str]] = {
    "a": (True, PAD, PAD),
    "b": (False, "a", "c"),
    "c": (False, "a", "d"),
    "d": (False, PAD, "b"),
}

_KLEIN = {
    ("b", "c"): "d", ("c", "b"): "d",
    ("b", "d"): "c", ("d", "b"): "c",
    ("c", "d"): "b", ("d", "c"): "b",
}

# SENS witnesses
_X = ("a", "b", "a", "d", "a", "b", "a", "d")
_X_INV = ("d", "a", "b", "a", "d", "a", "b", "a")
_Y = ("b", "a", "b", "a", "d", "a", "b", "a", "c")
_Y_INV = ("c", "a", "b", "a", "d", "a", "b", "a", "b")
_LEAF_WORDS = {"x": _X, "x'": _X_INV, "y": _Y, "y'": _Y_INV}
_LEAF_TABLE = {
    "x": ("x'", "y'"),
    "x'": ("y'", "x'"),
    "y": ("y", "x"),
    "y'": ("x", "y"),
}
GRIG_LEAF_LENGTH = 16


@dataclass(frozen=True)
class SectionPair:
    """First-level portrait of a word: root permutation and both sections"""

    root_swap: bool
    sec0: GroupWord
    sec1: GroupWord

    def section(self, x: int) -> GroupWord:
        return self.sec1 if x else self.sec0


def grig_word(w: WordLike) -> GroupWord:
    return coerce_word(GRIG_ALPHABET, w)


def grig_reduce_tokens(tokens) -> Tuple[str, ...]:
    stack: List[str] = []
    for x in tokens:
        if x == PAD:
            continue
        if stack:
            top = stack[-1]
            if top == x:
                stack.pop()
                continue
            merged = _KLEIN.get((top, x))
            if merged is not None:
                stack[-1] = merged
                continue
        stack.append(x)
    return tuple(stack)


def grig_reduce(w: WordLike) -> GroupWord:
    """Drop pads, cancel squares, merge {b,c,d} pairs via the Klein table"""
    return GroupWord(GRIG_ALPHABET, grig_reduce_tokens(grig_word(w).letters))


def _sections(tokens) -> Tuple[bool, Tuple[str, ...], Tuple[str, ...]]:
    swap = False
    sec = ([], [])
    for x in tokens:
        if x == PAD:
            continue
        flips, s0, s1 = _SECTIONS[x]
        # letter x contributes x@(y^pi_acc) to the section at y
        first, second = (s1, s0) if swap else (s0, s1)
        if first != PAD:
            sec[0].append(first)
        if second != PAD:
            sec[1].append(second)
        if flips:
            swap = not swap
    return swap, tuple(sec[0]), tuple(sec[1])


def grig_sections(w: WordLike) -> SectionPair:
    swap, s0, s1 = _sections(grig_word(w).letters)
    return SectionPair(swap, GroupWord(GRIG_ALPHABET, s0), GroupWord(GRIG_ALPHABET, s1))


def grig_section_at(w: WordLike, vertex: str) -> GroupWord:
    """Section w@u at a vertex u given as a string of 0s and 1s"""
    tokens = grig_word(w).letters
    for bit in vertex:
        swap, s0, s1 = _sections(tokens)
        tokens = s1 if bit == "1" else s0
    return GroupWord(GRIG_ALPHABET, tokens)


def _act_letter(letter: str, bits: List[int]) -> None:
    state = letter
    for i, x in enumerate(bits):
        if state == PAD:
            return
        flips, s0, s1 = _SECTIONS[state]
        if flips:
            bits[i] = x ^ 1
        state = s1 if x else s0


def grig_act(w: WordLike, v: str) -> str:
    """Image of vertex v under the automorphism of w"""
    bits = [1 if ch == "1" else 0 for ch in v]
    for letter in grig_word(w).letters:
        _act_letter(letter, bits)
    return "".join("1" if b else "0" for b in bits)


@lru_cache(maxsize=1 << 16)
def _is_trivial_reduced(tokens: Tuple[str, ...]) -> bool:
    if not tokens:
        return True
    if len(tokens) == 1:
        return False
    swap, s0, s1 = _sections(tokens)
    if swap:
        return False
    return _is_trivial_reduced(grig_reduce_tokens(s0)) and _is_trivial_reduced(grig_reduce_tokens(s1))


def grig_is_trivial(w: WordLike) -> bool:
    """Exact recursion: a reduced word of length >= 2 has strictly shorter sections"""
    return _is_trivial_reduced(grig_reduce_tokens(grig_word(w).letters))


def grig_ball_depth(length: int) -> int:
    """Depth of the ball that decides triviality of words of the given length"""
    return length.bit_length() + 4


def grig_fixes_ball(w: WordLike, depth: int) -> bool:
    """True iff w fixes every vertex of {0,1}^depth

    Vertices are visited depth first. Each stack entry carries the states
    the letters of w are in below the current vertex; subtrees where all
    states became trivial are skipped.
    """
    if depth < 0:
        raise GwpError(f"depth must be non-negative, got {depth}")
    root = grig_reduce_tokens(grig_word(w).letters)
    stack = [(0, root)]
    while stack:
        level, states = stack.pop()
        if not states or level == depth:
            continue
        for x in (1, 0):
            bit = x
            nxt: List[str] = []
            for s in states:
                flips, s0, s1 = _SECTIONS[s]
                below = s1 if bit else s0
                if flips:
                    bit ^= 1
                nxt.append(below)
            if bit != x:
                return False
            stack.append((level + 1, grig_reduce_tokens(nxt)))
    return True


def grig_sens_leaf(d: int, v: str) -> GroupWord:
    """z_v from the x/y transition table, spelled in a..d and padded to 16 letters"""
    if len(v) != d:
        raise GwpError(f"leaf label {v!r} does not have length {d}")
    return GroupWord(GRIG_ALPHABET, _LEAF_WORDS[grig_leaf_state(v)]).padded(GRIG_LEAF_LENGTH)


def grig_leaf_state(v: str) -> str:
    """Name of z_v among x, x', y, y'"""
    state = "x"
    for bit in v:
        state = _LEAF_TABLE[state][1 if bit == "1" else 0]
    return state


def grig_named(name: str) -> GroupWord:
    """The words x, x', y, y' unpadded"""
    return GroupWord(GRIG_ALPHABET, _LEAF_WORDS[name])


class GrigorchukOracle(GroupOracle):
    """Word problem of the Grigorchuk group by exact section recursion"""

    def __init__(self):
        self.alphabet = GRIG_ALPHABET

    def is_trivial(self, w: WordLike) -> bool:
        return grig_is_trivial(w)

    def __repr__(self) -> str:
        return "GrigorchukOracle()"
