"""
Words, alphabets and group oracles for gwp

Handles generating alphabets with the padding letter "1", words over them,
free reduction, free groups and finite permutation groups.
"""

import logging
from abc import ABC, abstractmethod
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

from sympy.combinatorics import Permutation, PermutationGroup
from sympy.combinatorics.permutations import _af_invert, _af_rmul

from .errors import AlphabetError, GroupDefinitionError

logger = logging.getLogger(__name__)

PAD = "1"

WordLike = Union["GroupWord", Sequence[str]]


def inverse_token(token: str) -> str:
    """Conventional inverse of a token: x <-> x', pad is self-inverse"""
    if token == PAD:
        return PAD
    if token.endswith("'"):
        return token[:-1]
    return token + "'"


@dataclass(frozen=True)
class GenAlphabet:
    """Ordered letters with an involution ``inv`` and the pad letter"""

    letters: Tuple[str, ...]
    images: Tuple[str, ...]
    pad: str = PAD
    _inv: Dict[str, str] = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if len(self.letters) != len(self.images):
            raise AlphabetError("letters and inverse images differ in length")
        if len(set(self.letters)) != len(self.letters):
            raise AlphabetError("duplicate letters in alphabet")
        inv = dict(zip(self.letters, self.images))
        if self.pad not in inv:
            raise AlphabetError(f"pad letter {self.pad!r} missing from alphabet")
        if inv[self.pad] != self.pad:
            raise AlphabetError("pad letter must be its own inverse")
        for x, y in inv.items():
            if y not in inv:
                raise AlphabetError(f"inverse {y!r} of {x!r} is not a letter")
            if inv[y] != x:
                raise AlphabetError(f"inverse map is not an involution at {x!r}")
        object.__setattr__(self, "_inv", inv)

    @classmethod
    def from_generators(cls, generators: Iterable[str], self_inverse: Iterable[str] = ()) -> "GenAlphabet":
        """Alphabet g, g', h, h', ..., 1; self-inverse generators get no primed twin"""
        involutions = set(self_inverse)
        letters: List[str] = []
        images: List[str] = []
        for g in generators:
            if g == PAD or g.endswith("'"):
                raise AlphabetError(f"invalid generator name {g!r}")
            if g in involutions:
                letters.append(g)
                images.append(g)
            else:
                letters.extend([g, inverse_token(g)])
                images.extend([inverse_token(g), g])
        letters.append(PAD)
        images.append(PAD)
        return cls(tuple(letters), tuple(images))

    @classmethod
    def from_tokens(cls, tokens: Iterable[str]) -> "GenAlphabet":
        """Close a token set under the x <-> x' convention"""
        seen: Dict[str, None] = {}
        for tok in tokens:
            if tok == PAD:
                continue
            seen.setdefault(tok, None)
            seen.setdefault(inverse_token(tok), None)
        letters = list(seen) + [PAD]
        return cls(tuple(letters), tuple(inverse_token(x) for x in letters))

    def inv(self, letter: str) -> str:
        try:
            return self._inv[letter]
        except KeyError:
            raise AlphabetError(f"letter {letter!r} not in alphabet") from None

    def __contains__(self, letter: object) -> bool:
        return letter in self._inv

    def __iter__(self) -> Iterator[str]:
        return iter(self.letters)

    def __len__(self) -> int:
        return len(self.letters)

    @property
    def generators(self) -> Tuple[str, ...]:
        """Letters other than the pad"""
        return tuple(x for x in self.letters if x != self.pad)

    def extended(self, generators: Iterable[str]) -> "GenAlphabet":
        """This alphabet plus further generator/inverse pairs"""
        letters = [x for x in self.letters if x != self.pad]
        images = [self._inv[x] for x in letters]
        for g in generators:
            if g in self._inv:
                raise AlphabetError(f"letter {g!r} already in alphabet")
            letters.extend([g, inverse_token(g)])
            images.extend([inverse_token(g), g])
        letters.append(self.pad)
        images.append(self.pad)
        return GenAlphabet(tuple(letters), tuple(images), self.pad)

    def word(self, tokens: Union[str, Iterable[str]]) -> "GroupWord":
        """Build a word from a whitespace separated string or a token sequence"""
        if isinstance(tokens, str):
            tokens = tokens.split()
        return GroupWord(self, tuple(tokens))


@dataclass(frozen=True)
class GroupWord:
    """A finite sequence of letters of one alphabet"""

    alphabet: GenAlphabet
    letters: Tuple[str, ...]

    def __post_init__(self):
        if not isinstance(self.letters, tuple):
            object.__setattr__(self, "letters", tuple(self.letters))
        for tok in set(self.letters):
            if tok not in self.alphabet:
                raise AlphabetError(f"token {tok!r} not in alphabet")

    @classmethod
    def empty(cls, alphabet: GenAlphabet) -> "GroupWord":
        return cls(alphabet, ())

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[str]:
        return iter(self.letters)

    def __getitem__(self, index):
        if isinstance(index, slice):
            return GroupWord(self.alphabet, self.letters[index])
        return self.letters[index]

    def __add__(self, other: "GroupWord") -> "GroupWord":
        if not isinstance(other, GroupWord):
            return NotImplemented
        if other.alphabet != self.alphabet:
            raise AlphabetError("cannot concatenate words over different alphabets")
        return GroupWord(self.alphabet, self.letters + other.letters)

    def __mul__(self, times: int) -> "GroupWord":
        return GroupWord(self.alphabet, self.letters * times)

    def count(self, letter: str) -> int:
        """|w|_a"""
        return self.letters.count(letter)

    def text(self) -> str:
        return " ".join(self.letters)

    def __str__(self) -> str:
        return self.text()

    def padded(self, length: int) -> "GroupWord":
        """Right-pad with the pad letter up to ``length``"""
        if length < len(self.letters):
            raise ValueError(f"cannot pad word of length {len(self.letters)} to {length}")
        return GroupWord(self.alphabet, self.letters + (self.alphabet.pad,) * (length - len(self.letters)))


def coerce_word(alphabet: GenAlphabet, w: WordLike) -> GroupWord:
    """Return ``w`` as a word over ``alphabet`` (re-validating foreign words)"""
    if isinstance(w, GroupWord):
        if w.alphabet == alphabet:
            return w
        return GroupWord(alphabet, w.letters)
    if isinstance(w, str):
        return alphabet.word(w)
    return GroupWord(alphabet, tuple(w))


def word_inverse(w: GroupWord) -> GroupWord:
    """(a_1...a_n)^-1 = inv(a_n)...inv(a_1)"""
    inv = w.alphabet.inv
    return GroupWord(w.alphabet, tuple(inv(x) for x in reversed(w.letters)))


def word_power(w: GroupWord, exponent: int) -> GroupWord:
    """w^e for any integer e (negative exponents use the inverse word)"""
    if exponent < 0:
        return word_inverse(w) * (-exponent)
    return w * exponent


def commutator_word(u: GroupWord, v: GroupWord) -> GroupWord:
    """[u, v] = u^-1 v^-1 u v"""
    if u.alphabet != v.alphabet:
        raise AlphabetError("commutator of words over different alphabets")
    return word_inverse(u) + word_inverse(v) + u + v


def conjugate_word(u: GroupWord, c: GroupWord) -> GroupWord:
    """u^c = c^-1 u c"""
    return word_inverse(c) + u + c


def free_reduce(w: GroupWord) -> GroupWord:
    """Delete pads and cancel adjacent x inv(x) pairs until none remain"""
    alphabet = w.alphabet
    pad = alphabet.pad
    inv = alphabet._inv
    stack: List[str] = []
    for x in w.letters:
        if x == pad:
            continue
        if stack and inv[stack[-1]] == x:
            stack.pop()
        else:
            stack.append(x)
    return GroupWord(alphabet, tuple(stack))


class GroupOracle(ABC):
    """Decision procedure for the word problem of one group"""

    alphabet: GenAlphabet

    @abstractmethod
    def is_trivial(self, w: WordLike) -> bool:
        """True iff ``w`` represents the identity"""

    def equal(self, u: WordLike, v: WordLike) -> bool:
        u = coerce_word(self.alphabet, u)
        v = coerce_word(self.alphabet, v)
        return self.is_trivial(u + word_inverse(v))

    def word(self, tokens: Union[str, Iterable[str]]) -> GroupWord:
        return self.alphabet.word(tokens)


class FreeGroupOracle(GroupOracle):
    """Free group on the given generators; triviality by free reduction"""

    def __init__(self, generators: Sequence[str]):
        self.generators = tuple(generators)
        self.alphabet = GenAlphabet.from_generators(self.generators)

    @classmethod
    def of_rank(cls, rank: int) -> "FreeGroupOracle":
        return cls([f"x{i}" for i in range(rank)])

    def is_trivial(self, w: WordLike) -> bool:
        return len(free_reduce(coerce_word(self.alphabet, w))) == 0

    def __repr__(self) -> str:
        return f"FreeGroupOracle({list(self.generators)!r})"


Perm = Tuple[int, ...]


def perm_mul(a: Perm, b: Perm) -> Perm:
    """a followed by b, i.e. sympy's a*b on array forms"""
    return tuple(_af_rmul(b, a))


def perm_inverse(a: Perm) -> Perm:
    return tuple(_af_invert(a))


def _as_permutation(p) -> Permutation:
    if isinstance(p, Permutation):
        return p
    return Permutation(list(p))


class PermGroupOracle(GroupOracle):
    """Finite permutation group; words are multiplied left to right"""

    def __init__(self, alphabet: GenAlphabet, generator_map: Mapping[str, Permutation]):
        self.alphabet = alphabet
        self.generator_map = dict(generator_map)
        self.degree = next(iter(self.generator_map.values())).size
        # letter -> image tuple; (p*q)(i) = q(p(i)) in sympy's convention
        self._images: Dict[str, Tuple[int, ...]] = {
            x: tuple(p.array_form) for x, p in self.generator_map.items()
        }
        self.identity: Tuple[int, ...] = tuple(range(self.degree))
        self._words: Optional[Dict[Tuple[int, ...], GroupWord]] = None

    def element(self, w: WordLike) -> Tuple[int, ...]:
        """Image tuple of the product of the letters of ``w``"""
        w = coerce_word(self.alphabet, w)
        state = self.identity
        pad = self.alphabet.pad
        for x in w.letters:
            if x == pad:
                continue
            state = perm_mul(state, self._images[x])
        return state

    def letter_image(self, letter: str) -> Tuple[int, ...]:
        return self._images[letter]

    def is_trivial(self, w: WordLike) -> bool:
        return self.element(w) == self.identity

    def order(self) -> int:
        gens = [self.generator_map[x] for x in self.alphabet.generators]
        return PermutationGroup(gens).order()

    def element_words(self) -> Dict[Tuple[int, ...], GroupWord]:
        """Shortest word (first in BFS order over the alphabet) for every element"""
        if self._words is None:
            self._words = perm_group_words(self)
            expected = self.order()
            if len(self._words) != expected:
                raise GroupDefinitionError(
                    f"BFS reached {len(self._words)} elements, group order is {expected}"
                )
        return self._words

    def __repr__(self) -> str:
        gens = {x: self.generator_map[x].cyclic_form for x in self.alphabet.generators}
        return f"PermGroupOracle({gens!r})"


def perm_group_oracle(
    generator_map: Mapping[str, object],
    alphabet: Optional[GenAlphabet] = None,
) -> PermGroupOracle:
    """Build a permutation-group oracle from letter images

    Images of inverse letters are derived when missing and checked when
    given. The pad letter maps to the identity.
    """
    perms: Dict[str, Permutation] = {x: _as_permutation(p) for x, p in generator_map.items()}
    if not perms:
        raise GroupDefinitionError("no generators given")
    if alphabet is None:
        alphabet = GenAlphabet.from_tokens(perms)
    degrees = {p.size for p in perms.values()}
    if len(degrees) != 1:
        raise GroupDefinitionError(f"generators have different degrees: {sorted(degrees)}")
    degree = degrees.pop()

    for x in list(perms):
        if x not in alphabet:
            raise AlphabetError(f"generator {x!r} not in alphabet")
    for x in alphabet.letters:
        if x == alphabet.pad:
            continue
        y = alphabet.inv(x)
        if x in perms and y in perms:
            if perms[y] != ~perms[x]:
                raise GroupDefinitionError(f"image of {y!r} is not the inverse of the image of {x!r}")
        elif x in perms:
            perms[y] = ~perms[x]
        elif y in perms:
            perms[x] = ~perms[y]
        else:
            raise GroupDefinitionError(f"no image for letter {x!r}")

    identity = Permutation(list(range(degree)))
    if alphabet.pad in perms and perms[alphabet.pad] != identity:
        raise GroupDefinitionError("pad letter must map to the identity")
    perms[alphabet.pad] = identity
    logger.debug("permutation group of degree %d on letters %s", degree, alphabet.letters)
    return PermGroupOracle(alphabet, perms)


def perm_group_words(oracle: PermGroupOracle) -> Dict[Tuple[int, ...], GroupWord]:
    """Breadth-first enumeration of a finite permutation group"""
    alphabet = oracle.alphabet
    letters = alphabet.generators
    words: Dict[Tuple[int, ...], Tuple[str, ...]] = {oracle.identity: ()}
    queue = deque([oracle.identity])
    while queue:
        elem = queue.popleft()
        prefix = words[elem]
        for x in letters:
            nxt = perm_mul(elem, oracle.letter_image(x))
            if nxt not in words:
                words[nxt] = prefix + (x,)
                queue.append(nxt)
    return {e: GroupWord(alphabet, w) for e, w in words.items()}


A5_ALPHABET = GenAlphabet(("s", "s'", "t", "t'", PAD), ("s'", "s", "t'", "t", PAD))


def a5_oracle() -> PermGroupOracle:
    """A5 = <(0 1 2 3 4), (0 1 2)> on letters s, s', t, t', 1"""
    return perm_group_oracle(
        {"s": Permutation(0, 1, 2, 3, 4), "t": Permutation(0, 1, 2, size=5)},
        alphabet=A5_ALPHABET,
    )
