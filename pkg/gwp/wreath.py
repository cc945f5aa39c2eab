"""
Wreath products G wr Z and G wr (Z/t) for gwp

An element is a pair (support, shift). Reading a word left to right, a base
letter read after a prefix with shift-exponent sum e multiplies the value at
position -e on the right. Base-group values are kept as normal tokens
supplied by a BaseGroupHandle.
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Callable, Dict, Hashable, Mapping, Optional, Sequence, Tuple, Union

from .config import get_config
from .core_groups import (
    FreeGroupOracle,
    GenAlphabet,
    GroupOracle,
    GroupWord,
    PermGroupOracle,
    WordLike,
    coerce_word,
    inverse_token,
    perm_inverse,
    perm_mul,
)
from .errors import AlphabetError, GroupDefinitionError, GwpError, SupportLimitError
from .selfsimilar import GrigorchukOracle, grig_reduce_tokens
from .slp import Slp, SlpBuilder, slp_length, slp_substitute, slp_validate
from .thompson import PLMap, ThompsonOracle, thompson_letter_maps

logger = logging.getLogger(__name__)

Token = Hashable


class BaseGroupHandle(ABC):
    """Normal tokens and multiplication for the base group of a wreath product"""

    alphabet: GenAlphabet
    oracle: GroupOracle

    @abstractmethod
    def letter(self, x: str) -> Token:
        """Token of a single letter"""

    @abstractmethod
    def mul(self, a: Token, b: Token) -> Token:
        """Token of a then b"""

    @abstractmethod
    def inverse(self, a: Token) -> Token:
        ...

    @property
    @abstractmethod
    def one(self) -> Token:
        ...

    def is_one(self, a: Token) -> bool:
        return a == self.one

    def same(self, a: Token, b: Token) -> bool:
        return a == b or self.is_one(self.mul(a, self.inverse(b)))

    def normalize(self, w: WordLike) -> Token:
        """Token of a whole word"""
        acc = self.one
        for x in coerce_word(self.alphabet, w).letters:
            acc = self.mul(acc, self.letter(x))
        return acc

    def describe(self, a: Token) -> str:
        return str(a)


class PermHandle(BaseGroupHandle):
    """Tokens are image tuples; products are memoized"""

    def __init__(self, oracle: PermGroupOracle):
        self.oracle = oracle
        self.alphabet = oracle.alphabet
        self._one = oracle.identity
        self._products: Dict[Tuple[Token, Token], Token] = {}

    @property
    def one(self) -> Token:
        return self._one

    def letter(self, x: str) -> Token:
        return self.oracle.letter_image(x)

    def mul(self, a, b):
        key = (a, b)
        out = self._products.get(key)
        if out is None:
            out = perm_mul(a, b)
            self._products[key] = out
        return out

    def inverse(self, a):
        return perm_inverse(a)

    def describe(self, a) -> str:
        words = self.oracle.element_words()
        return words[a].text() if a in words else str(a)


class ThompsonHandle(BaseGroupHandle):
    """Tokens are canonical PL maps

    ``letter_maps`` assigns maps to base letters (inverses derived), which
    lets arbitrary subgroups of F act as the base group.
    """

    def __init__(self, letter_maps: Optional[Mapping[str, PLMap]] = None, alphabet: Optional[GenAlphabet] = None):
        if letter_maps is None:
            self.oracle = ThompsonOracle()
            self.alphabet = self.oracle.alphabet
            self._maps = thompson_letter_maps()
        else:
            self.alphabet = alphabet or GenAlphabet.from_tokens(letter_maps)
            self._maps = dict(letter_maps)
            for x in list(self._maps):
                self._maps.setdefault(self.alphabet.inv(x), self._maps[x].inverse())
            self._maps.setdefault(self.alphabet.pad, PLMap.identity())
            self.oracle = _MappedThompsonOracle(self.alphabet, self._maps)
        self._one = PLMap.identity()

    @property
    def one(self) -> Token:
        return self._one

    def letter(self, x: str) -> Token:
        return self._maps[x]

    def mul(self, a: PLMap, b: PLMap) -> PLMap:
        return a.then(b)

    def inverse(self, a: PLMap) -> PLMap:
        return a.inverse()

    def is_one(self, a: PLMap) -> bool:
        return a.is_identity()

    def describe(self, a: PLMap) -> str:
        return repr(a)


class _MappedThompsonOracle(GroupOracle):
    def __init__(self, alphabet: GenAlphabet, maps: Mapping[str, PLMap]):
        self.alphabet = alphabet
        self._maps = maps

    def is_trivial(self, w: WordLike) -> bool:
        acc = PLMap.identity()
        for x in coerce_word(self.alphabet, w).letters:
            acc = acc.then(self._maps[x])
        return acc.is_identity()


def _free_reduce_tokens(alphabet: GenAlphabet) -> Callable[[Tuple[str, ...]], Tuple[str, ...]]:
    inv = alphabet.inv
    pad = alphabet.pad

    def reduce(tokens: Tuple[str, ...]) -> Tuple[str, ...]:
        stack = []
        for x in tokens:
            if x == pad:
                continue
            if stack and inv(stack[-1]) == x:
                stack.pop()
            else:
                stack.append(x)
        return tuple(stack)

    return reduce


class WordHandle(BaseGroupHandle):
    """Tokens are (partially reduced) words; identity decided by the oracle

    Two tokens may represent the same element, so comparisons go through
    :meth:`same`. Triviality answers are memoized.
    """

    def __init__(self, oracle: GroupOracle, reducer: Optional[Callable[[Tuple[str, ...]], Tuple[str, ...]]] = None):
        self.oracle = oracle
        self.alphabet = oracle.alphabet
        self._reduce = reducer or _free_reduce_tokens(oracle.alphabet)
        self._trivial: Dict[Tuple[str, ...], bool] = {}

    @property
    def one(self) -> Token:
        return ()

    def letter(self, x: str) -> Token:
        return self._reduce((x,))

    def mul(self, a, b):
        return self._reduce(a + b)

    def inverse(self, a):
        inv = self.alphabet.inv
        return tuple(inv(x) for x in reversed(a))

    def is_one(self, a) -> bool:
        if not a:
            return True
        known = self._trivial.get(a)
        if known is None:
            known = self.oracle.is_trivial(GroupWord(self.alphabet, a))
            self._trivial[a] = known
        return known

    def describe(self, a) -> str:
        return " ".join(a) if a else "1"


def handle_for(oracle: GroupOracle) -> BaseGroupHandle:
    """The natural handle for a group oracle"""
    if isinstance(oracle, PermGroupOracle):
        return PermHandle(oracle)
    if isinstance(oracle, ThompsonOracle):
        return ThompsonHandle()
    if isinstance(oracle, GrigorchukOracle):
        return WordHandle(oracle, grig_reduce_tokens)
    if isinstance(oracle, FreeGroupOracle):
        return WordHandle(oracle)
    return WordHandle(oracle, lambda tokens: tuple(x for x in tokens if x != oracle.alphabet.pad))


def slp_evaluate(g: Slp, base: BaseGroupHandle) -> Token:
    """Token of val(G) in the base group, one product per rule"""
    slp_validate(g)
    values: Dict[str, Token] = {}
    for var in g._order:
        acc = base.one
        for tok in g.rules[var]:
            acc = base.mul(acc, values[tok] if tok in values else base.letter(tok))
        values[var] = acc
    return values[g.start]


@dataclass
class WreathElement:
    """(support, shift) with identities removed from the support"""

    modulus: Optional[int]
    shift: int
    support: Dict[int, Token] = field(default_factory=dict)

    def is_trivial(self) -> bool:
        return self.shift == 0 and not self.support

    def to_dict(self, base: Optional[BaseGroupHandle] = None) -> Dict:
        show = base.describe if base is not None else str
        return {
            "modulus": self.modulus,
            "shift": self.shift,
            "support": {str(p): show(v) for p, v in sorted(self.support.items())},
        }


def wreath_alphabet(base: BaseGroupHandle, shift_letter: str = "t") -> GenAlphabet:
    """Base letters plus the shift letter and its inverse"""
    if shift_letter in base.alphabet:
        raise AlphabetError(f"shift letter {shift_letter!r} clashes with a base letter")
    return base.alphabet.extended([shift_letter])


def _canonical(position: int, modulus: Optional[int]) -> int:
    return position % modulus if modulus else position


def wreath_eta(w: WordLike, shift_letter: str = "t") -> int:
    """Exponent sum of the shift letter"""
    letters = w.letters if isinstance(w, GroupWord) else (w.split() if isinstance(w, str) else w)
    inverse = inverse_token(shift_letter)
    return sum(1 if x == shift_letter else -1 if x == inverse else 0 for x in letters)


def wreath_eval(
    w: WordLike,
    base: BaseGroupHandle,
    modulus: Optional[int] = None,
    shift_letter: str = "t",
) -> WreathElement:
    """Single left-to-right pass over the word"""
    alphabet = wreath_alphabet(base, shift_letter)
    w = coerce_word(alphabet, w)
    shift_inverse = inverse_token(shift_letter)
    pad = alphabet.pad
    support: Dict[int, Token] = {}
    e = 0
    for x in w.letters:
        if x == shift_letter:
            e += 1
        elif x == shift_inverse:
            e -= 1
        elif x != pad:
            pos = _canonical(-e, modulus)
            value = base.mul(support.get(pos, base.one), base.letter(x))
            if base.is_one(value):
                support.pop(pos, None)
            else:
                support[pos] = value
    return WreathElement(modulus, _canonical(e, modulus), support)


def wreath_is_trivial(
    w: WordLike,
    base: BaseGroupHandle,
    modulus: Optional[int] = None,
    shift_letter: str = "t",
) -> bool:
    return wreath_eval(w, base, modulus, shift_letter).is_trivial()


def _merge_into(
    support: Dict[int, Token],
    other: Mapping[int, Token],
    offset: int,
    base: BaseGroupHandle,
    modulus: Optional[int],
):
    """support[p - offset] *= other[p] for every p; values of ``other`` are never 1"""
    for p, v in other.items():
        q = _canonical(p - offset, modulus)
        cur = support.get(q)
        if cur is None:
            support[q] = v
            continue
        value = base.mul(cur, v)
        if base.is_one(value):
            del support[q]
        else:
            support[q] = value


def wreath_multiply(a: WreathElement, b: WreathElement, base: BaseGroupHandle) -> WreathElement:
    """(f1, h1)(f2, h2) = (f1 * f2 translated by h1, h1 + h2)"""
    if a.modulus != b.modulus:
        raise GwpError("cannot multiply elements of different wreath products")
    support = dict(a.support)
    _merge_into(support, b.support, a.shift, base, a.modulus)
    return WreathElement(a.modulus, _canonical(a.shift + b.shift, a.modulus), support)


def wreath_inverse(a: WreathElement, base: BaseGroupHandle) -> WreathElement:
    support = {_canonical(p + a.shift, a.modulus): base.inverse(v) for p, v in a.support.items()}
    return WreathElement(a.modulus, _canonical(-a.shift, a.modulus), support)


def wreath_equal(a: WreathElement, b: WreathElement, base: BaseGroupHandle) -> bool:
    if a.modulus != b.modulus or a.shift != b.shift:
        return False
    for p in set(a.support) | set(b.support):
        if not base.same(a.support.get(p, base.one), b.support.get(p, base.one)):
            return False
    return True


def _letter_effect(x: str, shift_letter: str, shift_inverse: str, pad: str) -> int:
    if x == shift_letter:
        return 1
    if x == shift_inverse:
        return -1
    return 0


def wreath_eval_slp(
    g: Slp,
    base: BaseGroupHandle,
    modulus: Optional[int] = None,
    support_limit: Optional[int] = None,
    shift_letter: str = "t",
) -> WreathElement:
    """Evaluate val(G) without decompressing it

    Variables are summarized bottom up as (shift, support). A summary is
    dropped as soon as no remaining rule needs it.
    """
    slp_validate(g)
    if support_limit is None:
        support_limit = get_config().support_limit
    alphabet = wreath_alphabet(base, shift_letter)
    shift_inverse = inverse_token(shift_letter)
    pad = alphabet.pad
    rules = g.rules
    for tok in g.terminals:
        if tok not in alphabet:
            raise AlphabetError(f"letter {tok!r} is not in the wreath alphabet")

    # only variables reachable from the start, with remaining use counts
    reachable = _reachable_vars(g)
    order = [v for v in g._order if v in reachable]
    uses: Dict[str, int] = {}
    for v in order:
        for tok in rules[v]:
            if tok in rules:
                uses[tok] = uses.get(tok, 0) + 1

    letter_tokens = {
        x: base.letter(x)
        for x in g.terminals
        if x not in (shift_letter, shift_inverse, pad) and not base.is_one(base.letter(x))
    }
    shifts: Dict[str, int] = {}
    supports: Dict[str, Dict[int, Token]] = {}
    peak = 0
    for v in order:
        e = 0
        support: Optional[Dict[int, Token]] = None
        for tok in rules[v]:
            if tok in rules:
                child = supports[tok]
                uses[tok] -= 1
                if support is None and e == 0 and uses[tok] == 0:
                    support = child
                else:
                    if support is None:
                        support = {}
                    if child:
                        _merge_into(support, child, e, base, modulus)
                e += shifts[tok]
                if uses[tok] == 0:
                    del supports[tok]
            else:
                step = _letter_effect(tok, shift_letter, shift_inverse, pad)
                if step:
                    e += step
                elif tok in letter_tokens:
                    if support is None:
                        support = {}
                    _merge_into(support, {0: letter_tokens[tok]}, e, base, modulus)
            if support is not None and len(support) > support_limit:
                raise SupportLimitError(len(support), support_limit)
        shifts[v] = _canonical(e, modulus)
        supports[v] = support if support is not None else {}
        peak = max(peak, len(supports[v]))
    logger.debug("compressed evaluation of %d variables, peak support %d", len(order), peak)
    return WreathElement(modulus, shifts[g.start], supports[g.start])


def _reachable_vars(g: Slp) -> set:
    seen = {g.start}
    stack = [g.start]
    while stack:
        v = stack.pop()
        for tok in g.rules[v]:
            if tok in g.rules and tok not in seen:
                seen.add(tok)
                stack.append(tok)
    return seen


def wreath_value_at(
    g: Slp,
    base: BaseGroupHandle,
    position: int,
    modulus: Optional[int] = None,
    shift_letter: str = "t",
) -> Token:
    """Support value of val(G) at one position, without the full support

    Descends the derivation; a child is visited only when the position
    falls inside the range its base letters can reach.
    """
    if modulus:
        return wreath_eval_slp(g, base, modulus, shift_letter=shift_letter).support.get(
            _canonical(position, modulus), base.one
        )
    slp_validate(g)
    rules = g.rules
    shift_inverse = inverse_token(shift_letter)
    pad = base.alphabet.pad

    # per variable: shift and the local position range of its base letters
    info: Dict[str, Tuple[int, Optional[int], Optional[int]]] = {}
    for v in g._order:
        e = 0
        lo = hi = None
        for tok in rules[v]:
            if tok in rules:
                sh, clo, chi = info[tok]
                if clo is not None:
                    lo = clo - e if lo is None else min(lo, clo - e)
                    hi = chi - e if hi is None else max(hi, chi - e)
                e += sh
            else:
                step = _letter_effect(tok, shift_letter, shift_inverse, pad)
                if step:
                    e += step
                elif tok != pad:
                    lo = -e if lo is None else min(lo, -e)
                    hi = -e if hi is None else max(hi, -e)
        info[v] = (e, lo, hi)

    def reaches(child: str, q: int) -> bool:
        _, lo, hi = info[child]
        return lo is not None and lo <= q <= hi

    memo: Dict[Tuple[str, int], Token] = {}
    stack = [(g.start, position)]
    while stack:
        key = stack[-1]
        if key in memo:
            stack.pop()
            continue
        var, p = key
        missing = []
        e = 0
        for tok in rules[var]:
            if tok in rules:
                q = p + e
                if reaches(tok, q) and (tok, q) not in memo:
                    missing.append((tok, q))
                e += info[tok][0]
            else:
                e += _letter_effect(tok, shift_letter, shift_inverse, pad)
        if missing:
            stack.extend(missing)
            continue
        stack.pop()
        acc = base.one
        e = 0
        for tok in rules[var]:
            if tok in rules:
                q = p + e
                if reaches(tok, q):
                    acc = base.mul(acc, memo[(tok, q)])
                e += info[tok][0]
            else:
                step = _letter_effect(tok, shift_letter, shift_inverse, pad)
                if step:
                    e += step
                elif tok != pad and p + e == 0:
                    acc = base.mul(acc, base.letter(tok))
        memo[key] = acc
    if not reaches(g.start, position):
        return base.one
    return memo[(g.start, position)]


class WreathOracle(GroupOracle):
    """Word problem of G wr Z or G wr (Z/t)"""

    def __init__(self, base: BaseGroupHandle, modulus: Optional[int] = None, shift_letter: str = "t"):
        self.base = base
        self.modulus = modulus
        self.shift_letter = shift_letter
        self.alphabet = wreath_alphabet(base, shift_letter)

    def is_trivial(self, w: WordLike) -> bool:
        return wreath_is_trivial(w, self.base, self.modulus, self.shift_letter)

    def evaluate(self, w: WordLike) -> WreathElement:
        return wreath_eval(w, self.base, self.modulus, self.shift_letter)

    def evaluate_slp(self, g: Slp, support_limit: Optional[int] = None) -> WreathElement:
        return wreath_eval_slp(g, self.base, self.modulus, support_limit, self.shift_letter)

    def __repr__(self) -> str:
        mod = "Z" if self.modulus is None else f"Z/{self.modulus}"
        return f"WreathOracle({self.base.oracle!r} wr {mod})"


@dataclass
class EmbeddingSlps:
    """SLPs G_{n,a} whose values induce G wr (Z/p^n) -> G"""

    slps: Dict[str, Slp]
    modulus: int
    n: int
    shift_letter: str = "t"

    def image_length(self, letter: str) -> int:
        return slp_length(self.slps[letter])


ImageLike = Union[GroupWord, Sequence[str]]


def phi_n_slps(
    phi1: Mapping[str, ImageLike],
    p: int,
    n: int,
    shift_letter: str = "t",
) -> EmbeddingSlps:
    """Iterate an embedding phi1 : G wr (Z/p) -> G to G wr (Z/p^n) -> G

    phi_n(g) = phi1^n(g) for base letters and
    phi_n(tau_n) = phi1^n(tau_1) phi1^(n-1)(tau_1) ... phi1(tau_1).
    """
    if n < 1:
        raise GwpError(f"n must be at least 1, got {n}")
    if p < 2:
        raise GwpError(f"p must be at least 2, got {p}")
    tau = shift_letter
    tau_inv = inverse_token(tau)
    images: Dict[str, Tuple[str, ...]] = {
        x: tuple(w.letters if isinstance(w, GroupWord) else w) for x, w in phi1.items()
    }
    if tau not in images:
        if tau_inv not in images:
            raise GroupDefinitionError(f"phi1 has no image for the shift letter {tau!r}")

    def inverse_image(tokens: Tuple[str, ...]) -> Tuple[str, ...]:
        return tuple(inverse_token(x) for x in reversed(tokens))

    for x in list(images):
        y = inverse_token(x)
        if y in images:
            if images[y] != inverse_image(images[x]):
                raise GroupDefinitionError(f"phi1 is not inverse-consistent at {x!r}")
        else:
            images[y] = inverse_image(images[x])
    images.setdefault("1", ("1",))

    base_letters = sorted(x for x in images if x not in (tau, tau_inv))
    for x, img in images.items():
        for y in img:
            if y not in images or y in (tau, tau_inv):
                raise AlphabetError(f"image of {x!r} uses {y!r}, which is not a base letter")

    builder = SlpBuilder(reserved=images)
    # level k symbol for base letter b derives phi1^k(b)
    level: Dict[str, str] = {b: b for b in base_letters}
    towers = []
    for k in range(1, n + 1):
        towers.append(builder.add((level[c] for c in images[tau]), f"T{k}_"))
        level = {b: builder.add((level[c] for c in images[b]), f"X{k}_") for b in base_letters}
    tau_var = builder.add(reversed(towers), "Tau")
    tau_inv_var = builder.inverse(tau_var)

    slps = {b: builder.build(level[b]) for b in base_letters}
    slps[tau] = builder.build(tau_var)
    slps[tau_inv] = builder.build(tau_inv_var)
    logger.debug("phi_%d embedding SLPs over %d base letters", n, len(base_letters))
    return EmbeddingSlps(slps, p ** n, n, tau)


def embed_slp(g: Slp, embedding: EmbeddingSlps) -> Slp:
    """Replace every letter of G by the start of its embedding SLP"""
    return slp_substitute(g, embedding.slps)
