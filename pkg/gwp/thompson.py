"""
Thompson's group F for gwp

Elements are exact piecewise-linear homeomorphisms of [0, 1] with dyadic
breakpoints and power-of-two slopes. Words act from the right, so the map
of ``u v`` applies the map of u first.
"""

import logging
from bisect import bisect_right
from fractions import Fraction
from functools import lru_cache, total_ordering
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from .config import get_config
from .core_groups import (
    GenAlphabet,
    GroupOracle,
    GroupWord,
    WordLike,
    coerce_word,
    free_reduce,
    word_inverse,
)
from .errors import GwpError, LevelBoundError

logger = logging.getLogger(__name__)


def _trailing_zeros(n: int) -> int:
    return (n & -n).bit_length() - 1


@total_ordering
class DyadicRational:
    """numerator / 2**exponent in canonical form (odd numerator or exponent 0)"""

    __slots__ = ("numerator", "exponent")

    def __init__(self, numerator: int, exponent: int = 0):
        if exponent < 0:
            numerator <<= -exponent
            exponent = 0
        if numerator == 0:
            exponent = 0
        elif exponent:
            shift = min(_trailing_zeros(numerator), exponent)
            numerator >>= shift
            exponent -= shift
        self.numerator = numerator
        self.exponent = exponent

    @classmethod
    def coerce(cls, value: Union["DyadicRational", Fraction, int, str]) -> "DyadicRational":
        if isinstance(value, DyadicRational):
            return value
        if isinstance(value, int):
            return cls(value)
        frac = Fraction(value)
        den = frac.denominator
        if den & (den - 1):
            raise GwpError(f"{value} is not a dyadic rational")
        return cls(frac.numerator, den.bit_length() - 1)

    def to_fraction(self) -> Fraction:
        return Fraction(self.numerator, 1 << self.exponent)

    def scaled(self, k: int) -> "DyadicRational":
        """self * 2**k"""
        return DyadicRational(self.numerator, self.exponent - k)

    def _aligned(self, other: "DyadicRational") -> Tuple[int, int, int]:
        e = max(self.exponent, other.exponent)
        return self.numerator << (e - self.exponent), other.numerator << (e - other.exponent), e

    def __add__(self, other: "DyadicRational") -> "DyadicRational":
        a, b, e = self._aligned(other)
        return DyadicRational(a + b, e)

    def __sub__(self, other: "DyadicRational") -> "DyadicRational":
        a, b, e = self._aligned(other)
        return DyadicRational(a - b, e)

    def __neg__(self) -> "DyadicRational":
        return DyadicRational(-self.numerator, self.exponent)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DyadicRational):
            return NotImplemented
        return self.numerator == other.numerator and self.exponent == other.exponent

    def __lt__(self, other: "DyadicRational") -> bool:
        a, b, _ = self._aligned(other)
        return a < b

    def __hash__(self) -> int:
        return hash((self.numerator, self.exponent))

    def __repr__(self) -> str:
        return f"DyadicRational({self.numerator}, {self.exponent})"

    def __str__(self) -> str:
        if self.exponent == 0:
            return str(self.numerator)
        return f"{self.numerator}/{1 << self.exponent}"


ZERO = DyadicRational(0)
ONE = DyadicRational(1)

Point = Tuple[Union[DyadicRational, Fraction, int, str], Union[DyadicRational, Fraction, int, str]]


def _log2_ratio(dy: DyadicRational, dx: DyadicRational) -> Optional[int]:
    """k with dy = 2**k * dx, or None if the ratio is not a power of two"""
    a, b = dy.numerator, dx.numerator
    if a <= 0 or b <= 0:
        return None
    ta, tb = _trailing_zeros(a), _trailing_zeros(b)
    if a >> ta != b >> tb:
        return None
    return (ta - tb) + (dx.exponent - dy.exponent)


class PLMap:
    """Increasing dyadic PL homeomorphism of [0, 1] in canonical form"""

    __slots__ = ("xs", "ys", "ks")

    def __init__(self, breakpoints: Iterable[Point]):
        pts = [(DyadicRational.coerce(x), DyadicRational.coerce(y)) for x, y in breakpoints]
        if len(pts) < 2 or pts[0] != (ZERO, ZERO) or pts[-1] != (ONE, ONE):
            raise GwpError("breakpoints must start at (0,0) and end at (1,1)")
        xs = [p[0] for p in pts]
        ys = [p[1] for p in pts]
        for i in range(len(pts) - 1):
            if not (xs[i] < xs[i + 1] and ys[i] < ys[i + 1]):
                raise GwpError("breakpoints must be strictly increasing in both coordinates")
            if _log2_ratio(ys[i + 1] - ys[i], xs[i + 1] - xs[i]) is None:
                raise GwpError(f"slope on [{xs[i]}, {xs[i + 1]}] is not a power of two")
        self._set(xs, ys)

    @classmethod
    def _from_points(cls, xs: List[DyadicRational], ys: List[DyadicRational]) -> "PLMap":
        obj = cls.__new__(cls)
        obj._set(xs, ys)
        return obj

    @classmethod
    def identity(cls) -> "PLMap":
        return cls._from_points([ZERO, ONE], [ZERO, ONE])

    def _set(self, xs: List[DyadicRational], ys: List[DyadicRational]):
        ks = [_log2_ratio(ys[i + 1] - ys[i], xs[i + 1] - xs[i]) for i in range(len(xs) - 1)]
        # merge collinear segments
        keep_x = [xs[0]]
        keep_y = [ys[0]]
        keep_k: List[int] = []
        for i, k in enumerate(ks):
            if keep_k and keep_k[-1] == k:
                keep_x[-1] = xs[i + 1]
                keep_y[-1] = ys[i + 1]
            else:
                keep_k.append(k)
                keep_x.append(xs[i + 1])
                keep_y.append(ys[i + 1])
        self.xs = tuple(keep_x)
        self.ys = tuple(keep_y)
        self.ks = tuple(keep_k)

    @property
    def breakpoints(self) -> Tuple[Tuple[DyadicRational, DyadicRational], ...]:
        return tuple(zip(self.xs, self.ys))

    def slopes(self) -> Tuple[Fraction, ...]:
        return tuple(Fraction(2) ** k for k in self.ks)

    def __call__(self, x) -> DyadicRational:
        x = DyadicRational.coerce(x)
        xs = self.xs
        i = min(bisect_right(xs, x) - 1, len(xs) - 2)
        if i < 0 or x > ONE:
            raise GwpError(f"{x} is outside [0, 1]")
        return self.ys[i] + (x - xs[i]).scaled(self.ks[i])

    def preimage(self, y) -> DyadicRational:
        y = DyadicRational.coerce(y)
        ys = self.ys
        i = min(bisect_right(ys, y) - 1, len(ys) - 2)
        if i < 0 or y > ONE:
            raise GwpError(f"{y} is outside [0, 1]")
        return self.xs[i] + (y - ys[i]).scaled(-self.ks[i])

    def then(self, other: "PLMap") -> "PLMap":
        """The map x -> other(self(x))"""
        cuts = set(self.xs)
        cuts.update(self.preimage(y) for y in other.xs)
        xs = sorted(cuts)
        ys = [other(self(x)) for x in xs]
        return PLMap._from_points(xs, ys)

    def inverse(self) -> "PLMap":
        return PLMap._from_points(list(self.ys), list(self.xs))

    def is_identity(self) -> bool:
        return len(self.xs) == 2

    def nonidentity_intervals(self) -> List[Tuple[DyadicRational, DyadicRational]]:
        """Maximal intervals made of segments off the diagonal (closure of the support)"""
        out: List[Tuple[DyadicRational, DyadicRational]] = []
        for i in range(len(self.ks)):
            if self.ks[i] == 0 and self.xs[i] == self.ys[i]:
                continue
            if out and out[-1][1] == self.xs[i]:
                out[-1] = (out[-1][0], self.xs[i + 1])
            else:
                out.append((self.xs[i], self.xs[i + 1]))
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, PLMap):
            return NotImplemented
        return self.xs == other.xs and self.ys == other.ys

    def __hash__(self) -> int:
        return hash((self.xs, self.ys))

    def __repr__(self) -> str:
        pts = ", ".join(f"({x}, {y})" for x, y in zip(self.xs, self.ys))
        return f"PLMap([{pts}])"


def pl_compose(f: PLMap, g: PLMap) -> PLMap:
    """Apply f, then g"""
    return f.then(g)


def pl_invert(f: PLMap) -> PLMap:
    return f.inverse()


def pl_is_identity(f: PLMap) -> bool:
    return f.is_identity()


def pl_commutator(f: PLMap, g: PLMap) -> PLMap:
    """[f, g] = f^-1 g^-1 f g, applied left to right"""
    return f.inverse().then(g.inverse()).then(f).then(g)


_X0 = PLMap([(0, 0), ("1/4", "1/2"), ("1/2", "3/4"), (1, 1)])
_X1 = PLMap([(0, 0), ("1/2", "1/2"), ("5/8", "3/4"), ("3/4", "7/8"), (1, 1)])

THOMPSON_ALPHABET = GenAlphabet.from_generators(["x0", "x1"])

_GENERATOR_MAPS = {
    "x0": _X0,
    "x0'": _X0.inverse(),
    "x1": _X1,
    "x1'": _X1.inverse(),
    "1": PLMap.identity(),
}


def thompson_letter_maps() -> Dict[str, PLMap]:
    """Maps of x0, x0', x1, x1' and the pad"""
    return dict(_GENERATOR_MAPS)


def thompson_generator(which: str) -> PLMap:
    """x0 or x1"""
    if which not in ("x0", "x1"):
        raise GwpError(f"unknown generator {which!r}, expected x0 or x1")
    return _GENERATOR_MAPS[which]


def fold_maps(maps: Sequence[PLMap]) -> PLMap:
    """Left-to-right product of maps, combined pairwise as a balanced tree"""
    if not maps:
        return PLMap.identity()
    level = list(maps)
    while len(level) > 1:
        nxt = [level[i].then(level[i + 1]) for i in range(0, len(level) - 1, 2)]
        if len(level) % 2:
            nxt.append(level[-1])
        level = nxt
    return level[0]


def thompson_element(w: WordLike, images: Optional[Mapping[str, PLMap]] = None) -> PLMap:
    """PLMap of a word; ``images`` overrides the letter maps (inverses derived)"""
    if images is None:
        w = free_reduce(coerce_word(THOMPSON_ALPHABET, w))
        return _fold_reduced(w.letters)
    letter_maps = dict(images)
    if not isinstance(w, GroupWord):
        raise GwpError("custom letter images need a GroupWord")
    alphabet = w.alphabet
    for x in list(letter_maps):
        letter_maps.setdefault(alphabet.inv(x), letter_maps[x].inverse())
    letter_maps.setdefault(alphabet.pad, PLMap.identity())
    reduced = free_reduce(w)
    return fold_maps([letter_maps[x] for x in reduced.letters])


@lru_cache(maxsize=4096)
def _fold_reduced(letters: Tuple[str, ...]) -> PLMap:
    return fold_maps([_GENERATOR_MAPS[x] for x in letters])


def thompson_is_trivial(w: WordLike) -> bool:
    return thompson_element(w).is_identity()


class ThompsonOracle(GroupOracle):
    """Word problem of F by folding PL maps"""

    def __init__(self):
        self.alphabet = THOMPSON_ALPHABET

    def is_trivial(self, w: WordLike) -> bool:
        return thompson_is_trivial(w)

    def __repr__(self) -> str:
        return "ThompsonOracle()"


def _w(text: str) -> GroupWord:
    return THOMPSON_ALPHABET.word(text)


X2 = _w("x0' x1 x0")
X3 = _w("x0' x0' x1 x0 x0")


def thompson_sens_root() -> GroupWord:
    """g = x3 x2^-1, freely reduced"""
    return free_reduce(X3 + word_inverse(X2))


_C_STEP = {"0": _w("x1"), "1": _w("x0' x1")}


def thompson_conjugator(v: str) -> GroupWord:
    """c_v with c_eps = eps, c_v0 = x1 c_v, c_v1 = x0^-1 x1 c_v"""
    c = GroupWord.empty(THOMPSON_ALPHABET)
    for bit in v:
        c = _C_STEP[bit] + c
    return c


def thompson_leaf_length(d: int) -> int:
    """Smallest power of two holding every leaf of depth d"""
    longest = len(thompson_sens_root()) + 4 * d
    return 1 << (longest - 1).bit_length()


def thompson_sens_leaf(d: int, v: str) -> GroupWord:
    """g^(c_v) = c_v^-1 g c_v, padded to the common leaf length"""
    if len(v) != d:
        raise GwpError(f"leaf label {v!r} does not have length {d}")
    c = thompson_conjugator(v)
    leaf = word_inverse(c) + thompson_sens_root() + c
    return leaf.padded(thompson_leaf_length(d))


_WREATH_COPIES = {
    1: _w("x1") + X2 + _w("x1' x1'"),
    2: _w("x1 x1") + X2 + _w("x1' x1' x1'"),
}


def thompson_wreath_image(gen: Union[str, Tuple[int, int]], level_bound: Optional[int] = None) -> GroupWord:
    """Word in F for a generator of F wr Z

    ``"shift"`` maps to x0; ``(k, i)`` (copy generator k in {1, 2} at
    level i) maps to x0^-i w_k x0^i.
    """
    if gen == "shift":
        return _w("x0")
    k, level = gen
    if k not in _WREATH_COPIES:
        raise GwpError(f"copy generator must be 1 or 2, got {k}")
    if level_bound is None:
        level_bound = get_config().level_bound
    if abs(level) > level_bound:
        raise LevelBoundError(f"level {level} exceeds bound {level_bound}")
    shift = _w("x0") * level if level >= 0 else _w("x0'") * (-level)
    return word_inverse(shift) + _WREATH_COPIES[k] + shift
