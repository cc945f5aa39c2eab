"""
Straight-line programs for gwp

An SLP is an acyclic grammar in which every variable has exactly one rule;
it derives exactly one word. Tokens that head a rule are variables, every
other token on a right-hand side is a terminal. Lengths, letter counts and
positions are Python ints, so SLPs deriving words of astronomic length are
queried without decompression.
"""

import logging
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple, Union

from .config import get_config
from .core_groups import GenAlphabet, GroupWord, PAD, inverse_token
from .errors import (
    AlphabetError,
    ExpansionLimitError,
    PositionOutOfRangeError,
    RangeError,
    SlpCycleError,
    SlpError,
    UndefinedVariableError,
)

logger = logging.getLogger(__name__)

Rules = Union[Mapping[str, Sequence[str]], Iterable[Tuple[str, Sequence[str]]]]

# Variables deriving at most this many letters are expanded once and reused.
_SMALL = 512


class Slp:
    """Ordered rules ``head -> rhs`` plus a start variable"""

    def __init__(self, rules: Rules, start: str, alphabet: Optional[GenAlphabet] = None):
        items = rules.items() if isinstance(rules, Mapping) else rules
        self.rules: Dict[str, Tuple[str, ...]] = {}
        for head, rhs in items:
            if head in self.rules:
                raise SlpError(f"variable {head!r} has more than one rule")
            self.rules[head] = tuple(rhs)
        self.start = start
        self._alphabet = alphabet
        self._order: Optional[List[str]] = None
        self._lengths: Optional[Dict[str, int]] = None
        self._counts: Optional[Dict[str, Dict[str, int]]] = None

    @property
    def terminals(self) -> Set[str]:
        rules = self.rules
        return {tok for rhs in rules.values() for tok in rhs if tok not in rules}

    @property
    def alphabet(self) -> GenAlphabet:
        if self._alphabet is None:
            self._alphabet = GenAlphabet.from_tokens(sorted(self.terminals))
        return self._alphabet

    def is_variable(self, symbol: str) -> bool:
        return symbol in self.rules

    def length(self, symbol: str) -> int:
        """Length of the word derived from a variable (1 for terminals)"""
        slp_validate(self)
        return self._lengths.get(symbol, 1)

    @property
    def variables(self) -> Tuple[str, ...]:
        return tuple(self.rules)

    def to_dict(self) -> Dict:
        return {"start": self.start, "rules": {h: list(r) for h, r in self.rules.items()}}

    def __repr__(self) -> str:
        return f"Slp(start={self.start!r}, variables={len(self.rules)}, size={slp_size(self)})"


def slp_validate(g: Slp) -> None:
    """Check acyclicity and definedness; cache length and letter-count tables"""
    if g._order is not None:
        return
    rules = g.rules
    if g.start not in rules:
        raise UndefinedVariableError(f"start variable {g.start!r} has no rule")
    if g._alphabet is not None:
        for rhs in rules.values():
            for tok in rhs:
                if tok not in rules and tok not in g._alphabet:
                    raise UndefinedVariableError(
                        f"token {tok!r} is neither a variable nor a letter of the alphabet"
                    )

    # iterative DFS; colors: 1 = on stack, 2 = done
    color: Dict[str, int] = {}
    order: List[str] = []
    for root in rules:
        if root in color:
            continue
        color[root] = 1
        stack = [(root, iter(rules[root]))]
        while stack:
            var, children = stack[-1]
            for child in children:
                if child not in rules:
                    continue
                state = color.get(child)
                if state == 1:
                    raise SlpCycleError(child)
                if state is None:
                    color[child] = 1
                    stack.append((child, iter(rules[child])))
                    break
            else:
                stack.pop()
                color[var] = 2
                order.append(var)

    lengths: Dict[str, int] = {}
    counts: Dict[str, Dict[str, int]] = {}
    for var in order:
        total = 0
        tally: Dict[str, int] = {}
        for tok in rules[var]:
            if tok in rules:
                total += lengths[tok]
                for letter, n in counts[tok].items():
                    tally[letter] = tally.get(letter, 0) + n
            else:
                total += 1
                tally[tok] = tally.get(tok, 0) + 1
        lengths[var] = total
        counts[var] = tally
    g._lengths = lengths
    g._counts = counts
    g._order = order


def slp_size(g: Slp) -> int:
    """|G| = total length of all right-hand sides"""
    return sum(len(rhs) for rhs in g.rules.values())


def slp_length(g: Slp) -> int:
    slp_validate(g)
    return g._lengths[g.start]


def slp_count(g: Slp, letter: str) -> int:
    """|val(G)|_a"""
    slp_validate(g)
    return g._counts[g.start].get(letter, 0)


def slp_depth(g: Slp) -> int:
    """Height of the derivation tree (a terminal-only start rule has depth 1)"""
    slp_validate(g)
    depth: Dict[str, int] = {}
    for var in g._order:
        depth[var] = 1 + max((depth[t] for t in g.rules[var] if t in g.rules), default=0)
    return depth[g.start]


def slp_within_size_bound(g: Slp) -> bool:
    """|val(G)| <= 3^(|G|/3), checked exactly as |val|^3 <= 3^|G|"""
    return slp_length(g) ** 3 <= 3 ** slp_size(g)


def _small_expansions(g: Slp) -> Dict[str, Tuple[str, ...]]:
    rules = g.rules
    lengths = g._lengths
    small: Dict[str, Tuple[str, ...]] = {}
    for var in g._order:
        if lengths[var] > _SMALL:
            continue
        parts: List[str] = []
        for tok in rules[var]:
            if tok in rules:
                parts.extend(small[tok])
            else:
                parts.append(tok)
        small[var] = tuple(parts)
    return small


def slp_expand_tokens(g: Slp, limit: Optional[int] = None) -> Tuple[str, ...]:
    """val(G) as a token tuple, refusing words longer than ``limit``"""
    n = slp_length(g)
    if limit is None:
        limit = get_config().expand_limit
    if n > limit:
        raise ExpansionLimitError(n, limit)
    rules = g.rules
    small = _small_expansions(g)
    out: List[str] = []
    stack = [g.start]
    while stack:
        sym = stack.pop()
        if sym not in rules:
            out.append(sym)
        elif sym in small:
            out.extend(small[sym])
        else:
            stack.extend(reversed(rules[sym]))
    return tuple(out)


def slp_expand(g: Slp, limit: Optional[int] = None) -> GroupWord:
    """Decompress G; raises ExpansionLimitError when |val(G)| > limit"""
    return GroupWord(g.alphabet, slp_expand_tokens(g, limit))


def slp_at(g: Slp, p: int) -> str:
    """The letter val(G)[p] (0-based), by descending the derivation"""
    n = slp_length(g)
    if not 0 <= p < n:
        raise PositionOutOfRangeError(p, n)
    rules = g.rules
    lengths = g._lengths
    sym = g.start
    while sym in rules:
        for child in rules[sym]:
            size = lengths.get(child, 1)
            if p < size:
                sym = child
                break
            p -= size
    return sym


def _prefix_symbols(g: Slp, var: str, k: int) -> List[str]:
    """Symbols whose concatenation is val(var)[:k]"""
    rules = g.rules
    lengths = g._lengths
    parts: List[str] = []
    while k > 0:
        if var not in rules or lengths[var] == k:
            parts.append(var)
            break
        for child in rules[var]:
            size = lengths.get(child, 1)
            if size <= k:
                parts.append(child)
                k -= size
                if k == 0:
                    break
            else:
                var = child
                break
    return parts


def _suffix_symbols(g: Slp, var: str, k: int) -> List[str]:
    """Symbols whose concatenation is val(var)[len-k:]"""
    rules = g.rules
    lengths = g._lengths
    parts: List[str] = []
    while k > 0:
        if var not in rules or lengths[var] == k:
            parts.append(var)
            break
        for child in reversed(rules[var]):
            size = lengths.get(child, 1)
            if size <= k:
                parts.append(child)
                k -= size
                if k == 0:
                    break
            else:
                var = child
                break
    parts.reverse()
    return parts


def _range_symbols(g: Slp, p: int, q: int) -> List[str]:
    """Symbols whose concatenation is val(G)[p:q+1]"""
    rules = g.rules
    lengths = g._lengths
    var = g.start
    lo, hi = p, q + 1
    while True:
        if var not in rules or (lo == 0 and hi == lengths[var]):
            return [var]
        offset = 0
        children = rules[var]
        first = last = None
        for idx, child in enumerate(children):
            size = lengths.get(child, 1)
            if first is None and lo < offset + size:
                first = (idx, offset)
            if hi <= offset + size:
                last = (idx, offset)
                break
            offset += size
        (i, off_i), (j, off_j) = first, last
        if i == j:
            var = children[i]
            lo -= off_i
            hi -= off_i
            continue
        left = children[i]
        left_len = lengths.get(left, 1)
        parts = _suffix_symbols(g, left, left_len - (lo - off_i))
        parts.extend(children[i + 1:j])
        parts.extend(_prefix_symbols(g, children[j], hi - off_j))
        return parts


def _fresh_name(taken: Set[str], hint: str) -> str:
    if hint not in taken:
        return hint
    n = 1
    while f"{hint}{n}" in taken:
        n += 1
    return f"{hint}{n}"


def slp_substring(g: Slp, p: int, q: int) -> Slp:
    """SLP for val(G)[p:q] = a_p ... a_q (both ends inclusive)"""
    n = slp_length(g)
    if not (0 <= p <= q < n):
        raise RangeError(f"invalid range [{p}, {q}] for length {n}")
    parts = _range_symbols(g, p, q)
    taken = set(g.rules) | g.terminals
    start = _fresh_name(taken, "Sub")
    rules = dict(g.rules)
    rules[start] = tuple(parts)
    return Slp(_reachable(rules, start), start, g._alphabet)


def _reachable(rules: Mapping[str, Tuple[str, ...]], start: str) -> Dict[str, Tuple[str, ...]]:
    seen = {start}
    stack = [start]
    while stack:
        var = stack.pop()
        for tok in rules[var]:
            if tok in rules and tok not in seen:
                seen.add(tok)
                stack.append(tok)
    return {h: r for h, r in rules.items() if h in seen}


def _inverter(alphabet: Optional[GenAlphabet]) -> Callable[[str], str]:
    return alphabet.inv if alphabet is not None else inverse_token


def slp_invert(g: Slp) -> Slp:
    """Reverse every rule and invert every terminal"""
    slp_validate(g)
    inv = g.alphabet.inv
    rules = g.rules
    inverted = {
        head: tuple(tok if tok in rules else inv(tok) for tok in reversed(rhs))
        for head, rhs in rules.items()
    }
    return Slp(inverted, g.start, g._alphabet)


class SlpBuilder:
    """Incremental SLP construction with fresh variable names

    Terminal tokens that will appear must be passed as ``reserved`` (or
    added through :meth:`reserve`) so that fresh names never collide
    with them.
    """

    def __init__(self, reserved: Iterable[str] = (), alphabet: Optional[GenAlphabet] = None):
        self.rules: Dict[str, Tuple[str, ...]] = {}
        self.alphabet = alphabet
        self._reserved: Set[str] = set(reserved)
        if alphabet is not None:
            self._reserved.update(alphabet.letters)
        self._counters: Dict[str, int] = {}
        self._powers: Dict[str, List[str]] = {}
        self._inverse: Dict[str, str] = {}
        self._inv = _inverter(alphabet)

    def reserve(self, tokens: Iterable[str]):
        self._reserved.update(tokens)

    def fresh(self, hint: str = "V") -> str:
        n = self._counters.get(hint, 0)
        while True:
            name = f"{hint}{n}"
            n += 1
            if name not in self.rules and name not in self._reserved:
                self._counters[hint] = n
                return name

    def add(self, rhs: Iterable[str], hint: str = "V") -> str:
        """New variable with the given right-hand side"""
        rhs = tuple(rhs)
        self._reserved.update(tok for tok in rhs if tok not in self.rules)
        name = self.fresh(hint)
        self.rules[name] = rhs
        return name

    def define(self, name: str, rhs: Iterable[str]) -> str:
        if name in self.rules:
            raise SlpError(f"variable {name!r} has more than one rule")
        rhs = tuple(rhs)
        self._reserved.update(tok for tok in rhs if tok not in self.rules)
        self.rules[name] = rhs
        return name

    def word(self, tokens: Iterable[str], hint: str = "W") -> str:
        """Symbol deriving the given tokens (the token itself for length one)"""
        tokens = tuple(tokens)
        if len(tokens) == 1:
            self._reserved.add(tokens[0])
            return tokens[0]
        return self.add(tokens, hint)

    def concat(self, *symbols: str) -> str:
        return self.add(symbols, "C")

    def power(self, symbol: str, exponent: int) -> str:
        """Symbol deriving val(symbol)^exponent by binary doubling"""
        if exponent < 0:
            raise SlpError(f"negative exponent {exponent}; invert the base first")
        if exponent == 0:
            return self.add((), "E")
        if exponent == 1:
            return symbol
        chain = self._powers.setdefault(symbol, [symbol])
        while len(chain) < exponent.bit_length():
            chain.append(self.add((chain[-1], chain[-1]), "D"))
        parts = [chain[i] for i in range(exponent.bit_length() - 1, -1, -1) if exponent >> i & 1]
        if len(parts) == 1:
            return parts[0]
        return self.add(parts, "P")

    def inverse(self, symbol: str) -> str:
        """Symbol deriving the group inverse of val(symbol)"""
        if symbol not in self.rules:
            return self._inv(symbol)
        memo = self._inverse
        stack = [symbol]
        while stack:
            var = stack[-1]
            if var in memo:
                stack.pop()
                continue
            pending = [c for c in self.rules[var] if c in self.rules and c not in memo]
            if pending:
                stack.extend(pending)
                continue
            stack.pop()
            rhs = tuple(memo[c] if c in self.rules else self._inv(c) for c in reversed(self.rules[var]))
            inv_var = self.add(rhs, "I")
            memo[var] = inv_var
            memo[inv_var] = var
        return memo[symbol]

    def include(self, g: Slp, images: Optional[Mapping[str, str]] = None, strict: bool = False) -> str:
        """Copy the rules of ``g`` under fresh names; returns the copy of its start

        ``images`` replaces terminals by builder symbols (letterwise
        substitution). With ``strict`` every terminal other than the pad
        must have an image.
        """
        slp_validate(g)
        images = images or {}
        rename: Dict[str, str] = {}
        for var in g._order:
            rhs = []
            for tok in g.rules[var]:
                if tok in g.rules:
                    rhs.append(rename[tok])
                elif tok in images:
                    rhs.append(images[tok])
                elif strict and tok != PAD:
                    raise AlphabetError(f"no image for terminal {tok!r}")
                else:
                    rhs.append(tok)
            rename[var] = self.add(rhs, "G")
        return rename[g.start]

    def build(self, start: str, alphabet: Optional[GenAlphabet] = None, prune: bool = True) -> Slp:
        if start not in self.rules:
            start = self.add((start,), "S")
        rules = _reachable(self.rules, start) if prune else dict(self.rules)
        slp = Slp(rules, start, alphabet if alphabet is not None else self.alphabet)
        slp_validate(slp)
        return slp


def slp_power(w: GroupWord, exponent: int) -> Slp:
    """SLP for w^e, of size O(|w| + log e)"""
    if exponent < 0:
        raise SlpError(f"negative exponent {exponent}; invert the word first")
    b = SlpBuilder(alphabet=w.alphabet)
    base = b.word(w.letters) if len(w) else b.add((), "E")
    return b.build(b.power(base, exponent))


def slp_from_word(w: GroupWord) -> Slp:
    return Slp({"S": w.letters}, "S", w.alphabet)


def slp_morphism_tower(
    a0: str,
    phis: Sequence[Mapping[str, Union[GroupWord, Sequence[str]]]],
    alphabet: Optional[GenAlphabet] = None,
) -> Slp:
    """SLP for phi_1(phi_2(...phi_n(a0)...)), one variable layer per morphism

    The pad letter maps to itself unless a morphism says otherwise.
    """
    n = len(phis)
    images: List[Dict[str, Tuple[str, ...]]] = []
    for phi in phis:
        images.append({x: tuple(w.letters if isinstance(w, GroupWord) else w) for x, w in phi.items()})

    # letters needed at each level, from the top down
    needed: List[Set[str]] = [set() for _ in range(n + 1)]
    needed[n] = {a0}
    for k in range(n, 0, -1):
        for b in needed[k]:
            img = images[k - 1].get(b)
            if img is None:
                if b == PAD:
                    img = (PAD,)
                else:
                    raise AlphabetError(f"morphism {k} has no image for letter {b!r}")
            needed[k - 1].update(img)

    reserved: Set[str] = set()
    for level in needed:
        reserved |= level
    builder = SlpBuilder(reserved=reserved, alphabet=alphabet)
    # symbol deriving phi_1(...phi_k(b)...) at the current level
    current: Dict[str, str] = {b: b for b in needed[0]}
    for k in range(1, n + 1):
        layer: Dict[str, str] = {}
        for b in sorted(needed[k]):
            img = images[k - 1].get(b, (PAD,) if b == PAD else None)
            layer[b] = builder.add((current[c] for c in img), f"X{k}_")
        current = layer
    top = current[a0]
    if top not in builder.rules:
        top = builder.add((top,), "S")
    result = builder.build(top, alphabet)
    logger.debug("morphism tower of height %d: %d variables", n, len(result.rules))
    return result


def slp_substitute(g: Slp, images: Mapping[str, Slp], alphabet: Optional[GenAlphabet] = None) -> Slp:
    """Replace every terminal of G by the word of its image SLP"""
    slp_validate(g)
    builder = SlpBuilder(alphabet=alphabet)
    for h in images.values():
        builder.reserve(h.terminals)
    symbols = {tok: builder.include(h) for tok, h in images.items()}
    return builder.build(builder.include(g, symbols, strict=True), alphabet)
