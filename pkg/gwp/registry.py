"""
Group selectors for gwp

Maps the names used on the command line to oracles, base-group handles and
SENS providers:

    a5, f2, f3, grigorchuk, thompson
    wreath:<base>            G wr Z
    wreath:<base>@<t>        G wr (Z/t)
"""

import logging
from dataclasses import dataclass
from typing import Callable, Dict, Optional

from .config import get_config, parse_int
from .core_groups import FreeGroupOracle, GenAlphabet, GroupOracle, GroupWord, a5_oracle
from .errors import ConfigError, ExpansionLimitError, GwpError
from .selfsimilar import GrigorchukOracle
from .slp import Slp, slp_expand, slp_length
from .thompson import ThompsonOracle
from .wreath import (
    BaseGroupHandle,
    PermHandle,
    ThompsonHandle,
    WreathElement,
    WreathOracle,
    handle_for,
    slp_evaluate,
)

logger = logging.getLogger(__name__)

BASE_GROUPS: Dict[str, Callable[[], GroupOracle]] = {
    "a5": a5_oracle,
    "f2": lambda: FreeGroupOracle.of_rank(2),
    "f3": lambda: FreeGroupOracle.of_rank(3),
    "grigorchuk": GrigorchukOracle,
    "thompson": ThompsonOracle,
}


def shift_letter_for(alphabet: GenAlphabet) -> str:
    """'t', or 'T' when the base group already uses t"""
    return "T" if "t" in alphabet else "t"


@dataclass
class GroupSpec:
    name: str
    oracle: GroupOracle
    base: Optional[BaseGroupHandle] = None
    modulus: Optional[int] = None

    @property
    def alphabet(self) -> GenAlphabet:
        return self.oracle.alphabet

    @property
    def is_wreath(self) -> bool:
        return isinstance(self.oracle, WreathOracle)

    @property
    def base_name(self) -> str:
        if self.is_wreath:
            return self.name.split(":", 1)[1].split("@", 1)[0]
        return self.name

    def is_trivial_slp(self, g: Slp) -> bool:
        """Decide val(G) = 1 without expanding whenever the group allows it"""
        if self.is_wreath:
            return self.evaluate_slp(g).is_trivial()
        handle = handle_for(self.oracle)
        if isinstance(handle, (PermHandle, ThompsonHandle)):
            return handle.is_one(slp_evaluate(g, handle))
        limit = get_config().expand_limit
        length = slp_length(g)
        if length > limit:
            raise ExpansionLimitError(length, limit)
        return self.oracle.is_trivial(slp_expand(g))

    def evaluate_slp(self, g: Slp) -> WreathElement:
        if not self.is_wreath:
            raise GwpError(f"{self.name} is not a wreath product")
        return self.oracle.evaluate_slp(g)

    def word(self, w) -> GroupWord:
        return self.oracle.word(w)


def resolve_group(name: str) -> GroupSpec:
    """GroupSpec for a selector such as 'grigorchuk' or 'wreath:a5@7'"""
    key = name.strip().lower()
    if key in BASE_GROUPS:
        return GroupSpec(key, BASE_GROUPS[key]())
    if key.startswith("wreath:"):
        rest = key[len("wreath:"):]
        base_name, _, mod_text = rest.partition("@")
        if base_name not in BASE_GROUPS:
            raise ConfigError(f"unknown base group {base_name!r} in {name!r}")
        modulus = None
        if mod_text:
            modulus = parse_int(mod_text, "modulus")
            if modulus < 1:
                raise ConfigError(f"modulus must be positive, got {modulus}")
        base = handle_for(BASE_GROUPS[base_name]())
        oracle = WreathOracle(base, modulus, shift_letter_for(base.alphabet))
        logger.debug("resolved %s to %r", name, oracle)
        return GroupSpec(key, oracle, base, modulus)
    known = ", ".join(sorted(BASE_GROUPS))
    raise ConfigError(f"unknown group {name!r} (known: {known}, wreath:<base>[@t])")
