"""
Text file formats for gwp

Handles reading and writing words, SLPs, nand-tree circuits, G-programs,
DAG circuits and embedding tables. Every format is line based; '#'
starts a comment and blank lines are ignored.

    SLP           start S / S -> A B x / A -> ...
    nand tree     nandtree / depth d / inputs n / leaf v j a b   (v = '-' for depth 0)
    G-program     gprogram n / j on_one on_zero
    DAG circuit   circuit / inputs m / gate g = nand a b / output i g
    embedding     letter -> tokens
"""

from typing import Dict, Iterator, List, Optional, Tuple

from .barrington import GProgram, Instruction, NandTreeCircuit
from .core_groups import GenAlphabet, GroupWord
from .cwp_reduction import DagCircuit
from .errors import GwpError, ParseError
from .slp import Slp

EMPTY_LABEL = "-"


def _lines(text: str) -> Iterator[Tuple[int, List[str]]]:
    for number, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0].strip()
        if body:
            yield number, body.split()


def _int(token: str, number: int, what: str) -> int:
    try:
        return int(token.replace("_", ""))
    except ValueError:
        raise ParseError(f"{what} must be an integer, got {token!r}", number) from None


def _bit(token: str, number: int) -> int:
    if token not in ("0", "1"):
        raise ParseError(f"expected a bit, got {token!r}", number)
    return int(token)


def _header(lines: List[Tuple[int, List[str]]], keyword: str) -> List[Tuple[int, List[str]]]:
    if not lines or lines[0][1][0] != keyword:
        raise ParseError(f"missing '{keyword}' header", lines[0][0] if lines else 1)
    return lines


# Words

def parse_word(text: str, alphabet: GenAlphabet) -> GroupWord:
    tokens: List[str] = []
    for number, toks in _lines(text):
        for tok in toks:
            if tok not in alphabet:
                raise ParseError(f"token {tok!r} is not a letter of the group", number)
        tokens.extend(toks)
    return GroupWord(alphabet, tuple(tokens))


def dump_word(w: GroupWord) -> str:
    return w.text() + "\n"


# SLPs

def parse_slp(text: str, alphabet: Optional[GenAlphabet] = None) -> Slp:
    start = None
    rules: Dict[str, Tuple[str, ...]] = {}
    for number, toks in _lines(text):
        if toks[0] == "start":
            if len(toks) != 2:
                raise ParseError("expected 'start <variable>'", number)
            if start is not None:
                raise ParseError("second start line", number)
            start = toks[1]
            continue
        if len(toks) < 2 or toks[1] != "->":
            raise ParseError("expected '<variable> -> <tokens>'", number)
        head = toks[0]
        if head in rules:
            raise ParseError(f"variable {head!r} has more than one rule", number)
        rules[head] = tuple(toks[2:])
    if start is None:
        raise ParseError("missing start line")
    return Slp(rules, start, alphabet)


def dump_slp(g: Slp) -> str:
    out = [f"start {g.start}"]
    for head, rhs in g.rules.items():
        out.append(f"{head} -> {' '.join(rhs)}".rstrip())
    return "\n".join(out) + "\n"


# Nand-tree circuits

def parse_nandtree(text: str) -> NandTreeCircuit:
    lines = _header(list(_lines(text)), "nandtree")
    depth = n_inputs = None
    query: Dict[str, Tuple[int, int, int]] = {}
    for number, toks in lines[1:]:
        key = toks[0]
        if key == "depth" and len(toks) == 2:
            depth = _int(toks[1], number, "depth")
        elif key == "inputs" and len(toks) == 2:
            n_inputs = _int(toks[1], number, "inputs")
        elif key == "leaf" and len(toks) == 5:
            label = "" if toks[1] == EMPTY_LABEL else toks[1]
            if label in query:
                raise ParseError(f"leaf {toks[1]!r} given twice", number)
            query[label] = (_int(toks[2], number, "input index"), _bit(toks[3], number), _bit(toks[4], number))
        else:
            raise ParseError(f"unexpected line {' '.join(toks)!r}", number)
    if depth is None or n_inputs is None:
        raise ParseError("nand tree needs 'depth' and 'inputs' lines")
    try:
        return NandTreeCircuit(depth, n_inputs, query)
    except GwpError as e:
        raise ParseError(str(e)) from e


def dump_nandtree(c: NandTreeCircuit) -> str:
    out = ["nandtree", f"depth {c.depth}", f"inputs {c.n_inputs}"]
    for v in c.leaves():
        j, a, b = c.query[v]
        out.append(f"leaf {v or EMPTY_LABEL} {j} {a} {b}")
    return "\n".join(out) + "\n"


# G-programs

def parse_gprogram(text: str, alphabet: GenAlphabet) -> GProgram:
    lines = _header(list(_lines(text)), "gprogram")
    number, toks = lines[0]
    if len(toks) != 2:
        raise ParseError("expected 'gprogram <inputs>'", number)
    n_inputs = _int(toks[1], number, "inputs")
    instructions = []
    for number, toks in lines[1:]:
        if len(toks) != 3:
            raise ParseError("expected '<index> <on_one> <on_zero>'", number)
        for letter in toks[1:]:
            if letter not in alphabet:
                raise ParseError(f"letter {letter!r} is not in the group alphabet", number)
        instructions.append(Instruction(_int(toks[0], number, "index"), toks[1], toks[2]))
    try:
        return GProgram(alphabet, tuple(instructions), n_inputs)
    except GwpError as e:
        raise ParseError(str(e)) from e


def dump_gprogram(p: GProgram) -> str:
    out = [f"gprogram {p.n_inputs}"]
    out.extend(f"{ins.index} {ins.on_one} {ins.on_zero}" for ins in p.instructions)
    return "\n".join(out) + "\n"


# DAG circuits

def parse_circuit(text: str) -> DagCircuit:
    lines = _header(list(_lines(text)), "circuit")
    m = None
    gates: Dict[str, Tuple[str, str]] = {}
    outputs: Dict[int, str] = {}
    for number, toks in lines[1:]:
        key = toks[0]
        if key == "inputs" and len(toks) == 2:
            m = _int(toks[1], number, "inputs")
        elif key == "gate" and len(toks) == 6 and toks[2] == "=" and toks[3] == "nand":
            if toks[1] in gates:
                raise ParseError(f"gate {toks[1]!r} defined twice", number)
            gates[toks[1]] = (toks[4], toks[5])
        elif key == "output" and len(toks) == 3:
            i = _int(toks[1], number, "output index")
            if i in outputs:
                raise ParseError(f"output {i} given twice", number)
            outputs[i] = toks[2]
        else:
            raise ParseError(f"unexpected line {' '.join(toks)!r}", number)
    if m is None:
        raise ParseError("circuit needs an 'inputs' line")
    if sorted(outputs) != list(range(len(outputs))):
        raise ParseError(f"outputs must be numbered 0..{len(outputs) - 1}")
    try:
        return DagCircuit(m, gates, [outputs[i] for i in range(len(outputs))])
    except GwpError as e:
        raise ParseError(str(e)) from e


def dump_circuit(c: DagCircuit) -> str:
    out = ["circuit", f"inputs {c.m}"]
    out.extend(f"gate {name} = nand {a} {b}" for name, (a, b) in c.gates.items())
    out.extend(f"output {i} {y}" for i, y in enumerate(c.outputs))
    return "\n".join(out) + "\n"


# Embedding tables

def parse_phi1(text: str) -> Dict[str, Tuple[str, ...]]:
    images: Dict[str, Tuple[str, ...]] = {}
    for number, toks in _lines(text):
        if len(toks) < 2 or toks[1] != "->":
            raise ParseError("expected '<letter> -> <tokens>'", number)
        if toks[0] in images:
            raise ParseError(f"letter {toks[0]!r} mapped twice", number)
        images[toks[0]] = tuple(toks[2:])
    if not images:
        raise ParseError("empty embedding table")
    return images
