"""
gwp - Word problems, straight-line programs and circuit reductions for non-solvable groups
"""

__version__ = "0.1.0"

from .core_groups import GenAlphabet, GroupWord, GroupOracle
from .slp import Slp, SlpBuilder
from .registry import resolve_group
from .barrington import NandTreeCircuit, compile_program
from .cwp_reduction import DagCircuit, build_pipeline, verify_pipeline

__all__ = [
    "GenAlphabet",
    "GroupWord",
    "GroupOracle",
    "Slp",
    "SlpBuilder",
    "resolve_group",
    "NandTreeCircuit",
    "compile_program",
    "DagCircuit",
    "build_pipeline",
    "verify_pipeline",
]
