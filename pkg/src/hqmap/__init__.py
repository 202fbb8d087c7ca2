"""Hierarchical mapping of modular fault-tolerant quantum programs onto a
reconfigurable multi-core processor model."""

from .binder import Binding, bind
from .driver import FinalProgram, MapOptions, MappingResult, ProgramMapping, expand_final, map_program, report
from .hfqasm import ParseError, parse, parse_file, validate
from .partition import PartitionResult, assign_weights, partition
from .qmdg import Qmdg, build_call_dag, build_qmdg
from .requp import ArchParams, BudgetTooSmall, QecProfile, load_qec_profile
from .scheduler import Schedule, schedule, verify

__version__ = "0.1.0"

__all__ = [
    "ArchParams",
    "Binding",
    "BudgetTooSmall",
    "FinalProgram",
    "MapOptions",
    "MappingResult",
    "ParseError",
    "PartitionResult",
    "ProgramMapping",
    "QecProfile",
    "Qmdg",
    "Schedule",
    "assign_weights",
    "bind",
    "build_call_dag",
    "build_qmdg",
    "expand_final",
    "load_qec_profile",
    "map_program",
    "parse",
    "parse_file",
    "partition",
    "report",
    "schedule",
    "validate",
    "verify",
]
