"""AST for HF-QASM programs.

Source positions are carried for diagnostics but excluded from equality,
so two parses of differently formatted text compare equal when their
structure matches.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

ONE_QUBIT_GATES = (
    "H", "X", "Y", "Z", "S", "Sdag", "T", "Tdag", "Prep0", "MeasX", "MeasY", "MeasZ",
)
TWO_QUBIT_GATES = ("CNOT",)
GATE_KINDS = ONE_QUBIT_GATES + TWO_QUBIT_GATES

# spellings accepted in source, mapped to the canonical kind
GATE_ALIASES = {kind: kind for kind in GATE_KINDS}
GATE_ALIASES.update({"S†": "Sdag", "T†": "Tdag"})


@dataclass(frozen=True)
class QubitRef:
    name: str
    index: int | None = None
    line: int = field(default=0, compare=False, repr=False)
    col: int = field(default=0, compare=False, repr=False)

    def __str__(self) -> str:
        return self.name if self.index is None else f"{self.name}[{self.index}]"


@dataclass(frozen=True)
class Param:
    name: str
    is_array: bool = False
    line: int = field(default=0, compare=False, repr=False)
    col: int = field(default=0, compare=False, repr=False)


@dataclass(frozen=True)
class QubitDecl:
    name: str
    size: int | None = None
    line: int = field(default=0, compare=False, repr=False)
    col: int = field(default=0, compare=False, repr=False)

    @property
    def width(self) -> int:
        return 1 if self.size is None else self.size


@dataclass(frozen=True)
class Gate:
    kind: str
    args: tuple[QubitRef, ...]
    line: int = field(default=0, compare=False, repr=False)
    col: int = field(default=0, compare=False, repr=False)


@dataclass(frozen=True)
class Call:
    callee: str
    args: tuple[QubitRef, ...]
    line: int = field(default=0, compare=False, repr=False)
    col: int = field(default=0, compare=False, repr=False)


Stmt = Union[Gate, Call]


@dataclass(frozen=True)
class ModuleDef:
    name: str
    params: tuple[Param, ...]
    locals: tuple[QubitDecl, ...]
    body: tuple[Stmt, ...]
    line: int = field(default=0, compare=False, repr=False)
    col: int = field(default=0, compare=False, repr=False)

    @property
    def is_main(self) -> bool:
        return self.name == "main"

    def calls(self) -> list[Call]:
        return [s for s in self.body if isinstance(s, Call)]


@dataclass(frozen=True)
class ProgramAst:
    modules: tuple[ModuleDef, ...]

    @property
    def main(self) -> ModuleDef:
        for m in self.modules:
            if m.is_main:
                return m
        raise LookupError("program has no main module")

    def module(self, name: str) -> ModuleDef:
        for m in self.modules:
            if m.name == name:
                return m
        raise KeyError(name)

    def by_name(self) -> dict[str, ModuleDef]:
        # first definition wins; duplicates are reported by validate()
        table: dict[str, ModuleDef] = {}
        for m in self.modules:
            table.setdefault(m.name, m)
        return table
