"""Gate latency and MCL template tables consumed by the mapper."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .hfqasm.nodes import GATE_ALIASES, GATE_KINDS
from .requp import as_fraction
from .textio import read_key_values

MOVE = "move"


class MissingProfile(KeyError):
    def __init__(self, gate: str, what: str):
        super().__init__(f"no {what} data for gate {gate}")
        self.gate = gate
        self.what = what

    def __str__(self) -> str:
        return self.args[0]


class MissingTemplate(KeyError):
    def __init__(self, gate: str):
        super().__init__(f"no MCL template for {gate}")
        self.gate = gate

    def __str__(self) -> str:
        return self.args[0]


GateLatencyTable = Mapping[str, Fraction]

# Placeholder latencies (µs). Real values come from a tile-factory tool;
# these are only good enough to exercise the mapper.
DEFAULT_LATENCIES: dict[str, Fraction] = {
    kind: Fraction(93) if kind in ("T", "Tdag") else Fraction(62) if kind == "CNOT" else Fraction(31)
    for kind in GATE_KINDS
}


def unit_latencies(value=1) -> dict[str, Fraction]:
    return {kind: as_fraction(value) for kind in GATE_KINDS}


def parse_latency_table(text: str) -> dict[str, Fraction]:
    table: dict[str, Fraction] = {}
    for key, value in read_key_values(text).items():
        gate = GATE_ALIASES.get(key)
        if gate is None:
            raise ValueError(f"unknown gate {key!r} in latency table")
        latency = as_fraction(value)
        if latency <= 0:
            raise ValueError(f"latency for {key} must be positive")
        table[gate] = latency
    return table


def load_latency_table(path: str) -> dict[str, Fraction]:
    with open(path, encoding="utf-8") as fh:
        return parse_latency_table(fh.read())


@dataclass(frozen=True)
class GateTemplateTable:
    """Opaque MCL bodies per gate kind (plus ``move``) and gate latencies."""

    bodies: Mapping[str, str]
    latencies: Mapping[str, Fraction]

    def body(self, kind: str) -> str:
        try:
            return self.bodies[kind]
        except KeyError:
            raise MissingTemplate(kind) from None

    def latency(self, kind: str) -> Fraction:
        try:
            return self.latencies[kind]
        except KeyError:
            raise MissingProfile(kind, "latency") from None


def placeholder_templates(latencies: GateLatencyTable | None = None) -> GateTemplateTable:
    lat = dict(DEFAULT_LATENCIES if latencies is None else latencies)
    bodies = {kind: f"; MCL {kind}" for kind in (*GATE_KINDS, MOVE)}
    return GateTemplateTable(bodies, lat)


def parse_templates(text: str, latencies: GateLatencyTable) -> GateTemplateTable:
    """Template text: ``@gate <kind>`` header lines, each followed by its body.

    Bodies are kept verbatim (trailing newline stripped). ``@gate move``
    supplies the body used for qubit movement records.
    """
    bodies: dict[str, list[str]] = {}
    current: list[str] | None = None
    for lineno, line in enumerate(text.splitlines(), 1):
        if line.startswith("@gate"):
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"line {lineno}: expected '@gate <kind>'")
            kind = MOVE if parts[1] == MOVE else GATE_ALIASES.get(parts[1])
            if kind is None:
                raise ValueError(f"line {lineno}: unknown gate {parts[1]!r}")
            current = bodies.setdefault(kind, [])
        elif current is not None:
            current.append(line)
        elif line.strip():
            raise ValueError(f"line {lineno}: template text before the first '@gate' header")
    return GateTemplateTable({k: "\n".join(v).rstrip("\n") for k, v in bodies.items()}, dict(latencies))


def load_templates(path: str, latencies: GateLatencyTable) -> GateTemplateTable:
    with open(path, encoding="utf-8") as fh:
        return parse_templates(fh.read(), latencies)
