"""Reconfigurable multi-core processor model: QEC ancilla profiles, core and
memory widths, routing delays, total ancilla and reconfiguration cost.

All intermediate arithmetic is exact (``fractions.Fraction``); widths are
integers produced by explicit ceil/floor steps.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping

from .hfqasm.nodes import GATE_ALIASES
from .textio import read_key_values

# memory-resident data needs one logical ancilla per eight logical data qubits
MEM_DATA_RATIO = Fraction(9, 8)
MEM_ANC_RATIO = Fraction(1, 8)

_SINGLE_QUBIT_DEFAULTED = ("Prep0", "MeasX", "MeasY", "MeasZ")


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    return Fraction(str(value))


def ceil_sqrt(x) -> int:
    """Smallest integer ``n >= 0`` with ``n*n >= x``, exact for rationals."""
    c = math.ceil(as_fraction(x))
    if c <= 0:
        return 0
    return math.isqrt(c - 1) + 1


class BudgetTooSmall(ValueError):
    def __init__(self, required: int, budget: int, k: int):
        super().__init__(f"QRCR ancilla budget {budget} too small for k={k}: required {required}")
        self.required = required
        self.budget = budget
        self.k = k


@dataclass(frozen=True)
class QecProfile:
    name: str
    l_code: int
    ancilla_per_op: Mapping[str, int]

    def __post_init__(self):
        if self.l_code < 1:
            raise ValueError("l_code must be positive")
        if not self.ancilla_per_op:
            raise ValueError(f"QEC profile {self.name!r} lists no operations")
        for gate, count in self.ancilla_per_op.items():
            if count < 1:
                raise ValueError(f"ancilla count for {gate} must be positive")

    @property
    def a_min(self) -> int:
        return min(self.ancilla_per_op.values())

    @property
    def a_max(self) -> int:
        return max(self.ancilla_per_op.values())

    def ancilla(self, gate: str) -> int | None:
        return self.ancilla_per_op.get(gate)


def _profile_from_pairs(name: str, l_code: int, pairs: Mapping[str, int]) -> QecProfile:
    table: dict[str, int] = {}
    for key, count in pairs.items():
        gate = GATE_ALIASES.get(key)
        if gate is None:
            raise ValueError(f"unknown gate {key!r} in QEC profile {name!r}")
        table[gate] = int(count)
    # state preparation and measurement default to the transversal one-qubit cost
    if "H" in table:
        for gate in _SINGLE_QUBIT_DEFAULTED:
            table.setdefault(gate, table["H"])
    return QecProfile(name, l_code, dict(sorted(table.items())))


STEANE_713 = _profile_from_pairs(
    "steane-713",
    7,
    {"X": 28, "Y": 28, "Z": 28, "H": 28, "S": 28, "Sdag": 28, "CNOT": 56, "T": 100, "Tdag": 100},
)
BACON_SHOR_913 = _profile_from_pairs(
    "bacon-shor-913",
    9,
    {"X": 18, "Y": 18, "Z": 18, "H": 18, "CNOT": 36, "S": 58, "Sdag": 58, "T": 309, "Tdag": 309},
)
BUILTIN_PROFILES = {p.name: p for p in (STEANE_713, BACON_SHOR_913)}


def parse_qec_profile(text: str, default_name: str = "custom") -> QecProfile:
    """Profile text: ``name = ...``, ``l_code = ...`` and ``<gate> = <ancilla>`` lines."""
    values = read_key_values(text)
    name = values.pop("name", default_name)
    if "l_code" not in values:
        raise ValueError("QEC profile needs an l_code entry")
    l_code = int(values.pop("l_code"))
    return _profile_from_pairs(name, l_code, {k: int(v) for k, v in values.items()})


def load_qec_profile(source: str) -> QecProfile:
    """Built-in profile by name, or a profile file path."""
    if source in BUILTIN_PROFILES:
        return BUILTIN_PROFILES[source]
    if not os.path.exists(source):
        raise FileNotFoundError(
            f"no such QEC profile {source!r} (built-ins: {', '.join(sorted(BUILTIN_PROFILES))})"
        )
    with open(source, encoding="utf-8") as fh:
        return parse_qec_profile(fh.read(), os.path.splitext(os.path.basename(source))[0])


def format_qec_profile(profile: QecProfile) -> str:
    lines = [f"name = {profile.name}", f"l_code = {profile.l_code}"]
    lines += [f"{gate} = {count}" for gate, count in profile.ancilla_per_op.items()]
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ArchParams:
    k: int
    budget: int  # B_QRCR, physical ancilla shared by all compute regions
    alpha_int: int = 3
    beta_pmd: Fraction = Fraction(10)  # µs per grid-cell move
    gamma_l2: Fraction = Fraction(1, 5)

    def __post_init__(self):
        object.__setattr__(self, "beta_pmd", as_fraction(self.beta_pmd))
        object.__setattr__(self, "gamma_l2", as_fraction(self.gamma_l2))
        if self.k < 1:
            raise ValueError("core count k must be at least 1")
        if self.alpha_int < 0:
            raise ValueError("interconnect width must be non-negative")
        if self.beta_pmd <= 0:
            raise ValueError("qubit one-step delay must be positive")
        if not 0 <= self.gamma_l2 <= 1:
            raise ValueError("L2 routing coefficient must lie in [0, 1]")
        if self.budget < 0:
            raise ValueError("ancilla budget must be non-negative")

    @property
    def per_core_budget(self) -> Fraction:
        return Fraction(self.budget, self.k)

    @property
    def core_capacity(self) -> int:
        return self.budget // self.k


def check_budget(params: ArchParams, qec: QecProfile) -> None:
    """Raise :class:`BudgetTooSmall` unless every core can host the costliest op."""
    required = params.k * qec.a_max
    if required > params.budget:
        raise BudgetTooSmall(required, params.budget, params.k)


@dataclass(frozen=True)
class ModuleResourceProfile:
    name: str
    data_qubits: int  # D_L^i
    ancilla_qubits: int  # A_L^i
    max_core_qubits: int  # L_max^i
    total_data_qubits: int  # D_L^total
    max_ancilla_qubits: int  # max_i A_L^i


@dataclass(frozen=True)
class ArchGeometry:
    qrcr: int
    core: int
    cache_l1: int
    cache_l2: int
    mem: int
    requp: int
    q_mem: int

    def as_dict(self) -> dict[str, int]:
        return {
            "alpha_qrcr": self.qrcr,
            "alpha_core": self.core,
            "alpha_cache_l1": self.cache_l1,
            "alpha_cache_l2": self.cache_l2,
            "alpha_mem": self.mem,
            "alpha_requp": self.requp,
            "q_mem": self.q_mem,
        }


def qrcr_width(per_core_budget, a_min: int, l_code: int) -> int:
    per_core = as_fraction(per_core_budget)
    return ceil_sqrt(per_core / a_min * l_code + per_core)


def core_width(l_max: int, l_code: int, per_core_budget) -> int:
    return ceil_sqrt(math.ceil(MEM_DATA_RATIO * l_max) * l_code + as_fraction(per_core_budget))


def _ceil_l1_share(qrcr: int) -> int:
    # ceil(((sqrt(3) - 1) / 2) * qrcr) without floating point:
    # smallest n with 2n + qrcr >= sqrt(3) * qrcr
    m = ceil_sqrt(3 * qrcr * qrcr)
    return max(0, -((qrcr - m) // 2))


def cache_l1_width(qrcr: int, core: int) -> int:
    return min(_ceil_l1_share(qrcr), (core - qrcr) // 2)


def cache_l2_width(qrcr: int, core: int, l1: int) -> int:
    return math.ceil(Fraction(core - qrcr, 2) - l1)


def memory_qubits(max_ancilla: int, ancilla: int, total_data: int, data: int, l_code: int) -> int:
    return ((max_ancilla - ancilla) + math.ceil(MEM_DATA_RATIO * (total_data - data))) * l_code


def mesh_positions(k: int) -> list[tuple[int, int]]:
    """Row-major placement of ``k`` cores on a grid with ceil(sqrt(k)) columns."""
    cols = ceil_sqrt(k)
    return [(i // cols, i % cols) for i in range(k)]


def manhattan(a: tuple[int, int], b: tuple[int, int]) -> int:
    return abs(a[0] - b[0]) + abs(a[1] - b[1])


def processor_half_perimeter(k: int, core: int, alpha_int: int) -> int:
    pos = mesh_positions(k)
    span = manhattan(pos[0], pos[-1])
    return (span + 1) * core + span * alpha_int


def memory_width(requp: int, q_mem: int) -> int:
    return ceil_sqrt(requp * requp + 2 * q_mem) - requp


def characterize(profile: ModuleResourceProfile, params: ArchParams, qec: QecProfile) -> ArchGeometry:
    per_core = params.per_core_budget
    qrcr = qrcr_width(per_core, qec.a_min, qec.l_code)
    # a core always encloses its compute region
    core = max(core_width(profile.max_core_qubits, qec.l_code, per_core), qrcr)
    l1 = cache_l1_width(qrcr, core)
    l2 = cache_l2_width(qrcr, core, l1)
    q_mem = memory_qubits(
        profile.max_ancilla_qubits,
        profile.ancilla_qubits,
        profile.total_data_qubits,
        profile.data_qubits,
        qec.l_code,
    )
    requp = processor_half_perimeter(params.k, core, params.alpha_int)
    return ArchGeometry(qrcr, core, l1, l2, memory_width(requp, q_mem), requp, q_mem)


@dataclass(frozen=True)
class RoutingMatrix:
    positions: tuple[tuple[int, int], ...]
    n: tuple[tuple[int, ...], ...]
    d: tuple[tuple[Fraction, ...], ...]

    @property
    def k(self) -> int:
        return len(self.d)

    @classmethod
    def from_delays(cls, d: Iterable[Iterable]) -> "RoutingMatrix":
        rows = tuple(tuple(as_fraction(v) for v in row) for row in d)
        k = len(rows)
        pos = tuple(mesh_positions(k))
        n = tuple(tuple(manhattan(pos[x], pos[y]) for y in range(k)) for x in range(k))
        return cls(pos, n, rows)


def intra_core_delay(geom: ArchGeometry, params: ArchParams) -> Fraction:
    return (geom.qrcr + geom.cache_l1 + params.gamma_l2 * geom.cache_l2) / 2 * params.beta_pmd


def routing_matrix(geom: ArchGeometry, params: ArchParams) -> RoutingMatrix:
    pos = tuple(mesh_positions(params.k))
    n = tuple(tuple(manhattan(a, b) for b in pos) for a in pos)
    hop = (geom.core + params.alpha_int) * params.beta_pmd
    local = intra_core_delay(geom, params)
    d = tuple(
        tuple(local if x == y else n[x][y] * hop for y in range(params.k)) for x in range(params.k)
    )
    return RoutingMatrix(pos, n, d)


def total_ancilla(profiles: Iterable[ModuleResourceProfile], params: ArchParams, qec: QecProfile) -> int:
    """Physical ancilla for the compute regions plus cache and memory error correction."""
    worst = 0
    for p in profiles:
        cache = math.ceil(MEM_ANC_RATIO * (p.ancilla_qubits + p.data_qubits))
        memory = math.ceil(MEM_ANC_RATIO * (p.total_data_qubits - p.data_qubits))
        worst = max(worst, (cache + memory) * qec.l_code)
    return params.budget + worst


ReconfigPolicy = Callable[[ArchGeometry, ArchGeometry, int, ArchParams], Fraction]


def reconfig_delay(geom_x: ArchGeometry, geom_y: ArchGeometry, ancilla_delta: int, params: ArchParams) -> Fraction:
    """Delay to switch from configuration ``geom_x`` to ``geom_y``.

    Reshaping costs a worst-case crossing of the larger processor plus its
    memory ring; loading ``ancilla_delta`` extra logical ancilla costs a trip
    from the new memory ring to the farthest compute region. Both happen in
    parallel, so the larger one is charged.
    """
    transform = Fraction(0)
    if geom_x != geom_y:
        transform = (max(geom_x.requp, geom_y.requp) + max(geom_x.mem, geom_y.mem)) * params.beta_pmd
    load = Fraction(0)
    if ancilla_delta:
        load = (Fraction(geom_y.requp, 2) + geom_y.mem) * params.beta_pmd
    return max(transform, load)
