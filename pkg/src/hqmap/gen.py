"""Benchmark program generators."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .hfqasm import Call, Gate, ModuleDef, Param, ProgramAst, QubitDecl, QubitRef, format_program

FREDKIN = """\
module Toffoli(qbit c1, qbit c2, qbit t){
  H (t);
  CNOT (c2, t);
  Tdag (t);
  CNOT (c1, t);
  T (t);
  CNOT (c2, t);
  Tdag (t);
  CNOT (c1, t);
  T (c2);
  T (t);
  CNOT (c1, c2);
  H (t);
  T (c1);
  Tdag (c2);
  CNOT (c1, c2);
}
module main(){
  qbit a[3];
  #a[0] is control and a[1] and a[2] are target qubits
  Toffoli(a[0], a[2], a[1]);
  Toffoli(a[0], a[1], a[2]);
  Toffoli(a[0], a[2], a[1]);
}
"""

_TOFFOLI_BODY = FREDKIN[: FREDKIN.index("module main")]

SINGLE_GATES = ("H", "X", "Z", "S", "T", "Tdag")


def fredkin() -> str:
    return FREDKIN


def toffoli_chain(n: int) -> str:
    """Toffoli gates sliding along a register of n + 2 qubits."""
    if n < 1:
        raise ValueError("chain length must be at least 1")
    lines = [_TOFFOLI_BODY.rstrip("\n"), "module main(){", f"  qbit a[{n + 2}];"]
    lines += [f"  Toffoli(a[{i}], a[{i + 1}], a[{i + 2}]);" for i in range(n)]
    lines.append("}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class SyntheticSpec:
    modules: int  # M, non-main modules
    gates: int  # G, statements per module
    data_qubits: int  # Q, declared in main
    ancilla: int  # A, locals per module
    call_prob: float = 0.2


def _module_arity(spec: SyntheticSpec) -> int:
    return max(1, min(3, spec.data_qubits))


def _statement(rng: random.Random, qubits: list[QubitRef], callees: list[str], arity: int, call_prob: float):
    if callees and len(qubits) >= arity and rng.random() < call_prob:
        return Call(rng.choice(callees), tuple(rng.sample(qubits, arity)))
    if len(qubits) >= 2 and rng.random() < 0.35:
        return Gate("CNOT", tuple(rng.sample(qubits, 2)))
    return Gate(rng.choice(SINGLE_GATES), (rng.choice(qubits),))


def modular_synthetic(spec: SyntheticSpec, seed: int = 0) -> str:
    """Random layered program: module ``Mi`` may call any ``Mj`` with
    ``j < i``, so the call graph is acyclic. Main calls every module nobody
    else calls, plus random extra calls, so all modules are reachable."""
    if spec.modules < 0 or spec.gates < 1 or spec.data_qubits < 1 or spec.ancilla < 0:
        raise ValueError("need M >= 0, G >= 1, Q >= 1 and A >= 0")
    rng = random.Random(seed)
    arity = _module_arity(spec)
    names = [f"M{i}" for i in range(spec.modules)]
    called: set[str] = set()
    mods: list[ModuleDef] = []
    for i, name in enumerate(names):
        params = tuple(Param(f"p{j}") for j in range(arity))
        locals_ = (QubitDecl("anc", spec.ancilla),) if spec.ancilla else ()
        qubits = [QubitRef(p.name) for p in params] + [QubitRef("anc", j) for j in range(spec.ancilla)]
        body = [_statement(rng, qubits, names[:i], arity, spec.call_prob) for _ in range(spec.gates)]
        called.update(s.callee for s in body if isinstance(s, Call))
        mods.append(ModuleDef(name, params, locals_, tuple(body)))

    qubits = [QubitRef("q", j) for j in range(spec.data_qubits)]
    body = [_statement(rng, qubits, names, arity, spec.call_prob) for _ in range(spec.gates)]
    called.update(s.callee for s in body if isinstance(s, Call))
    body += [Call(n, tuple(rng.sample(qubits, arity))) for n in names if n not in called]
    mods.append(ModuleDef("main", (), (QubitDecl("q", spec.data_qubits),), tuple(body)))
    return format_program(ProgramAst(tuple(mods)))


KINDS = ("fredkin", "toffoli-chain", "modular-synthetic")
