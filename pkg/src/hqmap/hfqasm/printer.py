from __future__ import annotations

from .nodes import Gate, ModuleDef, ProgramAst, QubitDecl


def _decl(d: QubitDecl) -> str:
    return f"qubit {d.name};" if d.size is None else f"qubit {d.name}[{d.size}];"


def format_module(mod: ModuleDef, indent: str = "  ") -> str:
    params = ", ".join(f"qubit {'*' if p.is_array else ''}{p.name}" for p in mod.params)
    lines = [f"module {mod.name}({params}) {{"]
    lines += [indent + _decl(d) for d in mod.locals]
    for stmt in mod.body:
        head = stmt.kind if isinstance(stmt, Gate) else stmt.callee
        lines.append(f"{indent}{head}({', '.join(str(a) for a in stmt.args)});")
    lines.append("}")
    return "\n".join(lines)


def format_program(ast: ProgramAst) -> str:
    """Render ``ast`` as canonical HF-QASM text that reparses to an equal AST."""
    return "\n".join(format_module(m) for m in ast.modules) + "\n"

