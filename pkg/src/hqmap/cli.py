"""hqmap command line: check, map, sweep and gen."""

from __future__ import annotations

import argparse
import csv
import io
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from fractions import Fraction

from . import gen
from .driver import MapOptions, ProgramMapping, expand_final, format_final, map_program, report_json
from .hfqasm import LexError, ParseError, ProgramAst, parse, validate
from .partition import InfeasibleBalance
from .requp import ArchParams, BudgetTooSmall, QecProfile, as_fraction, load_qec_profile
from .scheduler import verify
from .tables import (
    DEFAULT_LATENCIES,
    GateTemplateTable,
    MissingProfile,
    MissingTemplate,
    load_latency_table,
    load_templates,
    placeholder_templates,
    unit_latencies,
)
from .textio import read_key_values

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INFEASIBLE = 2
EXIT_INVARIANT = 3

SWEEP_COLUMNS = ("k", "budget", "feasible", "latency_us", "total_ancilla", "runtime_s", "required")


class InvariantFailure(RuntimeError):
    pass


class InvalidProgram(ValueError):
    """Validation diagnostics, already formatted one per line."""


@dataclass(frozen=True)
class RunConfig:
    input: str
    qec: str = "steane-713"
    latency_table: str | None = None  # path, "unit" or None for placeholders
    templates: str | None = None
    k: int = 1
    budget: int = 100
    alpha_int: int = 3
    beta_pmd: Fraction = Fraction(10)
    gamma_l2: Fraction = Fraction(1, 5)
    tolerance: float = 1.5
    timeout: float = 60.0
    seed: int = 0
    format: str = "json"
    out: str | None = None

    def params(self) -> ArchParams:
        return ArchParams(self.k, self.budget, self.alpha_int, self.beta_pmd, self.gamma_l2)

    def options(self) -> MapOptions:
        return MapOptions(self.tolerance, self.timeout, self.seed)


# keys accepted in a --config file, with their converters
_CONFIG_KEYS = {
    "qec": str,
    "latency_table": str,
    "templates": str,
    "k": int,
    "budget": int,
    "alpha_int": int,
    "beta_pmd": as_fraction,
    "gamma_l2": as_fraction,
    "tolerance": float,
    "timeout": float,
    "seed": int,
    "format": str,
    "out": str,
}


def load_config(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        raw = read_key_values(fh.read())
    values = {}
    for key, text in raw.items():
        name = key.replace("-", "_")
        if name not in _CONFIG_KEYS:
            raise ValueError(f"{path}: unknown config key {key!r}")
        values[name] = _CONFIG_KEYS[name](text)
    return values


def build_config(args: argparse.Namespace) -> RunConfig:
    """Defaults, then the config file, then command-line flags."""
    values = load_config(args.config) if getattr(args, "config", None) else {}
    for name in _CONFIG_KEYS:
        flag = getattr(args, name, None)
        if flag is not None:
            values[name] = flag
    cfg = RunConfig(args.input, **values)
    if cfg.format not in ("json", "csv"):
        raise ValueError(f"unknown output format {cfg.format!r}")
    cfg.params()  # validate early
    return cfg


def load_program(path: str) -> ProgramAst:
    with open(path, encoding="utf-8") as fh:
        ast = parse(fh.read())
    problems = validate(ast)
    if problems:
        raise InvalidProgram("\n".join(d.format(path) for d in problems))
    return ast


def load_latencies(source: str | None):
    if source is None:
        return dict(DEFAULT_LATENCIES)
    if source == "unit":
        return unit_latencies()
    return load_latency_table(source)


def load_template_table(source: str | None, latencies) -> GateTemplateTable:
    return placeholder_templates(latencies) if source is None else load_templates(source, latencies)


def check_mapping(mapping: ProgramMapping, templates: GateTemplateTable):
    """Re-verify every module schedule and the expanded program length."""
    capacity = mapping.params.core_capacity
    for r in mapping.modules.values():
        bad = verify(r.schedule, r.qmdg, r.partition.assignment, r.binding.assignment,
                     r.routing, r.edge_delay.reconfig, capacity)
        if bad:
            raise InvariantFailure(f"module {r.module}: {bad[0].kind}: {bad[0].detail}")
    final = expand_final(mapping, templates)
    if final.recomputed_makespan() != mapping.latency:
        raise InvariantFailure(
            f"expanded program length {final.recomputed_makespan()} differs from latency {mapping.latency}"
        )
    return final


def run_map(cfg: RunConfig, ast: ProgramAst | None = None, qec: QecProfile | None = None):
    ast = ast or load_program(cfg.input)
    qec = qec or load_qec_profile(cfg.qec)
    latencies = load_latencies(cfg.latency_table)
    templates = load_template_table(cfg.templates, latencies)
    mapping = map_program(ast, cfg.params(), qec, latencies, cfg.options())
    final = check_mapping(mapping, templates)
    return mapping, final


def _csv_text(rows: list[dict], summary: str | None = None) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    if summary:
        buf.write(summary + "\n")
    return buf.getvalue()


def _row(mapping: ProgramMapping | None, k: int, budget: int, runtime: float, required: int | None = None) -> dict:
    if mapping is None:
        return {"k": k, "budget": budget, "feasible": "infeasible", "latency_us": "",
                "total_ancilla": "", "runtime_s": "", "required": required}
    return {"k": k, "budget": budget, "feasible": "ok", "latency_us": _num(mapping.latency),
            "total_ancilla": mapping.total_ancilla, "runtime_s": f"{runtime:.3f}", "required": ""}


def _num(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else repr(float(x))


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def cmd_check(args) -> int:
    ast = load_program(args.input)
    print(f"{args.input}: ok ({len(ast.modules)} modules)")
    return EXIT_OK


def cmd_map(args) -> int:
    cfg = build_config(args)
    if cfg.latency_table is None:
        print("warning: using placeholder gate latencies", file=sys.stderr)
    mapping, final = run_map(cfg)
    to_stdout = cfg.out is None or cfg.out == "-"
    info = sys.stderr if to_stdout else sys.stdout
    print(f"total latency: {_num(mapping.latency)} us", file=info)
    print(f"total ancilla (B_P): {mapping.total_ancilla}", file=info)
    print(f"mapper runtime: {mapping.runtime_s:.3f} s", file=info)
    if cfg.format == "csv":
        _emit(_csv_text([_row(mapping, cfg.k, cfg.budget, mapping.runtime_s)]), cfg.out)
    else:
        _emit(report_json(mapping, include_runtime=args.include_runtime), cfg.out)
    if args.final:
        program, mcl = format_final(final)
        _emit(program, args.final)
        _emit(mcl, args.final + ".mcl")
    return EXIT_OK


def _sweep_point(cfg: RunConfig) -> dict:
    started = time.perf_counter()
    try:
        mapping, _ = run_map(cfg)
    except BudgetTooSmall as exc:
        return _row(None, cfg.k, cfg.budget, 0.0, exc.required)
    return _row(mapping, cfg.k, cfg.budget, time.perf_counter() - started)


def sweep(base: RunConfig, ks: list[int], budgets: list[int], jobs: int = 1) -> str:
    """CSV text: one row per (k, budget), sorted, then a ``# best:`` line."""
    configs = [replace(base, k=k, budget=b) for k in sorted(set(ks)) for b in sorted(set(budgets))]
    for cfg in configs:
        cfg.params()
    load_program(base.input)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_point, configs))
    else:
        rows = [_sweep_point(cfg) for cfg in configs]
    rows.sort(key=lambda r: (r["k"], r["budget"]))
    feasible = [r for r in rows if r["feasible"] == "ok"]
    if feasible:
        best = min(feasible, key=lambda r: (Fraction(r["latency_us"]), r["k"], r["budget"]))
        summary = f"# best: k={best['k']} budget={best['budget']} latency_us={best['latency_us']}"
    else:
        summary = "# best: none (no feasible configuration)"
    return _csv_text(rows, summary)


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def cmd_sweep(args) -> int:
    ks, budgets = args.k or [1], args.budget or [100]
    args.k = args.budget = None
    cfg = build_config(args)
    _emit(sweep(cfg, ks, budgets, args.jobs), cfg.out)
    return EXIT_OK


def cmd_gen(args) -> int:
    if args.kind == "fredkin":
        text = gen.fredkin()
    elif args.kind == "toffoli-chain":
        text = gen.toffoli_chain(args.n)
    else:
        spec = gen.SyntheticSpec(args.modules, args.gates, args.data_qubits, args.ancilla)
        text = gen.modular_synthetic(spec, args.seed)
    _emit(text, args.out)
    return EXIT_OK


def _add_arch_flags(p: argparse.ArgumentParser, multi: bool = False) -> None:
    p.add_argument("input", help="HF-QASM program")
    p.add_argument("--config", help="key = value file; flags take precedence")
    if multi:
        p.add_argument("--k", type=_int_list, help="core counts, comma separated")
        p.add_argument("--budget", type=_int_list, help="QRCR ancilla budgets, comma separated")
        p.add_argument("--jobs", type=int, default=1, help="parallel workers")
    else:
        p.add_argument("--k", type=int, help="number of cores (default 1)")
        p.add_argument("--budget", type=int, help="QRCR physical ancilla budget (default 100)")
    p.add_argument("--alpha-int", type=int, help="interconnect width (default 3)")
    p.add_argument("--beta-pmd", type=as_fraction, help="one-cell move delay in us (default 10)")
    p.add_argument("--gamma-l2", type=as_fraction, help="L2 routing coefficient (default 0.2)")
    p.add_argument("--qec", help="steane-713, bacon-shor-913 or a profile file")
    p.add_argument("--latency-table", help="gate latency file, or 'unit'")
    p.add_argument("--templates", help="MCL template file")
    p.add_argument("--tolerance", type=float, help="partition balance tolerance (default 1.5)")
    p.add_argument("--timeout", type=float, help="binder time limit in seconds (default 60)")
    p.add_argument("--seed", type=int, help="random seed (default 0)")
    p.add_argument("--format", choices=("json", "csv"))
    p.add_argument("--out", help="output file (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hqmap", description="Hierarchical mapper for modular FT quantum programs")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="parse and validate a program")
    p.add_argument("input")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("map", help="map a program and write a report")
    _add_arch_flags(p)
    p.add_argument("--final", help="also write the expanded program here (MCL bodies go to FILE.mcl)")
    p.add_argument("--include-runtime", action="store_true", help="put wall-clock runtime in the JSON report")
    p.set_defaults(func=cmd_map)

    p = sub.add_parser("sweep", help="map over a grid of core counts and budgets, CSV out")
    _add_arch_flags(p, multi=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("gen", help="write a benchmark program")
    p.add_argument("kind", choices=gen.KINDS)
    p.add_argument("--n", type=int, default=1, help="toffoli-chain length")
    p.add_argument("--modules", type=int, default=3)
    p.add_argument("--gates", type=int, default=10)
    p.add_argument("--data-qubits", type=int, default=8)
    p.add_argument("--ancilla", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BudgetTooSmall as exc:
        print(f"error: infeasible configuration: {exc} (required budget {exc.required})", file=sys.stderr)
        return EXIT_INFEASIBLE
    except InfeasibleBalance as exc:
        print(f"error: infeasible configuration: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except InvariantFailure as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (LexError, ParseError) as exc:
        print(f"{getattr(args, 'input', '<input>')}:{exc.line}:{exc.col}: error: {exc.message}", file=sys.stderr)
        return EXIT_INPUT
    except InvalidProgram as exc:
        print(exc, file=sys.stderr)
        return EXIT_INPUT
    except (OSError, ValueError, MissingProfile, MissingTemplate) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
