import csv
import io
import json
from fractions import Fraction

import pytest

from hqmap.cli import SWEEP_COLUMNS, main
from hqmap.gen import FREDKIN, SyntheticSpec, fredkin, modular_synthetic, toffoli_chain
from hqmap.hfqasm import Call, parse, validate
from hqmap.tables import MOVE, load_templates, parse_latency_table, parse_templates, unit_latencies


@pytest.fixture
def fredkin_file(tmp_path):
    path = tmp_path / "fredkin.hfq"
    path.write_text(FREDKIN)
    return str(path)


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


# --- generators ------------------------------------------------------------


def test_fredkin_listing_verbatim(fredkin_text):
    assert fredkin() == fredkin_text


def test_toffoli_chain():
    one = parse(toffoli_chain(1))
    assert validate(one) == [] and [s.callee for s in one.main.body] == ["Toffoli"]
    assert len(parse(toffoli_chain(5)).main.body) == 5
    with pytest.raises(ValueError):
        toffoli_chain(0)


def test_synthetic_shape_and_determinism():
    spec = SyntheticSpec(35, 10, 8, 3)
    text = modular_synthetic(spec, 4)
    assert text == modular_synthetic(spec, 4) != modular_synthetic(spec, 5)
    ast = parse(text)
    assert validate(ast) == [] and len(ast.modules) == 36
    for i, mod in enumerate(ast.modules[:-1]):
        assert len(mod.body) == 10
        assert all(int(s.callee[1:]) < i for s in mod.body if isinstance(s, Call))
    small = parse(modular_synthetic(SyntheticSpec(3, 10, 8, 3), 4))
    assert len(small.modules) == 4


# --- tables ----------------------------------------------------------------


def test_latency_table_parsing():
    table = parse_latency_table("# us\nH = 31\nT† = 93.5\n")
    assert table == {"H": 31, "Tdag": Fraction(187, 2)}
    with pytest.raises(ValueError):
        parse_latency_table("H = 0\n")
    with pytest.raises(ValueError):
        parse_latency_table("Q = 3\n")


def test_template_parsing(tmp_path):
    text = "@gate H\nline one\n  line two\n@gate move\nshift\n"
    t = parse_templates(text, unit_latencies())
    assert t.body("H") == "line one\n  line two" and t.body(MOVE) == "shift"
    path = tmp_path / "t.mcl"
    path.write_text(text)
    assert load_templates(str(path), unit_latencies()).bodies == t.bodies
    with pytest.raises(ValueError):
        parse_templates("stray\n@gate H\n", unit_latencies())


# --- commands --------------------------------------------------------------


def test_check(fredkin_file, tmp_path, capsys):
    assert run(["check", fredkin_file], capsys)[0] == 0
    cyc = tmp_path / "cyc.hfq"
    cyc.write_text("module A(qbit x){ B(x); } module B(qbit x){ A(x); } module main(){ qbit q; A(q); }")
    code, _, err = run(["check", str(cyc)], capsys)
    assert code == 1 and "circular" in err.lower()
    code, _, err = run(["check", str(tmp_path / "nope.hfq")], capsys)
    assert code == 1 and "No such file" in err
    bad = tmp_path / "bad.hfq"
    bad.write_text("module main(){ qbit q; H(q) }")
    code, _, err = run(["check", str(bad)], capsys)
    assert code == 1 and err.startswith(f"{bad}:1:")


def test_map_writes_deterministic_report(fredkin_file, tmp_path, capsys):
    outs = []
    for name in ("a.json", "b.json"):
        out = tmp_path / name
        code, stdout, _ = run(
            ["map", fredkin_file, "--k", "2", "--budget", "200", "--latency-table", "unit", "--out", str(out)],
            capsys,
        )
        assert code == 0
        assert "total latency:" in stdout and "B_P" in stdout
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    rep = json.loads(outs[0])
    assert rep["params"]["k"] == 2 and rep["total_ancilla"] == 207


def test_map_infeasible_budget(fredkin_file, capsys):
    code, _, err = run(["map", fredkin_file, "--k", "4", "--budget", "300"], capsys)
    assert code == 2 and "required" in err and "400" in err


def test_map_k1_minimal(fredkin_file, capsys):
    code, stdout, err = run(["map", fredkin_file], capsys)
    assert code == 0 and json.loads(stdout)["params"]["k"] == 1
    assert "placeholder" in err


def test_map_final_and_csv(fredkin_file, tmp_path, capsys):
    final = tmp_path / "prog.txt"
    code, stdout, _ = run(
        ["map", fredkin_file, "--format", "csv", "--latency-table", "unit", "--final", str(final)], capsys
    )
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(stdout)))
    assert len(rows) == 1 and rows[0]["feasible"] == "ok"
    assert final.read_text().startswith("# total_latency")
    assert (tmp_path / "prog.txt.mcl").read_text().startswith("@record 0\n")


def test_config_file_and_flag_precedence(fredkin_file, tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("k = 2\nbudget = 100\nlatency-table = unit\nseed = 3\n")
    # budget 100 is too small for two cores; the flag fixes it
    assert run(["map", fredkin_file, "--config", str(cfg)], capsys)[0] == 2
    code, stdout, _ = run(["map", fredkin_file, "--config", str(cfg), "--budget", "200"], capsys)
    assert code == 0 and json.loads(stdout)["params"]["budget"] == 200
    cfg.write_text("cores = 2\n")
    assert run(["map", fredkin_file, "--config", str(cfg)], capsys)[0] == 1


def test_custom_tables(fredkin_file, tmp_path, capsys):
    lat = tmp_path / "lat.txt"
    lat.write_text("\n".join(f"{g} = 2" for g in unit_latencies()) + "\n")
    tmpl = tmp_path / "t.mcl"
    tmpl.write_text("@gate H\nH-body\n")
    code, _, err = run(["map", fredkin_file, "--latency-table", str(lat), "--templates", str(tmpl)], capsys)
    assert code == 1 and "template" in err


def test_missing_latency_is_input_error(fredkin_file, tmp_path, capsys):
    lat = tmp_path / "lat.txt"
    lat.write_text("H = 2\n")
    code, _, err = run(["map", fredkin_file, "--latency-table", str(lat)], capsys)
    assert code == 1 and "latency" in err


def test_sweep_rows_and_summary(tmp_path, capsys):
    prog = tmp_path / "syn.hfq"
    assert run(["gen", "modular-synthetic", "--modules", "4", "--gates", "6", "--out", str(prog)], capsys)[0] == 0
    code, stdout, _ = run(
        ["sweep", str(prog), "--k", "2,1", "--budget", "150,300", "--latency-table", "unit"], capsys
    )
    assert code == 0
    lines = stdout.splitlines()
    assert lines[0] == ",".join(SWEEP_COLUMNS) and lines[-1].startswith("# best:")
    rows = list(csv.DictReader(io.StringIO("\n".join(lines[:-1]))))
    assert [(r["k"], r["budget"]) for r in rows] == [("1", "150"), ("1", "300"), ("2", "150"), ("2", "300")]
    assert [r["feasible"] for r in rows] == ["ok", "ok", "infeasible", "ok"]
    assert rows[2]["required"] == "200"


def test_singleton_sweep(fredkin_file, capsys):
    code, stdout, _ = run(["sweep", fredkin_file, "--latency-table", "unit"], capsys)
    assert code == 0 and len(stdout.splitlines()) == 3


def test_gen_kinds(tmp_path, capsys):
    code, stdout, _ = run(["gen", "fredkin"], capsys)
    assert code == 0 and stdout == FREDKIN
    code, stdout, _ = run(["gen", "toffoli-chain", "--n", "3"], capsys)
    assert code == 0 and validate(parse(stdout)) == []
    code, a, _ = run(["gen", "modular-synthetic", "--seed", "9"], capsys)
    code, b, _ = run(["gen", "modular-synthetic", "--seed", "9"], capsys)
    assert a == b and validate(parse(a)) == []
