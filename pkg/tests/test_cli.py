import subprocess
import sys

import pytest

from dynq.cli import main
from dynq.core import parse_script
from dynq.gen import doubling_profile, generate, generate_text
from dynq.errors import InfeasibleConstraint
from dynq.oracles import is_acyclic, is_forest
from dynq.scripts import regression_scripts
from dynq.session import Session, bench

DEMO = dict(regression_scripts())["distances_demo.dq"]


def _edges_after_each_step(script):
    present = set()
    for st in script.changes:
        if st.op == "insert":
            present |= set(st.tuples)
        else:
            present -= set(st.tuples)
        yield sorted(present)


def _write(tmp_path, text, name="s.dq"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_gen_is_byte_identical(tmp_path, capsys):
    assert main(["gen", "forest", "--n", "12", "--steps", "6", "--seed", "9"]) == 0
    first = capsys.readouterr().out
    assert main(["gen", "forest", "--n", "12", "--steps", "6", "--seed", "9"]) == 0
    assert capsys.readouterr().out == first
    assert first == generate_text("forest", 12, 6, seed=9)


@pytest.mark.parametrize("seed", range(10))
def test_generators_respect_constraints(seed):
    forest = generate("forest", 20, 15, seed=seed)
    for edges in _edges_after_each_step(forest):
        assert is_forest(20, edges)
    dag = generate("dag", 20, 15, seed=seed)
    for edges in _edges_after_each_step(dag):
        assert is_acyclic(20, edges)
    col = generate("ugraph", 20, 15, seed=seed, delta=3)
    for edges in _edges_after_each_step(col):
        deg = [0] * 20
        for u, v in edges:
            deg[u] += 1
            deg[v] += 1
        assert max(deg) <= 3


def test_gen_infeasible():
    with pytest.raises(InfeasibleConstraint):
        generate("ugraph", 5, 3, delta=0)
    with pytest.raises(InfeasibleConstraint):
        doubling_profile(n=10, steps=4)


def test_demo_two_rounds(tmp_path, capsys):
    assert main(["run", _write(tmp_path, DEMO), "--no-wall"]) == 0
    rows = [line.split(",") for line in capsys.readouterr().out.strip().splitlines()]
    header, first = rows[0], rows[1]
    row = dict(zip(header, first))
    assert (row["op"], row["m"], row["rounds"]) == ("insert", "2", "2")
    answers = [r[header.index("answer")] for r in rows[1:] if r[header.index("op")] == "query"]
    assert answers == ["2", "inf"]


@pytest.mark.parametrize("name,text", regression_scripts())
def test_regression_scripts_verify(tmp_path, name, text):
    assert main(["run", "--verify", "--report", "rounds", _write(tmp_path, text, name)]) == 0


def test_corrupted_script_exits_2(tmp_path, capsys):
    bad = DEMO.replace("ins E (0,1)", "ins E (0,1")
    assert main(["run", _write(tmp_path, bad)]) == 2
    assert "dynq" in capsys.readouterr().err


def test_usage_errors_exit_2(tmp_path):
    assert main(["run", str(tmp_path / "missing.dq")]) == 2
    assert main(["run", _write(tmp_path, DEMO), "--max-n", "2"]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_runtime_error_exits_1(tmp_path):
    text = "init n=3 kind=ugraph\nins E (0,1)\nins E (0,1)\n"
    assert main(["run", _write(tmp_path, text)]) == 1


def test_report_deterministic_without_wall():
    script = parse_script(dict(regression_scripts())["forest.dq"])
    a = Session(script).run().to_csv(wall=False)
    b = Session(script).run().to_csv(wall=False)
    assert a == b


def test_bench_rounds_independent_of_repetitions():
    script = parse_script(DEMO)
    one = [r.split(",")[:5] for r in bench(script, 1).splitlines()]
    three = [r.split(",")[:5] for r in bench(script, 3).splitlines()]
    assert one == three
    run_rows = [r for r in Session(script).run().rows if r.op != "query"]
    assert [int(r[3]) for r in one[1:]] == [r.rounds for r in run_rows]


def test_console_script_entry_point():
    out = subprocess.run([sys.executable, "-m", "dynq.cli", "gen", "word", "--n", "4", "--steps", "1"],
                         capture_output=True, text=True, check=True)
    assert out.stdout.startswith("init n=4 kind=word")
