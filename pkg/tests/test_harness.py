import json
import shutil
import subprocess

import numpy as np
import pytest
from hypothesis import given

from oracles import brute_min
from strategies import small_wcsps
from wcsp_hybrid.bucket import be_solve
from wcsp_hybrid.cli import main
from wcsp_hybrid.core import TOP
from wcsp_hybrid.harness.campaign import Campaign, RunRecord, load_records, recheck, run_campaign, time_limit_for
from wcsp_hybrid.harness.generate import gen_random_wcsp
from wcsp_hybrid.harness.report import emit_report, format_report, reference_cost
from wcsp_hybrid.harness.wcspfile import ParseError, parse_wcsp, serialize_wcsp

EXAMPLE = """# two variables, one binary function
2
2 3
2 0
0 1
2
0 0 5
1 2 inf
1 1
0
1
1 0
"""


def test_parse_example():
    inst = parse_wcsp(EXAMPLE)
    assert inst.domain_sizes == (2, 3)
    f, g = inst.functions
    assert f.scope == (0, 1) and f.table[0, 0] == 5 and f.table[1, 2] == TOP
    assert f.table[1, 1] == 0
    assert g.scope == (0,) and g.table.tolist() == [1, 0]
    assert be_solve(inst)[0] == 0


def test_nullary_function_has_no_scope_line():
    inst = parse_wcsp("1\n2\n0 4\n0\n")
    assert inst.functions[0].scope == () and int(inst.functions[0].table) == 4


@pytest.mark.parametrize("text,line", [
    ("x\n", 1),
    ("2\n2\n", 2),
    ("1\n2\n1 0\n3\n0\n", 4),
    ("1\n2\n1 0\n0\n1\n5 1\n", 6),
    ("1\n2\n1 0\n0\n1\n0 -1\n", 6),
    ("2\n2 2\n2 0\n0 0\n0\n", 4),
])
def test_parse_errors_name_the_line(text, line):
    with pytest.raises(ParseError) as e:
        parse_wcsp(text)
    assert e.value.line == line


def test_truncated_file():
    with pytest.raises(ParseError):
        parse_wcsp("1\n2\n1 0\n0\n2\n0 1\n")


@given(small_wcsps(max_vars=4, max_domain=3))
def test_round_trip(inst):
    back = parse_wcsp(serialize_wcsp(inst))
    assert back.domain_sizes == inst.domain_sizes
    for f, g in zip(inst.functions, back.functions):
        assert f.scope == g.scope and np.array_equal(f.table, g.table)
    assert min(brute_min(back)[0], TOP) == min(brute_min(inst)[0], TOP)


def test_generator_is_seeded_and_dense_as_asked():
    a = gen_random_wcsp(6, 3, 20, 3, 0.25, seed=9)
    b = gen_random_wcsp(6, 3, 20, 3, 0.25, seed=9)
    assert serialize_wcsp(a) == serialize_wcsp(b)
    tops = np.concatenate([f.table.ravel() for f in a.functions])
    assert abs(np.mean(tops >= TOP) - 0.25) < 0.06
    assert all(f.arity <= 3 for f in a.functions)
    with pytest.raises(ValueError):
        gen_random_wcsp(0, 2, 1, 1)


def _rec(cost, i=0, ttb=1.0):
    return RunRecord(f"r{i}", "ma", "mdslp-12", i, cost, ttb, ttb, 1, {}, cost is not None)


def test_report_relative_distance():
    (row,) = emit_report([_rec(68, 0), _rec(68, 1), _rec(70, 2)])
    assert row["reference"] == 68 and row["hits"] == 2
    assert row["rel_mean"] == pytest.approx(100 * 2 / 68 / 3)
    assert round(row["rel_mean"], 2) == 0.98
    assert row["rel_median"] == 0.0 and row["median"] == 68


def test_report_single_and_empty():
    (row,) = emit_report([_rec(69)])
    assert row["min"] == row["max"] == 69 and row["ttb_quartiles"] == [1.0, 1.0, 1.0]
    (none,) = emit_report([_rec(None)])
    assert none["feasible"] == 0
    assert "no feasible" in format_report([none])
    with pytest.raises(ValueError):
        emit_report([])


def test_reference_costs():
    assert reference_cost("mdslp-12") == 68
    assert reference_cost("mdslp-14s") == 92
    assert reference_cost("other") is None


def test_time_limit_rule():
    assert time_limit_for(12) == 180 and time_limit_for(15) == 360
    assert time_limit_for(7) == 180


def test_small_campaign(tmp_path):
    out = tmp_path / "runs.jsonl"
    c = Campaign("ma", [6], [{"popsize": 10, "generations": 50}], replicates=2,
                 time_base=None, out=str(out))
    recs = run_campaign(c)
    assert [r.run_id for r in recs] == ["ma-n6-c0-r0", "ma-n6-c0-r1"]
    again = load_records(out)
    assert [r.to_json() for r in again] == [r.to_json() for r in recs]
    assert all(recheck(r) and r.verified for r in again)


def test_failed_run_is_recorded():
    c = Campaign("be", [1], replicates=1, time_base=None)
    (rec,) = run_campaign(c)
    assert rec.error and rec.best_cost is None


def test_cli_solve_and_verify(tmp_path, capsys):
    board = tmp_path / "b.txt"
    assert main(["solve-be", "--n", "6", "--out", str(board)]) == 0
    assert "cost 18" in capsys.readouterr().out
    assert main(["verify", str(board)]) == 0
    assert "still_life True" in capsys.readouterr().out


def test_cli_instance_and_report(tmp_path, capsys):
    inst = tmp_path / "i.wcsp"
    main(["gen", "--nvars", "5", "--seed", "2", "--out", str(inst)])
    main(["solve-be", "--instance", str(inst)])
    be = capsys.readouterr().out
    main(["solve-mb", "--instance", str(inst)])
    mb = capsys.readouterr().out
    cost = be.split()[1]
    bound = mb.split()[1]
    assert cost == "inf" or int(bound) <= int(cost)
    runs = tmp_path / "r.jsonl"
    main(["campaign", "--algorithm", "hybrid", "--sizes", "7", "--replicates", "1",
          "--generations", "20", "--popsize", "10", "--kbw", "500", "--no-time-limit",
          "--out", str(runs)])
    capsys.readouterr()
    summary = tmp_path / "s.json"
    main(["report", str(runs), "--out", str(summary)])
    assert "mdslp-7" in capsys.readouterr().out
    assert json.loads(summary.read_text())["hits"] == 1


@pytest.mark.skipif(shutil.which("wcsp-hybrid") is None, reason="console script not installed")
def test_console_script():
    out = subprocess.run(["wcsp-hybrid", "solve-ma", "--n", "5", "--generations", "200",
                          "--popsize", "10"], capture_output=True, text=True, check=True)
    assert "cost 9" in out.stdout and "verified True" in out.stdout


def test_empty_function_section_costs_nothing():
    inst = parse_wcsp("3\n2 2 2\n")
    assert inst.functions == [] and be_solve(inst)[0] == 0


def test_generator_density_extremes():
    from wcsp_hybrid.core import brute_force_opt

    free = gen_random_wcsp(4, 2, 5, 2, 0.0, seed=1)
    assert all(int(f.table.max()) < TOP for f in free.functions)
    assert brute_force_opt(gen_random_wcsp(4, 2, 5, 2, 1.0, seed=1))[0] == TOP


def test_unset_parameters_keep_hybrid_defaults():
    params = {"generations": None, "popsize": 10, "k_ma": 1.0, "stop_at_optimum": False}
    (rec,) = run_campaign(Campaign("hybrid", [6], [params], replicates=1, time_base=None))
    assert rec.error is None and rec.verified
