import csv
import json

import pytest

from cdclcrypto import cli
from cdclcrypto.encoder.varmap import VarMap
from cdclcrypto.programmatic import Extension
from cdclcrypto.solver.dimacs import format_dimacs
from helpers import pigeonhole


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch, tmp_path):
    monkeypatch.delenv(cli.BUDGET_ENV, raising=False)
    monkeypatch.chdir(tmp_path)


def _php(path, holes=6):
    n, cls = pigeonhole(holes)
    path.write_text(format_dimacs(n, cls))
    return path


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_encode_preimage_writes_consistent_triple(tmp_path, capsys):
    assert cli.main(["encode", "--kind", "preimage", "--fn", "sha256", "--rounds", "16", "-o", "p"]) == 0
    printed = capsys.readouterr().out.split()
    assert printed == ["p.cnf", "p.varmap", "p.json"]
    header = next(l for l in (tmp_path / "p.cnf").read_text().splitlines() if l.startswith("p "))
    nvars = int(header.split()[2])
    vm = VarMap.loads((tmp_path / "p.varmap").read_text())
    ids = [abs(v) for name in vm for v in vm[name]]
    assert max(ids) <= nvars
    assert vm.meta["kind"] == "preimage" and vm.meta["rounds"] == "16"
    meta = json.loads((tmp_path / "p.json").read_text())
    assert meta["config"]["rounds"] == 16 and meta["generator"].startswith("cdclcrypto")


def test_encode_afa_is_byte_identical(tmp_path):
    argv = ["encode", "--kind", "afa", "--faults", "4", "--seed", "7"]
    assert cli.main(argv + ["-o", "one/x"]) == 0
    assert cli.main(argv + ["-o", "two/x"]) == 0
    for ext in ("cnf", "varmap", "json"):
        assert (tmp_path / f"one/x.{ext}").read_bytes() == (tmp_path / f"two/x.{ext}").read_bytes()
    assert cli.main(["encode", "--kind", "afa", "--faults", "4", "--seed", "8", "-o", "three/x"]) == 0
    assert (tmp_path / "three/x.json").read_bytes() != (tmp_path / "one/x.json").read_bytes()


def test_encode_collision_counts_difference_vars(tmp_path):
    assert cli.main(["encode", "--kind", "collision", "--path", "local_collision_w0",
                     "--rounds", "18", "-o", "c"]) == 0
    meta = json.loads((tmp_path / "c.json").read_text())
    vm = VarMap.loads((tmp_path / "c.varmap").read_text())
    consts = {meta["true_var"]}
    d_lits = {abs(v) for name in vm if name.startswith(("dW", "dA", "dE", "ddigest")) for v in vm[name]}
    d_lits |= {abs(t[2]) for _, ins, out in meta["gates"] for t in (*ins, out)}
    assert len(d_lits - consts) == meta["tracked_bits"] == 4209


@pytest.mark.parametrize("argv", [
    ["encode", "--kind", "collision", "--fn", "sha1", "--path", "single_bit_w5"],
    ["encode", "--kind", "collision"],
    ["encode", "--kind", "collision", "--path", "no_such_path"],
    ["encode", "--kind", "preimage", "--rounds", "65"],
    ["encode", "--kind", "preimage", "--fn", "sha1", "--rounds", "81"],
    ["encode", "--kind", "afa", "--width", "40"],
])
def test_encode_errors_exit_one(argv, capsys):
    assert cli.main(argv) == 1
    assert capsys.readouterr().err.startswith("error:")


def test_solve_exit_codes(tmp_path, capsys):
    (tmp_path / "sat.cnf").write_text("p cnf 2 2\n1 2 0\n-1 0\n")
    assert cli.main(["solve", "sat.cnf", "--model"]) == 10
    out = capsys.readouterr().out
    assert "s SAT" in out and "v -1 2 0" in out
    (tmp_path / "unsat.cnf").write_text("p cnf 1 2\n1 0\n-1 0\n")
    assert cli.main(["solve", "unsat.cnf"]) == 20
    _php(tmp_path / "php.cnf")
    assert cli.main(["solve", "php.cnf", "--max-conflicts", "1"]) == 30


def test_solve_stats_and_csv(tmp_path, capsys):
    _php(tmp_path / "php.cnf", 4)
    assert cli.main(["solve", "php.cnf", "--stats", "--csv", "out.csv"]) == 20
    assert "conflicts" in capsys.readouterr().out
    (row,) = _rows(tmp_path / "out.csv")
    assert row["result"] == "UNSAT" and row["schema"] == str(cli.CSV_VERSION)
    assert set(cli.STAT_KEYS) <= set(row)


def test_budget_from_environment(tmp_path, monkeypatch):
    _php(tmp_path / "php.cnf")
    monkeypatch.setenv(cli.BUDGET_ENV, "conflicts=1")
    assert cli.main(["solve", "php.cnf"]) == 30
    monkeypatch.setenv(cli.BUDGET_ENV, "conflicts=1,seconds=100")
    assert cli.main(["solve", "php.cnf", "--max-conflicts", "1000000"]) == 20
    monkeypatch.setenv(cli.BUDGET_ENV, "rounds=3")
    assert cli.main(["solve", "php.cnf"]) == 1


def test_budget_parse():
    assert cli.Budget.parse("conflicts=5, seconds=2.5") == cli.Budget(5, 2.5)
    assert cli.Budget.parse("") == cli.Budget()
    with pytest.raises(cli.CliError):
        cli.Budget.parse("conflicts=many")


def test_solve_with_instance_plugins(tmp_path):
    assert cli.main(["encode", "--kind", "preimage", "--rounds", "8", "--free-bits", "4", "-o", "p"]) == 0
    assert cli.main(["solve", "p", "--plugins", "adder,hashcheck"]) == 10
    assert cli.main(["solve", "p.cnf", "--plugins", "gc"]) == 1


def test_plugins_without_metadata_fail(tmp_path):
    (tmp_path / "a.cnf").write_text("p cnf 1 1\n1 0\n")
    assert cli.main(["solve", "a.cnf", "--plugins", "adder"]) == 1


def test_contract_violation_exits_one(tmp_path, monkeypatch, capsys):
    (tmp_path / "a.cnf").write_text("p cnf 2 1\n1 2 0\n")
    bad = Extension("bad", on_check=lambda v: [[1, 2]])
    monkeypatch.setattr(cli, "_load_plugins", lambda stem, names: [bad])
    assert cli.main(["solve", "a.cnf", "--plugins", "whatever"]) == 1
    assert "contract" in capsys.readouterr().err


def test_bench_rows_and_determinism(tmp_path):
    inst = tmp_path / "inst"
    for seed in range(3):
        assert cli.main(["encode", "--kind", "preimage", "--rounds", "8", "--free-bits", "3",
                         "--seed", str(seed), "-o", f"inst/p{seed}"]) == 0
    argv = ["bench", str(inst), "--plugins", "none", "--plugins", "adder", "--max-conflicts", "50000"]
    assert cli.main(argv + ["--csv", "a.csv"]) == 0
    assert cli.main(argv + ["--csv", "b.csv"]) == 0
    a, b = _rows(tmp_path / "a.csv"), _rows(tmp_path / "b.csv")
    assert len(a) == 6
    assert [(r["instance"], r["config"]) for r in a] == [
        (f"p{s}.cnf", c) for s in range(3) for c in ("none", "adder")]
    assert all(r["solved"] == "1" and r["result"] == "SAT" for r in a)
    assert [r["solved"] for r in a] == [r["solved"] for r in b]
    assert [r["conflicts"] for r in a] == [r["conflicts"] for r in b]
    assert set(cli.STAT_KEYS) <= set(a[0])


def test_bench_records_failures_and_continues(tmp_path):
    d = tmp_path / "d"
    d.mkdir()
    (d / "good.cnf").write_text("p cnf 1 1\n1 0\n")
    (d / "junk.cnf").write_text("p cnf x\n")
    assert cli.main(["bench", str(d)]) == 0
    rows = {r["instance"]: r for r in _rows(tmp_path / "bench.csv")}
    assert rows["good.cnf"]["result"] == "SAT"
    assert rows["junk.cnf"]["result"] == "ERROR" and rows["junk.cnf"]["solved"] == "0"


def test_bench_empty_directory(tmp_path):
    assert cli.main(["bench", str(tmp_path)]) == 1


def test_rules_xor_diff_informative(tmp_path, capsys):
    assert cli.main(["rules", "--op", "IF", "--mode", "xor_diff_1bit", "--census"]) == 0
    out, err = capsys.readouterr()
    informative = [l.split()[2:] for l in out.splitlines()
                   if not l.startswith("#") and not l.endswith("?")]
    assert sorted(informative) == [["---", "-"], ["-xx", "x"]]
    assert "IF no_contradiction 2" in err


def test_rules_to_file(tmp_path):
    assert cli.main(["rules", "--op", "MAJ", "-o", "maj.txt"]) == 0
    lines = (tmp_path / "maj.txt").read_text().splitlines()
    assert lines[0].startswith("# rules op=MAJ")
    assert len(lines) == 1 + 16 ** 3


def test_afa_compares_plugin_sets(tmp_path, capsys):
    argv = ["afa", "--rounds", "3", "--fault-round", "0", "--faults", "16", "--seed", "3",
            "--plugins", "none", "--plugins", "adder,hashcheck", "--csv", "afa.csv"]
    assert cli.main(argv) == 10
    rows = _rows(tmp_path / "afa.csv")
    assert [r["plugins"] for r in rows] == ["none", "adder+hashcheck"]
    assert {r["verdict"] for r in rows} == {"confirmed"}
    assert "secret" in capsys.readouterr().out


def test_collide_reports_verified_pair(tmp_path, capsys):
    assert cli.main(["collide", "--path", "single_bit_w5", "--plugins", "none",
                     "--plugins", "gc", "--csv", "col.csv"]) == 10
    out = capsys.readouterr().out
    assert out.count("verified yes") == 2
    assert [r["config"] for r in _rows(tmp_path / "col.csv")] == ["none", "gc"]


def test_collide_budget_exhausted(tmp_path):
    assert cli.main(["collide", "--path", "local_collision_w0", "--rounds", "16",
                     "--max-conflicts", "5"]) == 30
