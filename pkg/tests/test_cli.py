"""Command-line harness, exercised in-process through main(argv)."""

import os
from fractions import Fraction

import pytest

from splitwise import DTInstance
from splitwise.cli import (EXIT_AUDIT, EXIT_BUDGET, EXIT_INVALID, EXIT_OK,
                           main)


def singleton3_text() -> str:
    inst = DTInstance([Fraction(1, 3)] * 3,
                      [(1, 2, 2), (2, 1, 2), (2, 2, 1)], 2)
    return inst.to_text()


def perfect4_text() -> str:
    inst = DTInstance([Fraction(1, 4)] * 4,
                      [(1, 1, 2, 2), (1, 2, 1, 2)], 2)
    return inst.to_text()


def write_instance(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


# ---------------------------------------------------------------------------
# solve
# ---------------------------------------------------------------------------

class TestSolve:
    def test_greedy_frozen_cost(self, tmp_path, capsys):
        path = write_instance(tmp_path, "singleton3.txt", singleton3_text())
        rc = main(["solve", path, "--algo", "greedy"])
        out = capsys.readouterr().out
        assert rc == EXIT_OK
        assert "C_G=5/3" in out
        tree_path = tmp_path / "singleton3.tree.txt"
        assert tree_path.exists()
        assert "tree written to" in out

    def test_exact_frozen_cost(self, tmp_path, capsys):
        path = write_instance(tmp_path, "perfect4.txt", perfect4_text())
        rc = main(["solve", path, "--algo", "exact", "--max-depth", "3"])
        out = capsys.readouterr().out
        assert rc == EXIT_OK
        assert "C_OPT=2" in out

    def test_partial_label_carries_budget(self, tmp_path, capsys):
        path = write_instance(tmp_path, "perfect4.txt", perfect4_text())
        rc = main(["solve", path, "--algo", "partial", "--max-depth", "1"])
        out = capsys.readouterr().out
        assert rc == EXIT_OK
        assert "C_PARTIAL(b=1)=1" in out

    def test_fulltree_trace_and_bound(self, tmp_path, capsys):
        path = write_instance(tmp_path, "perfect4.txt", perfect4_text())
        rc = main(["solve", path, "--algo", "fulltree-uniform",
                   "--alpha", "0.5"])
        out = capsys.readouterr().out
        assert rc == EXIT_OK
        assert "C_FULLTREE=2" in out
        assert "b=3 " in out              # depth budget capped at n-1
        assert "decision=" in out
        assert "within_bound=True" in out
        assert "recursion_depth" in out

    def test_fulltree_requires_alpha(self, tmp_path, capsys):
        path = write_instance(tmp_path, "perfect4.txt", perfect4_text())
        rc = main(["solve", path, "--algo", "fulltree-uniform"])
        err = capsys.readouterr().err
        assert rc == EXIT_INVALID
        assert "alpha" in err

    def test_timings_flag(self, tmp_path, capsys):
        path = write_instance(tmp_path, "singleton3.txt", singleton3_text())
        rc = main(["solve", path, "--timings"])
        out = capsys.readouterr().out
        assert rc == EXIT_OK
        assert "runtime_ms=" in out

    def test_out_flag_controls_tree_path(self, tmp_path, capsys):
        path = write_instance(tmp_path, "singleton3.txt", singleton3_text())
        dest = tmp_path / "custom.tree"
        rc = main(["solve", path, "--out", str(dest)])
        capsys.readouterr()
        assert rc == EXIT_OK
        assert dest.exists()
        assert dest.read_text().strip()

    def test_invalid_instance_exits_2(self, tmp_path, capsys):
        # hypotheses 1 and 2 answer identically everywhere
        inst = DTInstance([Fraction(1, 3)] * 3, [(1, 1, 2)], 2)
        path = write_instance(tmp_path, "bad.txt", inst.to_text())
        rc = main(["solve", path])
        out = capsys.readouterr().out
        assert rc == EXIT_INVALID
        assert "invalid instance" in out

    def test_garbage_file_exits_2(self, tmp_path, capsys):
        path = write_instance(tmp_path, "garbage.txt", "not an instance\n")
        rc = main(["solve", path])
        err = capsys.readouterr().err
        assert rc == EXIT_INVALID
        assert "invalid input" in err

    def test_missing_file_exits_2(self, capsys):
        rc = main(["solve", "/nonexistent/path.txt"])
        err = capsys.readouterr().err
        assert rc == EXIT_INVALID
        assert "invalid input" in err

    def test_budget_env_exits_3(self, tmp_path, capsys, monkeypatch):
        # exact solve of a 14-hypothesis instance cannot finish in ~0 ms
        rc0 = main(["gen", "random", "--n", "14", "--m", "8", "--seed", "3",
                    "--out", str(tmp_path / "big.txt")])
        assert rc0 == EXIT_OK
        monkeypatch.setenv("SPLITWISE_BUDGET_MS", "0.0001")
        rc = main(["solve", str(tmp_path / "big.txt"), "--algo", "exact"])
        err = capsys.readouterr().err
        assert rc == EXIT_BUDGET
        assert "budget exceeded" in err

    def test_bad_budget_env_exits_2(self, tmp_path, capsys, monkeypatch):
        path = write_instance(tmp_path, "singleton3.txt", singleton3_text())
        monkeypatch.setenv("SPLITWISE_BUDGET_MS", "soon")
        rc = main(["solve", path, "--algo", "exact"])
        assert rc == EXIT_INVALID


# ---------------------------------------------------------------------------
# gen
# ---------------------------------------------------------------------------

class TestGen:
    def test_random_round_trips(self, tmp_path, capsys):
        out = tmp_path / "inst.txt"
        rc = main(["gen", "random", "--n", "6", "--m", "5", "--k", "3",
                   "--seed", "11", "--profile", "two-tier", "--ratio", "4",
                   "--out", str(out)])
        capsys.readouterr()
        assert rc == EXIT_OK
        inst = DTInstance.from_text(out.read_text())
        assert inst.n == 6 and inst.m == 5 and inst.k == 3
        assert inst.weight_ratio() == 4

    def test_random_stdout_when_no_out(self, capsys):
        rc = main(["gen", "random", "--n", "4", "--m", "4", "--seed", "1"])
        out = capsys.readouterr().out
        assert rc == EXIT_OK
        inst = DTInstance.from_text(out)
        assert inst.n == 4

    def test_grid(self, tmp_path, capsys):
        out = tmp_path / "grid.txt"
        rc = main(["gen", "grid", "--n", "16", "--c-star", "4",
                   "--out", str(out)])
        capsys.readouterr()
        assert rc == EXIT_OK
        inst = DTInstance.from_text(out.read_text())
        assert inst.n == 16 and inst.m == 23 and inst.uniform

    def test_reduction_reports_parameters_on_stderr(self, tmp_path, capsys):
        out = tmp_path / "red.txt"
        rc = main(["gen", "reduction", "--n0", "2", "--sets", "1;2",
                   "--r", "0.25", "--out", str(out)])
        captured = capsys.readouterr()
        assert rc == EXIT_OK
        assert "q=4 ell=1 n=9 ratio=10" in captured.err
        inst = DTInstance.from_text(out.read_text())
        assert inst.n == 9

    def test_reduction_bad_sets_exit_2(self, capsys):
        rc = main(["gen", "reduction", "--n0", "3", "--sets", "1;2",
                   "--r", "0.2"])
        err = capsys.readouterr().err
        assert rc == EXIT_INVALID
        assert "missing" in err

    def test_gen_infeasible_exit_2(self, capsys):
        rc = main(["gen", "random", "--n", "7", "--m", "1", "--seed", "0"])
        err = capsys.readouterr().err
        assert rc == EXIT_INVALID
        assert "error" in err or "invalid" in err


# ---------------------------------------------------------------------------
# audit
# ---------------------------------------------------------------------------

class TestAudit:
    def test_filtered_battery_passes(self, capsys):
        rc = main(["audit", "--seed", "0", "--only", "identity"])
        out = capsys.readouterr().out
        assert rc == EXIT_OK
        assert "failed=0" in out

    def test_inject_fault_exits_4_with_artifacts(self, tmp_path, capsys):
        rc = main(["audit", "--seed", "0", "--only", "identity",
                   "--inject-fault", "--out", str(tmp_path / "fails")])
        out = capsys.readouterr().out
        assert rc == EXIT_AUDIT
        assert "failed=1" in out
        assert "falsifier serialized" in out
        arts = list((tmp_path / "fails").iterdir())
        assert any(a.name.endswith(".instance.txt") for a in arts)
        assert any(a.name.endswith(".tree.txt") for a in arts)

    def test_unknown_family_exit_2(self, capsys):
        rc = main(["audit", "--only", "no_such_family"])
        assert rc == EXIT_INVALID


# ---------------------------------------------------------------------------
# experiment
# ---------------------------------------------------------------------------

class TestExperiment:
    def test_random_family_csv(self, tmp_path, capsys):
        out = tmp_path / "r.csv"
        rc = main(["experiment", "--family", "random", "--sizes", "5,6",
                   "--seed", "2", "--out", str(out)])
        capsys.readouterr()
        assert rc == EXIT_OK
        lines = out.read_text().splitlines()
        assert lines[0] == ("instance_id,n,m,K,R,algo,cost,exact_or_bound,"
                            "baseline,ratio,bound_value,runtime_ms,status")
        assert len(lines) == 3
        # sorted by (n, instance_id)
        assert lines[1].startswith("random-n5-") and \
            lines[2].startswith("random-n6-")
        # runtime_ms column empty without --timings
        assert all(line.split(",")[11] == "" for line in lines[1:])

    def test_csv_byte_determinism(self, tmp_path, capsys):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        argv = ["experiment", "--family", "random", "--sizes", "5,6,7",
                "--seed", "4"]
        assert main(argv + ["--out", str(a)]) == EXIT_OK
        assert main(argv + ["--out", str(b)]) == EXIT_OK
        capsys.readouterr()
        assert a.read_bytes() == b.read_bytes()

    def test_empty_sweep_header_only(self, capsys):
        rc = main(["experiment", "--family", "random", "--sizes", ""])
        out = capsys.readouterr().out
        assert rc == EXIT_OK
        assert out.splitlines() == [
            "instance_id,n,m,K,R,algo,cost,exact_or_bound,baseline,ratio,"
            "bound_value,runtime_ms,status"]

    def test_timings_populates_runtime(self, tmp_path, capsys):
        out = tmp_path / "t.csv"
        rc = main(["experiment", "--family", "random", "--sizes", "5",
                   "--timings", "--out", str(out)])
        capsys.readouterr()
        assert rc == EXIT_OK
        data_row = out.read_text().splitlines()[1]
        runtime = data_row.split(",")[11]
        assert runtime != "" and float(runtime) >= 0.0

    def test_grid_family(self, tmp_path, capsys):
        out = tmp_path / "g.csv"
        rc = main(["experiment", "--family", "grid", "--sizes", "64",
                   "--c-star", "8", "--out", str(out)])
        capsys.readouterr()
        assert rc == EXIT_OK
        row = out.read_text().splitlines()[1]
        fields = row.split(",")
        assert fields[0] == "grid-n64-c8"
        assert fields[7] == "bound"
        assert fields[10] == "32"     # 4 * c_star

    def test_reduction_family(self, tmp_path, capsys):
        out = tmp_path / "d.csv"
        rc = main(["experiment", "--family", "reduction", "--out", str(out)])
        capsys.readouterr()
        assert rc == EXIT_OK
        lines = out.read_text().splitlines()
        assert len(lines) == 3
        first = lines[1].split(",")
        assert first[0].startswith("reduction-0")
        assert first[6] == "58/9"     # exact optimum of the minimal build
