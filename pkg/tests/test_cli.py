import json

import pytest

from hcpforge import Tour, cycle_graph
from hcpforge.cli import main
from hcpforge.solvers import find_hc_exact
from hcpforge.tsplib import read_hcp, read_tour, write_hcp, write_tour


def run_cli(*argv):
    return main([str(a) for a in argv])


def test_generate_gpn(tmp_path, capsys):
    assert run_cli("generate", "--family", "GPN", "-p", "61", "--out", tmp_path) == 0
    out = capsys.readouterr().out
    assert "GPN_122.hcp" in out and "hc_count=61" in out
    g = read_hcp(tmp_path / "GPN_122.hcp")
    assert g.n == 122 and g.m == 183


def test_generate_snark_modified(tmp_path):
    assert run_cli("generate", "--family", "SNARK_MODIFIED", "-k", "31",
                   "--out", tmp_path) == 0
    assert (tmp_path / "SN_124.hcp").exists()


def test_generate_congruence_usage_error(tmp_path, capsys):
    assert run_cli("generate", "--family", "GP0", "-p", "4", "--out", tmp_path) == 2
    assert "mod 6" in capsys.readouterr().err


def test_generate_planted_writes_sidecar(tmp_path):
    assert run_cli("generate", "--family", "PLANTED_CUBIC", "-n", "30",
                   "--seed", "4", "--out", tmp_path) == 0
    g = read_hcp(tmp_path / "PC_30.hcp")
    t = read_tour(tmp_path / "PC_30.tour", 30)
    from hcpforge import is_hamiltonian_cycle
    assert is_hamiltonian_cycle(g, t)


def test_generate_tsp_flag(tmp_path):
    assert run_cli("generate", "--family", "SHEEHAN", "-n", "10", "--tsp",
                   "--out", tmp_path) == 0
    assert (tmp_path / "SH_10.tsp").read_text().startswith("NAME : SH_10")


def test_convert(tmp_path):
    write_hcp(cycle_graph(5, "C5"), tmp_path / "c5.hcp")
    assert run_cli("convert", tmp_path / "c5.hcp", "--out", tmp_path) == 0
    assert (tmp_path / "C5.tsp").exists()


def test_verify_exit_codes(tmp_path, capsys):
    g = cycle_graph(4, "C4")
    write_hcp(g, tmp_path / "c4.hcp")
    write_tour(Tour([1, 2, 3, 4]), tmp_path / "good.tour")
    write_tour(Tour([1, 3, 2, 4]), tmp_path / "bad.tour")
    assert run_cli("verify", tmp_path / "c4.hcp", tmp_path / "good.tour") == 0
    assert "length 0" in capsys.readouterr().out
    assert run_cli("verify", tmp_path / "c4.hcp", tmp_path / "bad.tour") == 1
    assert "length 2" in capsys.readouterr().out
    (tmp_path / "trunc.tour").write_text("NAME : x\nTYPE : TOUR\nTOUR_SECTION\n1\n2\n")
    assert run_cli("verify", tmp_path / "c4.hcp", tmp_path / "trunc.tour") == 3


def test_reduce_and_decode_queens(tmp_path, capsys):
    (tmp_path / "qn.txt").write_text("# four queens\n4\n")
    assert run_cli("reduce", "--kind", "qn", tmp_path / "qn.txt",
                   "--out", tmp_path) == 0
    hcp = next(tmp_path.glob("QN_*.hcp"))
    cert = next(tmp_path.glob("QN_*.cert.json"))
    g = read_hcp(hcp)
    out = find_hc_exact(g)
    assert out.tour is not None
    write_tour(out.tour, tmp_path / "sol.tour")
    capsys.readouterr()
    assert run_cli("decode", "--cert", cert, "--tour", tmp_path / "sol.tour") == 0
    printed = capsys.readouterr().out
    assert "valid QN solution" in printed and "queen at row" in printed


def test_reduce_infeasible_source_is_not_an_error(tmp_path):
    (tmp_path / "ssp.txt").write_text("1\n1\n")
    assert run_cli("reduce", "--kind", "ssp", tmp_path / "ssp.txt",
                   "--out", tmp_path) == 0
    hcp = next(tmp_path.glob("SSP_*.hcp"))
    from hcpforge.solvers import SolverStatus
    assert find_hc_exact(read_hcp(hcp)).status is SolverStatus.EXHAUSTED_NO_HC


def test_decode_rejects_wrong_tour(tmp_path, capsys):
    (tmp_path / "qn.txt").write_text("4\n")
    run_cli("reduce", "--kind", "qn", tmp_path / "qn.txt", "--out", tmp_path)
    cert = next(tmp_path.glob("QN_*.cert.json"))
    g = read_hcp(next(tmp_path.glob("QN_*.hcp")))
    write_tour(Tour(list(range(1, g.n + 1))), tmp_path / "wrong.tour")
    assert run_cli("decode", "--cert", cert, "--tour", tmp_path / "wrong.tour") == 1


def test_harden_cli(tmp_path, capsys):
    assert run_cli("harden", "--size", "16", "--samples", "2", "--solver", "exact",
                   "--max-count", "4", "--seed", "3", "--out", tmp_path,
                   "--budget-secs", "10") == 0
    out = capsys.readouterr().out
    assert "Full success" in out
    assert (tmp_path / "PC_16_s0000.hcp").exists()
    assert (tmp_path / "PC_16_s0000.tour").exists()
    assert (tmp_path / "harden_summary.csv").exists()
    rows = (tmp_path / "samples.csv").read_text().splitlines()
    assert rows[0].startswith("sample,seed,status")
    assert len(rows) == 3


def test_harden_usage_errors(tmp_path):
    assert run_cli("harden", "--size", "15", "--samples", "1", "--out", tmp_path) == 2
    assert run_cli("harden", "--size", "16", "--samples", "0", "--out", tmp_path) == 2


def test_bench_cli_with_plan(tmp_path, capsys):
    write_hcp(cycle_graph(6, "C6"), tmp_path / "c6.hcp")
    plan = tmp_path / "plan.ini"
    plan.write_text(
        "# tiny plan\n"
        "[plan]\n"
        "seed = 5\n"
        "relabellings = 4\n"
        "budget-nodes = 10000\n"
        f"out = {tmp_path / 'results'}\n"
        "\n"
        "[instances]\n"
        f"c6 = {tmp_path / 'c6.hcp'}\n"
        "\n"
        "[solvers]\n"
        "exact = builtin:exact\n"
    )
    assert run_cli("bench", "--plan", plan) == 0
    out = capsys.readouterr().out
    assert "| C6 | 6 | 4 |" in out
    records = [json.loads(l) for l in
               (tmp_path / "results" / "records.jsonl").read_text().splitlines()]
    assert len(records) == 4
    assert {r["status"] for r in records} == {"FOUND"}


def test_bench_cli_inline_solvers(tmp_path, capsys):
    write_hcp(cycle_graph(6, "C6"), tmp_path / "c6.hcp")
    assert run_cli("bench", tmp_path / "c6.hcp", "--solver", "x=builtin:heuristic",
                   "--relabellings", "3", "--budget-nodes", "5000",
                   "--out", tmp_path / "r") == 0
    assert "x Solved" in capsys.readouterr().out


def test_bench_cli_rejects_unknown_solver(tmp_path, capsys):
    write_hcp(cycle_graph(6, "C6"), tmp_path / "c6.hcp")
    assert run_cli("bench", tmp_path / "c6.hcp", "--solver", "x=builtin:nope",
                   "--out", tmp_path / "r") == 2


def test_report_from_records(tmp_path, capsys):
    write_hcp(cycle_graph(6, "C6"), tmp_path / "c6.hcp")
    run_cli("bench", tmp_path / "c6.hcp", "--solver", "exact=builtin:exact",
            "--relabellings", "2", "--budget-nodes", "5000", "--out", tmp_path / "r")
    capsys.readouterr()
    assert run_cli("report", "--records", tmp_path / "r" / "records.jsonl",
                   "--out", tmp_path / "r2") == 0
    assert (tmp_path / "r2" / "results.md").exists()
    assert "exact Solved" in capsys.readouterr().out


def test_missing_file_is_usage_error(tmp_path):
    assert run_cli("verify", tmp_path / "nope.hcp", tmp_path / "nope.tour") == 2
