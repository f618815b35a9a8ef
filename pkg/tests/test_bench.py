import json
import sys

import pytest

from hcpforge import SolveBudget, cycle_graph
from hcpforge.bench import (
    BenchmarkPlan,
    BenchmarkRecord,
    load_records,
    make_result_table,
    resolve_solver,
    run_bench,
    trial_seed,
)
from hcpforge.external import ExternalSolverSpec
from hcpforge.families import gen_generalized_petersen, gen_modified_flower_snark
from hcpforge.tsplib import write_hcp


@pytest.fixture()
def small_instances(tmp_path):
    paths = []
    for g in (cycle_graph(6, "C6"), cycle_graph(8, "C8"),
              gen_generalized_petersen(5, 2).with_name("PET_10")):
        path = tmp_path / f"{g.name}.hcp"
        write_hcp(g, path)
        paths.append(path)
    return paths


def make_plan(paths, out_dir, relabellings=10, workers=1, seed=3):
    return BenchmarkPlan(
        instances=tuple(paths),
        solvers=(("exact", "exact"), ("heur", "heuristic")),
        relabellings=relabellings,
        budget=SolveBudget(max_nodes=20_000),
        master_seed=seed,
        out_dir=out_dir,
        workers=workers,
    )


def test_resolve_solver():
    assert resolve_solver("builtin:exact") == "exact"
    assert resolve_solver("heuristic") == "heuristic"
    spec = resolve_solver("mysolver {instance_path} --seed {seed}")
    assert isinstance(spec, ExternalSolverSpec)
    with pytest.raises(ValueError):
        resolve_solver("builtin:magic")
    with pytest.raises(ValueError):
        resolve_solver("no placeholder at all")


def test_plan_validation(tmp_path):
    with pytest.raises(ValueError):
        BenchmarkPlan(instances=(), solvers=(("a", "exact"),))
    with pytest.raises(ValueError):
        BenchmarkPlan(instances=(tmp_path / "x.hcp",),
                      solvers=(("a", "exact"), ("a", "heuristic")))
    with pytest.raises(ValueError):
        BenchmarkPlan(instances=(tmp_path / "x.hcp",), solvers=(("a", "exact"),),
                      relabellings=0)


def test_trial_seed_stable():
    a = trial_seed(1, "C6", "exact", 0)
    assert a == trial_seed(1, "C6", "exact", 0)
    assert a != trial_seed(1, "C6", "exact", 1)
    assert a != trial_seed(2, "C6", "exact", 0)
    assert a != trial_seed(1, "C6", "heur", 0)


def test_record_roundtrip():
    record = BenchmarkRecord("C6", 6, "exact", 3, 42, "FOUND", 0.01, "")
    assert BenchmarkRecord.from_json(record.to_json()) == record


def test_bench_counts_and_shape(small_instances, tmp_path):
    out = tmp_path / "out"
    table = run_bench(make_plan(small_instances, out))
    # table shaped like the benchmark tables: one row per instance,
    # a (Solved, Time) column pair per solver
    assert [name for name, _ in table.instances] == ["C6", "C8", "PET_10"]
    assert table.solvers == ("exact", "heur")
    md = table.to_markdown()
    assert md.splitlines()[0] == ("| Name | n | exact Solved | exact Time "
                                  "| heur Solved | heur Time |")
    assert len(md.splitlines()) == 2 + 3
    # cycles are their own unique HC: every relabelling solves
    assert table.cell("C6", "exact").solved == 10
    assert table.cell("C6", "heur").solved == 10
    # the Petersen graph has no HC: exact proves it, heuristic gives up
    pet_exact = table.cell("PET_10", "exact")
    assert pet_exact.solved == 0
    assert pet_exact.mean_time is None and pet_exact.time_text == "NA"
    assert pet_exact.annotation == ""  # definitive exhaustion, not a timeout
    pet_heur = table.cell("PET_10", "heur")
    assert pet_heur.solved == 0 and pet_heur.annotation == "*"
    assert (out / "records.jsonl").exists()
    assert (out / "results.csv").exists()
    assert (out / "results.md").exists()


def test_bench_deterministic_outcomes(small_instances, tmp_path):
    t1 = run_bench(make_plan(small_instances, tmp_path / "a"))
    t2 = run_bench(make_plan(small_instances, tmp_path / "b"))
    assert t1.outcome_fingerprint() == t2.outcome_fingerprint()


def test_bench_resume_skips_done_trials(small_instances, tmp_path):
    out = tmp_path / "out"
    plan = make_plan(small_instances, out, relabellings=6)
    reference = run_bench(make_plan(small_instances, tmp_path / "ref", relabellings=6))

    executed = []
    run_bench(plan, progress=lambda r: executed.append(r.key))
    assert len(executed) == 3 * 2 * 6

    # truncate the records log to simulate a crash mid-sweep
    records_path = out / "records.jsonl"
    lines = records_path.read_text().splitlines()
    records_path.write_text("\n".join(lines[:13]) + "\n")

    resumed = []
    table = run_bench(plan, progress=lambda r: resumed.append(r.key))
    assert len(resumed) == 3 * 2 * 6 - 13
    assert set(resumed).isdisjoint({tuple(json.loads(l)[k] for k in
                                          ("instance", "solver", "index"))
                                    for l in lines[:13]})
    assert table.outcome_fingerprint() == reference.outcome_fingerprint()


def test_bench_tolerates_torn_record_line(small_instances, tmp_path):
    out = tmp_path / "out"
    plan = make_plan(small_instances, out, relabellings=2)
    run_bench(plan)
    records_path = out / "records.jsonl"
    lines = records_path.read_text().splitlines()
    records_path.write_text("\n".join(lines[:5]) + "\n" + lines[6][: len(lines[6]) // 2])
    table = run_bench(plan)
    assert sum(cell.total for cell in table.cells.values()) == 12


def test_mean_time_over_successes_only():
    records = [
        BenchmarkRecord("X", 5, "s", 0, 1, "FOUND", 2.0),
        BenchmarkRecord("X", 5, "s", 1, 2, "FOUND", 4.0),
        BenchmarkRecord("X", 5, "s", 2, 3, "BUDGET_EXCEEDED", 60.0),
    ]
    table = make_result_table(records)
    cell = table.cell("X", "s")
    assert cell.solved == 2 and cell.total == 3
    assert cell.mean_time == pytest.approx(3.0)
    assert cell.annotation == "*"
    assert cell.solved_text == "2*"


def test_annotation_taxonomy():
    records = [
        BenchmarkRecord("X", 5, "s", 0, 1, "ERROR", 0.0, "memory cap 1 exceeded"),
        BenchmarkRecord("X", 5, "s", 1, 2, "ERROR", 0.0, "memory cap 1 exceeded"),
        BenchmarkRecord("X", 5, "s", 2, 3, "ERROR", 0.0, "solver exited with code 2"),
    ]
    assert make_result_table(records).cell("X", "s").annotation == "**"
    records = [BenchmarkRecord("X", 5, "s", 0, 1, "ERROR", 0.0, "solver exited")]
    assert make_result_table(records).cell("X", "s").annotation == "***"


def test_external_solver_through_bench(small_instances, tmp_path):
    script = tmp_path / "solve.py"
    script.write_text(
        "import sys\n"
        "from hcpforge.tsplib import read_hcp, tour_text\n"
        "from hcpforge.solvers import find_hc_exact\n"
        "out = find_hc_exact(read_hcp(sys.argv[1]))\n"
        "if out.tour is None:\n"
        "    raise SystemExit(9)\n"
        "sys.stdout.write(tour_text(out.tour))\n"
    )
    plan = BenchmarkPlan(
        instances=(small_instances[0],),
        solvers=(("ext", resolve_solver(f"{sys.executable} {script} {{instance_path}}")),),
        relabellings=3,
        budget=SolveBudget(wall_secs=30.0),
        master_seed=1,
        out_dir=tmp_path / "out",
    )
    table = run_bench(plan)
    assert table.cell("C6", "ext").solved == 3


def test_bench_parallel_matches_serial(small_instances, tmp_path):
    serial = run_bench(make_plan(small_instances, tmp_path / "s", workers=1))
    parallel = run_bench(make_plan(small_instances, tmp_path / "p", workers=4))
    assert serial.outcome_fingerprint() == parallel.outcome_fingerprint()
