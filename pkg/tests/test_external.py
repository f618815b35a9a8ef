import sys
import textwrap

import pytest

from hcpforge import SolveBudget, SolverStatus, Tour, cycle_graph
from hcpforge.external import ExternalSolverSpec, InputFormat, OutputParser, run_external
from hcpforge.tsplib import graph_to_tsp, write_hcp, write_tsp


def make_script(tmp_path, name, body):
    path = tmp_path / name
    path.write_text(textwrap.dedent(body))
    return path


def test_spec_requires_instance_placeholder():
    with pytest.raises(ValueError):
        ExternalSolverSpec(command="solver --fast")


def test_self_hosted_exact_adapter_on_c6(tmp_path):
    instance = tmp_path / "c6.hcp"
    write_hcp(cycle_graph(6, "C6"), instance)
    script = make_script(tmp_path, "solve.py", """
        import sys
        from hcpforge.solvers import find_hc_exact
        from hcpforge.tsplib import read_hcp, tour_text
        g = read_hcp(sys.argv[1])
        out = find_hc_exact(g)
        assert out.status.name == "FOUND"
        sys.stdout.write(tour_text(out.tour, name=g.name))
    """)
    spec = ExternalSolverSpec(command=f"{sys.executable} {script} {{instance_path}}")
    out = run_external(spec, instance, budget=SolveBudget(wall_secs=60))
    assert out.status is SolverStatus.FOUND
    assert out.tour == Tour([1, 2, 3, 4, 5, 6])


def test_tsp_input_and_output_file(tmp_path):
    g = cycle_graph(5, "C5")
    instance = tmp_path / "c5.tsp"
    write_tsp(graph_to_tsp(g), instance)
    script = make_script(tmp_path, "solve_tsp.py", """
        import sys
        from hcpforge.solvers import find_hc_exact
        from hcpforge.tsplib import read_tsp, tour_text
        g = read_tsp(sys.argv[1]).to_graph()
        out = find_hc_exact(g)
        open(sys.argv[2], "w").write(tour_text(out.tour))
    """)
    spec = ExternalSolverSpec(
        command=f"{sys.executable} {script} {{instance_path}} {{output_path}}",
        input_format=InputFormat.TSP_FULL_MATRIX,
    )
    out = run_external(spec, instance)
    assert out.status is SolverStatus.FOUND


def test_edge_list_output_parser(tmp_path):
    g = cycle_graph(4, "C4")
    instance = tmp_path / "c4.hcp"
    write_hcp(g, instance)
    script = make_script(tmp_path, "edges.py", """
        print("1 2")
        print("2 3")
        print("3 4")
        print("4 1")
    """)
    spec = ExternalSolverSpec(
        command=f"{sys.executable} {script} {{instance_path}}",
        output_parser=OutputParser.EDGE_LIST,
    )
    out = run_external(spec, instance)
    assert out.status is SolverStatus.FOUND
    assert out.tour == Tour([1, 2, 3, 4])


def test_timeout_maps_to_budget_exceeded(tmp_path):
    instance = tmp_path / "c4.hcp"
    write_hcp(cycle_graph(4), instance)
    script = make_script(tmp_path, "slow.py", """
        import time
        time.sleep(30)
    """)
    spec = ExternalSolverSpec(command=f"{sys.executable} {script} {{instance_path}}")
    out = run_external(spec, instance, budget=SolveBudget(wall_secs=1.0))
    assert out.status is SolverStatus.BUDGET_EXCEEDED
    assert out.elapsed >= 1.0


def test_invalid_tour_is_error_not_found(tmp_path):
    instance = tmp_path / "c4.hcp"
    write_hcp(cycle_graph(4), instance)
    script = make_script(tmp_path, "liar.py", """
        print("NAME : lie")
        print("TYPE : TOUR")
        print("DIMENSION : 4")
        print("TOUR_SECTION")
        print("1"); print("3"); print("2"); print("4")
        print("-1")
        print("EOF")
    """)
    spec = ExternalSolverSpec(command=f"{sys.executable} {script} {{instance_path}}")
    out = run_external(spec, instance)
    assert out.status is SolverStatus.ERROR
    assert "verification" in out.detail


def test_garbage_output_is_error(tmp_path):
    instance = tmp_path / "c4.hcp"
    write_hcp(cycle_graph(4), instance)
    script = make_script(tmp_path, "noise.py", 'print("no tour here")\n')
    spec = ExternalSolverSpec(command=f"{sys.executable} {script} {{instance_path}}")
    out = run_external(spec, instance)
    assert out.status is SolverStatus.ERROR
    assert "unparseable" in out.detail


def test_nonzero_exit_is_error(tmp_path):
    instance = tmp_path / "c4.hcp"
    write_hcp(cycle_graph(4), instance)
    script = make_script(tmp_path, "crash.py", "raise SystemExit(3)\n")
    spec = ExternalSolverSpec(command=f"{sys.executable} {script} {{instance_path}}")
    out = run_external(spec, instance)
    assert out.status is SolverStatus.ERROR
    assert "code 3" in out.detail


def test_memory_kill_detail(tmp_path):
    instance = tmp_path / "c4.hcp"
    write_hcp(cycle_graph(4), instance)
    script = make_script(tmp_path, "killself.py", """
        import os, signal
        os.kill(os.getpid(), signal.SIGKILL)
    """)
    spec = ExternalSolverSpec(command=f"{sys.executable} {script} {{instance_path}}",
                              mem_cap_mb=64)
    out = run_external(spec, instance)
    assert out.status is SolverStatus.ERROR
    assert out.detail.startswith("memory")


def test_seed_and_timeout_placeholders(tmp_path):
    instance = tmp_path / "c4.hcp"
    write_hcp(cycle_graph(4), instance)
    script = make_script(tmp_path, "echoargs.py", """
        import sys
        assert sys.argv[2] == "17", sys.argv
        assert float(sys.argv[3]) == 5.0, sys.argv
        from hcpforge.tsplib import read_hcp, tour_text
        from hcpforge.solvers import find_hc_exact
        sys.stdout.write(tour_text(find_hc_exact(read_hcp(sys.argv[1])).tour))
    """)
    spec = ExternalSolverSpec(
        command=f"{sys.executable} {script} {{instance_path}} {{seed}} {{timeout}}")
    out = run_external(spec, instance, seed=17, budget=SolveBudget(wall_secs=5.0))
    assert out.status is SolverStatus.FOUND
