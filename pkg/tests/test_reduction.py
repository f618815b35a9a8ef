import itertools
import random

import pytest

from hcpforge import SolveBudget, SolverStatus, Tour, complete_graph, cycle_graph
from hcpforge.cnf import CnfFormula, ProblemKind, SourceProblem, solution_is_valid
from hcpforge.reduction import (
    ReductionCertificate,
    decode_hc,
    read_certificate,
    reduce_cnf_to_hcp,
    reduce_source,
    write_certificate,
)
from hcpforge.solvers import find_hc_exact

from oracles import col3_feasible, ii_feasible, queens_feasible, random_graph, ssp_feasible


def truth_table_sat(f: CnfFormula) -> bool:
    return any(
        all(any((lit > 0) == bits[abs(lit) - 1] for lit in cl) for cl in f.clauses)
        for bits in itertools.product((False, True), repeat=f.num_vars)
    )


def hamiltonian(g) -> bool:
    out = find_hc_exact(g)
    assert out.status is not SolverStatus.BUDGET_EXCEEDED
    return out.status is SolverStatus.FOUND


def test_unit_clause_reductions():
    g, _ = reduce_cnf_to_hcp(CnfFormula(1, ((1,),)))
    assert hamiltonian(g)
    g, _ = reduce_cnf_to_hcp(CnfFormula(1, ((1,), (-1,))))
    assert not hamiltonian(g)


def test_all_small_cnfs_match_truth_table():
    # fixed enumeration: all subsets of up to 4 clauses drawn from the
    # 2-literal clauses over 3 variables, plus unit clauses
    lits = [1, -1, 2, -2, 3, -3]
    pool = [(a,) for a in lits] + [
        (a, b) for a in lits for b in lits if abs(a) < abs(b)
    ]
    rng = random.Random(5)
    combos = list(itertools.combinations(pool, 2))
    rng.shuffle(combos)
    cases = [c for c in (tuple((cl,) for cl in pool))] + combos[:120]
    for clause_set in cases:
        f = CnfFormula(3, clause_set)
        g, gm = reduce_cnf_to_hcp(f)
        out = find_hc_exact(g)
        ham = out.status is SolverStatus.FOUND
        assert ham == truth_table_sat(f), clause_set
        if ham:
            assignment = gm.decode_assignment(out.tour)
            assert all(any((lit > 0) == assignment[abs(lit) - 1] for lit in cl)
                       for cl in f.clauses), clause_set


def test_duplicate_and_tautological_literals():
    for clauses in (((1, 1),), ((1, -1),), ((1, -1), (2,)), ((2, 2, 2),)):
        f = CnfFormula(2, clauses)
        g, gm = reduce_cnf_to_hcp(f)
        assert hamiltonian(g) == truth_table_sat(f), clauses


def test_variable_without_occurrence():
    f = CnfFormula(3, ((1, 2),))  # variable 3 never occurs
    g, gm = reduce_cnf_to_hcp(f)
    out = find_hc_exact(g)
    assert out.status is SolverStatus.FOUND
    assignment = gm.decode_assignment(out.tour)
    assert len(assignment) == 3


def test_reduction_linear_size():
    rng = random.Random(8)
    ratios = []
    for trial in range(60):
        num_vars = rng.randint(2, 20)
        clauses = []
        for _ in range(rng.randint(1, 30)):
            width = rng.randint(1, 4)
            clause = tuple(rng.choice((v, -v))
                           for v in rng.sample(range(1, num_vars + 1),
                                               min(width, num_vars)))
            clauses.append(clause)
        f = CnfFormula(num_vars, tuple(clauses))
        g, _ = reduce_cnf_to_hcp(f)
        ratios.append(g.n / (f.num_vars + f.total_literals))
    assert max(ratios) <= 15


def test_reduce_source_col3():
    graph, cert = reduce_source(SourceProblem.col3(complete_graph(3)))
    assert graph.name == f"COL3_{graph.n}"
    out = find_hc_exact(graph)
    assert out.status is SolverStatus.FOUND
    sol = decode_hc(cert, out.tour)
    assert sol.kind is ProblemKind.COL3
    assert solution_is_valid(cert.problem, sol)
    # K4 is not 3-colourable: non-Hamiltonian reduced graph
    graph, _ = reduce_source(SourceProblem.col3(complete_graph(4)))
    assert not hamiltonian(graph)


def test_reduce_source_queens():
    graph, cert = reduce_source(SourceProblem.queens(4))
    out = find_hc_exact(graph)
    assert out.status is SolverStatus.FOUND
    sol = decode_hc(cert, out.tour)
    assert solution_is_valid(cert.problem, sol)
    assert len(sol.data) == 4


def test_reduce_source_setsplit_infeasible():
    graph, _ = reduce_source(SourceProblem.set_split({1}, [{1}]))
    assert not hamiltonian(graph)


def test_decode_rejects_non_hc():
    graph, cert = reduce_source(SourceProblem.queens(1))
    order = list(range(1, graph.n + 1))
    with pytest.raises(ValueError):
        decode_hc(cert, Tour(order))


def test_certificate_roundtrip(tmp_path):
    for problem in (
        SourceProblem.col3(cycle_graph(5)),
        SourceProblem.queens(4),
        SourceProblem.set_split({1, 2, 3}, [{1, 2}, {2, 3}]),
        SourceProblem.insanity([(1, 2, 1, 2, 1, 2), (2, 1, 2, 1, 2, 1)]),
    ):
        graph, cert = reduce_source(problem)
        path = tmp_path / f"{problem.kind.value}.cert.json"
        write_certificate(cert, path)
        again = read_certificate(path)
        assert again.graph == graph
        assert again.gadget == cert.gadget
        assert again.problem.kind == problem.kind
        out = find_hc_exact(graph)
        if out.status is SolverStatus.FOUND:
            sol = decode_hc(again, out.tour)
            assert solution_is_valid(again.problem, sol)


def test_source_soundness_sample():
    rng = random.Random(14)
    for trial in range(12):
        n = rng.randint(1, 5)
        g = random_graph(n, rng.uniform(0.3, 0.9), rng)
        graph, cert = reduce_source(SourceProblem.col3(g))
        ham = hamiltonian(graph)
        assert ham == col3_feasible(g)
    for trial in range(15):
        size = rng.randint(1, 5)
        family = [tuple(sorted(rng.sample(range(1, size + 1), rng.randint(1, size))))
                  for _ in range(rng.randint(0, 6))]
        problem = SourceProblem.set_split(range(1, size + 1), family)
        graph, cert = reduce_source(problem)
        assert hamiltonian(graph) == ssp_feasible(range(1, size + 1), family)
