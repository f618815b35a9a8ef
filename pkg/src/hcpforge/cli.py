"""Command-line front end: generate, convert, reduce, decode, harden,
bench, verify and report subcommands.

Exit codes: 0 success (verify: valid), 1 verify invalid or decode failure,
2 usage errors, 3 file parse errors.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import sys
from pathlib import Path

from .bench import BenchmarkPlan, load_records, make_result_table, resolve_solver, run_bench
from .cnf import ProblemKind, parse_source_text
from .external import ExternalSolverSpec, run_external
from .families import Family, FamilySpec, generate
from .graphs import CertificateError, Graph, is_hamiltonian_cycle
from .hardening import (
    HardeningConfig,
    exact_in_loop,
    harden,
    hardening_summary,
    heuristic_in_loop,
)
from .reduction import decode_hc, read_certificate, reduce_source, write_certificate
from .solvers import SolveBudget, SolverOutcome, SolverStatus
from .tsplib import (
    ParseError,
    graph_to_tsp,
    read_hcp,
    read_tour,
    tour_length,
    write_hcp,
    write_tour,
    write_tsp,
)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_USAGE = 2
EXIT_PARSE = 3


def _common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=None, help="master RNG seed")
    parser.add_argument("--out", type=Path, default=None, help="output directory")
    parser.add_argument("--budget-secs", type=float, default=None,
                        help="wall-clock cap per solve")
    parser.add_argument("--budget-nodes", type=int, default=None,
                        help="search-node cap per solve (deterministic)")
    parser.add_argument("--mem-cap-mb", type=int, default=None,
                        help="virtual memory cap for external solvers")
    parser.add_argument("--workers", type=int, default=None, help="worker pool size")
    parser.add_argument("--relabellings", type=int, default=None,
                        help="random relabellings per instance")


def _budget(args, default_secs: float = 60.0) -> SolveBudget:
    mem = args.mem_cap_mb * 1024 * 1024 if args.mem_cap_mb else None
    if args.budget_secs is None and args.budget_nodes is not None:
        return SolveBudget(max_nodes=args.budget_nodes, mem_bytes=mem)
    return SolveBudget(wall_secs=args.budget_secs or default_secs,
                       max_nodes=args.budget_nodes, mem_bytes=mem)


def _out_dir(args) -> Path:
    out = args.out or Path(".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _describe(expected) -> str:
    def show(value, yes="yes", no="no"):
        if value is None:
            return "unknown"
        if isinstance(value, bool):
            return yes if value else no
        return str(value)

    return (f"expected: hamiltonian={show(expected.hamiltonian)} "
            f"hc_count={show(expected.hc_count)} "
            f"optimal_tsp_length={show(expected.optimal_tsp_length)}")


def cmd_generate(args) -> int:
    params = {}
    for key in ("p", "k", "n", "d"):
        value = getattr(args, key)
        if value is not None:
            params[key] = value
    spec = FamilySpec(Family[args.family], params, args.seed)
    try:
        inst = generate(spec)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out = _out_dir(args)
    hcp_path = out / f"{inst.graph.name}.hcp"
    write_hcp(inst.graph, hcp_path)
    print(f"wrote {hcp_path} (n={inst.graph.n}, m={inst.graph.m})")
    if args.tsp:
        tsp_path = out / f"{inst.graph.name}.tsp"
        write_tsp(graph_to_tsp(inst.graph), tsp_path)
        print(f"wrote {tsp_path}")
    if inst.planted is not None:
        tour_path = out / f"{inst.graph.name}.tour"
        write_tour(inst.planted, tour_path, name=f"{inst.graph.name} planted cycle")
        print(f"wrote {tour_path} (planted cycle)")
    print(_describe(inst.expected))
    return EXIT_OK


def cmd_convert(args) -> int:
    g = read_hcp(args.instance)
    out = _out_dir(args)
    path = out / f"{g.name or args.instance.stem}.tsp"
    write_tsp(graph_to_tsp(g), path)
    print(f"wrote {path} (dimension {g.n})")
    return EXIT_OK


def cmd_reduce(args) -> int:
    kind = ProblemKind[args.kind.upper()]
    problem = parse_source_text(kind, Path(args.input).read_text())
    graph, cert = reduce_source(problem)
    out = _out_dir(args)
    hcp_path = out / f"{graph.name}.hcp"
    cert_path = out / f"{graph.name}.cert.json"
    write_hcp(graph, hcp_path)
    write_certificate(cert, cert_path)
    print(f"wrote {hcp_path} (n={graph.n}, m={graph.m})")
    print(f"wrote {cert_path}")
    return EXIT_OK


def cmd_decode(args) -> int:
    cert = read_certificate(args.cert)
    tour = read_tour(args.tour, cert.graph.n)
    try:
        solution = decode_hc(cert, tour)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    print(f"valid {cert.problem.kind.value} solution:")
    print(solution.render())
    return EXIT_OK


def _in_loop_solver(name: str, budget: SolveBudget):
    if name == "exact":
        return exact_in_loop(budget)
    if name == "heuristic":
        return heuristic_in_loop(budget)
    spec = ExternalSolverSpec(command=name)

    def solve(g: Graph, seed: int) -> SolverOutcome:
        import tempfile

        with tempfile.TemporaryDirectory(prefix="hcpforge-harden-") as tmp:
            path = Path(tmp) / "instance.hcp"
            write_hcp(g, path)
            return run_external(spec, path, seed=seed, budget=budget, graph=g)

    return solve


def cmd_harden(args) -> int:
    from .families import gen_planted_cubic

    if args.size % 2 != 0 or args.size < 4:
        print(f"error: size must be even and at least 4, got {args.size}",
              file=sys.stderr)
        return EXIT_USAGE
    if args.samples < 1:
        print("error: need at least one sample", file=sys.stderr)
        return EXIT_USAGE
    budget = _budget(args, default_secs=10.0)
    solver = _in_loop_solver(args.solver, budget)
    master_seed = args.seed or 0
    out = _out_dir(args)
    reports = []
    rows = []
    for sample in range(args.samples):
        sample_seed = master_seed * 1_000_003 + sample
        inst = gen_planted_cubic(args.size, seed=sample_seed)
        try:
            report = harden(inst, HardeningConfig(solver=solver,
                                                  max_count=args.max_count,
                                                  seed=sample_seed))
        except Exception as exc:
            print(f"sample {sample}: failed ({exc})", file=sys.stderr)
            rows.append((sample, sample_seed, "failed", "", "", "", ""))
            continue
        stem = f"PC_{args.size}_s{sample:04d}"
        write_hcp(report.final_graph.with_name(stem), out / f"{stem}.hcp")
        write_tour(report.planted, out / f"{stem}.tour", name=f"{stem} planted cycle")
        reports.append(report)
        rows.append((sample, sample_seed, "ok", report.edges_removed,
                     report.failures_in_final_window,
                     f"{report.average_degree:.3f}",
                     "trivial" if report.trivial else "hard"))
    with open(out / "samples.csv", "w", newline="", encoding="ascii") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sample", "seed", "status", "edges_removed",
                         "failures_in_final_window", "average_degree", "difficulty"])
        writer.writerows(rows)
    if not reports:
        print("error: all samples failed", file=sys.stderr)
        return EXIT_INVALID
    summary = hardening_summary(reports)
    (out / "harden_summary.md").write_text(summary.markdown() + "\n", encoding="ascii")
    with open(out / "harden_summary.csv", "w", newline="", encoding="ascii") as fh:
        writer = csv.writer(fh)
        writer.writerow(summary.columns)
        writer.writerow(summary.row())
    print(summary.markdown())
    trivial = sum(1 for r in reports if r.trivial)
    print(f"{trivial}/{len(reports)} instances flagged trivial (no failures); "
          "discard them when building a difficult benchmark set")
    return EXIT_OK


def _load_plan_file(path: Path):
    parser = configparser.ConfigParser(allow_no_value=True,
                                       inline_comment_prefixes=("#",))
    parser.optionxform = str  # keep case of solver names and paths
    with open(path) as fh:
        parser.read_file(fh)
    plan = dict(parser["plan"]) if parser.has_section("plan") else {}
    instances = []
    if parser.has_section("instances"):
        for key, value in parser["instances"].items():
            instances.append(Path(value if value else key))
    solvers = []
    if parser.has_section("solvers"):
        for name, spec in parser["solvers"].items():
            solvers.append((name, spec))
    return plan, instances, solvers


def cmd_bench(args) -> int:
    plan_options: dict = {}
    instances: list[Path] = []
    solver_texts: list[tuple[str, str]] = []
    if args.plan:
        plan_options, instances, solver_texts = _load_plan_file(args.plan)
    instances.extend(args.instances)
    for item in args.solver or []:
        if "=" not in item:
            print(f"error: --solver expects NAME=SPEC, got {item!r}", file=sys.stderr)
            return EXIT_USAGE
        name, spec = item.split("=", 1)
        solver_texts.append((name.strip(), spec.strip()))

    def option(cli_value, key, cast, default):
        if cli_value is not None:
            return cli_value
        if key in plan_options and plan_options[key] is not None:
            return cast(plan_options[key])
        return default

    seed = option(args.seed, "seed", int, 0)
    relabellings = option(args.relabellings, "relabellings", int, 100)
    budget_secs = option(args.budget_secs, "budget-secs", float, None)
    budget_nodes = option(args.budget_nodes, "budget-nodes", int, None)
    mem_cap_mb = option(args.mem_cap_mb, "mem-cap-mb", int, None)
    workers = option(args.workers, "workers", int, 1)
    out = args.out or (Path(plan_options["out"]) if plan_options.get("out") else Path("."))
    out.mkdir(parents=True, exist_ok=True)

    if budget_secs is None and budget_nodes is None:
        budget_secs = 60.0
    budget = SolveBudget(wall_secs=budget_secs, max_nodes=budget_nodes,
                         mem_bytes=mem_cap_mb * 1024 * 1024 if mem_cap_mb else None)
    try:
        solvers = tuple((name, resolve_solver(text)) for name, text in solver_texts)
        plan = BenchmarkPlan(
            instances=tuple(instances),
            solvers=solvers,
            relabellings=relabellings,
            budget=budget,
            master_seed=seed,
            out_dir=out,
            workers=workers,
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    done = 0

    def progress(record) -> None:
        nonlocal done
        done += 1
        if done % 50 == 0:
            print(f"  {done} trials completed", file=sys.stderr)

    table = run_bench(plan, progress=progress)
    print(table.to_markdown())
    print(f"records: {out / 'records.jsonl'}")
    return EXIT_OK


def cmd_verify(args) -> int:
    g = read_hcp(args.instance)
    tour = read_tour(args.tour, g.n)
    length = tour_length(graph_to_tsp(g), tour)
    valid = is_hamiltonian_cycle(g, tour)
    verdict = "valid Hamiltonian cycle" if valid else "not a Hamiltonian cycle"
    print(f"{verdict}; binary-TSP tour length {length}")
    return EXIT_OK if valid else EXIT_INVALID


def cmd_report(args) -> int:
    records = list(load_records(args.records).values())
    if not records:
        print("error: no records found", file=sys.stderr)
        return EXIT_USAGE
    table = make_result_table(records)
    out = _out_dir(args)
    table.write_csv(out / "results.csv")
    (out / "results.md").write_text(table.to_markdown() + "\n", encoding="ascii")
    print(table.to_markdown())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hcpforge",
        description="Generate, convert, harden and benchmark difficult "
                    "Hamiltonian cycle / binary TSP instances.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate an instance family member")
    p.add_argument("--family", required=True, choices=[f.name for f in Family])
    p.add_argument("-p", type=int, default=None, help="Petersen parameter p")
    p.add_argument("-k", type=int, default=None, help="snark parameter k")
    p.add_argument("-n", type=int, default=None, help="vertex count")
    p.add_argument("-d", type=int, default=None, help="regular degree")
    p.add_argument("--tsp", action="store_true", help="also write the binary TSP file")
    _common_flags(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("convert", help="convert an .hcp instance to binary TSP")
    p.add_argument("instance", type=Path)
    _common_flags(p)
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("reduce", help="reduce a source problem to an HCP instance")
    p.add_argument("--kind", required=True, choices=["col3", "qn", "ssp", "ii"])
    p.add_argument("input", type=Path)
    _common_flags(p)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("decode", help="decode a tour of a reduced instance")
    p.add_argument("--cert", type=Path, required=True)
    p.add_argument("--tour", type=Path, required=True)
    _common_flags(p)
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("harden", help="harden random planted instances against a solver")
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--samples", type=int, default=1)
    p.add_argument("--solver", default="heuristic",
                   help="exact, heuristic, or an external command template")
    p.add_argument("--max-count", type=int, default=100)
    _common_flags(p)
    p.set_defaults(func=cmd_harden)

    p = sub.add_parser("bench", help="run a benchmark sweep")
    p.add_argument("instances", nargs="*", type=Path)
    p.add_argument("--plan", type=Path, default=None, help="declarative plan file")
    p.add_argument("--solver", action="append", metavar="NAME=SPEC",
                   help="builtin:exact, builtin:heuristic, or a command template")
    _common_flags(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("verify", help="verify a tour file against an instance")
    p.add_argument("instance", type=Path)
    p.add_argument("tour", type=Path)
    _common_flags(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("report", help="rebuild result tables from a records log")
    p.add_argument("--records", type=Path, required=True)
    _common_flags(p)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except CertificateError as exc:
        print(f"certificate error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
