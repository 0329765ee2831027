#!/usr/bin/env python3
"""Command-line interface for quadrance graphs and their e.c. checks.

Exit codes: 0 pass, 1 property failure, 2 usage or configuration error,
3 internal error. Reports go to stdout or --output; logs go to stderr.
"""

import argparse
import itertools
import logging
import sys
from typing import Any, Callable, Dict, List, Optional, Sequence

from qec.checker import EXHAUSTIVE_MAX_N, CheckMode, EcReport, check_ec, verify_certificate
from qec.config import Config, RunConfig, get_config
from qec.errors import GraphSizeError, NoCompatibleTripleError, NotMaterializedError, NoWitnessError, UnsupportedFieldError
from qec.graph import GraphParams, QuadranceGraph, adjacency_matrix, build, canonical_edge_values, degree, degree_from_spheres, export_edge_list, quadrance, sphere_table
from qec.paley import build_paley, build_quadratic_residue_graph, check_paley_ec, expected_paley_parameters, strongly_regular_parameters, verify_isomorphism
from qec.report import completed_cells, load_cell_report, save_cell_report, sphere_rows, write_report
from qec.solver import THEOREM_MIN_D, THEOREM_MIN_P, Pattern3, count_quadratic_solutions, find_witness, verify_witness
from qec.utils import parse_edge_values, parse_int_list, parse_point, setup_logging
from qec.zmod import is_prime, require_odd_prime

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_INTERNAL = 3

SURVEY_FIELDS = ["m", "d", "n", "mode", "samples", "seed", "verdict", "queries_checked", "elapsed_ms", "theorem_applies", "certificate_verified", "fingerprint"]


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("-v", "--verbose", action="store_true", help="Enable verbose logging")
    parser.add_argument("-o", "--output", default=None, help="Output file path (default: stdout)")
    parser.add_argument("--config", default=None, help="Path to a JSON config file")
    parser.add_argument("--no-timing", action="store_true", help="Serialise elapsed_ms as null for byte-identical reports")


def _add_modulus(parser: argparse.ArgumentParser, required: bool = True) -> None:
    group = parser.add_mutually_exclusive_group(required=required)
    group.add_argument("--p", type=int, help="Odd prime modulus")
    group.add_argument("--m", type=int, help="Any modulus m >= 2")


def _add_sampling(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--samples", type=int, default=None, help="Number of random point tuples in sample mode (default: from config)")
    parser.add_argument("--seed", type=int, default=None, help="Seed for sample mode (default: from config)")
    parser.add_argument("--workers", type=int, default=None, help="Worker threads (default: from config)")
    parser.add_argument("--materialize-limit", type=int, default=None, help="Largest m^d kept as bitsets (default: QEC_MATERIALIZE_LIMIT or 2^21)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qec",
        description="Build quadrance graphs on Z_m^d and check the n-existentially-closed property.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Sampled 3-e.c. check of G_{7,5}
  qec check --p 7 --d 5 --n 3 --mode sample --samples 100000 --seed 42

  # Exhaustive 1-e.c. check of G_{7,2}
  qec check --p 7 --d 2 --n 1 --mode exhaustive

  # Constructive witness for pattern 111
  qec witness --p 7 --d 5 --a 0,0,0,0,0 --b 1,0,0,0,0 --c 0,1,0,0,0 --pattern 111

  # Survey a grid, one CSV row per (m, d, n)
  qec survey --m 7,11 --d 2,3 --n 3 --format csv

  # Sphere sizes and degree of G_{7,3}
  qec spheres --p 7 --d 3

  # Paley isomorphism for p = 7
  qec paley-check --p 7
        """,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    build_cmd = sub.add_parser("build", help="Build a graph and print its summary")
    _add_common(build_cmd)
    _add_modulus(build_cmd)
    build_cmd.add_argument("--d", type=int, required=True, help="Dimension")
    build_cmd.add_argument("--edge-values", default=None, help="'canonical' (default), 'qr', or a comma list of residues")
    build_cmd.add_argument("--edge-list", default=None, help="Also write the edges as 'i j' lines to this path")
    build_cmd.add_argument("--materialize-limit", type=int, default=None, help="Largest m^d kept as bitsets")

    check_cmd = sub.add_parser("check", help="Check the n-e.c. property")
    _add_common(check_cmd)
    _add_modulus(check_cmd)
    check_cmd.add_argument("--d", type=int, required=True, help="Dimension")
    check_cmd.add_argument("--n", type=int, required=True, help="|A| + |B|")
    check_cmd.add_argument("--mode", choices=["exhaustive", "sample"], default="exhaustive", help="Check mode (default: exhaustive)")
    check_cmd.add_argument("--edge-values", default=None, help="'canonical' (default), 'qr', or a comma list of residues")
    check_cmd.add_argument("--full-scan", action="store_true", help="Collect all failures instead of stopping at the first")
    _add_sampling(check_cmd)

    witness_cmd = sub.add_parser("witness", help="Construct a 3-e.c. witness over Z_p^d")
    _add_common(witness_cmd)
    witness_cmd.add_argument("--p", type=int, required=True, help="Odd prime modulus")
    witness_cmd.add_argument("--d", type=int, required=True, help="Dimension")
    witness_cmd.add_argument("--a", required=True, help="Point A as comma-separated residues")
    witness_cmd.add_argument("--b", required=True, help="Point B as comma-separated residues")
    witness_cmd.add_argument("--c", required=True, help="Point C as comma-separated residues")
    witness_cmd.add_argument("--pattern", required=True, help="Three characters from {1,2}: 1 = joined, 2 = not joined")

    survey_cmd = sub.add_parser("survey", help="Check a grid of (m, d, n) cells")
    _add_common(survey_cmd)
    survey_cmd.add_argument("--m", "--p", dest="m", required=True, help="Comma list of moduli")
    survey_cmd.add_argument("--d", required=True, help="Comma list of dimensions")
    survey_cmd.add_argument("--n", required=True, help="Comma list of n values")
    survey_cmd.add_argument("--format", choices=["json", "csv"], default=None, help="Output format (default: from config)")
    survey_cmd.add_argument("--exhaustive-limit", type=int, default=None, help="Largest m^d checked exhaustively (default: from config)")
    survey_cmd.add_argument("--cell-dir", default=None, help="Directory of per-cell JSON files for resuming")
    survey_cmd.add_argument("-r", "--refresh", action="store_true", help="Recompute cells already present in --cell-dir")
    _add_sampling(survey_cmd)

    spheres_cmd = sub.add_parser("spheres", help="Print sphere sizes N_d(u) and the degree of G_{p,d}")
    _add_common(spheres_cmd)
    spheres_cmd.add_argument("--p", type=int, required=True, help="Odd prime modulus")
    spheres_cmd.add_argument("--d", type=int, required=True, help="Dimension")
    spheres_cmd.add_argument("--format", choices=["json", "csv"], default=None, help="Output format (default: from config)")

    paley_cmd = sub.add_parser("paley-check", help="Verify G_{V,p} is the Paley graph of order p^2")
    _add_common(paley_cmd)
    paley_cmd.add_argument("--p", type=int, required=True, help="Odd prime with p = 3 (mod 4)")
    paley_cmd.add_argument("--ec", type=int, default=None, help="Also run the n-e.c. checker with this n")
    _add_sampling(paley_cmd)

    return parser


def parse_arguments(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    """Parse command-line arguments.

    Returns:
        Parsed arguments namespace.
    """
    return build_parser().parse_args(argv)


def _option(args: argparse.Namespace, name: str, config: Config) -> Any:
    value = getattr(args, name, None)
    return config.get(name) if value is None else value


def make_run_config(args: argparse.Namespace, config: Config) -> RunConfig:
    """Merge config defaults with CLI flags and validate the result."""
    m = getattr(args, "m", None)
    p = getattr(args, "p", None)
    if p is not None:
        m = require_odd_prime(p)
    mode = getattr(args, "mode", "exhaustive")
    if getattr(args, "ec", None) is not None:
        mode = "sample" if args.samples is not None else "exhaustive"
    return RunConfig(
        command=args.command,
        m=m if isinstance(m, int) else None,
        d=args.d if isinstance(getattr(args, "d", None), int) else None,
        n=args.n if isinstance(getattr(args, "n", None), int) else getattr(args, "ec", None),
        mode=mode,
        samples=int(_option(args, "samples", config)),
        seed=int(_option(args, "seed", config)),
        materialize_limit=int(_option(args, "materialize_limit", config)),
        bitset_cache_size=int(config.get("bitset_cache_size")),
        bitset_cache_bytes=int(config.get("bitset_cache_bytes")),
        worker_count=int(args.workers if getattr(args, "workers", None) is not None else config.get("max_workers")),
        output_path=args.output,
        output_format=str(args.format if getattr(args, "format", None) else config.get("output_format")),
        report_timing=bool(config.get("report_timing")) and not args.no_timing,
    )


def _check_mode(run: RunConfig) -> CheckMode:
    return CheckMode.sampled(run.samples, run.seed) if run.mode == "sample" else CheckMode.exhaustive()


def _report_dict(graph: QuadranceGraph, report: EcReport, run: RunConfig) -> Dict[str, Any]:
    data = report.to_dict(include_timing=run.report_timing)
    if report.certificate is not None:
        data["certificate_verified"] = verify_certificate(graph, report.certificate)
    return data


def cmd_build(args: argparse.Namespace, run: RunConfig) -> int:
    assert run.m is not None and run.d is not None
    params = GraphParams.of(run.m, run.d, parse_edge_values(args.edge_values, run.m))
    graph = build(params, run.materialize_limit, run.bitset_cache_size, run.bitset_cache_bytes)
    summary: Dict[str, Any] = {
        "m": params.m,
        "d": params.d,
        "edge_values": sorted(params.edge_values),
        "vertex_count": graph.vertex_count,
        "degree": degree(graph),
        "materialized": graph.materialized,
        "fingerprint": params.fingerprint(),
    }
    if args.edge_list:
        summary["edges_written"] = export_edge_list(graph, args.edge_list)
    write_report(summary, "json", run.output_path)
    return EXIT_PASS


def cmd_check(args: argparse.Namespace, run: RunConfig) -> int:
    """Run check_ec; exit 0 on pass and 1 on fail."""
    assert run.m is not None and run.d is not None and run.n is not None
    params = GraphParams.of(run.m, run.d, parse_edge_values(args.edge_values, run.m))
    graph = build(params, run.materialize_limit, run.bitset_cache_size, run.bitset_cache_bytes)
    report = check_ec(graph, run.n, _check_mode(run), run.worker_count, full_scan=args.full_scan)
    write_report(_report_dict(graph, report, run), "json", run.output_path)
    return EXIT_PASS if report.passed else EXIT_FAIL


def cmd_witness(args: argparse.Namespace, run: RunConfig, config: Config) -> int:
    """Construct and verify a witness; exit 0 when it satisfies every postcondition."""
    assert run.m is not None and run.d is not None
    p, d = run.m, run.d
    a, b, c = (parse_point(text, p, d) for text in (args.a, args.b, args.c))
    pattern = Pattern3.parse(args.pattern)
    result = find_witness(a, b, c, pattern)
    x, plan = result.x, result.plan
    verified = verify_witness(x, a, b, c, pattern)
    try:
        solution_count: Optional[int] = count_quadratic_solutions(plan, a, int(config.get("enumeration_budget")))
    except GraphSizeError as e:
        logging.info(f"Skipping solution count: {e}")
        solution_count = None
    data = {
        "p": p,
        "d": d,
        "A": list(a.coords),
        "B": list(b.coords),
        "C": list(c.coords),
        "pattern": str(pattern),
        "X": list(x.coords),
        "quadrances": [quadrance(x, a), quadrance(x, b), quadrance(x, c)],
        "u": plan.u,
        "v": plan.v,
        "w": plan.w,
        "case": plan.case_tag,
        "t": plan.dependence.t,
        "a": plan.a,
        "attempts": result.attempts,
        "solution_count": solution_count,
        "within_theorem": result.within_theorem,
        "verified": verified,
    }
    write_report(data, "json", run.output_path)
    return EXIT_PASS if verified else EXIT_FAIL


def theorem_applies(m: int, d: int, n: int) -> bool:
    return is_prime(m) and m >= THEOREM_MIN_P and d >= THEOREM_MIN_D and n <= 3


def survey_cell(m: int, d: int, n: int, run: RunConfig, exhaustive_limit: int) -> Dict[str, Any]:
    """Check one (m, d, n) cell, exhaustively when m^d is within the limit."""
    graph = build(GraphParams.canonical(m, d), run.materialize_limit, run.bitset_cache_size, run.bitset_cache_bytes)
    row: Dict[str, Any] = {"m": m, "d": d, "n": n, "theorem_applies": theorem_applies(m, d, n), "fingerprint": graph.params.fingerprint()}
    if graph.vertex_count < n + 1:
        logging.warning(f"Skipping cell (m={m}, d={d}, n={n}): only {graph.vertex_count} vertices")
        row.update({"mode": "none", "verdict": "too-small", "queries_checked": 0, "elapsed_ms": None})
        return row
    exhaustive = graph.materialized and graph.vertex_count <= exhaustive_limit and n <= EXHAUSTIVE_MAX_N
    mode = CheckMode.exhaustive() if exhaustive else CheckMode.sampled(run.samples, run.seed)
    report = check_ec(graph, n, mode, run.worker_count)
    data = _report_dict(graph, report, run)
    for key in ("mode", "samples", "seed", "verdict", "queries_checked", "elapsed_ms", "certificate", "certificate_verified"):
        if key in data:
            row[key] = data[key]
    return row


def cmd_survey(args: argparse.Namespace, run: RunConfig, config: Config) -> int:
    """Check every cell of the grid; report-only, exit 0 unless the grid itself is invalid."""
    ms, ds, ns = parse_int_list(args.m), parse_int_list(args.d), parse_int_list(args.n)
    exhaustive_limit = int(args.exhaustive_limit if args.exhaustive_limit is not None else config.get("survey_exhaustive_limit"))
    if args.cell_dir and not args.refresh:
        done = completed_cells(args.cell_dir)
        if done:
            logging.info(f"Found {len(done)} completed cells in {args.cell_dir} (use --refresh to recompute)")

    rows: List[Dict[str, Any]] = []
    for m, d, n in itertools.product(ms, ds, ns):
        cached = load_cell_report(args.cell_dir, m, d, n) if args.cell_dir and not args.refresh else None
        if cached is not None:
            logging.info(f"Reusing saved cell (m={m}, d={d}, n={n})")
            rows.append(cached)
            continue
        row = survey_cell(m, d, n, run, exhaustive_limit)
        logging.info(f"Cell (m={m}, d={d}, n={n}): {row['verdict']} ({row['mode']})")
        if args.cell_dir:
            save_cell_report(args.cell_dir, m, d, n, row)
        rows.append(row)

    write_report(rows, run.output_format, run.output_path, fieldnames=SURVEY_FIELDS)
    return EXIT_PASS


def cmd_spheres(args: argparse.Namespace, run: RunConfig) -> int:
    assert run.m is not None and run.d is not None
    table = sphere_table(run.m, run.d)
    graph_degree = degree_from_spheres(table, sorted(canonical_edge_values(run.m)))
    logging.info(f"G_({run.m},{run.d}) has degree {graph_degree}")
    if run.output_format == "csv":
        write_report(sphere_rows(table.counts), "csv", run.output_path, fieldnames=["u", "count"])
    else:
        write_report({"p": table.p, "d": table.d, "counts": list(table.counts), "total": table.total, "degree": graph_degree}, "json", run.output_path)
    return EXIT_PASS


def cmd_paley_check(args: argparse.Namespace, run: RunConfig) -> int:
    """Verify the isomorphism (and optionally n-e.c.); exit 2 when p = 1 (mod 4)."""
    assert run.m is not None
    p = run.m
    try:
        paley = build_paley(p)
    except UnsupportedFieldError as e:
        logging.error(str(e))
        write_report({"p": p, "supported": False, "isomorphic": None}, "json", run.output_path)
        return EXIT_USAGE

    result = verify_isomorphism(p)
    graph = build_quadratic_residue_graph(p, run.materialize_limit)
    data: Dict[str, Any] = {
        "p": p,
        "supported": True,
        "isomorphic": result.isomorphic,
        "pairs_checked": result.pairs_checked,
        "quadrance_srg": strongly_regular_parameters(adjacency_matrix(graph)),
        "paley_srg": strongly_regular_parameters(paley.adjacency_matrix()),
        "expected_srg": expected_paley_parameters(paley.q),
    }
    if result.counterexample is not None:
        data["counterexample"] = [list(x.coords) for x in result.counterexample]
    passed = result.isomorphic
    if run.n is not None:
        report = check_paley_ec(p, run.n, _check_mode(run), run.worker_count)
        data["ec"] = _report_dict(graph, report, run)
        passed = passed and report.passed
    write_report(data, "json", run.output_path)
    return EXIT_PASS if passed else EXIT_FAIL


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point for the CLI.

    Returns:
        Exit code (0 pass, 1 property failure, 2 usage error, 3 internal error).
    """
    args = parse_arguments(argv)
    config = get_config(args.config)
    setup_logging(args.verbose or bool(config.get("verbose")))

    try:
        run = make_run_config(args, config)
        commands: Dict[str, Callable[[], int]] = {
            "build": lambda: cmd_build(args, run),
            "check": lambda: cmd_check(args, run),
            "witness": lambda: cmd_witness(args, run, config),
            "survey": lambda: cmd_survey(args, run, config),
            "spheres": lambda: cmd_spheres(args, run),
            "paley-check": lambda: cmd_paley_check(args, run),
        }
        return commands[args.command]()
    except (NoCompatibleTripleError, NoWitnessError) as e:
        logging.error(f"{args.command}: {e}")
        return EXIT_FAIL
    except (ValueError, NotMaterializedError) as e:
        logging.error(f"{args.command}: {e}")
        return EXIT_USAGE
    except Exception as e:
        logging.exception(f"{args.command}: internal error: {e}")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
