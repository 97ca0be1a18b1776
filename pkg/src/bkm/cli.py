"""Command-line harness: ``bkm list | run <case> | run-all | solve <problem-file>``.

Exit codes: 0 success, 1 solver failure, 2 bad arguments or configuration.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from pathlib import Path

from .bench_cases import DEFAULT, BenchmarkCase, CaseError, CaseResult, all_cases, get_case, run_case, tabulate
from .config import ConfigError, load_problem, parse_interior
from .expr import ExpressionError
from .solver import CoupledDRM, KnownRhsDRM, solve

CSV_COLUMNS = ("case", "x", "y", "computed", "exact", "abs_err", "rel_err", "paper_bkm", "paper_competitor")


class UsageError(Exception):
    """Bad input detected after argument parsing; reported like an argparse error."""


def _knot_count(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid knot count {text!r}") from None
    if n < 3:
        raise argparse.ArgumentTypeError(f"need at least 3 boundary knots, got {n}")
    return n


def _shape(text: str) -> float:
    try:
        c = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid shape parameter {text!r}") from None
    if not (c > 0 and math.isfinite(c)):
        raise argparse.ArgumentTypeError(f"shape parameter must be positive, got {text}")
    return c


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bkm", description="Boundary knot method solver and benchmark harness.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    output = argparse.ArgumentParser(add_help=False)
    output.add_argument("--format", choices=("markdown", "csv", "json"), default="markdown")
    output.add_argument("--out", type=Path, help="also write the output to this file")
    output.add_argument("--show-condition", action="store_true", help="report the 1-norm condition estimate")

    knots = argparse.ArgumentParser(add_help=False)
    knots.add_argument("--boundary-knots", type=_knot_count, metavar="N")
    knots.add_argument(
        "--interior",
        metavar="LAYOUT",
        help="none | table | ring:scale:count[:offset] | file:path, combined with '+'",
    )
    knots.add_argument("--shape", type=_shape, metavar="C", help="multiquadric shape parameter")

    sub.add_parser("list", help="list the benchmark cases")

    run = sub.add_parser("run", parents=[knots, output], help="run one benchmark case")
    run.add_argument("case", choices=[c.name for c in all_cases()])
    run.add_argument("--compare-paper", action="store_true", help="add published columns and a PASS/FAIL line")

    run_all = sub.add_parser("run-all", parents=[output], help="run every benchmark with its default settings")
    run_all.add_argument("--compare-paper", action="store_true", help="add published columns and a PASS/FAIL line")

    prob = sub.add_parser("solve", parents=[knots, output], help="solve a problem described in a YAML/JSON file")
    prob.add_argument("problem", type=Path, metavar="PROBLEM_FILE")
    return parser


def list_cases() -> str:
    cases = all_cases()
    width = max(len(c.name) for c in cases)
    return "".join(f"{c.name:<{width}}  {c.table:<8}  {c.description}\n" for c in cases)


# -- formatting ---------------------------------------------------------------

def _num(v, fmt: str) -> str:
    if v is None:
        return "-"
    if isinstance(v, float) and math.isnan(v):
        return "nan"
    text = format(v, fmt)
    if text.startswith("-") and float(text) == 0:
        text = text[1:]  # no "-0.000" for tiny negatives
    return text


def _markdown_table(header, rows) -> str:
    lines = ["| " + " | ".join(header) + " |", "|" + "|".join("---" for _ in header) + "|"]
    lines += ["| " + " | ".join(r) + " |" for r in rows]
    return "\n".join(lines) + "\n"


def _criterion_line(res: CaseResult) -> str:
    name, tol = res.criterion
    verdict = "PASS" if res.passed else "FAIL"
    return f"{verdict}: {name} = {res.metric(name):.3e} (tolerance {tol:.1e})\n"


def _markdown(res: CaseResult, title: str, compare: bool, show_condition: bool) -> str:
    head = f"## {title}: {res.n_boundary} boundary + {res.n_interior} interior knots"
    if res.shape is not None:
        head += f", c = {res.shape:g}"
    out = [head + "\n\n"]
    if compare and res.reference_kind == "rel_err":
        # published columns are relative errors; three decimals would erase them
        label = res.paper_label or "BKM (published)"
        header = ["x", "y", "computed", "exact", "rel_err", label, res.competitor_label]
        rows = [
            [_num(r.x, ".1f"), _num(r.y, ".2f"), _num(r.computed, ".3f"), _num(r.exact, ".3f"),
             _num(r.rel_err, ".1e"), _num(r.paper_bkm, ".1e"), _num(r.paper_competitor, ".1e")]
            for r in res.rows
        ]
    elif compare:
        label = res.paper_label or "BKM (published)"
        header = ["x", "y", "exact", f"computed ({res.total_knots})", label, res.competitor_label]
        rows = [
            [_num(r.x, ".1f"), _num(r.y, ".2f"), _num(r.exact, ".3f"), _num(r.computed, ".3f"),
             _num(r.paper_bkm, ".3f"), _num(r.paper_competitor, ".3f")]
            for r in res.rows
        ]
    else:
        header = ["x", "y", "computed", "exact", "abs_err", "rel_err"]
        rows = [
            [_num(r.x, "g"), _num(r.y, "g"), _num(r.computed, ".6f"), _num(r.exact, ".6f"),
             _num(r.abs_err, ".2e"), _num(r.rel_err, ".2e")]
            for r in res.rows
        ]
    out.append(_markdown_table(header, rows))
    out.append(
        f"\nmax abs error {res.max_abs:.3e}, avg abs error {res.avg_abs:.3e}, "
        f"max rel error {res.max_rel:.3e}, avg rel error {res.avg_rel:.3e}\n"
    )
    if show_condition:
        out.append(f"condition estimate (1-norm): {res.condition:.3e}\n")
    if compare and res.criterion is not None:
        out.append(_criterion_line(res))
    return "".join(out)


def _csv_rows(res: CaseResult):
    def cell(v):
        if v is None:
            return ""
        return repr(float(v))

    for r in res.rows:
        yield [res.case] + [cell(getattr(r, k)) for k in CSV_COLUMNS[1:]]


def _csv(results: list[CaseResult]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for res in results:
        writer.writerows(_csv_rows(res))
    return buf.getvalue()


def _json_value(v):
    if v is None or (isinstance(v, float) and not math.isfinite(v)):
        return None
    return v


def _json_record(res: CaseResult, config: dict, compare: bool) -> dict:
    rec = {
        "case": res.case,
        "config": config,
        "points": [
            {k: _json_value(getattr(r, k)) for k in CSV_COLUMNS[1:]}
            for r in res.rows
        ],
        "summary": {k: _json_value(v) for k, v in res.summary().items()},
        "condition": _json_value(res.condition),
        "wall_time_ms": res.wall_time_ms,
    }
    if compare and res.criterion is not None:
        name, tol = res.criterion
        rec["criterion"] = {"metric": name, "tolerance": tol, "value": res.metric(name), "passed": bool(res.passed)}
    return rec


def _config(res: CaseResult, interior_text: str | None) -> dict:
    return {
        "boundary_knots": res.n_boundary,
        "interior_knots": res.n_interior,
        "interior": interior_text,
        "shape": res.shape,
    }


# -- commands -----------------------------------------------------------------

def _case_layout(case: BenchmarkCase, text: str | None):
    if text is None:
        return DEFAULT
    layout = parse_interior(text, table=case.table_layout())
    if layout is not None and case.boundary_only:
        raise UsageError(f"case {case.name!r} uses boundary knots only; --interior must be 'none'")
    return layout


def _run(case: BenchmarkCase, args, interior_text=None, n_boundary=None, shape=None) -> CaseResult:
    layout = _case_layout(case, interior_text)
    if shape is not None and not isinstance(case.mode, (KnownRhsDRM, CoupledDRM)):
        raise UsageError(f"case {case.name!r} has no shape parameter")
    return run_case(case, n_boundary, layout, shape)


def _solve_file(args) -> CaseResult:
    problem = load_problem(args.problem, args.boundary_knots, args.interior, args.shape)
    start = time.perf_counter()
    sol = solve(problem.spec)
    elapsed = (time.perf_counter() - start) * 1e3
    spec = problem.spec
    return CaseResult(
        case=problem.name,
        n_boundary=spec.n_boundary,
        n_interior=len(sol.interior),
        shape=spec.shape if isinstance(spec.mode, (KnownRhsDRM, CoupledDRM)) else None,
        rows=tabulate(sol, problem.points, problem.exact),
        condition=sol.condition_estimate(),
        wall_time_ms=elapsed,
    )


def _render(results, args, titles, configs) -> str:
    compare = getattr(args, "compare_paper", False)
    if args.format == "csv":
        return _csv(results)
    if args.format == "json":
        records = [_json_record(r, c, compare) for r, c in zip(results, configs)]
        payload = records[0] if args.command != "run-all" else records
        return json.dumps(payload, indent=2) + "\n"
    return "\n".join(_markdown(r, t, compare, args.show_condition) for r, t in zip(results, titles))


def _execute(args) -> str:
    if args.command == "list":
        return list_cases()
    if args.command == "run":
        case = get_case(args.case)
        res = _run(case, args, args.interior, args.boundary_knots, args.shape)
        return _render([res], args, [f"{case.name} ({case.table})"], [_config(res, args.interior)])
    if args.command == "run-all":
        cases = all_cases()
        results = [_run(case, args) for case in cases]
        return _render(results, args, [f"{c.name} ({c.table})" for c in cases], [_config(r, None) for r in results])
    res = _solve_file(args)
    return _render([res], args, [res.case], [_config(res, args.interior)])


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        text = _execute(args)
    except (UsageError, ConfigError, ExpressionError) as exc:
        parser.print_usage(sys.stderr)
        print(f"bkm: error: {exc}", file=sys.stderr)
        return 2
    except CaseError as exc:
        if not isinstance(exc.cause, ArithmeticError):
            # bad geometry or layout rather than a numerical breakdown
            parser.print_usage(sys.stderr)
            print(f"bkm: error: {exc}", file=sys.stderr)
            return 2
        print(f"bkm: solver failure: {exc}", file=sys.stderr)
        return 1
    except ArithmeticError as exc:
        print(f"bkm: solver failure: {exc}", file=sys.stderr)
        return 1
    except (ValueError, TypeError) as exc:
        parser.print_usage(sys.stderr)
        print(f"bkm: error: {exc}", file=sys.stderr)
        return 2

    sys.stdout.write(text)
    if args.command != "list" and args.out is not None:
        try:
            args.out.write_text(text)
        except OSError as exc:
            print(f"bkm: error: cannot write {args.out}: {exc}", file=sys.stderr)
            return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
