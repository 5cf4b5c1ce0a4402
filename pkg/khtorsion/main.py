#!/usr/bin/env python3
"""
khtorsion command line tool.

Usage:
    khtorsion homology <diagram file> [--basepoint ARC]
    khtorsion movie <movie file> [--checks theorem1 neck ...] [--at MOVE]
    khtorsion batch [<table file or directory>] [--workers N]

Shared options (all after the subcommand): --prime, --format, --log-level,
--timing. Each option also reads KHT_<NAME> from the environment, e.g.
KHT_PRIME=10007 or KHT_FORMAT=text.

Exit status: 0 success, 1 a check failed, 2 input error, 3 internal error.

Examples:
    khtorsion homology trefoil.pd
    khtorsion movie khtorsion/corpus/ribbon.json --checks theorem1 ribbon corollary
    khtorsion batch --format text --workers 4
"""
import json
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .algebra import Summand
from .argparse_conf import create_parser
from .complex import build_complex
from .diagram import crossing_signs, diagram_from_json, load_diagram
from .errors import ConfigError, KhtError, MalformedPD, NoSuchHandle, NotReversePair
from .homology import (
    chain_euler_characteristic,
    graded_euler_characteristic,
    homology,
    predicted_t0_dimensions,
    predicted_t1_dimensions,
    specialize_bigraded,
    specialize_dimension,
)
from .models import RunConfig
from .movie import Movie, load_movie
from .verify import (
    CheckReport,
    check_ribbon_injective,
    corollary_bounds,
    find_saddle_pairs,
    verify_neck_cutting,
    verify_reverse_saddles,
    verify_theorem1,
)
from ._version import __version__

logger = logging.getLogger(__name__)

REPORT_SCHEMA = 1
TABLE_FILE = "knots.json"


@dataclass
class Report:
    """Outcome of one command, printed as JSON or text."""
    command: str
    input: Optional[str]
    config: Optional[RunConfig]
    results: Any = None
    passed: bool = True
    exit_code: int = 0
    timing: Optional[Dict[str, float]] = None
    error: Optional[Dict[str, Any]] = None

    def to_json(self) -> Dict[str, Any]:
        out = {
            "schema": REPORT_SCHEMA,
            "command": self.command,
            "input": self.input,
            "config": self.config.to_json() if self.config else None,
            "pass": self.passed,
            "results": self.results,
        }
        if self.timing is not None:
            out["timing"] = self.timing
        if self.error is not None:
            out["error"] = self.error
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, ensure_ascii=False)


def _error_json(e: Exception) -> Dict[str, Any]:
    out = {"type": type(e).__name__, "message": str(e)}
    if getattr(e, "move_index", None) is not None:
        out["move_index"] = e.move_index
    return out


def _by_degree(dims: Dict[int, int]) -> Dict[str, int]:
    return {str(i): d for i, d in sorted(dims.items())}


def _summand_text(s: Summand) -> str:
    i, j = s.grade
    if s.is_free:
        return f"F[x]{{{i},{j}}}"
    return f"F[x]/(x^{s.order}){{{i},{j}}}"


def _homology_results(d, p: int) -> Dict[str, Any]:
    """Everything cmd_homology and cmd_batch report for one knot diagram."""
    c = build_complex(d, p)
    h = homology(c)
    t0 = specialize_dimension(c, 0)
    t1 = specialize_dimension(c, 1)
    predicted_t0 = predicted_t0_dimensions(h)
    predicted_t1 = predicted_t1_dimensions(h)
    euler = graded_euler_characteristic(specialize_bigraded(c))
    chain_euler = chain_euler_characteristic(c)
    n_plus, n_minus = crossing_signs(d)
    results = {
        "diagram": d.render(),
        "crossings": len(d.crossings),
        "n_plus": n_plus,
        "n_minus": n_minus,
        "basepoint": d.basepoint,
        "decomposition": [_summand_text(s) for s in h.decomposition.summands],
        "ul_b_lower_bound": f"ul_b(K) >= {h.xo}",
        "t0_dimensions": _by_degree(t0),
        "t0_predicted": _by_degree(predicted_t0),
        "t1_dimensions": _by_degree(t1),
        "t1_predicted": _by_degree(predicted_t1),
        "jones_unnormalized": {str(j): v for j, v in euler.items()},
        "consistent": t0 == predicted_t0 and t1 == predicted_t1 and euler == chain_euler,
    }
    results.update(h.summary())
    if not results["consistent"]:
        logger.warning("specializations of %s disagree with its decomposition", d.render())
    return results


def cmd_homology(input: str, cfg: RunConfig) -> Report:
    """Kh_t of one knot diagram, its torsion order and the band-unlinking bound.

    Raises:
        OSError: if the file cannot be read.
        InputError: for unusable diagram text.
        InternalError: for broken invariants (d^2, homogeneity, torsion shape).
    """
    start = time.perf_counter()
    d = load_diagram(input, cfg.basepoint)
    results = _homology_results(d, cfg.prime)
    report = Report("homology", str(input), cfg, results, results["consistent"])
    report.exit_code = 0 if report.passed else 1
    if cfg.timing:
        report.timing = {"total_seconds": round(time.perf_counter() - start, 3)}
    logger.info("homology of %s: xo=%d", d.render(), results["xo"])
    return report


def _pair_checks(mov: Movie, check: str, at: Optional[int], p: int) -> List[CheckReport]:
    verify = verify_neck_cutting if check == "neck" else verify_reverse_saddles
    if at is not None:
        return [verify(mov, at, p)]
    reports = []
    for k in find_saddle_pairs(mov):
        try:
            reports.append(verify(mov, k, p))
        except (NoSuchHandle, NotReversePair):
            logger.debug("moves %d, %d are not a %s instance", k, k + 1, check)
    if not reports:
        error = NoSuchHandle if check == "neck" else NotReversePair
        raise error(f"movie {mov.name or '<unnamed>'} has no {check} instance")
    return reports


def _run_check(mov: Movie, check: str, at: Optional[int], p: int) -> List[CheckReport]:
    if check == "theorem1":
        return [verify_theorem1(mov, p)]
    if check in ("neck", "reverse-saddles"):
        return _pair_checks(mov, check, at, p)
    if check == "ribbon":
        return [check_ribbon_injective(mov, p)]
    return [corollary_bounds(mov.frames[0], mov, p)]


def cmd_movie(input: str, checks: Sequence[str], cfg: RunConfig, at: Optional[int] = None) -> Report:
    """Build a movie from its file and run the requested checks on its maps.

    Raises:
        OSError: if the file cannot be read.
        InputError: for a bad movie or a check whose preconditions fail.
    """
    start = time.perf_counter()
    timing: Dict[str, float] = {}
    mov = load_movie(input)
    timing["build_seconds"] = round(time.perf_counter() - start, 3)
    reports: List[CheckReport] = []
    for check in checks or ["theorem1"]:
        t = time.perf_counter()
        reports.extend(_run_check(mov, check, at, cfg.prime))
        timing[f"{check}_seconds"] = round(time.perf_counter() - t, 3)
    passed = all(r.passed for r in reports)
    results = {"movie": mov.summary(), "checks": [r.to_json() for r in reports]}
    report = Report("movie", str(input), cfg, results, passed, 0 if passed else 1)
    if cfg.timing:
        timing["total_seconds"] = round(time.perf_counter() - start, 3)
        report.timing = timing
    return report


def load_table(path: str) -> List[Tuple[str, Any]]:
    """Rows (name, pd) of a knot table file, or of knots.json inside a directory.

    Raises:
        MalformedPD: if the file is not a JSON array of {name, pd} objects.
    """
    path = Path(path)
    if path.is_dir():
        path = path / TABLE_FILE
    try:
        rows = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise MalformedPD(f"{path}: {e}")
    if not isinstance(rows, list):
        raise MalformedPD(f"{path}: a knot table is a JSON array of {{name, pd}} objects")
    table = []
    for k, row in enumerate(rows):
        if not isinstance(row, dict) or "pd" not in row:
            raise MalformedPD(f"{path}: row {k} has no 'pd'")
        table.append((str(row.get("name", f"row{k}")), row))
    return table


def _batch_row(job: Tuple[str, Any, int, bool]) -> Dict[str, Any]:
    name, row, p, timing = job
    start = time.perf_counter()
    try:
        d = diagram_from_json(row)
        results = _homology_results(d, p)
    except KhtError as e:
        return {"name": name, "error": _error_json(e), "exit_code": e.exit_code}
    out = {
        "name": name,
        "diagram": results["diagram"],
        "crossings": results["crossings"],
        "free_rank": results["free_rank"],
        "torsion_exponents": results["torsion_exponents"],
        "xo": results["xo"],
        "consistent": results["consistent"],
    }
    if timing:
        out["seconds"] = round(time.perf_counter() - start, 3)
    return out


def cmd_batch(table: str, cfg: RunConfig) -> Report:
    """Homology summary and torsion order for every row of a knot table, in input order.

    Failing rows carry an error entry; the report exit status is the worst
    row status.
    """
    start = time.perf_counter()
    rows = load_table(table)
    jobs = [(name, row, cfg.prime, cfg.timing) for name, row in rows]
    if cfg.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_batch_row, jobs))
    else:
        results = [_batch_row(job) for job in jobs]
    exit_code = 0
    for r in results:
        code = r.pop("exit_code", 0)
        exit_code = max(exit_code, code)
        if "error" not in r and not r["consistent"]:
            exit_code = max(exit_code, 1)
    report = Report("batch", str(table), cfg, {"rows": results}, exit_code == 0, exit_code)
    if cfg.timing:
        report.timing = {"total_seconds": round(time.perf_counter() - start, 3)}
    logger.info("batch %s: %d rows, exit status %d", table, len(results), exit_code)
    return report


def format_text(report: Report) -> str:
    """Human-readable rendering of a report."""
    lines = []
    mark = "✅" if report.passed else "❌"
    if report.error is not None:
        return f"❌ {report.error['type']}: {report.error['message']}"
    results = report.results or {}
    if report.command == "homology":
        lines.append(f"📋 {results['diagram']}  (n+={results['n_plus']}, n-={results['n_minus']})")
        lines.append("  Kh_t = " + (" ⊕ ".join(results["decomposition"]) or "0"))
        lines.append(f"  free rank {results['free_rank']}, torsion {results['torsion_exponents']}, xo = {results['xo']}")
        lines.append(f"  {results['ul_b_lower_bound']}")
        lines.append(f"  t=0 dims {results['t0_dimensions']}  t=1 dims {results['t1_dimensions']}")
        lines.append(f"{mark} specializations {'agree' if results['consistent'] else 'DISAGREE'} with the decomposition")
    elif report.command == "movie":
        s = results["movie"]
        lines.append(f"🎬 {s['name'] or report.input}: m={s['m']} b={s['b']} M={s['M']} "
                     f"g={s['genus']} connected={s['connected']}")
        for c in results["checks"]:
            verdict = "PASS" if c["pass"] else "FAIL"
            scalar = f" (scalar {c['unit_scalar']})" if c["unit_scalar"] is not None else ""
            where = f" at moves {c['details']['moves']}" if "moves" in c["details"] else ""
            lines.append(f"  {'✅' if c['pass'] else '❌'} {c['check']}{where}: {verdict}{scalar}")
    else:
        lines.append(f"📋 {len(results['rows'])} knots from {report.input}")
        for r in results["rows"]:
            if "error" in r:
                lines.append(f"  ❌ {r['name']}: {r['error']['type']}: {r['error']['message']}")
            else:
                lines.append(f"  • {r['name']}: xo={r['xo']} free={r['free_rank']} torsion={r['torsion_exponents']}")
    if report.timing:
        lines.append(f"⏱  {report.timing}")
    return "\n".join(lines)


def emit(report: Report, output_format: str):
    if output_format == "text":
        print(format_text(report))
    else:
        print(report.dumps())


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main CLI entry point; returns the exit status."""
    try:
        parser = create_parser()
    except ConfigError as e:
        print(f"❌ Error: {e}", file=sys.stderr)
        return 2
    parser.add_argument('--version', action='version', version=f'khtorsion {__version__}')
    args = parser.parse_args(argv)

    if not args.command:
        parser.print_help()
        return 2

    output_format = getattr(args, "format", "json")
    source = getattr(args, "input", None) or getattr(args, "table", None)
    cfg = None
    try:
        cfg = RunConfig.from_args(args)
        logging.basicConfig(level=cfg.log_level, format="%(levelname)s %(name)s: %(message)s")
        if args.command == "homology":
            report = cmd_homology(args.input, cfg)
        elif args.command == "movie":
            report = cmd_movie(args.input, cfg.checks, cfg, args.at)
        else:
            report = cmd_batch(args.table, cfg)
    except KhtError as e:
        report = Report(args.command, source, cfg, passed=False, exit_code=e.exit_code, error=_error_json(e))
    except OSError as e:
        report = Report(args.command, source, cfg, passed=False, exit_code=2, error=_error_json(e))
    except Exception as e:
        logger.exception("internal error in %s", args.command)
        report = Report(args.command, source, cfg, passed=False, exit_code=3, error=_error_json(e))

    if report.error is not None and output_format == "json":
        print(f"❌ {report.error['type']}: {report.error['message']}", file=sys.stderr)
    emit(report, output_format)
    return report.exit_code


if __name__ == '__main__':
    sys.exit(main())
