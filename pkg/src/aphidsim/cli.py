"""Command-line entry point.

Exit codes: 0 success, 1 validation failure (bad scenario or a figure
verdict mismatch), 2 I/O or numerical error and usage errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
from collections import Counter
from dataclasses import replace
from pathlib import Path

from aphidsim.errors import (
    EventLocalizationError,
    NumericalDomainError,
    ParameterValidationError,
    ScenarioFileError,
)
from aphidsim.fileio import (
    format_summary,
    load_scenario,
    load_sweep_spec,
    write_summary,
    write_sweep,
    write_timeseries,
)
from aphidsim.integrator import integrate
from aphidsim.outcomes import classify
from aphidsim.presets import FIGURE_PRESETS, check_families, get_preset
from aphidsim.sweep import run_sweep

log = logging.getLogger("aphidsim")

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_ERROR = 2


def _cmd_run(args) -> int:
    scenario = load_scenario(args.scenario)
    log.info("integrating %s to t=%g", scenario.name, scenario.controls.t_end)
    traj = integrate(scenario)
    summary = classify(traj)
    out = Path(args.out)
    write_timeseries(traj, out / f"{scenario.name}_timeseries.csv")
    write_summary(summary, out / f"{scenario.name}_summary.txt", scenario)
    sys.stdout.write(format_summary(summary, scenario))
    return EXIT_OK


def _parse_which(values: list[str] | None) -> list[str]:
    if not values:
        return list(FIGURE_PRESETS)
    ids = []
    for v in values:
        for part in v.replace(",", " ").split():
            ids.append(get_preset(part).figure_id)
    return ids


def _cmd_figures(args) -> int:
    try:
        ids = _parse_which(args.which)
    except KeyError as exc:
        print(exc.args[0], file=sys.stderr)
        return EXIT_ERROR
    out = Path(args.out)
    summaries = {}
    rows = ["figure,x_A0,x_V0,k_f,k_r,expected,observed,extinct_A_at,extinct_V_at,peak_A,peak_V,status,notes"]
    mismatches = 0
    for fid in ids:
        preset = FIGURE_PRESETS[fid]
        sc = preset.scenario
        log.info("running figure %s", fid)
        traj = integrate(sc)
        summary = classify(traj)
        summaries[fid] = summary
        write_timeseries(traj, out / f"fig{fid}_timeseries.csv")
        write_summary(summary, out / f"fig{fid}_summary.txt", sc)
        problems = preset.check(summary)
        mismatches += len(problems)
        status = "ok" if not problems else "MISMATCH"
        note = preset.notes if not problems else "; ".join(problems)
        rows.append(",".join([
            fid, repr(sc.x_A0), repr(sc.x_V0), repr(sc.params.k_f), repr(sc.params.k_r),
            preset.expected.value, summary.classification.value,
            "" if summary.extinct_A_at is None else f"{summary.extinct_A_at:.6g}",
            "" if summary.extinct_V_at is None else f"{summary.extinct_V_at:.6g}",
            f"{summary.peak_A.density:.6g}", f"{summary.peak_V.density:.6g}",
            status, f'"{note}"',
        ]))
    family = check_families(summaries)
    mismatches += len(family)
    table = "\n".join(rows) + "\n"
    for problem in family:
        table += f"# family MISMATCH: {problem}\n"
    table += f"# mismatches={mismatches}\n"
    out.mkdir(parents=True, exist_ok=True)
    (out / "verdicts.csv").write_text(table, encoding="utf-8")
    sys.stdout.write(table)
    return EXIT_OK if mismatches == 0 else EXIT_INVALID


def _cmd_sweep(args) -> int:
    spec = load_sweep_spec(args.sweep)
    if args.workers is not None:
        spec = replace(spec, workers=args.workers)
    log.info("sweeping %s with %d worker(s)", spec.base.name, spec.workers)
    result = run_sweep(spec)
    path = Path(args.out) / f"{spec.base.name}_sweep.csv"
    write_sweep(result, path)
    counts = Counter(c.classification.value for row in result.grid for c in row)
    n1, n2 = result.shape
    print(f"{n1}x{n2} sweep over {spec.axis1.target} x {spec.axis2.target} -> {path}")
    for cls, n in sorted(counts.items()):
        print(f"  {cls}: {n}")
    return EXIT_OK


def _cmd_validate(args) -> int:
    try:
        scenario = load_scenario(args.scenario)
    except ParameterValidationError as exc:
        print("invalid")
        print(exc.report)
        return EXIT_INVALID
    print(f"{scenario.name}: valid")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aphidsim",
        description="Two-biotype soybean aphid dynamics on a resistant host plant.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    p = sub.add_parser("run", help="integrate one scenario file")
    p.add_argument("scenario", help="scenario file (key = value lines)")
    p.add_argument("--out", default=".", help="output directory (default: .)")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("figures", help="run the built-in figure presets and check their verdicts")
    p.add_argument("--which", action="append", metavar="ID",
                   help="panel id(s) such as 2B or 1A,3E; repeatable (default: all)")
    p.add_argument("--out", default=".", help="output directory (default: .)")
    p.set_defaults(func=_cmd_figures)

    p = sub.add_parser("sweep", help="run a two-axis sweep file")
    p.add_argument("sweep", help="sweep file")
    p.add_argument("--out", default=".", help="output directory (default: .)")
    p.add_argument("--workers", type=int, default=None, help="override the file's worker count")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("validate", help="check a scenario file")
    p.add_argument("scenario", help="scenario file")
    p.set_defaults(func=_cmd_validate)
    return parser


def run_cli(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_ERROR
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ScenarioFileError, ParameterValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (OSError, NumericalDomainError, EventLocalizationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
