"""Command-line interface: simulate, budget, sweep, paper-check.

Exit statuses: 0 success, 1 check or simulation-flag failure, 2 input
error.
"""

import argparse
import sys
from pathlib import Path

from . import papercheck, runner, scenario
from .coilbudget import budget_report
from .errors import MagballoonError

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INPUT_ERROR = 2


def _add_common(parser):
    parser.add_argument("--out", default=".", metavar="DIR",
                        help="output directory (default: current)")
    parser.add_argument("--set", dest="overrides", action="append",
                        default=[], metavar="KEY=VALUE",
                        help="override a scenario key (repeatable)")
    parser.add_argument("--dt", type=float, default=None, metavar="S",
                        help="shorthand for --set sim.dt_s=...")
    parser.add_argument("--max-time", type=float, default=None, metavar="S",
                        help="shorthand for --set sim.max_time_s=...")
    parser.add_argument("--jobs", type=int, default=1, metavar="N",
                        help="parallel workers for sweep (default 1)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="magballoon",
        description="Magnetic-torque balloon antenna simulator and budget tool")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run one scenario, write "
                                            "timeseries.csv and summary.txt")
    p_sim.add_argument("scenario_path", help="scenario file, or 'builtin'")
    _add_common(p_sim)

    p_bud = sub.add_parser("budget", help="render the engineering budget")
    p_bud.add_argument("scenario_path", help="scenario file, or 'builtin'")
    _add_common(p_bud)

    p_swp = sub.add_parser("sweep", help="grid of simulations over one key")
    p_swp.add_argument("scenario_path", help="scenario file, or 'builtin'")
    p_swp.add_argument("param", metavar="KEY=START:STOP:COUNT",
                       help="numeric sweep spec, e.g. maneuver.current_A=0.5:4:8")
    _add_common(p_swp)

    p_chk = sub.add_parser("paper-check",
                           help="reproduce the reference-number table")
    _add_common(p_chk)
    return parser


def _load(args) -> scenario.ScenarioConfig:
    if args.scenario_path == "builtin":
        cfg = scenario.builtin_scenario()
    else:
        cfg = scenario.load_scenario(args.scenario_path)
    overrides = list(args.overrides)
    if args.dt is not None:
        overrides.append(f"sim.dt_s={args.dt!r}")
    if args.max_time is not None:
        overrides.append(f"sim.max_time_s={args.max_time!r}")
    if overrides:
        cfg = scenario.apply_overrides(cfg, overrides)
    return cfg


def cmd_simulate(args) -> int:
    cfg = _load(args)
    traj, summary = runner.run_scenario(cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    csv_text = scenario.write_timeseries(runner.build_records(cfg, traj))
    (out / "timeseries.csv").write_text(csv_text, encoding="utf-8")
    text = runner.summary_text(cfg, summary,
                               runner.final_normal_angle(cfg, traj))
    (out / "summary.txt").write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    if summary.max_time_exceeded or summary.underactuated:
        return EXIT_CHECK_FAILED
    return EXIT_OK


def cmd_budget(args) -> int:
    cfg = _load(args)
    report = budget_report(cfg)
    lines = ["engineering budget", ""]
    lines.append(f"resistance_per_coil_ohm: {report.resistance_per_coil!r}")
    for i, p in enumerate(report.power_per_coil, start=1):
        lines.append(f"ohmic_power_coil{i}_W: {p!r}")
    lines.append(f"total_power_W: {report.total_power!r}")
    lines.append(f"wire_mass_per_coil_kg: {report.mass_per_coil!r}")
    lines.append(f"wire_mass_total_kg: {report.total_mass!r}")
    lines.append("INFO: the reference figure for three wires is ~6 kg; "
                 "copper density gives the value above (gold-like density "
                 "approaches 6 kg)")
    lines.append(f"pressure_floor_Pa: {report.pressure_floor!r}")
    for freq in sorted(report.skin_depths):
        lines.append(f"skin_depth_{freq:.4g}Hz_m: {report.skin_depths[freq]!r}")
    lines.append(f"slew_final_rate_rad_s: {report.final_rate!r}")
    lines.append(f"slew_rim_speed_m_s: {report.rim_speed!r}")
    lines.append(f"slew_kinetic_energy_J: {report.kinetic_energy!r}")
    lines.append(f"slew_avg_mech_power_W: {report.avg_mechanical_power!r}")
    lines.append("")
    for check in report.checks:
        status = "PASS" if check.passed else "FAIL"
        lines.append(f"[{status}] {check.name}: {check.detail}")
    sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def cmd_sweep(args) -> int:
    cfg = _load(args)
    try:
        key, grid = args.param.split("=", 1)
        start_s, stop_s, count_s = grid.split(":")
        start, stop, count = float(start_s), float(stop_s), int(count_s)
    except ValueError:
        raise MagballoonError(
            f"sweep spec {args.param!r} is not KEY=START:STOP:COUNT") from None
    csv_text = runner.sweep_csv(cfg, key.strip(), start, stop, count,
                                jobs=args.jobs)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "sweep.csv").write_text(csv_text, encoding="utf-8")
    sys.stdout.write(csv_text)
    return EXIT_OK


def cmd_paper_check(args) -> int:
    rows = papercheck.run_paper_check()
    sys.stdout.write(papercheck.render_report(rows))
    if all(r.passed or r.info for r in rows):
        return EXIT_OK
    return EXIT_CHECK_FAILED


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "simulate": cmd_simulate,
        "budget": cmd_budget,
        "sweep": cmd_sweep,
        "paper-check": cmd_paper_check,
    }
    try:
        return handlers[args.command](args)
    except (MagballoonError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
