"""Command-line front end for the sweep and validation harness.

Subcommands emit plot-ready CSV files (one header line, 17-significant-
digit scientific notation, ``NA`` for unreached targets) or, for
``validate``, a pass/fail report with exit status 0/1.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from . import harness


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=None, help="output CSV path")
    common.add_argument("--grid-points", type=int, default=None, help="propagation grid points")
    common.add_argument("--tau-max", type=float, default=None, help="propagation horizon (units of inverse coupling)")
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qslkit",
        description=(
            "Quantumness-generation speed limits: figure sweeps, scenario runs, "
            "scaling study, and the randomized validation suite. Units: hbar = 1, "
            "coupling rate Gamma = 1 by default, times in 1/Gamma, memory rate "
            "given as the ratio gamma/Gamma."
        ),
    )
    common = _common_flags()
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser(
        "fig1",
        parents=[common],
        help="memoryless dephasing: tau_Q and tau_B vs Q for three initial angles",
        description=(
            "Columns: theta, gamma_ratio (inf), q_target, tau_exact, tau_q_numeric, "
            "tau_q_closed, tau_b."
        ),
    )
    sub.add_parser(
        "fig2",
        parents=[common],
        help="finite-memory dephasing: tau_Q vs Q across memory ratios (theta = pi/5)",
        description=(
            "Columns: theta, gamma_ratio, q_target, tau_exact, tau_q_numeric, "
            "tau_q_closed, tau_b_avg. The fidelity-bound column uses the "
            "time-averaged denominator variant (the literal initial-state "
            "denominator vanishes for this kernel). Targets are shared across "
            "memory ratios."
        ),
    )
    sub.add_parser(
        "fig3",
        parents=[common],
        help="finite-memory dissipation: tau_Q vs Q across memory ratios (theta = pi/4)",
        description=(
            "Columns: theta, gamma_ratio, q_target, tau_exact, tau_q_numeric, "
            "tau_q_closed (NA: no closed form), tau_b_avg. Targets are shared "
            "across memory ratios."
        ),
    )

    ghz = sub.add_parser(
        "ghz",
        parents=[common],
        help="cat-state scaling of the witness and its bound with qubit count",
        description="Columns: n, offdiagonal_factor, q, sqrt_q_ratio, tau_q_fixed_target.",
    )
    ghz.add_argument("--theta", type=float, default=None, help="initial angle (default pi/8)")
    ghz.add_argument("--beta", type=float, default=1e-6, help="single-qubit decay exponent (<= 1e-4)")
    ghz.add_argument("--n-max", type=int, default=5, help="largest qubit count (<= 12)")
    ghz.add_argument("--q-fix", type=float, default=1e-6, help="fixed quantumness target for tau_Q(n)")

    run = sub.add_parser(
        "run",
        parents=[common],
        help="run one scenario from a JSON config",
        description=(
            "Config keys: model (unitary2l|stirap|dephasing|dissipation|ghz), theta, "
            "Gamma, gamma (ratio gamma/Gamma), markov, tau_max, grid_points, q_grid, "
            "n, seed, theta0, theta_rate, alpha0, alpha_rate. Unknown keys are "
            "rejected. CSV columns: model, theta, gamma_ratio, q_target, tau_exact, "
            "tau_q_numeric, tau_q_closed, tau_b, tau_b_avg."
        ),
    )
    run.add_argument("--config", required=True, help="path to the JSON scenario config")
    run.add_argument("--report", default=None, help="optional JSON report path")

    val = sub.add_parser(
        "validate",
        parents=[common],
        help="randomized property suite; exit status reflects pass/fail",
    )
    val.add_argument("--seed", type=int, default=0)
    val.add_argument("--cases", type=int, default=200)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)

    if args.command == "fig1":
        out = args.out or "fig1.csv"
        kw = {}
        if args.grid_points:
            kw["grid_points"] = args.grid_points
        if args.tau_max:
            kw["tau_max"] = args.tau_max
        rows = harness.fig1(out, **kw)
        print(f"wrote {out} ({len(rows)} rows)")
        return 0

    if args.command == "fig2":
        out = args.out or "fig2.csv"
        kw = {}
        if args.grid_points:
            kw["grid_points"] = args.grid_points
        if args.tau_max:
            kw["tau_max"] = args.tau_max
        rows = harness.fig2(out, **kw)
        print(f"wrote {out} ({len(rows)} rows)")
        return 0

    if args.command == "fig3":
        out = args.out or "fig3.csv"
        kw = {}
        if args.grid_points:
            kw["grid_points"] = args.grid_points
        if args.tau_max:
            kw["tau_max"] = args.tau_max
        rows = harness.fig3(out, **kw)
        print(f"wrote {out} ({len(rows)} rows)")
        return 0

    if args.command == "ghz":
        out = args.out or "ghz.csv"
        theta = args.theta if args.theta is not None else math.pi / 8.0
        report = harness.ghz_scaling(theta, args.beta, args.n_max, out, q_fix=args.q_fix)
        print(f"wrote {out} ({len(report.rows)} rows)")
        print(
            json.dumps(
                {
                    "slope_q": report.slope_q,
                    "slope_sqrt_q": report.slope_sqrt_q,
                    "slope_tau_q": report.slope_tau_q,
                    "note": report.note,
                },
                indent=2,
            )
        )
        return 0

    if args.command == "run":
        cfg = harness.ScenarioConfig.from_json(args.config)
        if args.grid_points:
            cfg.grid_points = args.grid_points
            cfg.validate()
        if args.tau_max:
            cfg.tau_max = args.tau_max
            cfg.validate()
        out = args.out or "run.csv"
        result = harness.run_to_files(cfg, out, report_path=args.report)
        print(f"wrote {out} ({len(result.reports)} targets, q_max={result.diagnostics['q_max']:.6g})")
        return 0

    if args.command == "validate":
        report = harness.validate(seed=args.seed, cases=args.cases)
        for line in report.lines():
            print(line)
        return 0 if report.passed else 1

    raise AssertionError(f"unhandled command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())
