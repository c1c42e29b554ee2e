"""Command line front end: scenario JSON in, plot-ready CSV out."""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from . import localization, sensitivity
from .hydraulics import NoRootError, measure, solve_leaky_state, sweep
from .isolation import apparent_leak_head, isolate_by_consistency, isolate_by_leak_fit
from .scenario import Scenario, ScenarioError, parse_scenario
from .sensitivity import confusion_flow_curve, detect_inherent_ambiguity


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _cmd_simulate(sc: Scenario, out: Path, args) -> int:
    header = [
        "index", "h_in", "h_out", "dh", "q_in", "q_out",
        "h_leak", "q_leak", "q_in_k", "q_out_k", "error",
    ]
    rows = []
    any_ok = False
    for idx, (h_in, h_out) in enumerate(sc.boundary):
        try:
            state = solve_leaky_state(sc.pipes, sc.leak, h_in, h_out)
            d = measure(state, sc.pipes, sc.leak)
            rows.append([
                idx, d.h_in, d.h_out, d.dh, d.q_in, d.q_out,
                state.h_leak, state.q_leak, state.q_in_k, state.q_out_k, None,
            ])
            any_ok = True
        except (NoRootError, ValueError) as exc:
            rows.append([idx, h_in, h_out, h_in - h_out] + [None] * 6 + [str(exc)])
    _write_csv(out / "simulate.csv", header, rows)
    return 0 if any_ok or not sc.boundary else 1


def _cmd_candidates(sc: Scenario, out: Path, args) -> int:
    n = sc.pipes.n
    header = ["index", "h_in", "h_out", "dh", "q_in", "q_out"] + [
        f"x_{j}" for j in range(1, n + 1)
    ] + ["error"]
    rows = []
    any_ok = False
    result = sweep(sc.pipes, sc.leak, list(sc.boundary))
    for idx, d in enumerate(result.points):
        if d is None:
            h_in, h_out = sc.boundary[idx]
            rows.append([idx, h_in, h_out, h_in - h_out] + [None] * (n + 2)
                        + [result.errors[idx]])
            continue
        cands = localization.all_candidates(sc.pipes, d)
        rows.append([idx, d.h_in, d.h_out, d.dh, d.q_in, d.q_out]
                    + [c.x_j for c in cands] + [None])
        any_ok = True
    _write_csv(out / "candidates.csv", header, rows)
    return 0 if any_ok or not sc.boundary else 1


def _nominal_point(sc: Scenario, args):
    nominal_dh = args.nominal_dh if args.nominal_dh is not None else sc.analysis.nominal_dh
    if nominal_dh is None:
        raise ScenarioError(["analysis.nominal_dh (or --nominal-dh) is required"])
    h_out = sc.boundary[0][1] if sc.boundary else 1.0
    state = solve_leaky_state(sc.pipes, sc.leak, h_out + nominal_dh, h_out)
    return measure(state, sc.pipes, sc.leak), h_out, nominal_dh


def _dh_grid(sc: Scenario):
    if sc.analysis.dh_grid is None:
        raise ScenarioError(["analysis.dh_grid is required for this command"])
    return list(sc.analysis.dh_grid)


def _cmd_residual_sweep(sc: Scenario, out: Path, args) -> int:
    nominal, h_out, _ = _nominal_point(sc, args)
    frozen = {c.j: c.x_j for c in localization.all_candidates(sc.pipes, nominal)}
    n = sc.pipes.n
    header = ["dh", "h_in", "h_out", "q_in", "q_out"] + [
        f"rbar_{j}" for j in range(1, n + 1)
    ] + ["error"]
    rows = []
    any_ok = False
    for dh in _dh_grid(sc):
        try:
            state = solve_leaky_state(sc.pipes, sc.leak, h_out + dh, h_out)
            d = measure(state, sc.pipes, sc.leak)
            rbars = [
                localization.residual_bar(sc.pipes, j, frozen[j], d)
                for j in range(1, n + 1)
            ]
            rows.append([dh, d.h_in, d.h_out, d.q_in, d.q_out] + rbars + [None])
            any_ok = True
        except (NoRootError, ValueError) as exc:
            rows.append([dh, h_out + dh, h_out] + [None] * (n + 2) + [str(exc)])
    _write_csv(out / "residual_sweep.csv", header, rows)
    return 0 if any_ok else 1


def _cmd_confusion(sc: Scenario, out: Path, args) -> int:
    nominal, h_out, nominal_dh = _nominal_point(sc, args)
    frozen = {c.j: c.x_j for c in localization.all_candidates(sc.pipes, nominal)}
    grid = sorted(_dh_grid(sc))
    upper = [dh for dh in grid if dh >= nominal_dh]
    lower = [dh for dh in grid if dh < nominal_dh][::-1]
    header = ["pipe", "dh", "q_in_conf", "residual", "converged"]
    rows = []
    for i in range(1, sc.pipes.n + 1):
        per_dh = {}
        for part in (upper, lower):
            if not part:
                continue
            curve = confusion_flow_curve(
                sc.pipes, i, frozen[i], sc.leak, part, seed_qin=nominal.q_in
            )
            for dh, q, res, ok in zip(
                curve.dh_grid, curve.q_in_conf, curve.residual_trace, curve.converged
            ):
                per_dh[dh] = (q, res, ok)
        for dh in grid:
            q, res, ok = per_dh[dh]
            rows.append([i, dh, q, res, ok])
    _write_csv(out / "confusion.csv", header, rows)
    return 0


def _cmd_isolate(sc: Scenario, out: Path, args) -> int:
    result = sweep(sc.pipes, sc.leak, list(sc.boundary))
    verdict = isolate_by_consistency(sc.pipes, result.ok(), eps_spread=args.eps_spread)
    _write_csv(
        out / "isolate_summary.csv",
        ["isolated", "k_hat", "x_hat", "candidate_pipes", "reason"],
        [[
            verdict.isolated,
            verdict.k_hat,
            verdict.x_hat,
            " ".join(str(j) for j in sorted(verdict.candidate_pipes)),
            verdict.reason,
        ]],
    )
    _write_csv(
        out / "isolate_spreads.csv",
        ["pipe", "spread", "plausible"],
        [
            [j, verdict.spreads[j], verdict.spreads[j] <= args.eps_spread]
            for j in sorted(verdict.spreads)
        ],
    )
    return 0


def _cmd_leakfit(sc: Scenario, out: Path, args) -> int:
    result = sweep(sc.pipes, sc.leak, list(sc.boundary))
    data = result.ok()
    first = data[0]
    frozen = {c.j: c.x_j for c in localization.all_candidates(sc.pipes, first)}
    h_y = (
        {j: sc.analysis.h_y[j - 1] for j in frozen}
        if sc.analysis.h_y is not None
        else 0.0
    )
    sample_rows = []
    for j in sorted(frozen):
        for idx, d in enumerate(data):
            sample_rows.append([
                j, idx,
                apparent_leak_head(sc.pipes, j, frozen[j], d),
                d.q_in - d.q_out,
            ])
    _write_csv(
        out / "leakfit_samples.csv", ["pipe", "index", "h_leak_j", "q_leak"], sample_rows
    )
    fits = isolate_by_leak_fit(sc.pipes, data, frozen, h_y=h_y, eps_fit=args.eps_fit)
    _write_csv(
        out / "leakfit_results.csv",
        ["rank", "pipe", "C", "beta", "rmse", "negative_head", "accepted"],
        [
            [rank, r.j, r.C_j, r.beta_j, r.rmse, r.negative_head, r.accepted]
            for rank, r in enumerate(fits, start=1)
        ],
    )
    return 0


def _cmd_check(sc: Scenario, out: Path, args) -> int:
    flagged = detect_inherent_ambiguity(sc.pipes)
    _write_csv(
        out / "check.csv",
        ["pipe_a", "pipe_b", "reason"],
        [[a, b, reason] for (a, b), reason in flagged],
    )
    return 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "candidates": _cmd_candidates,
    "residual-sweep": _cmd_residual_sweep,
    "confusion": _cmd_confusion,
    "isolate": _cmd_isolate,
    "leakfit": _cmd_leakfit,
    "check": _cmd_check,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="leakscope",
        description="Leak localization toolkit for parallel pipe networks",
    )
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--scenario", required=True, help="scenario JSON file")
    parser.add_argument("--out", required=True, help="output directory for CSV files")
    parser.add_argument("--nominal-dh", type=float, default=None,
                        help="head loss of the nominal data point")
    parser.add_argument("--eps-spread", type=float, default=None,
                        help="candidate spread tolerance for isolation")
    parser.add_argument("--eps-fit", type=float, default=None,
                        help="rmse tolerance for leak function fits")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        sc = parse_scenario(args.scenario)
    except ScenarioError as exc:
        for problem in exc.problems:
            print(f"error: {problem}", file=sys.stderr)
        return 2
    if args.eps_spread is None:
        args.eps_spread = sc.analysis.eps_spread
    if args.eps_fit is None:
        args.eps_fit = sc.analysis.eps_fit
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    try:
        return _COMMANDS[args.command](sc, out, args)
    except (ScenarioError, NoRootError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
