"""Command-line interface. Each subcommand is a thin client over the
service-layer handlers in gridplan.service, called in-process, so the CLI
and the HTTP API expose identical behavior.

Exit codes: 0 success, 1 planning or check failure, 2 invalid input,
3 internal invariant violation. Progress goes to stderr, results to stdout.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from .errors import (
    GridplanError,
    InternalInvariantError,
    InvalidInputError,
    InvalidProblemError,
)
from .scenarios import DEFAULT_EPSILON_GRID, scenario_names
from .service import (
    BoundsRequest,
    CoverCheckRequest,
    ExperimentRequest,
    GridRequest,
    MrmpPlanRequest,
    PlanRequest,
    RenderRequest,
    handle_bounds,
    handle_cover_check,
    handle_experiment,
    handle_grid,
    handle_mrmp_plan,
    handle_plan,
    handle_render,
)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_INTERNAL = 3


def _progress(msg: str) -> None:
    print(msg, file=sys.stderr, flush=True)


def _emit(text: str, output: str | None) -> None:
    if output is None or output == "-":
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
        _progress(f"wrote {output}")


def _parse_point(text: str) -> list[float]:
    try:
        parts = [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise InvalidInputError(f"cannot parse point {text!r}: {exc}") from exc
    if not parts:
        raise InvalidInputError(f"cannot parse point {text!r}: no coordinates")
    return parts


def _split_list(values: list[str] | None) -> list[str]:
    out: list[str] = []
    for chunk in values or []:
        out.extend(tok.strip() for tok in chunk.split(",") if tok.strip())
    return out


def _float_list(values: list[str] | None, what: str) -> list[float]:
    toks = _split_list(values)
    try:
        return [float(t) for t in toks]
    except ValueError as exc:
        raise InvalidInputError(f"cannot parse {what} list: {exc}") from exc


def _int_list(values: list[str] | None, what: str) -> list[int]:
    toks = _split_list(values)
    try:
        return [int(t) for t in toks]
    except ValueError as exc:
        raise InvalidInputError(f"cannot parse {what} list: {exc}") from exc


# ---------------------------------------------------------------------------
# subcommand runners
# ---------------------------------------------------------------------------


def _cmd_grid(args: argparse.Namespace) -> int:
    resp = handle_grid(
        GridRequest(
            beta=args.beta,
            gamma=args.gamma,
            dim=args.dim,
            max_points=args.max_points,
            include_points=not args.count_only,
        )
    )
    if args.format == "json":
        _emit(resp.model_dump_json(indent=2), args.output)
    else:
        lines = [",".join(f"x{i}" for i in range(args.dim))]
        for p in resp.points or []:
            lines.append(",".join(repr(c) for c in p))
        _emit("\n".join(lines) + "\n", args.output)
        _progress(f"{resp.count} points (per-layer side counts {resp.layer_m} and {resp.layer_m + 1})")
    return EXIT_OK


def _cmd_bounds(args: argparse.Namespace) -> int:
    if args.table1:
        req = BoundsRequest(table="single")
    elif args.multi_table:
        req = BoundsRequest(table="multi")
    else:
        req = BoundsRequest(
            deltas=_float_list(args.delta, "delta"),
            epsilons=_split_list(args.epsilon),
            dims=_int_list(args.dim, "dim"),
        )
    resp = handle_bounds(req)
    if args.format == "json":
        _emit(resp.model_dump_json(indent=2), args.output)
        return EXIT_OK
    lines = ["delta,d,epsilon,lb,curr,prev"]
    for row in resp.rows:
        lines.append(
            f"{row.delta!r},{row.dim},{row.epsilon},{row.lower_bound},{row.curr},{row.prev}"
        )
    _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK


def _cmd_cover_check(args: argparse.Namespace) -> int:
    resp = handle_cover_check(
        CoverCheckRequest(
            beta=args.beta,
            gamma=args.gamma,
            dim=args.dim,
            trials=args.trials,
            seed=args.seed,
        )
    )
    if args.format == "json":
        _emit(resp.model_dump_json(indent=2), args.output)
    else:
        verdict = "ok" if resp.ok else "FAILED"
        _emit(
            f"cover-check {verdict}: max_gap={resp.max_gap!r} beta={resp.beta!r} "
            f"trials={resp.trials}",
            args.output,
        )
    return EXIT_OK if resp.ok else EXIT_FAILURE


def _cmd_plan(args: argparse.Namespace) -> int:
    start = args.start
    goal = args.goal
    delta = args.delta
    if args.workspace is not None and args.scenario is not None:
        raise InvalidInputError("pass either --workspace or --scenario, not both")
    if args.scenario is not None:
        from .scenarios import builtin_scenario

        scen = builtin_scenario(args.scenario)
        if not (0 <= args.robot < len(scen.robots)):
            raise InvalidInputError(
                f"scenario {scen.name!r} has no robot index {args.robot}"
            )
        rb = scen.robots[args.robot]
        start = start if start is not None else ",".join(repr(float(c)) for c in rb.start)
        goal = goal if goal is not None else ",".join(repr(float(c)) for c in rb.goal)
        delta = delta if delta is not None else scen.static_clearance
    if start is None or goal is None:
        raise InvalidInputError("plan needs --start and --goal (or --scenario)")
    if delta is None:
        raise InvalidInputError("plan needs --delta (or --scenario, which supplies it)")
    workspace = None
    if args.workspace is not None:
        with open(args.workspace, encoding="utf-8") as fh:
            workspace = json.load(fh)
    _progress(f"planning single robot at epsilon={args.epsilon} delta={delta!r}")
    t0 = time.perf_counter()
    resp = handle_plan(
        PlanRequest(
            start=_parse_point(start),
            goal=_parse_point(goal),
            epsilon=args.epsilon,
            delta=delta,
            scenario=args.scenario,
            robot=args.robot,
            workspace=workspace,
        )
    )
    wall = time.perf_counter() - t0
    if args.output is not None:
        _emit(resp.model_dump_json(indent=2), args.output)
    if args.format == "json":
        print(resp.model_dump_json(indent=2))
    else:
        if resp.success:
            print(
                f"plan ok: cost={resp.cost!r} samples={resp.sample_count} "
                f"vertices={resp.vertex_count} edges={resp.edge_count} wall={wall:.2f}s"
            )
        else:
            print(
                f"plan FAILED ({resp.reason}): samples={resp.sample_count} "
                f"vertices={resp.vertex_count} edges={resp.edge_count} wall={wall:.2f}s"
            )
    return EXIT_OK if resp.success else EXIT_FAILURE


def _cmd_mrmp_plan(args: argparse.Namespace) -> int:
    _progress(
        f"planning scenario {args.scenario!r} at epsilon={args.epsilon} mode={args.mode}"
    )
    t0 = time.perf_counter()
    resp = handle_mrmp_plan(
        MrmpPlanRequest(
            scenario=args.scenario,
            epsilon=args.epsilon,
            mode=args.mode,
            move_cap=args.move_cap,
            max_expansions=args.max_expansions,
            validate_steps=args.validate_steps,
        )
    )
    wall = time.perf_counter() - t0
    if args.output is not None:
        _emit(resp.model_dump_json(indent=2), args.output)
    if args.format == "json":
        print(resp.model_dump_json(indent=2))
    else:
        if resp.success:
            bound_note = (
                " (reference is a lower bound only)"
                if resp.reference_lower_bound_only
                else ""
            )
            print(
                f"mrmp-plan ok: cost={resp.cost!r} reference={resp.reference_cost!r} "
                f"ratio={resp.ratio:.4f}{bound_note} samples/robot={resp.samples_per_robot} "
                f"expansions={resp.expansions} wall={wall:.2f}s"
            )
        else:
            print(
                f"mrmp-plan FAILED ({resp.reason}): samples/robot={resp.samples_per_robot} "
                f"expansions={resp.expansions} wall={wall:.2f}s"
            )
    return EXIT_OK if resp.success else EXIT_FAILURE


def _cmd_experiment(args: argparse.Namespace) -> int:
    eps = _split_list(args.epsilon)
    if args.epsilon is not None and not eps:
        raise InvalidInputError("experiment got an empty epsilon list")
    if not eps:
        eps = ["inf" if e == float("inf") else repr(e) for e in DEFAULT_EPSILON_GRID]
        _progress(f"no --epsilon given; sweeping default grid {','.join(eps)}")
    resp = handle_experiment(
        ExperimentRequest(
            scenario=args.scenario,
            epsilons=eps,
            compare_random=args.compare_random,
            trials=args.trials,
            seed=args.seed,
            move_cap=args.move_cap,
            max_expansions=args.max_expansions,
            workers=args.workers,
        ),
        log=_progress,
    )
    if args.format == "json":
        _emit(json.dumps({"scenario": resp.scenario, "csv": resp.csv}, indent=2), args.output)
    else:
        _emit(resp.csv, args.output)
    return EXIT_OK


def _cmd_render(args: argparse.Namespace) -> int:
    if args.epsilon is not None:
        _progress(f"planning scenario {args.scenario!r} at epsilon={args.epsilon} for overlay")
    resp = handle_render(
        RenderRequest(
            scenario=args.scenario,
            epsilon=args.epsilon,
            mode=args.mode,
            move_cap=args.move_cap,
            max_expansions=args.max_expansions,
        )
    )
    _emit(resp.svg, args.output)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gridplan",
        description=(
            "Deterministic staggered-grid motion planning: sample-size tables, "
            "grid generation, cover checks, single- and multi-robot planning, "
            "experiment sweeps, and SVG rendering."
        ),
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    names = ", ".join(scenario_names())

    p = sub.add_parser("grid", help="generate a staggered grid")
    p.add_argument("--beta", type=float, required=True, help="cover radius")
    p.add_argument("--gamma", type=float, required=True, help="boundary margin")
    p.add_argument("--dim", type=int, required=True, help="dimension")
    p.add_argument("--max-points", type=int, default=None, help="abort above this count")
    p.add_argument("--count-only", action="store_true", help="omit coordinates from output")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output", default=None, help="output file (default stdout)")
    p.set_defaults(func=_cmd_grid)

    p = sub.add_parser("bounds", help="sample-size bound tables")
    preset = p.add_mutually_exclusive_group()
    preset.add_argument(
        "--table1", action="store_true", help="single-robot preset grid"
    )
    preset.add_argument(
        "--multi-table", action="store_true", help="multi-robot preset grid (delta=0.1)"
    )
    p.add_argument("--delta", action="append", help="clearance (repeatable or comma-separated)")
    p.add_argument("--epsilon", action="append", help="stretch (inf allowed; repeatable)")
    p.add_argument("--dim", action="append", help="dimension (repeatable or comma-separated)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_bounds)

    p = sub.add_parser("cover-check", help="verify the beta-cover property empirically")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("json",), default=None)
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_cover_check)

    p = sub.add_parser("plan", help="single-robot staggered-grid plan")
    p.add_argument("--start", default=None, help="comma-separated coordinates")
    p.add_argument("--goal", default=None, help="comma-separated coordinates")
    p.add_argument("--epsilon", required=True, help="stretch factor (inf allowed)")
    p.add_argument("--delta", type=float, default=None, help="clearance")
    p.add_argument("--scenario", default=None, help=f"named scene ({names})")
    p.add_argument("--robot", type=int, default=0, help="robot index within the scenario")
    p.add_argument("--workspace", default=None, help="workspace JSON file")
    p.add_argument("--format", choices=("json",), default=None)
    p.add_argument("--output", default=None, help="write the full result JSON here")
    p.set_defaults(func=_cmd_plan)

    p = sub.add_parser("mrmp-plan", help="multi-robot plan on a named scene")
    p.add_argument("--scenario", required=True, help=f"named scene ({names})")
    p.add_argument("--epsilon", required=True, help="stretch factor (inf allowed)")
    p.add_argument(
        "--mode",
        choices=("composite_astar", "prioritized_timing"),
        default="composite_astar",
    )
    p.add_argument("--move-cap", type=int, default=None, help="robots moving per step")
    p.add_argument("--max-expansions", type=int, default=500_000)
    p.add_argument("--validate-steps", type=int, default=1000)
    p.add_argument("--format", choices=("json",), default=None)
    p.add_argument("--output", default=None, help="write the full result JSON here")
    p.set_defaults(func=_cmd_mrmp_plan)

    p = sub.add_parser("experiment", help="cost-ratio sweeps and random-baseline comparisons")
    p.add_argument("--scenario", required=True, help=f"named scene ({names})")
    p.add_argument(
        "--epsilon",
        action="append",
        help="stretch values to sweep (repeatable or comma-separated; default grid if omitted)",
    )
    p.add_argument("--compare-random", action="store_true", help="add random-sampling baseline rows")
    p.add_argument("--trials", type=int, default=10, help="random trials per epsilon")
    p.add_argument("--seed", type=int, default=0, help="base seed for random baselines")
    p.add_argument("--move-cap", type=int, default=None)
    p.add_argument("--max-expansions", type=int, default=500_000)
    p.add_argument(
        "--workers",
        type=int,
        default=None,
        help="parallel sweep processes (default: GRIDPLAN_WORKERS or 1)",
    )
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("render", help="render a scene (optionally with a planned overlay) as SVG")
    p.add_argument("--scenario", required=True, help=f"named scene ({names})")
    p.add_argument("--epsilon", default=None, help="plan at this stretch and overlay trajectories")
    p.add_argument(
        "--mode",
        choices=("composite_astar", "prioritized_timing"),
        default="composite_astar",
    )
    p.add_argument("--move-cap", type=int, default=None)
    p.add_argument("--max-expansions", type=int, default=500_000)
    p.add_argument("--format", choices=("svg",), default="svg")
    p.add_argument("--output", default=None, help="output SVG file (default stdout)")
    p.set_defaults(func=_cmd_render)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InvalidInputError, InvalidProblemError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InternalInvariantError as exc:
        print(f"internal invariant violation: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except GridplanError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except KeyboardInterrupt:
        print("interrupted", file=sys.stderr)
        return EXIT_INTERNAL


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
