"""HTTP service layer: pydantic request/response models and pure handler
functions wrapped by a FastAPI app. The CLI calls the same handlers
in-process, so command-line and HTTP behavior stay identical.

Run with: uvicorn gridplan.service:app
"""

from __future__ import annotations

import math
import time
from typing import Literal

import numpy as np
from pydantic import BaseModel, Field

from .errors import GridplanError, InternalInvariantError, InvalidInputError, InvalidProblemError
from .geometry import Workspace
from .mrmp import (
    MultiRobotProblem,
    PlannerConfig,
    PlanOutcome,
    RobotSpec,
    multi_robot_params,
    plan_composite_astar,
    plan_prioritized_timing,
    validate_composite_path,
)
from .render import render_scenario_svg
from .roadmap import MotionProblem, build_prm, shortest_path, single_robot_params
from .sampling import (
    BOUNDS_TABLE_DELTAS,
    BOUNDS_TABLE_DIMS,
    BOUNDS_TABLE_EPSILONS,
    MULTI_TABLE_DELTA,
    MULTI_TABLE_DIMS,
    MULTI_TABLE_EPSILONS,
    BoundsQuery,
    GridParams,
    format_count,
    format_real,
    layer_count,
    multi_robot_sample_count,
    parse_epsilon,
    size_curr,
    size_lower_bound,
    size_prev,
    staggered_grid,
    verify_beta_cover,
)
from .scenarios import (
    builtin_scenario,
    builtin_scenarios,
    reference_cost,
    run_random_comparison,
    run_ratio_sweep,
)


def _epsilon_value(text) -> float:
    if isinstance(text, (int, float)):
        value = float(text)
        if not (value > 0):
            raise InvalidInputError("epsilon must be positive")
        return value
    return parse_epsilon(str(text))


def _epsilon_text(value: float) -> str:
    return "inf" if math.isinf(value) else repr(float(value))


# ---------------------------------------------------------------------------
# bounds
# ---------------------------------------------------------------------------


class BoundsRequest(BaseModel):
    deltas: list[float] = Field(default_factory=list)
    epsilons: list[str | float] = Field(default_factory=list)
    dims: list[int] = Field(default_factory=list)
    table: Literal["single", "multi", "custom"] = "custom"


class BoundsCell(BaseModel):
    delta: float
    dim: int
    epsilon: str
    lower_bound: str
    curr: str
    prev: str
    curr_exact: float
    prev_exact: float | None
    lower_bound_exact: float | None


class BoundsResponse(BaseModel):
    rows: list[BoundsCell]


def handle_bounds(req: BoundsRequest) -> BoundsResponse:
    """Evaluate the sample-size calculators over a parameter grid. The
    "single" preset reproduces the built-in single-robot table grid; the
    "multi" preset reproduces the multi-robot table grid (delta fixed,
    curr = multi-robot count, prev left empty)."""
    if req.table == "single":
        deltas = list(BOUNDS_TABLE_DELTAS)
        dims = list(BOUNDS_TABLE_DIMS)
        epsilons = list(BOUNDS_TABLE_EPSILONS)
    elif req.table == "multi":
        deltas = [MULTI_TABLE_DELTA]
        dims = list(MULTI_TABLE_DIMS)
        epsilons = list(MULTI_TABLE_EPSILONS)
    else:
        deltas = [float(x) for x in req.deltas]
        dims = [int(x) for x in req.dims]
        epsilons = [_epsilon_value(e) for e in req.epsilons]
        if not deltas or not dims or not epsilons:
            raise InvalidInputError("bounds needs at least one delta, one dim, and one epsilon")
    rows = []
    for delta in deltas:
        for dim in dims:
            lb_exact: float | None = None
            lb_text = ""
            q_inf = BoundsQuery(epsilon=math.inf, delta=delta, dim=dim)
            lb_exact = size_lower_bound(q_inf)
            lb_text = format_real(lb_exact)
            for eps in epsilons:
                q = BoundsQuery(epsilon=eps, delta=delta, dim=dim)
                if req.table == "multi":
                    curr = multi_robot_sample_count(q)
                    prev_exact = None
                    prev_text = ""
                else:
                    curr = size_curr(q)
                    prev_exact = size_prev(q)
                    prev_text = format_real(prev_exact)
                rows.append(
                    BoundsCell(
                        delta=delta,
                        dim=dim,
                        epsilon=_epsilon_text(eps),
                        lower_bound=lb_text,
                        curr=format_count(curr),
                        prev=prev_text,
                        curr_exact=float(curr),
                        prev_exact=prev_exact,
                        lower_bound_exact=lb_exact,
                    )
                )
    return BoundsResponse(rows=rows)


# ---------------------------------------------------------------------------
# grid
# ---------------------------------------------------------------------------


class GridRequest(BaseModel):
    beta: float
    gamma: float
    dim: int
    max_points: int | None = None
    include_points: bool = True


class GridResponse(BaseModel):
    count: int
    layer_m: int
    points: list[list[float]] | None


def handle_grid(req: GridRequest) -> GridResponse:
    g = GridParams(beta=req.beta, gamma=req.gamma, dim=req.dim)
    s = staggered_grid(g, max_points=req.max_points)
    m = layer_count(req.beta, req.gamma, req.dim)
    points = s.points.tolist() if req.include_points else None
    return GridResponse(count=len(s), layer_m=m, points=points)


# ---------------------------------------------------------------------------
# cover-check
# ---------------------------------------------------------------------------


class CoverCheckRequest(BaseModel):
    beta: float
    gamma: float
    dim: int
    trials: int = 100_000
    seed: int = 0


class CoverCheckResponse(BaseModel):
    ok: bool
    max_gap: float
    beta: float
    trials: int


def handle_cover_check(req: CoverCheckRequest) -> CoverCheckResponse:
    g = GridParams(beta=req.beta, gamma=req.gamma, dim=req.dim)
    s = staggered_grid(g)
    rep = verify_beta_cover(s, g, trials=req.trials, seed=req.seed)
    return CoverCheckResponse(ok=rep.ok, max_gap=rep.max_gap, beta=req.beta, trials=rep.trials)


# ---------------------------------------------------------------------------
# plan (single robot)
# ---------------------------------------------------------------------------


class PlanRequest(BaseModel):
    start: list[float]
    goal: list[float]
    epsilon: str | float
    delta: float
    scenario: str | None = None
    robot: int = 0
    workspace: dict | None = None


class PlanResponse(BaseModel):
    success: bool
    reason: str
    cost: float | None
    sample_count: int
    vertex_count: int
    edge_count: int
    runtime_s: float
    path: list[list[float]] | None


def handle_plan(req: PlanRequest) -> PlanResponse:
    """Single-robot staggered-grid plan. The workspace comes from an inline
    workspace dict, or from a named scenario (inflated by the chosen robot's
    radius); with neither, the square is obstacle-free."""
    t0 = time.perf_counter()
    eps = _epsilon_value(req.epsilon)
    if req.workspace is not None and req.scenario is not None:
        raise InvalidInputError("pass either a workspace or a scenario, not both")
    if req.workspace is not None:
        ws = Workspace.from_dict(req.workspace)
    elif req.scenario is not None:
        scen = builtin_scenario(req.scenario)
        if not (0 <= req.robot < len(scen.robots)):
            raise InvalidInputError(f"scenario {scen.name!r} has no robot index {req.robot}")
        ws = scen.workspace.inflate(scen.robots[req.robot].radius)
    else:
        ws = Workspace(dim=len(req.start), obstacles=())
    start = np.asarray(req.start, dtype=np.float64)
    goal = np.asarray(req.goal, dtype=np.float64)
    params = single_robot_params(eps, req.delta, ws.dim)
    samples = staggered_grid(params.grid)
    m = MotionProblem(ws, start, goal)
    rm = build_prm(m, samples, params.radius)
    res = shortest_path(rm, start, goal)
    runtime = time.perf_counter() - t0
    return PlanResponse(
        success=res.reachable,
        reason="solved" if res.reachable else "unreachable",
        cost=(res.length if res.reachable else None),
        sample_count=len(samples),
        vertex_count=rm.num_vertices,
        edge_count=rm.num_edges,
        runtime_s=runtime,
        path=(res.path.tolist() if res.reachable else None),
    )


# ---------------------------------------------------------------------------
# mrmp-plan
# ---------------------------------------------------------------------------


class MrmpPlanRequest(BaseModel):
    scenario: str
    epsilon: str | float
    mode: Literal["composite_astar", "prioritized_timing"] = "composite_astar"
    move_cap: int | None = None
    max_expansions: int = 500_000
    validate_steps: int = 1000


class MrmpPlanResponse(BaseModel):
    success: bool
    reason: str
    cost: float | None
    reference_cost: float
    reference_lower_bound_only: bool
    ratio: float | None
    samples_per_robot: int
    expansions: int
    runtime_s: float
    positions: list | None


def handle_mrmp_plan(req: MrmpPlanRequest) -> MrmpPlanResponse:
    """Plan a named scenario at one epsilon with delta_i = mu and report the
    cost against the scene's documented reference."""
    t0 = time.perf_counter()
    s = builtin_scenario(req.scenario)
    eps = _epsilon_value(req.epsilon)
    mu = s.static_clearance
    cfg = PlannerConfig(
        epsilon=eps,
        move_cap=req.move_cap,
        mode=req.mode,
        max_expansions=req.max_expansions,
    )
    params = multi_robot_params(eps, [mu] * s.num_robots, 2)
    grids = [staggered_grid(p.grid) for p in params]
    robots = tuple(RobotSpec(rb.radius, mu, rb.start, rb.goal) for rb in s.robots)
    problem = MultiRobotProblem(workspace=s.workspace, robots=robots, cost_metric="sum")
    problem.validate_premises()
    roadmaps = []
    for rb, p, g in zip(s.robots, params, grids):
        ws = s.workspace.inflate(rb.radius)
        roadmaps.append(build_prm(MotionProblem(ws, rb.start, rb.goal), g, p.radius))
    if req.mode == "composite_astar":
        outcome: PlanOutcome = plan_composite_astar(problem, roadmaps, cfg)
    else:
        outcome = plan_prioritized_timing(problem, roadmaps, cfg, params=params, grids=grids)
    ref = reference_cost(s)
    cost = None
    ratio = None
    if outcome.success:
        report = validate_composite_path(problem, outcome.path, steps_per_edge=req.validate_steps)
        if not report.ok:
            raise InternalInvariantError(
                f"plan for {s.name!r} failed dense replay validation"
            )
        cost = float(outcome.path.cost)
        ratio = cost / ref
    return MrmpPlanResponse(
        success=outcome.success,
        reason=outcome.reason,
        cost=cost,
        reference_cost=ref,
        reference_lower_bound_only=s.reference_lower_bound_only,
        ratio=ratio,
        samples_per_robot=len(grids[0]),
        expansions=outcome.expansions,
        runtime_s=time.perf_counter() - t0,
        positions=(outcome.path.positions.tolist() if outcome.success else None),
    )


# ---------------------------------------------------------------------------
# experiment
# ---------------------------------------------------------------------------


class ExperimentRequest(BaseModel):
    scenario: str
    epsilons: list[str | float]
    compare_random: bool = False
    trials: int = 10
    seed: int = 0
    move_cap: int | None = None
    max_expansions: int = 500_000
    workers: int | None = None


class ExperimentResponse(BaseModel):
    scenario: str
    csv: str


def handle_experiment(req: ExperimentRequest, log=None) -> ExperimentResponse:
    s = builtin_scenario(req.scenario)
    epsilons = [_epsilon_value(e) for e in req.epsilons]
    if not epsilons:
        raise InvalidInputError("experiment needs at least one epsilon")
    cfg = PlannerConfig(
        epsilon=epsilons[0], move_cap=req.move_cap, max_expansions=req.max_expansions
    )
    if req.compare_random:
        result = run_random_comparison(
            s,
            epsilons,
            trials=req.trials,
            base_seed=req.seed,
            config=cfg,
            workers=req.workers,
            log=log,
        )
    else:
        result = run_ratio_sweep(s, epsilons, config=cfg, workers=req.workers, log=log)
    return ExperimentResponse(scenario=s.name, csv=result.to_csv_text())


# ---------------------------------------------------------------------------
# scenarios / render
# ---------------------------------------------------------------------------


class ScenarioSummary(BaseModel):
    name: str
    robots: int
    radius: float
    static_clearance: float
    obstacles: int
    reference_kind: str
    reference_lower_bound_only: bool
    notes: str


class ScenarioListResponse(BaseModel):
    scenarios: list[ScenarioSummary]


def handle_scenario_list() -> ScenarioListResponse:
    out = []
    for s in builtin_scenarios():
        out.append(
            ScenarioSummary(
                name=s.name,
                robots=s.num_robots,
                radius=s.robots[0].radius,
                static_clearance=s.static_clearance,
                obstacles=len(s.workspace.obstacles),
                reference_kind=s.reference_kind,
                reference_lower_bound_only=s.reference_lower_bound_only,
                notes=s.notes,
            )
        )
    return ScenarioListResponse(scenarios=out)


class RenderRequest(BaseModel):
    scenario: str
    epsilon: str | float | None = None
    mode: Literal["composite_astar", "prioritized_timing"] = "composite_astar"
    move_cap: int | None = None
    max_expansions: int = 500_000


class RenderResponse(BaseModel):
    scenario: str
    svg: str


def handle_render(req: RenderRequest) -> RenderResponse:
    """Render a scene as SVG; with an epsilon, plan first and overlay the
    trajectories."""
    s = builtin_scenario(req.scenario)
    positions = None
    if req.epsilon is not None:
        plan = handle_mrmp_plan(
            MrmpPlanRequest(
                scenario=req.scenario,
                epsilon=req.epsilon,
                mode=req.mode,
                move_cap=req.move_cap,
                max_expansions=req.max_expansions,
            )
        )
        if not plan.success:
            raise InvalidProblemError(
                f"cannot render a plan for {s.name!r}: planner reported {plan.reason}"
            )
        positions = np.asarray(plan.positions, dtype=np.float64)
    svg = render_scenario_svg(s, composite_positions=positions)
    return RenderResponse(scenario=s.name, svg=svg)


# ---------------------------------------------------------------------------
# FastAPI wiring
# ---------------------------------------------------------------------------


def create_app():
    from fastapi import FastAPI, HTTPException

    app = FastAPI(
        title="gridplan",
        description=(
            "Finite-sample near-optimal motion planning: deterministic "
            "staggered-grid sampling, PRM roadmaps with prescribed radii, "
            "sample-size calculators, and multi-robot tensor-roadmap planning."
        ),
    )

    def _guard(fn, *args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (InvalidInputError, InvalidProblemError) as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        except InternalInvariantError as exc:
            raise HTTPException(status_code=500, detail=str(exc)) from exc
        except GridplanError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc

    @app.get("/healthz")
    def healthz() -> dict:
        return {"status": "ok"}

    @app.get("/scenarios", response_model=ScenarioListResponse)
    def scenarios_route():
        return _guard(handle_scenario_list)

    @app.post("/bounds", response_model=BoundsResponse)
    def bounds_route(req: BoundsRequest):
        return _guard(handle_bounds, req)

    @app.post("/grid", response_model=GridResponse)
    def grid_route(req: GridRequest):
        return _guard(handle_grid, req)

    @app.post("/cover-check", response_model=CoverCheckResponse)
    def cover_check_route(req: CoverCheckRequest):
        return _guard(handle_cover_check, req)

    @app.post("/plan", response_model=PlanResponse)
    def plan_route(req: PlanRequest):
        return _guard(handle_plan, req)

    @app.post("/mrmp-plan", response_model=MrmpPlanResponse)
    def mrmp_plan_route(req: MrmpPlanRequest):
        return _guard(handle_mrmp_plan, req)

    @app.post("/experiment", response_model=ExperimentResponse)
    def experiment_route(req: ExperimentRequest):
        return _guard(handle_experiment, req)

    @app.post("/render", response_model=RenderResponse)
    def render_route(req: RenderRequest):
        return _guard(handle_render, req)

    return app


app = create_app()
