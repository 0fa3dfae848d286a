"""Benchmark scenes, reference costs, and experiment drivers.

A scenario bundles a planar workspace, a team of disc robots with start and
goal centers, and its static clearance `mu`: the tightest margin over
inter-robot start separations, inter-robot goal separations, and start/goal
clearances to obstacles inflated by the robot radius. Every scene is designed
so that `mu` is pinned exactly by a named feature (a robot pair or a wall
disc), and loading validates the stored value against a recomputation.

Experiment drivers sweep the stretch parameter epsilon over a scene with all
robot clearances set to `delta_i = mu`, plan on per-robot staggered-grid
roadmaps, revalidate every reported plan by dense replay, and compare the
realized cost against a documented per-scene reference:

- ``independent_paths``: sum of per-robot shortest delta-clear path lengths.
  With no obstacles this is the sum of straight-line distances; otherwise it
  is computed by a high-resolution single-robot roadmap oracle (epsilon=0.1)
  and cached. For scenes where robots must interact this is a lower bound
  only, and is flagged as such.
- ``circle_perimeter``: 2*pi*rho_c where rho_c is the circumradius of the
  start configuration; used for the rotating-ring scene whose optimal motion
  is a full convoy rotation.
- ``sum_straight``: sum of straight-line start-to-goal distances, exact for
  non-interacting lane shifts.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .errors import InternalInvariantError, InvalidInputError, InvalidProblemError
from .geometry import Disc, Workspace, as_point
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
from .roadmap import MotionProblem, build_prm, single_robot_params
from .sampling import random_samples, staggered_grid

SCHEMA_VERSION = 1
MU_TOL = 1e-6

REFERENCE_KINDS = ("independent_paths", "circle_perimeter", "sum_straight")

# Stretch factors swept by default in experiments, densest grids last.
DEFAULT_EPSILON_GRID = (math.inf, 50.0, 20.0, 10.0, 5.0, 2.0, 1.5, 1.0, 0.75)


@dataclass(frozen=True, eq=False)
class ScenarioRobot:
    """One robot entry of a scenario: disc radius and start/goal centers."""

    radius: float
    start: np.ndarray
    goal: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "start", as_point(self.start, dim=2))
        object.__setattr__(self, "goal", as_point(self.goal, dim=2))
        if not self.radius > 0:
            raise InvalidInputError("robot radius must be positive")


@dataclass(frozen=True, eq=False)
class ScenarioFile:
    """A named planar multi-robot scene with its measured static clearance
    and the kind of reference cost documented for it."""

    name: str
    workspace: Workspace
    robots: tuple[ScenarioRobot, ...]
    static_clearance: float
    reference_kind: str
    reference_lower_bound_only: bool = False
    notes: str = ""

    def __post_init__(self):
        object.__setattr__(self, "robots", tuple(self.robots))

    @property
    def num_robots(self) -> int:
        return len(self.robots)

    def validate(self) -> None:
        """Structural checks plus the clearance invariant: the stored
        static_clearance matches the recomputed one within MU_TOL."""
        if self.workspace.dim != 2:
            raise InvalidInputError("scenario workspaces are planar (dim must be 2)")
        if not self.robots:
            raise InvalidInputError("scenario needs at least one robot")
        if self.reference_kind not in REFERENCE_KINDS:
            raise InvalidInputError(f"unknown reference kind {self.reference_kind!r}")
        for rb in self.robots:
            for p in (rb.start, rb.goal):
                if np.any(p < 0.0) or np.any(p > 1.0):
                    raise InvalidInputError("robot endpoints must lie in the unit square")
        mu = compute_static_clearance(self)
        if not mu > 0:
            raise InvalidInputError(f"scenario {self.name!r} has nonpositive static clearance {mu}")
        if abs(mu - self.static_clearance) > MU_TOL:
            raise InvalidInputError(
                f"scenario {self.name!r} stores static_clearance {self.static_clearance} "
                f"but recomputation gives {mu}"
            )

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "name": self.name,
            "workspace": self.workspace.to_dict(),
            "robots": [
                {
                    "radius": rb.radius,
                    "start": [float(x) for x in rb.start],
                    "goal": [float(x) for x in rb.goal],
                }
                for rb in self.robots
            ],
            "static_clearance": self.static_clearance,
            "reference": {
                "kind": self.reference_kind,
                "lower_bound_only": self.reference_lower_bound_only,
            },
            "notes": self.notes,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ScenarioFile":
        version = d.get("schema_version")
        if version != SCHEMA_VERSION:
            raise InvalidInputError(f"unsupported scenario schema version {version!r}")
        ref = d.get("reference", {})
        s = cls(
            name=str(d["name"]),
            workspace=Workspace.from_dict(d["workspace"]),
            robots=tuple(
                ScenarioRobot(radius=float(r["radius"]), start=r["start"], goal=r["goal"])
                for r in d["robots"]
            ),
            static_clearance=float(d["static_clearance"]),
            reference_kind=str(ref.get("kind", "sum_straight")),
            reference_lower_bound_only=bool(ref.get("lower_bound_only", False)),
            notes=str(d.get("notes", "")),
        )
        s.validate()
        return s

    def save_json(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load_json(cls, path) -> "ScenarioFile":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def fingerprint(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def compute_static_clearance(s: ScenarioFile) -> float:
    """The tightest static margin of the scene: min over inter-robot start
    separations minus radius sums, the same for goals, and (when obstacles
    exist) per-robot start/goal obstacle clearances minus the robot radius."""
    terms = []
    R = s.num_robots
    for i in range(R):
        for j in range(i + 1, R):
            ri, rj = s.robots[i], s.robots[j]
            terms.append(float(np.linalg.norm(ri.start - rj.start)) - (ri.radius + rj.radius))
            terms.append(float(np.linalg.norm(ri.goal - rj.goal)) - (ri.radius + rj.radius))
    if s.workspace.obstacles:
        for rb in s.robots:
            terms.append(s.workspace.signed_clearance(rb.start) - rb.radius)
            terms.append(s.workspace.signed_clearance(rb.goal) - rb.radius)
    if not terms:
        return math.inf
    return min(terms)


# ---------------------------------------------------------------------------
# Built-in scenes
# ---------------------------------------------------------------------------


def _rot90(p: tuple[float, float]) -> tuple[float, float]:
    """Rotate a point by +90 degrees about the square center (0.5, 0.5)."""
    return (0.5 - (p[1] - 0.5), 0.5 + (p[0] - 0.5))


def _cross2() -> ScenarioFile:
    # Two robots swap sides along crossing diagonals. The 0.2 separation of
    # the two starts (and of the two goals) minus the 0.18 radius sum pins
    # mu = 0.02. The straight solo lines pass within 0.1789 of the other
    # robot's endpoints (< 0.18), so any valid plan must coordinate.
    r = 0.09
    robots = (
        ScenarioRobot(r, (0.3, 0.4), (0.7, 0.6)),
        ScenarioRobot(r, (0.3, 0.6), (0.7, 0.4)),
    )
    s = ScenarioFile(
        name="cross2",
        workspace=Workspace(dim=2, obstacles=()),
        robots=robots,
        static_clearance=0.02,
        reference_kind="independent_paths",
        reference_lower_bound_only=True,
        notes=(
            "Two discs cross the square on intersecting diagonals. The "
            "reference cost is the sum of straight-line lengths, a lower "
            "bound only: no schedule of the straight paths is collision-free."
        ),
    )
    s.validate()
    return s


def _spiral_wall_discs() -> tuple[Disc, ...]:
    """Wall of overlapping discs along the Archimedean spiral
    radius(theta) = 0.115 + (0.24 / 2 pi) * theta for theta in [0, 2.8 pi],
    centered in the square. Disc radius 0.015; arc spacing 0.014, which is
    below one disc radius, so consecutive discs overlap and seal the wall."""
    r0 = 0.115
    a = 0.24 / (2.0 * math.pi)
    theta_max = 2.8 * math.pi
    step_arc = 0.014
    thetas = []
    theta = 0.0
    while True:
        thetas.append(theta)
        if theta >= theta_max:
            break
        speed = math.hypot(r0 + a * theta, a)
        theta = min(theta_max, theta + step_arc / speed)
    discs = []
    for t in thetas:
        rad = r0 + a * t
        center = (0.5 + rad * math.cos(t), 0.5 + rad * math.sin(t))
        discs.append(Disc(center=center, radius=0.015))
    return tuple(discs)


def _spiral2() -> ScenarioFile:
    # Robot 1 starts at the square center, inside the spiral, and must wind
    # out through the 0.09-wide corridor before heading to the lower-left
    # corner. Robot 2 makes a short shuffle in the upper-right pocket outside
    # the wall. mu = 0.04 is pinned exactly by robot 1's start against the
    # innermost wall disc at angle zero: 0.115 - 0.015 - 0.06 = 0.04. Every
    # other wall disc sits at spiral radius > 0.115 from the start, and the
    # corridor midline keeps clearance 0.045 > mu.
    r = 0.06
    robots = (
        ScenarioRobot(r, (0.5, 0.5), (0.06, 0.06)),
        ScenarioRobot(r, (0.94, 0.86), (0.94, 0.94)),
    )
    s = ScenarioFile(
        name="spiral2",
        workspace=Workspace(dim=2, obstacles=_spiral_wall_discs()),
        robots=robots,
        static_clearance=0.04,
        reference_kind="independent_paths",
        reference_lower_bound_only=False,
        notes=(
            "A sealed spiral wall of overlapping discs. Robot 1 winds out "
            "from the center through a corridor of free width 0.09; robot 2 "
            "shuffles in the far corner. The robots never interact, so the "
            "sum of per-robot shortest delta-clear paths (computed by the "
            "epsilon=0.1 single-robot roadmap oracle) is an achievable "
            "reference."
        ),
    )
    s.validate()
    return s


def _circle4() -> ScenarioFile:
    # Four discs on a circle of radius 0.2*sqrt(2) about the center rotate
    # by one position (goals are the starts rotated +90 degrees). A sealed
    # ring of discs outside and a central disc inside confine the robots to
    # an annulus, so the only solution is a convoy rotation; the reference
    # cost is the circle perimeter 2*pi*rho_c. Adjacent start separations
    # 0.4 minus the 0.38 radius sum pin mu = 0.02.
    r = 0.19
    starts = [(0.7, 0.7), (0.3, 0.7), (0.3, 0.3), (0.7, 0.3)]
    robots = tuple(ScenarioRobot(r, p, _rot90(p)) for p in starts)
    ring = []
    n_ring = 36
    for k in range(n_ring):
        ang = 2.0 * math.pi * k / n_ring
        ring.append(
            Disc(center=(0.5 + 0.52 * math.cos(ang), 0.5 + 0.52 * math.sin(ang)), radius=0.02)
        )
    obstacles = tuple(ring) + (Disc(center=(0.5, 0.5), radius=0.06),)
    s = ScenarioFile(
        name="circle4",
        workspace=Workspace(dim=2, obstacles=obstacles),
        robots=robots,
        static_clearance=0.02,
        reference_kind="circle_perimeter",
        reference_lower_bound_only=False,
        notes=(
            "Four discs confined to an annulus between a central disc and a "
            "sealed outer ring rotate one position counterclockwise. The "
            "reference cost is the full convoy rotation 2*pi*rho_c with "
            "rho_c the circumradius of the start square."
        ),
    )
    s.validate()
    return s


def _lanes7() -> ScenarioFile:
    # Seven robots shift in parallel lanes: four in a bottom row, three in a
    # top row. Adjacent in-row separations of 0.2 minus the 0.16 radius sum
    # pin mu = 0.04; rows are far apart. Straight lane shifts never interact,
    # so the straight-line sum is the exact optimum.
    r = 0.08
    row_a = [0.2, 0.4, 0.6, 0.8]
    row_b = [0.3, 0.5, 0.7]
    robots = tuple(
        [ScenarioRobot(r, (x, 0.15), (x, 0.25)) for x in row_a]
        + [ScenarioRobot(r, (x, 0.75), (x, 0.85)) for x in row_b]
    )
    s = ScenarioFile(
        name="lanes7",
        workspace=Workspace(dim=2, obstacles=()),
        robots=robots,
        static_clearance=0.04,
        reference_kind="sum_straight",
        reference_lower_bound_only=False,
        notes=(
            "Seven discs advance one lane step in two distant rows. The sum "
            "of straight start-goal distances is the exact optimal cost."
        ),
    )
    s.validate()
    return s


def builtin_scenarios() -> list[ScenarioFile]:
    """The four built-in benchmark scenes, in canonical order."""
    return [_cross2(), _spiral2(), _circle4(), _lanes7()]


def builtin_scenario(name: str) -> ScenarioFile:
    for s in builtin_scenarios():
        if s.name == name:
            return s
    names = ", ".join(sc.name for sc in builtin_scenarios())
    raise InvalidInputError(f"unknown scenario {name!r} (built-in: {names})")


def scenario_names() -> list[str]:
    return [s.name for s in builtin_scenarios()]


# ---------------------------------------------------------------------------
# Reference costs
# ---------------------------------------------------------------------------

_REFERENCE_CACHE: dict[tuple[str, float], float] = {}


def _oracle_solo_length(s: ScenarioFile, rb: ScenarioRobot, oracle_epsilon: float) -> float:
    """Length of the shortest delta-clear path for one robot, found on a
    high-resolution single-robot staggered roadmap (delta = the scene's mu).
    Only the length is needed, so the distance query runs through scipy's
    Dijkstra rather than the tie-deterministic path extraction."""
    from scipy.sparse.csgraph import dijkstra

    params = single_robot_params(oracle_epsilon, s.static_clearance, 2)
    ws = s.workspace.inflate(rb.radius)
    grid = staggered_grid(params.grid)
    m = MotionProblem(ws, rb.start, rb.goal)
    rm = build_prm(m, grid, params.radius)
    si = rm.vertex_index(rb.start)
    gi = rm.vertex_index(rb.goal)
    if si is None or gi is None:
        raise InternalInvariantError("oracle roadmap lost its endpoint vertices")
    dist = dijkstra(rm.adjacency_csr(), directed=True, indices=si)
    if not math.isfinite(dist[gi]):
        raise InvalidProblemError(
            f"oracle roadmap (epsilon={oracle_epsilon}) failed to connect a robot "
            f"in scenario {s.name!r}"
        )
    return float(dist[gi])


def reference_cost(s: ScenarioFile, *, oracle_epsilon: float = 0.1) -> float:
    """The documented reference cost of a scene (see the module docstring).
    Oracle-based references are cached by scenario fingerprint."""
    if s.reference_kind == "sum_straight":
        return float(sum(np.linalg.norm(rb.goal - rb.start) for rb in s.robots))
    if s.reference_kind == "circle_perimeter":
        starts = np.stack([rb.start for rb in s.robots])
        center = starts.mean(axis=0)
        rho_c = float(np.linalg.norm(starts - center, axis=1).mean())
        return 2.0 * math.pi * rho_c
    if s.reference_kind == "independent_paths":
        if not s.workspace.obstacles:
            # The shortest delta-clear path in an obstacle-free square is the
            # straight segment.
            return float(sum(np.linalg.norm(rb.goal - rb.start) for rb in s.robots))
        key = (s.fingerprint(), float(oracle_epsilon))
        if key not in _REFERENCE_CACHE:
            _REFERENCE_CACHE[key] = float(
                sum(_oracle_solo_length(s, rb, oracle_epsilon) for rb in s.robots)
            )
        return _REFERENCE_CACHE[key]
    raise InvalidInputError(f"unknown reference kind {s.reference_kind!r}")


# ---------------------------------------------------------------------------
# Experiment drivers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepRow:
    """One epsilon cell of a ratio sweep."""

    scenario: str
    epsilon: float
    samples_per_robot: int
    cost: float | None
    reference_cost: float
    ratio: float | None
    runtime_s: float
    success: bool


@dataclass(frozen=True)
class ComparisonRow:
    """One (epsilon, sampling method) cell of a staggered-vs-random
    comparison. Staggered rows aggregate a single deterministic run; random
    rows aggregate `trials` seeded runs."""

    scenario: str
    epsilon: float
    method: str
    samples_per_robot: int
    trials: int
    success_rate: float
    mean_cost: float | None
    runtime_s: float


@dataclass(frozen=True)
class ExperimentResult:
    """Rows of an experiment, writable to (and re-readable from) CSV. All
    columns except runtime_s are deterministic for fixed inputs."""

    scenario: str
    rows: tuple

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))

    @property
    def kind(self) -> str:
        return "comparison" if self.rows and isinstance(self.rows[0], ComparisonRow) else "sweep"

    def to_csv_text(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        if self.kind == "sweep":
            writer.writerow(SWEEP_COLUMNS)
            for r in self.rows:
                writer.writerow(
                    [
                        r.scenario,
                        _fmt(r.epsilon),
                        r.samples_per_robot,
                        _fmt(r.cost),
                        _fmt(r.reference_cost),
                        _fmt(r.ratio),
                        _fmt(r.runtime_s),
                        "true" if r.success else "false",
                    ]
                )
        else:
            writer.writerow(COMPARISON_COLUMNS)
            for r in self.rows:
                writer.writerow(
                    [
                        r.scenario,
                        _fmt(r.epsilon),
                        r.method,
                        r.samples_per_robot,
                        r.trials,
                        _fmt(r.success_rate),
                        _fmt(r.mean_cost),
                        _fmt(r.runtime_s),
                    ]
                )
        return buf.getvalue()

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(self.to_csv_text())

    @classmethod
    def from_csv_text(cls, text: str) -> "ExperimentResult":
        reader = csv.reader(io.StringIO(text))
        try:
            header = next(reader)
        except StopIteration:
            raise InvalidInputError("empty experiment CSV") from None
        rows = []
        scenario = ""
        if header == list(SWEEP_COLUMNS):
            for rec in reader:
                if not rec:
                    continue
                scenario = rec[0]
                rows.append(
                    SweepRow(
                        scenario=rec[0],
                        epsilon=float(rec[1]),
                        samples_per_robot=int(rec[2]),
                        cost=_parse_opt(rec[3]),
                        reference_cost=float(rec[4]),
                        ratio=_parse_opt(rec[5]),
                        runtime_s=float(rec[6]),
                        success=rec[7] == "true",
                    )
                )
        elif header == list(COMPARISON_COLUMNS):
            for rec in reader:
                if not rec:
                    continue
                scenario = rec[0]
                rows.append(
                    ComparisonRow(
                        scenario=rec[0],
                        epsilon=float(rec[1]),
                        method=rec[2],
                        samples_per_robot=int(rec[3]),
                        trials=int(rec[4]),
                        success_rate=float(rec[5]),
                        mean_cost=_parse_opt(rec[6]),
                        runtime_s=float(rec[7]),
                    )
                )
        else:
            raise InvalidInputError(f"unrecognized experiment CSV header: {header}")
        return cls(scenario=scenario, rows=tuple(rows))

    @classmethod
    def read_csv(cls, path) -> "ExperimentResult":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_csv_text(fh.read())


SWEEP_COLUMNS = (
    "scenario",
    "epsilon",
    "samples_per_robot",
    "cost",
    "reference_cost",
    "ratio",
    "runtime_s",
    "success",
)
COMPARISON_COLUMNS = (
    "scenario",
    "epsilon",
    "method",
    "samples_per_robot",
    "trials",
    "success_rate",
    "mean_cost",
    "runtime_s",
)


def _fmt(x) -> str:
    if x is None:
        return ""
    return repr(float(x))


def _parse_opt(text: str):
    return None if text == "" else float(text)


def _resolve_workers(workers: int | None) -> int:
    if workers is None:
        env = os.environ.get("GRIDPLAN_WORKERS", "")
        try:
            workers = int(env) if env else 1
        except ValueError:
            raise InvalidInputError(f"GRIDPLAN_WORKERS must be an integer, got {env!r}") from None
    return max(1, int(workers))


def _multi_robot_problem(s: ScenarioFile) -> MultiRobotProblem:
    mu = s.static_clearance
    robots = tuple(RobotSpec(rb.radius, mu, rb.start, rb.goal) for rb in s.robots)
    return MultiRobotProblem(workspace=s.workspace, robots=robots, cost_metric="sum")


def _build_robot_roadmaps(s: ScenarioFile, params, sample_sets):
    """Per-robot PRMs over the given sample sets against the workspace
    inflated by each robot's radius."""
    roadmaps = []
    for rb, p, samples in zip(s.robots, params, sample_sets):
        ws = s.workspace.inflate(rb.radius)
        m = MotionProblem(ws, rb.start, rb.goal)
        roadmaps.append(build_prm(m, samples, p.radius))
    return roadmaps


def _plan_with_mode(problem, roadmaps, config, params, grids) -> PlanOutcome:
    if config.mode == "composite_astar":
        return plan_composite_astar(problem, roadmaps, config)
    if config.mode == "prioritized_timing":
        return plan_prioritized_timing(problem, roadmaps, config, params, grids)
    raise InvalidInputError(f"unknown planner mode {config.mode!r}")


def _cell_config(config: PlannerConfig | None, epsilon: float) -> PlannerConfig:
    if config is None:
        return PlannerConfig(epsilon=float(epsilon))
    return replace(config, epsilon=float(epsilon))


def _run_sweep_cell(
    s: ScenarioFile,
    epsilon: float,
    config: PlannerConfig | None,
    ref: float,
    validate_steps: int,
) -> SweepRow:
    t0 = time.perf_counter()
    mu = s.static_clearance
    cfg = _cell_config(config, epsilon)
    params = multi_robot_params(cfg.epsilon, [mu] * s.num_robots, 2)
    grids = [staggered_grid(p.grid) for p in params]
    problem = _multi_robot_problem(s)
    problem.validate_premises()
    roadmaps = _build_robot_roadmaps(s, params, grids)
    outcome = _plan_with_mode(problem, roadmaps, cfg, params, grids)
    cost = None
    ratio = None
    success = outcome.success
    if success:
        report = validate_composite_path(problem, outcome.path, steps_per_edge=validate_steps)
        if not report.ok:
            raise InternalInvariantError(
                f"planner output failed dense replay in {s.name!r} at epsilon={epsilon}: "
                f"pair penetration {report.max_pair_penetration:.3e}, obstacle penetration "
                f"{report.max_obstacle_penetration:.3e}"
            )
        cost = float(outcome.path.cost)
        ratio = cost / ref
    return SweepRow(
        scenario=s.name,
        epsilon=float(epsilon),
        samples_per_robot=len(grids[0]),
        cost=cost,
        reference_cost=ref,
        ratio=ratio,
        runtime_s=time.perf_counter() - t0,
        success=success,
    )


def _sweep_cell_payload(args) -> SweepRow:
    scen_dict, epsilon, config, ref, validate_steps = args
    s = ScenarioFile.from_dict(scen_dict)
    return _run_sweep_cell(s, epsilon, config, ref, validate_steps)


def run_ratio_sweep(
    s: ScenarioFile,
    epsilons,
    *,
    config: PlannerConfig | None = None,
    validate_steps: int = 1000,
    oracle_epsilon: float = 0.1,
    workers: int | None = None,
    log=None,
) -> ExperimentResult:
    """Plan the scene once per epsilon with delta_i = mu and report cost,
    ratio against the documented reference, runtime, and success per cell.
    Cells are independent; with workers > 1 they run in separate processes
    and are merged back in input order."""
    epsilons = [float(e) for e in epsilons]
    if not epsilons:
        raise InvalidInputError("ratio sweep needs at least one epsilon")
    s.validate()
    ref = reference_cost(s, oracle_epsilon=oracle_epsilon)
    nworkers = _resolve_workers(workers)
    rows: list[SweepRow]
    if nworkers > 1 and len(epsilons) > 1:
        payloads = [(s.to_dict(), e, config, ref, validate_steps) for e in epsilons]
        with ProcessPoolExecutor(max_workers=nworkers) as pool:
            rows = list(pool.map(_sweep_cell_payload, payloads))
    else:
        rows = []
        for e in epsilons:
            if log:
                log(f"[{s.name}] planning at epsilon={e:g}")
            rows.append(_run_sweep_cell(s, e, config, ref, validate_steps))
    if log:
        for r in rows:
            state = f"cost={r.cost:.6g} ratio={r.ratio:.4f}" if r.success else "failed"
            log(f"[{s.name}] epsilon={r.epsilon:g}: {state} ({r.runtime_s:.2f}s)")
    return ExperimentResult(scenario=s.name, rows=tuple(rows))


def _run_random_cell(
    s: ScenarioFile,
    epsilon: float,
    n_samples: int,
    seed: int,
    config: PlannerConfig | None,
    validate_steps: int,
) -> tuple[bool, float | None, float]:
    """One seeded random-sampling run at matched sample count and identical
    connection radius. Returns (success, cost, runtime)."""
    t0 = time.perf_counter()
    mu = s.static_clearance
    cfg = _cell_config(config, epsilon)
    params = multi_robot_params(cfg.epsilon, [mu] * s.num_robots, 2)
    sample_sets = [
        random_samples(n_samples, mu, 2, seed=seed * 1_000_003 + i)
        for i in range(s.num_robots)
    ]
    problem = _multi_robot_problem(s)
    problem.validate_premises()
    roadmaps = _build_robot_roadmaps(s, params, sample_sets)
    outcome = _plan_with_mode(problem, roadmaps, cfg, params, sample_sets)
    if not outcome.success:
        return False, None, time.perf_counter() - t0
    report = validate_composite_path(problem, outcome.path, steps_per_edge=validate_steps)
    if not report.ok:
        raise InternalInvariantError(
            f"random-sampling plan failed dense replay in {s.name!r} at epsilon={epsilon}"
        )
    return True, float(outcome.path.cost), time.perf_counter() - t0


def _random_cell_payload(args):
    scen_dict, epsilon, n_samples, seed, config, validate_steps = args
    s = ScenarioFile.from_dict(scen_dict)
    return _run_random_cell(s, epsilon, n_samples, seed, config, validate_steps)


def run_random_comparison(
    s: ScenarioFile,
    epsilons,
    *,
    trials: int = 10,
    base_seed: int = 0,
    config: PlannerConfig | None = None,
    validate_steps: int = 1000,
    oracle_epsilon: float = 0.1,
    workers: int | None = None,
    log=None,
) -> ExperimentResult:
    """Compare deterministic staggered sampling against uniform random
    sampling at matched per-robot sample count and identical connection
    radius. Per epsilon: one staggered run plus `trials` seeded random runs
    (seed stream: base_seed * trials-offset + robot index, documented so runs
    are reproducible). Reports success rate and mean cost over successes."""
    epsilons = [float(e) for e in epsilons]
    if not epsilons:
        raise InvalidInputError("random comparison needs at least one epsilon")
    if trials < 1:
        raise InvalidInputError("random comparison needs at least one trial")
    s.validate()
    ref = reference_cost(s, oracle_epsilon=oracle_epsilon)
    nworkers = _resolve_workers(workers)
    rows: list[ComparisonRow] = []
    for e in epsilons:
        if log:
            log(f"[{s.name}] staggered run at epsilon={e:g}")
        sweep = _run_sweep_cell(s, e, config, ref, validate_steps)
        rows.append(
            ComparisonRow(
                scenario=s.name,
                epsilon=e,
                method="staggered",
                samples_per_robot=sweep.samples_per_robot,
                trials=1,
                success_rate=1.0 if sweep.success else 0.0,
                mean_cost=sweep.cost,
                runtime_s=sweep.runtime_s,
            )
        )
        n = sweep.samples_per_robot
        seeds = [base_seed + 7919 * t for t in range(trials)]
        payloads = [(s.to_dict(), e, n, sd, config, validate_steps) for sd in seeds]
        if nworkers > 1 and trials > 1:
            with ProcessPoolExecutor(max_workers=nworkers) as pool:
                outcomes = list(pool.map(_random_cell_payload, payloads))
        else:
            outcomes = []
            for k, p in enumerate(payloads):
                if log:
                    log(f"[{s.name}] random trial {k + 1}/{trials} at epsilon={e:g}")
                outcomes.append(_random_cell_payload(p))
        succ = [c for ok, c, _ in outcomes if ok]
        total_rt = float(sum(rt for _, _, rt in outcomes))
        rows.append(
            ComparisonRow(
                scenario=s.name,
                epsilon=e,
                method="random",
                samples_per_robot=n,
                trials=trials,
                success_rate=len(succ) / trials,
                mean_cost=(float(np.mean(succ)) if succ else None),
                runtime_s=total_rt,
            )
        )
        if log:
            sr = rows[-1].success_rate
            mc = rows[-1].mean_cost
            log(
                f"[{s.name}] epsilon={e:g}: random success {sr:.0%}"
                + (f", mean cost {mc:.6g}" if mc is not None else "")
            )
    return ExperimentResult(scenario=s.name, rows=tuple(rows))
