"""Multi-robot planning over the implicit tensor product of per-robot
roadmaps: optimal composite A* search, and a prioritized one-robot-at-a-time
constructive planner that snaps per-robot reference paths and interleaves
their timestamps.

Composite vertices are tuples of per-robot roadmap vertex indices. A
composite edge lets between one and ``move_cap`` robots traverse a roadmap
edge simultaneously (synchronized linear parameterization) while the rest
stay; an edge is valid iff every robot pair keeps its minimum distance above
the sum of radii throughout the motion (closed-form check).
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, InvalidProblemError
from .geometry import (
    CLEARANCE_TOL,
    Workspace,
    as_point,
    moving_pair_min_distance,
    moving_pair_min_distance_batch,
)
from .roadmap import PlannerParams, Roadmap, SnappedPath, shortest_path, snap_path
from .sampling import GridParams, SampleSet, omega_of

# Slack used when validating problem-instance clearance premises (separations
# may sit exactly at their bound by construction).
PREMISE_TOL = 1e-9


@dataclass(frozen=True)
class RobotSpec:
    """One disc robot: physical radius, clearance parameter delta, and its
    start/goal center configurations."""

    radius: float
    delta: float
    start: np.ndarray
    goal: np.ndarray

    def __post_init__(self):
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise InvalidInputError("robot radius must be finite and > 0")
        if not (math.isfinite(self.delta) and self.delta > 0):
            raise InvalidInputError("robot delta must be finite and > 0")
        object.__setattr__(self, "start", as_point(self.start))
        object.__setattr__(self, "goal", as_point(self.goal, dim=self.start.size))


@dataclass(frozen=True)
class MultiRobotProblem:
    """Workspace shared by R disc robots plus the cost metric (sum or max of
    per-robot trajectory lengths)."""

    workspace: Workspace
    robots: tuple[RobotSpec, ...]
    cost_metric: str = "sum"

    def __post_init__(self):
        object.__setattr__(self, "robots", tuple(self.robots))
        if len(self.robots) < 1:
            raise InvalidInputError("a multi-robot problem needs at least one robot")
        for rb in self.robots:
            if rb.start.size != self.workspace.dim:
                raise InvalidInputError("robot dimension does not match workspace dimension")
        if self.cost_metric not in ("sum", "max"):
            raise InvalidInputError("cost_metric must be 'sum' or 'max'")

    @property
    def num_robots(self) -> int:
        return len(self.robots)

    @property
    def dim(self) -> int:
        return self.workspace.dim

    def validate_premises(self) -> None:
        """Check the clearance premises: every start/goal has clearance above
        its delta w.r.t. obstacles inflated by the robot radius, and pairwise
        start (and goal) separations exceed the radius sums plus the larger
        delta (tolerance PREMISE_TOL; bounds may be met with equality)."""
        for idx, rb in enumerate(self.robots):
            ws = self.workspace.inflate(rb.radius)
            for label, p in (("start", rb.start), ("goal", rb.goal)):
                clearance = ws.signed_clearance(p)
                if clearance < rb.delta - PREMISE_TOL:
                    raise InvalidProblemError(
                        f"robot {idx} {label} clearance {clearance:.6g} is below delta {rb.delta:.6g}"
                    )
        for i, j in itertools.combinations(range(len(self.robots)), 2):
            ri, rj = self.robots[i], self.robots[j]
            need = ri.radius + rj.radius + max(ri.delta, rj.delta)
            for label, pi, pj in (("start", ri.start, rj.start), ("goal", ri.goal, rj.goal)):
                sep = float(np.linalg.norm(pi - pj))
                if sep < need - PREMISE_TOL:
                    raise InvalidProblemError(
                        f"robots {i},{j} {label} separation {sep:.6g} is below the required {need:.6g}"
                    )


@dataclass(frozen=True)
class PlannerConfig:
    """Planner knobs: stretch epsilon, how many robots may move per composite
    edge (None = default: all for R <= 3, one for R >= 4), search mode, and
    an expansion budget for the A* search."""

    epsilon: float
    move_cap: int | None = None
    mode: str = "composite_astar"
    tie_break: str = "f_h_insertion"
    max_expansions: int = 500_000

    def __post_init__(self):
        if not ((math.isfinite(self.epsilon) and self.epsilon > 0) or math.isinf(self.epsilon)):
            raise InvalidInputError("epsilon must be > 0 or infinity")
        if self.mode not in ("composite_astar", "prioritized_timing"):
            raise InvalidInputError("mode must be composite_astar or prioritized_timing")
        if self.move_cap is not None and self.move_cap < 1:
            raise InvalidInputError("move_cap must be >= 1")

    def effective_move_cap(self, num_robots: int) -> int:
        if self.move_cap is not None:
            return min(self.move_cap, num_robots)
        return num_robots if num_robots <= 3 else 1


def multi_robot_params(epsilon: float, deltas, dim: int) -> list[PlannerParams]:
    """Per-robot grid and radius for the multi-robot guarantee: omega =
    eps/(2(eps+2)), beta_i = omega*delta_i, gamma_i = delta_i, radius_i =
    delta_i*(eps+1)/(eps+2). The identity radius_i = 2*beta_i + rho_i with
    rho_i = delta_i/(eps+2) holds."""
    w = omega_of(epsilon)
    out = []
    for delta in np.atleast_1d(np.asarray(deltas, dtype=np.float64)):
        delta = float(delta)
        if not (0 < delta < 0.5):
            raise InvalidInputError("each delta must lie in (0, 0.5)")
        if math.isinf(epsilon):
            radius = delta
            rho = 0.0
        else:
            radius = delta * (epsilon + 1.0) / (epsilon + 2.0)
            rho = delta / (epsilon + 2.0)
        out.append(PlannerParams(grid=GridParams(beta=w * delta, gamma=delta, dim=dim), radius=radius, rho=rho))
    return out


@dataclass
class CompositePath:
    """A solution over the tensor roadmap: the composite waypoint sequence
    (positions of every robot at every step), per-robot lengths, and cost."""

    positions: np.ndarray  # (steps+1, R, d)
    cost: float
    metric: str
    per_robot_lengths: np.ndarray  # (R,)
    vertex_indices: list[tuple] | None = None

    @property
    def num_steps(self) -> int:
        return int(self.positions.shape[0]) - 1

    def robot_trajectory(self, i: int) -> np.ndarray:
        return self.positions[:, i, :]


@dataclass
class PlanOutcome:
    success: bool
    reason: str
    path: CompositePath | None = None
    expansions: int = 0
    generated: int = 0


def path_cost(p: CompositePath, metric: str) -> float:
    """Sum or max of per-robot trajectory lengths, recomputed from the
    stored positions."""
    diffs = np.diff(p.positions, axis=0)
    lengths = np.linalg.norm(diffs, axis=2).sum(axis=0)
    if metric == "sum":
        return float(lengths.sum())
    if metric == "max":
        return float(lengths.max()) if lengths.size else 0.0
    raise InvalidInputError("metric must be 'sum' or 'max'")


def _pairwise_ok_static(positions: np.ndarray, radii: np.ndarray) -> bool:
    R = positions.shape[0]
    for i, j in itertools.combinations(range(R), 2):
        if (
            float(np.linalg.norm(positions[i] - positions[j])) - (radii[i] + radii[j])
            <= CLEARANCE_TOL
        ):
            return False
    return True


def tensor_neighbors(
    v: tuple,
    roadmaps: list[Roadmap],
    problem: MultiRobotProblem,
    config: PlannerConfig,
) -> list[tuple[tuple, float]]:
    """All valid composite neighbors of v with their sum-metric edge costs.

    Between 1 and move_cap robots traverse a roadmap edge while the rest
    stay; a candidate survives iff for every robot pair involving a mover,
    the closed-form minimum distance during the synchronized motion exceeds
    the sum of radii (strictly, beyond CLEARANCE_TOL). Enumeration order is
    deterministic: mover subsets in lexicographic order, then per-robot
    neighbor lists in index order."""
    R = len(roadmaps)
    radii = np.array([rb.radius for rb in problem.robots])
    move_cap = config.effective_move_cap(R)
    P0 = np.stack([roadmaps[i].vertices[v[i]] for i in range(R)])
    out: list[tuple[tuple, float]] = []
    for k in range(1, move_cap + 1):
        for subset in itertools.combinations(range(R), k):
            nbr_lists = []
            len_lists = []
            feasible = True
            for i in subset:
                nbrs, lens = roadmaps[i].neighbors(v[i])
                if nbrs.size == 0:
                    feasible = False
                    break
                nbr_lists.append(nbrs)
                len_lists.append(lens)
            if not feasible:
                continue
            sizes = [arr.size for arr in nbr_lists]
            ncombo = int(np.prod(sizes))
            grids = np.meshgrid(*nbr_lists, indexing="ij") if len(sizes) > 1 else [nbr_lists[0]]
            choice = [g.reshape(-1) for g in grids]
            lgrids = np.meshgrid(*len_lists, indexing="ij") if len(sizes) > 1 else [len_lists[0]]
            costs = np.zeros(ncombo)
            for lg in lgrids:
                costs += lg.reshape(-1)
            # End positions per mover (ncombo, d); stationary robots keep P0.
            P1_movers = {i: roadmaps[i].vertices[choice[s]] for s, i in enumerate(subset)}
            valid = np.ones(ncombo, dtype=bool)
            mover_set = set(subset)
            for i, j in itertools.combinations(range(R), 2):
                if i not in mover_set and j not in mover_set:
                    continue
                Ai0 = np.broadcast_to(P0[i], (ncombo, P0.shape[1]))
                Ai1 = P1_movers[i] if i in mover_set else Ai0
                Bj0 = np.broadcast_to(P0[j], (ncombo, P0.shape[1]))
                Bj1 = P1_movers[j] if j in mover_set else Bj0
                dmin = moving_pair_min_distance_batch(Ai0, Ai1, Bj0, Bj1)
                valid &= dmin - (radii[i] + radii[j]) > CLEARANCE_TOL
                if not valid.any():
                    break
            idx = np.where(valid)[0]
            for c in idx:
                w = list(v)
                for s, i in enumerate(subset):
                    w[i] = int(choice[s][c])
                out.append((tuple(w), float(costs[c])))
    return out


def _per_robot_goal_distances(roadmaps: list[Roadmap], goal_idx: list[int]) -> list[np.ndarray]:
    """Shortest-path distance from every vertex to the goal vertex in each
    robot's own roadmap (one Dijkstra per robot; graphs are undirected)."""
    from scipy.sparse.csgraph import dijkstra

    tables = []
    for rm, gi in zip(roadmaps, goal_idx):
        if rm.num_edges == 0:
            d = np.full(rm.num_vertices, np.inf)
            d[gi] = 0.0
        else:
            d = dijkstra(rm.adjacency_csr(), directed=False, indices=gi)
        tables.append(np.asarray(d).reshape(-1))
    return tables


def _positions_of(roadmaps: list[Roadmap], vertex: tuple) -> np.ndarray:
    return np.stack([roadmaps[i].vertices[vertex[i]] for i in range(len(roadmaps))])


def _build_composite_path(
    roadmaps: list[Roadmap], chain: list[tuple], metric: str
) -> CompositePath:
    positions = np.stack([_positions_of(roadmaps, v) for v in chain])
    diffs = np.diff(positions, axis=0)
    lengths = np.linalg.norm(diffs, axis=2).sum(axis=0) if positions.shape[0] > 1 else np.zeros(positions.shape[1])
    cost = float(lengths.sum()) if metric == "sum" else float(lengths.max() if lengths.size else 0.0)
    return CompositePath(
        positions=positions,
        cost=cost,
        metric=metric,
        per_robot_lengths=lengths,
        vertex_indices=chain,
    )


def plan_composite_astar(
    problem: MultiRobotProblem, roadmaps: list[Roadmap], config: PlannerConfig
) -> PlanOutcome:
    """Optimal A* search of the collision-pruned tensor roadmap under the
    sum metric, with the admissible heuristic sum of per-robot shortest-path
    distances to goal. Ties break by (f, h, insertion order).

    With the max metric the same sum-optimal search runs and the returned
    path is re-costed by the max rule (best effort: optimality is guaranteed
    for the sum metric only)."""
    R = problem.num_robots
    if len(roadmaps) != R:
        raise InvalidInputError("one roadmap per robot is required")
    start = []
    goal = []
    for i, rb in enumerate(problem.robots):
        si = roadmaps[i].vertex_index(rb.start)
        gi = roadmaps[i].vertex_index(rb.goal)
        if si is None or gi is None:
            raise InvalidInputError("robot start/goal must be vertices of its roadmap")
        start.append(si)
        goal.append(gi)
    start = tuple(start)
    goal = tuple(goal)
    radii = np.array([rb.radius for rb in problem.robots])
    if not _pairwise_ok_static(_positions_of(roadmaps, start), radii):
        raise InvalidProblemError("composite start configuration is in pairwise collision")
    if not _pairwise_ok_static(_positions_of(roadmaps, goal), radii):
        raise InvalidProblemError("composite goal configuration is in pairwise collision")

    h_tables = _per_robot_goal_distances(roadmaps, list(goal))
    if any(not math.isfinite(h_tables[i][start[i]]) for i in range(R)):
        return PlanOutcome(False, "robot_goal_unreachable")

    def h_of(v: tuple) -> float:
        return float(sum(h_tables[i][v[i]] for i in range(R)))

    counter = itertools.count()
    g_score: dict[tuple, float] = {start: 0.0}
    came: dict[tuple, tuple | None] = {start: None}
    h0 = h_of(start)
    heap = [(h0, h0, next(counter), start)]
    closed: set[tuple] = set()
    expansions = 0
    generated = 0
    while heap:
        f, h, _, v = heapq.heappop(heap)
        if v in closed:
            continue
        if v == goal:
            chain = [v]
            while came[chain[-1]] is not None:
                chain.append(came[chain[-1]])
            chain.reverse()
            path = _build_composite_path(roadmaps, chain, problem.cost_metric)
            return PlanOutcome(True, "solved", path, expansions, generated)
        closed.add(v)
        expansions += 1
        if expansions > config.max_expansions:
            return PlanOutcome(False, "budget_exhausted", None, expansions, generated)
        gv = g_score[v]
        for w, cost in tensor_neighbors(v, roadmaps, problem, config):
            if w in closed:
                continue
            ng = gv + cost
            if ng < g_score.get(w, math.inf):
                g_score[w] = ng
                came[w] = v
                hw = h_of(w)
                if math.isfinite(hw):
                    generated += 1
                    heapq.heappush(heap, (ng + hw, hw, next(counter), w))
    return PlanOutcome(False, "unreachable", None, expansions, generated)


def merge_timestamp_events(times_per_robot) -> list[tuple[float, int, int]]:
    """Merge per-robot waypoint timestamps into one serialized move order.

    Input: for each robot, the increasing timestamp sequence of its snapped
    waypoints (element 0 is the start and produces no event). Output: one
    (timestamp, robot, leg) event per waypoint arrival, sorted by timestamp
    with ties broken by robot index, so exactly one robot advances per
    composite step and lower-indexed robots move first at shared times."""
    events = []
    for i, times in enumerate(times_per_robot):
        seq = [float(t) for t in np.asarray(times).reshape(-1)]
        if any(b <= a for a, b in zip(seq, seq[1:])):
            raise InvalidInputError(f"robot {i} timestamps must be strictly increasing")
        for leg in range(1, len(seq)):
            events.append((seq[leg], i, leg))
    events.sort(key=lambda e: (e[0], e[1], e[2]))
    return events


def plan_prioritized_timing(
    problem: MultiRobotProblem,
    roadmaps: list[Roadmap],
    config: PlannerConfig,
    params: list[PlannerParams] | None = None,
    grids=None,
) -> PlanOutcome:
    """Constructive planner that moves one robot at a time.

    Each robot's reference path is its own roadmap shortest path (other
    robots ignored). Every reference path is discretized by chord steps
    rho_i = delta_i/(eps+2) and snapped to the robot's grid; the per-robot
    (timestamp, leg) events are merged in increasing timestamp order with
    ties broken by robot index, yielding a composite path where exactly one
    robot advances per step. Every step is validated (mover against
    obstacles and against every stationary robot); a validation failure
    reports failure rather than raising, signaling that the instance
    violates the clearance premises. Requires finite epsilon (the chord
    step vanishes at epsilon = infinity).

    `params` defaults to the multi-robot parameters derived from
    config.epsilon and the robots' deltas; `grids` (the per-robot snap
    candidate sets) defaults to each roadmap's own vertex set."""
    if math.isinf(config.epsilon):
        raise InvalidInputError("prioritized timing requires a finite stretch parameter")
    R = problem.num_robots
    if params is None:
        params = multi_robot_params(
            config.epsilon, [rb.delta for rb in problem.robots], problem.dim
        )
    if grids is None:
        grids = [
            SampleSet(points=rm.vertices, provenance="explicit", seed=None, grid=None)
            for rm in roadmaps
        ]
    if len(roadmaps) != R or len(params) != R:
        raise InvalidInputError("one roadmap and parameter bundle per robot is required")
    snapped: list[SnappedPath] = []
    for i, rb in enumerate(problem.robots):
        res = shortest_path(roadmaps[i], rb.start, rb.goal)
        if not res.reachable:
            return PlanOutcome(False, "robot_path_unreachable")
        rho = params[i].rho
        if float(np.linalg.norm(rb.start - rb.goal)) < rho:
            # Endpoints closer than one chord step: a single direct leg (it
            # stays inside the start's clearance ball, hence free).
            snapped.append(
                SnappedPath(
                    times=np.array([0.0, 1.0]),
                    points=np.stack([rb.start, rb.goal]),
                    step=rho,
                )
            )
        else:
            snapped.append(snap_path(res.path, rho, grids[i]))

    events = merge_timestamp_events([sp.times for sp in snapped])

    radii = np.array([rb.radius for rb in problem.robots])
    current = [sp.points[0].copy() for sp in snapped]
    positions = [np.stack(current)]
    ws = problem.workspace
    for tau, i, leg in events:
        a = snapped[i].points[leg - 1]
        b = snapped[i].points[leg]
        ws_i = ws.inflate(problem.robots[i].radius)
        if ws_i.segment_clearance(a, b) <= CLEARANCE_TOL:
            return PlanOutcome(False, "obstacle_collision")
        for j in range(R):
            if j == i:
                continue
            dmin = moving_pair_min_distance(a, b, current[j], current[j])
            if dmin - (radii[i] + radii[j]) <= CLEARANCE_TOL:
                return PlanOutcome(False, "pairwise_collision")
        current[i] = b.copy()
        positions.append(np.stack(current))

    arr = np.stack(positions)
    diffs = np.diff(arr, axis=0)
    lengths = np.linalg.norm(diffs, axis=2).sum(axis=0) if arr.shape[0] > 1 else np.zeros(R)
    cost = float(lengths.sum()) if problem.cost_metric == "sum" else float(lengths.max())
    path = CompositePath(
        positions=arr,
        cost=cost,
        metric=problem.cost_metric,
        per_robot_lengths=lengths,
        vertex_indices=None,
    )
    return PlanOutcome(True, "solved", path, expansions=0, generated=len(events))


@dataclass(frozen=True)
class ReplayReport:
    ok: bool
    max_pair_penetration: float
    max_obstacle_penetration: float


def validate_composite_path(
    problem: MultiRobotProblem, path: CompositePath, steps_per_edge: int = 1000, tol: float = 1e-6
) -> ReplayReport:
    """Independent dense-time replay validator: sample every composite edge
    at `steps_per_edge` times and measure the deepest robot-robot and
    robot-obstacle penetration. ok iff neither exceeds `tol`."""
    R = problem.num_robots
    radii = np.array([rb.radius for rb in problem.robots])
    worst_pair = 0.0
    worst_obs = 0.0
    ts = np.linspace(0.0, 1.0, steps_per_edge + 1)
    for step in range(path.num_steps):
        A = path.positions[step]
        B = path.positions[step + 1]
        # (T, R, d) positions along the edge
        P = A[None, :, :] + ts[:, None, None] * (B - A)[None, :, :]
        for i, j in itertools.combinations(range(R), 2):
            d = np.linalg.norm(P[:, i, :] - P[:, j, :], axis=1)
            pen = float((radii[i] + radii[j] - d).max())
            worst_pair = max(worst_pair, pen)
        for i in range(R):
            if problem.workspace.obstacles:
                ws_i = problem.workspace.inflate(radii[i])
                clear = ws_i.signed_clearance_batch(P[:, i, :])
                worst_obs = max(worst_obs, float((-clear).max()))
    return ReplayReport(
        ok=worst_pair <= tol and worst_obs <= tol,
        max_pair_penetration=worst_pair,
        max_obstacle_penetration=worst_obs,
    )
