"""Single-robot probabilistic-roadmap construction over explicit sample
sets, exact shortest-path queries, and the chord-stepping path snapper used
to certify completeness properties.

The roadmap over samples X with connection radius r has vertex set
(X union {start, goal}) intersected with the free space, and an undirected
edge between every vertex pair within distance r whose straight segment is
collision-free. With the grid and radius from `single_robot_params`, the
shortest roadmap path is at most (1+eps) times the best delta-clear path.
"""

from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, InvalidProblemError
from .geometry import CLEARANCE_TOL, Workspace, as_point
from .sampling import GridParams, SampleSet, alpha_of, layer_count, staggered_grid


@dataclass(frozen=True)
class MotionProblem:
    """A single-robot query: workspace plus start and goal configurations."""

    workspace: Workspace
    start: np.ndarray
    goal: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "start", as_point(self.start, dim=self.workspace.dim))
        object.__setattr__(self, "goal", as_point(self.goal, dim=self.workspace.dim))


@dataclass(frozen=True)
class PlannerParams:
    """Grid parameters plus connection radius (and the chord step rho used
    in the completeness argument; the identity radius = 2*beta + rho holds)."""

    grid: GridParams
    radius: float
    rho: float


def single_robot_params(epsilon: float, delta: float, dim: int) -> PlannerParams:
    """Grid and connection radius guaranteeing (1+eps)-optimal solutions for
    every delta-clear single-robot problem: beta = alpha*delta, gamma = delta,
    r = 2*(eps+1)/sqrt(1+eps^2)*delta."""
    if not (math.isfinite(delta) and 0 < delta < 0.5):
        raise InvalidInputError("delta must lie in (0, 0.5)")
    a = alpha_of(epsilon)
    grid = GridParams(beta=a * delta, gamma=delta, dim=dim)
    if math.isinf(epsilon):
        radius = 2.0 * delta
        rho = 0.0
    else:
        radius = 2.0 * (epsilon + 1.0) / math.sqrt(1.0 + epsilon * epsilon) * delta
        rho = 2.0 * delta / math.sqrt(1.0 + epsilon * epsilon)
    return PlannerParams(grid=grid, radius=radius, rho=rho)


class Roadmap:
    """Immutable undirected geometric graph in CSR form."""

    def __init__(
        self,
        vertices: np.ndarray,
        edge_pairs: np.ndarray,
        radius: float,
        meta: dict | None = None,
    ):
        self.vertices = np.ascontiguousarray(np.asarray(vertices, dtype=np.float64))
        self.vertices.setflags(write=False)
        self.radius = float(radius)
        self.meta = dict(meta or {})
        n = self.vertices.shape[0]
        pairs = np.asarray(edge_pairs, dtype=np.int64).reshape(-1, 2)
        lengths = (
            np.linalg.norm(self.vertices[pairs[:, 0]] - self.vertices[pairs[:, 1]], axis=1)
            if pairs.size
            else np.zeros(0)
        )
        rows = np.concatenate([pairs[:, 0], pairs[:, 1]])
        cols = np.concatenate([pairs[:, 1], pairs[:, 0]])
        wts = np.concatenate([lengths, lengths])
        order = np.lexsort((cols, rows))
        self._rows = rows[order]
        self.indices = cols[order]
        self.lengths = wts[order]
        self.indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(rows, minlength=n), out=self.indptr[1:])
        self._edge_pairs = pairs
        self._index_of = None

    @property
    def num_vertices(self) -> int:
        return int(self.vertices.shape[0])

    @property
    def num_edges(self) -> int:
        return int(self._edge_pairs.shape[0])

    def neighbors(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = self.indptr[i], self.indptr[i + 1]
        return self.indices[lo:hi], self.lengths[lo:hi]

    def degree(self, i: int) -> int:
        return int(self.indptr[i + 1] - self.indptr[i])

    def edge_set(self) -> set[tuple[int, int]]:
        return {(int(min(a, b)), int(max(a, b))) for a, b in self._edge_pairs}

    def vertex_index(self, p: np.ndarray) -> int | None:
        """Index of an exactly matching vertex, or None."""
        if self._index_of is None:
            self._index_of = {
                self.vertices[i].tobytes(): i for i in range(self.num_vertices)
            }
        return self._index_of.get(np.ascontiguousarray(np.asarray(p, dtype=np.float64)).tobytes())

    def adjacency_csr(self):
        """scipy CSR matrix of edge lengths (for bulk shortest-path work)."""
        from scipy.sparse import csr_matrix

        n = self.num_vertices
        return csr_matrix((self.lengths, self.indices, self.indptr), shape=(n, n))

    def to_dict(self) -> dict:
        return {
            "vertices": self.vertices.tolist(),
            "edges": [
                [int(a), int(b), float(np.linalg.norm(self.vertices[a] - self.vertices[b]))]
                for a, b in self._edge_pairs
            ],
            "radius": self.radius,
            "meta": self.meta,
        }

    @staticmethod
    def from_dict(d: dict) -> "Roadmap":
        vertices = np.asarray(d["vertices"], dtype=np.float64)
        pairs = np.asarray([[e[0], e[1]] for e in d.get("edges", [])], dtype=np.int64)
        return Roadmap(vertices, pairs.reshape(-1, 2), float(d["radius"]), d.get("meta"))

    def save_json(self, path: str) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh)

    @staticmethod
    def load_json(path: str) -> "Roadmap":
        with open(path) as fh:
            return Roadmap.from_dict(json.load(fh))


def _candidate_pair_blocks(P: np.ndarray, radius: float):
    """Yield blocks of index pairs whose distance can be within `radius`,
    found with a uniform grid-bucket index of cell size `radius`. Each
    unordered pair appears exactly once across all blocks."""
    n, d = P.shape
    if n < 2:
        return
    cells = np.floor(P / radius).astype(np.int64)
    buckets: dict[tuple, list] = {}
    for idx, key in enumerate(map(tuple, cells)):
        buckets.setdefault(key, []).append(idx)
    buckets = {key: np.asarray(idxs, dtype=np.int64) for key, idxs in buckets.items()}
    # Enumerate each unordered cell pair once: a cell against itself and
    # against neighbor cells whose offset is lexicographically positive.
    offsets = []
    for off in np.ndindex(*([3] * d)):
        vec = tuple(o - 1 for o in off)
        if vec > tuple([0] * d):
            offsets.append(vec)
    for key, idxs in buckets.items():
        if idxs.size > 1:
            ii, jj = np.triu_indices(idxs.size, k=1)
            yield np.stack([idxs[ii], idxs[jj]], axis=1)
        for vec in offsets:
            other = buckets.get(tuple(k + v for k, v in zip(key, vec)))
            if other is not None:
                a = np.repeat(idxs, other.size)
                b = np.tile(other, idxs.size)
                yield np.stack([a, b], axis=1)


def build_prm(m: MotionProblem, samples: SampleSet, radius: float) -> Roadmap:
    """Radius-r roadmap over the free samples plus start and goal.

    Samples outside the unit cube or in collision are dropped; start and
    goal are always vertices (inserted unless they coincide exactly with a
    kept sample). An edge joins every vertex pair within `radius` whose
    straight segment has positive clearance."""
    if not radius > 0:
        raise InvalidInputError("connection radius must be > 0")
    ws = m.workspace
    if samples.points.size and samples.dim != ws.dim:
        raise InvalidInputError("sample dimension does not match workspace dimension")
    if ws.signed_clearance(m.start) <= CLEARANCE_TOL:
        raise InvalidProblemError("start configuration is in collision")
    if ws.signed_clearance(m.goal) <= CLEARANCE_TOL:
        raise InvalidProblemError("goal configuration is in collision")

    pts = samples.points.reshape(-1, ws.dim) if samples.points.size else np.empty((0, ws.dim))
    if pts.shape[0]:
        in_cube = np.all((pts >= 0.0) & (pts <= 1.0), axis=1)
        pts = pts[in_cube]
    if pts.shape[0]:
        free = ws.signed_clearance_batch(pts) > CLEARANCE_TOL
        pts = pts[free]

    vertex_rows = [pts]
    existing = {pts[i].tobytes() for i in range(pts.shape[0])}
    extra = []
    for endpoint in (m.start, m.goal):
        key = endpoint.tobytes()
        if key not in existing:
            extra.append(endpoint)
            existing.add(key)
    if extra:
        vertex_rows.append(np.asarray(extra))
    V = np.vstack(vertex_rows) if pts.size or extra else np.vstack([m.start[None], m.goal[None]])

    # Pass 1: distance filter on hash-bucket candidate blocks (bounded memory).
    close_blocks = []
    for block in _candidate_pair_blocks(V, radius):
        dist = np.linalg.norm(V[block[:, 0]] - V[block[:, 1]], axis=1)
        keep = block[dist <= radius]
        if keep.shape[0]:
            close_blocks.append(keep)
    if close_blocks:
        cand = np.concatenate(close_blocks, axis=0)
    else:
        cand = np.empty((0, 2), dtype=np.int64)
    # Pass 2: exact obstacle clearance on the surviving pairs, chunked.
    if cand.shape[0] and ws.obstacles:
        kept = []
        chunk = 1_000_000
        for lo in range(0, cand.shape[0], chunk):
            part = cand[lo : lo + chunk]
            clear = ws.segments_free_mask(V[part[:, 0]], V[part[:, 1]])
            kept.append(part[clear])
        cand = np.concatenate(kept, axis=0) if kept else cand[:0]
    meta = {"workspace": ws.fingerprint()}
    if samples.grid is not None:
        g = samples.grid
        meta["grid"] = {"beta": g.beta, "gamma": g.gamma, "dim": g.dim}
    return Roadmap(V, cand, radius, meta)


@dataclass(frozen=True)
class ShortestPathResult:
    reachable: bool
    length: float
    path: np.ndarray | None
    vertex_indices: list[int] | None


def shortest_path(r: Roadmap, start: np.ndarray, goal: np.ndarray) -> ShortestPathResult:
    """Exact Dijkstra shortest path between two existing vertices by summed
    Euclidean edge length. Ties between equal-length paths are broken toward
    lexicographically smaller predecessor vertices, so the returned path is
    deterministic and invariant to vertex-order permutations."""
    si = r.vertex_index(start)
    gi = r.vertex_index(goal)
    if si is None or gi is None:
        raise InvalidInputError("shortest_path endpoints must be existing roadmap vertices")
    n = r.num_vertices
    # Rank vertices lexicographically by coordinates for tie-breaking.
    lex_rank = np.empty(n, dtype=np.int64)
    lex_rank[np.lexsort(r.vertices.T[::-1])] = np.arange(n)

    dist = np.full(n, np.inf)
    pred = np.full(n, -1, dtype=np.int64)
    dist[si] = 0.0
    heap = [(0.0, int(lex_rank[si]), si)]
    done = np.zeros(n, dtype=bool)
    while heap:
        du, _, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        if u == gi:
            break
        nbrs, wts = r.neighbors(u)
        for v, w in zip(nbrs, wts):
            v = int(v)
            nd = du + float(w)
            if nd < dist[v]:
                dist[v] = nd
                pred[v] = u
                heapq.heappush(heap, (nd, int(lex_rank[v]), v))
            elif nd == dist[v] and pred[v] >= 0 and lex_rank[u] < lex_rank[pred[v]]:
                pred[v] = u
    if not done[gi] and not math.isfinite(dist[gi]):
        return ShortestPathResult(False, math.inf, None, None)
    chain = [gi]
    while chain[-1] != si:
        chain.append(int(pred[chain[-1]]))
    chain.reverse()
    return ShortestPathResult(True, float(dist[gi]), r.vertices[chain], chain)


@dataclass(frozen=True)
class SnappedPath:
    """Chord-stepping discretization of a continuous path, snapped to grid
    points: times in [0,1], one point per time, constant chord step."""

    times: np.ndarray
    points: np.ndarray
    step: float

    def __post_init__(self):
        object.__setattr__(self, "times", np.asarray(self.times, dtype=np.float64))
        object.__setattr__(self, "points", np.asarray(self.points, dtype=np.float64))

    def __len__(self) -> int:
        return int(self.times.size)

    def total_length(self) -> float:
        if self.points.shape[0] < 2:
            return 0.0
        return float(np.linalg.norm(np.diff(self.points, axis=0), axis=1).sum())


def _path_arclength_param(waypoints: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Cumulative arc-length fractions of polyline vertices (parameterizes
    the path by normalized arc length)."""
    segs = np.diff(waypoints, axis=0)
    lens = np.linalg.norm(segs, axis=1)
    total = lens.sum()
    if total <= 0:
        raise InvalidInputError("path must have positive length")
    cum = np.concatenate([[0.0], np.cumsum(lens)]) / total
    return cum, lens


def _chord_times(waypoints: np.ndarray, rho: float) -> list[tuple[int, float]]:
    """Walk the polyline and emit (segment index, local t) positions where
    the straight-line distance from the previously emitted point first
    reaches rho; exact per-segment quadratic crossing."""
    emitted = [(0, 0.0)]
    p_prev = waypoints[0].copy()
    seg = 0
    t_cur = 0.0
    nseg = waypoints.shape[0] - 1
    while seg < nseg:
        a = waypoints[seg]
        b = waypoints[seg + 1]
        u = b - a
        uu = float(u @ u)
        if uu == 0.0:
            seg += 1
            t_cur = 0.0
            continue
        w = a - p_prev
        # ||w + t*u||^2 = rho^2, smallest root in (t_cur, 1]
        c2 = uu
        c1 = 2.0 * float(w @ u)
        c0 = float(w @ w) - rho * rho
        disc = c1 * c1 - 4.0 * c2 * c0
        t_hit = None
        if disc >= 0.0:
            sq = math.sqrt(disc)
            for root in ((-c1 - sq) / (2.0 * c2), (-c1 + sq) / (2.0 * c2)):
                if t_cur < root <= 1.0:
                    # Upward crossing only: distance increasing at the root.
                    if 2.0 * c2 * root + c1 >= 0.0:
                        t_hit = root
                        break
        if t_hit is None:
            seg += 1
            t_cur = 0.0
            continue
        emitted.append((seg, float(t_hit)))
        p_prev = a + t_hit * u
        t_cur = float(t_hit)
    end = (nseg - 1, 1.0)
    if emitted[-1] != end:
        # When the last chord crossing lands within roundoff of the path end
        # (rho divides the length exactly), replace it instead of appending a
        # duplicate endpoint, keeping the time sequence strictly increasing.
        if len(emitted) > 1 and float(np.linalg.norm(waypoints[-1] - p_prev)) <= 1e-12:
            emitted[-1] = end
        else:
            emitted.append(end)
    return emitted


def _nearest_grid_point_lexmin(q: np.ndarray, grid: SampleSet) -> np.ndarray:
    """Nearest grid point, breaking distance ties toward the
    lexicographically smallest point."""
    g = grid.grid
    if grid.provenance == "staggered" and g is not None:
        w = g.cell_halfwidth
        m = layer_count(g.beta, g.gamma, g.dim)
        cands = []
        if m >= 1:
            # Per-axis nearest among gamma + (2k-1)w, k=1..m; half-ties take
            # the smaller coordinate.
            k1 = np.clip(np.ceil((q - g.gamma + w) / (2.0 * w) - 0.5), 1, m)
            cands.append(g.gamma + (2.0 * k1 - 1.0) * w)
        k2 = np.clip(np.ceil((q - g.gamma) / (2.0 * w) - 0.5), 0, m)
        cands.append(g.gamma + 2.0 * k2 * w)
        best = None
        best_d = math.inf
        for c in cands:
            dd = float(np.linalg.norm(q - c))
            if dd < best_d or (dd == best_d and tuple(c) < tuple(best)):
                best, best_d = c, dd
        return best
    pts = grid.points
    d = np.linalg.norm(pts - q, axis=1)
    idx = np.where(d == d.min())[0]
    if idx.size > 1:
        sub = pts[idx]
        idx = idx[np.lexsort(sub.T[::-1])[:1]]
    return pts[int(idx[0])].copy()


def snap_path(sigma: np.ndarray, rho: float, grid: SampleSet) -> SnappedPath:
    """Discretize a piecewise-linear path by chord steps of length rho and
    snap each intermediate stop to its nearest grid point.

    The path is parameterized by normalized arc length. Times are emitted
    whenever the chord distance from the previous emitted point first
    reaches rho (exact per-segment quadratic crossings); the first and last
    snapped points are the path endpoints themselves."""
    if not rho > 0:
        raise InvalidInputError("chord step rho must be > 0")
    if len(grid) == 0:
        raise InvalidInputError("cannot snap to an empty grid")
    sigma = np.asarray(sigma, dtype=np.float64)
    if sigma.ndim != 2 or sigma.shape[0] < 2:
        raise InvalidInputError("path must be a polyline of at least two waypoints")
    if float(np.linalg.norm(sigma[0] - sigma[-1])) < rho:
        raise InvalidInputError("endpoint separation below the chord step is not supported")
    cum, lens = _path_arclength_param(sigma)
    total = float(lens.sum())
    stops = _chord_times(sigma, rho)
    times = []
    points = []
    for seg, t in stops:
        arc = (cum[seg] * total + t * float(lens[seg])) / total
        times.append(arc)
        points.append(sigma[seg] + t * (sigma[seg + 1] - sigma[seg]))
    times = np.asarray(times)
    times[0], times[-1] = 0.0, 1.0
    Z = np.empty((len(points), sigma.shape[1]))
    Z[0] = sigma[0]
    Z[-1] = sigma[-1]
    for i in range(1, len(points) - 1):
        Z[i] = _nearest_grid_point_lexmin(points[i], grid)
    return SnappedPath(times=times, points=Z, step=float(rho))


def path_length(points: np.ndarray) -> float:
    """Total Euclidean length of a polyline."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[0] < 2:
        return 0.0
    return float(np.linalg.norm(np.diff(pts, axis=0), axis=1).sum())


def grid_for_params(params: PlannerParams, *, max_points: int | None = None) -> SampleSet:
    """Staggered grid for a parameter bundle (convenience wrapper)."""
    return staggered_grid(params.grid, max_points=max_points)
