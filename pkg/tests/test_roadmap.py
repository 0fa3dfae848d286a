"""Single-robot planner parameters, PRM construction, shortest paths, and
the chord-stepping path snapper."""

import math

import numpy as np
import pytest

from _synthetic import clear_path_instance, corridor_world, point_along, polyline_length
from gridplan.errors import InvalidInputError, InvalidProblemError
from gridplan.geometry import CLEARANCE_TOL, Disc, HyperBox, HyperSphere, Workspace
from gridplan.roadmap import (
    MotionProblem,
    Roadmap,
    build_prm,
    grid_for_params,
    path_length,
    shortest_path,
    single_robot_params,
    snap_path,
)
from gridplan.sampling import GridParams, SampleSet, random_samples, staggered_grid

EMPTY_2D = Workspace(dim=2, obstacles=())


def explicit_samples(points) -> SampleSet:
    return SampleSet(points=np.asarray(points, dtype=np.float64), provenance="explicit")


class TestSingleRobotParams:
    def test_unit_stretch_example(self):
        p = single_robot_params(1.0, 0.1, 2)
        assert p.grid.beta == pytest.approx(0.1 / math.sqrt(2.0), abs=1e-15)
        assert p.grid.gamma == 0.1
        assert p.radius == pytest.approx(0.4 / math.sqrt(2.0), abs=1e-15)
        assert p.radius == pytest.approx(0.282843, abs=5e-7)
        assert p.grid.beta == pytest.approx(0.070711, abs=5e-7)

    def test_unbounded_stretch_limits(self):
        p = single_robot_params(math.inf, 0.1, 2)
        assert p.grid.beta == 0.1
        assert p.radius == 0.2
        assert p.rho == 0.0

    def test_radius_identity_100_random(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            eps = float(10.0 ** rng.uniform(-1.5, 2.0))
            delta = float(rng.uniform(0.01, 0.49))
            dim = int(rng.integers(2, 6))
            p = single_robot_params(eps, delta, dim)
            assert p.radius == pytest.approx(2.0 * p.grid.beta + p.rho, rel=1e-12)

    def test_delta_validation(self):
        for bad in (0.0, -0.1, 0.5, 0.7, math.inf):
            with pytest.raises(InvalidInputError):
                single_robot_params(1.0, bad, 2)


class TestBuildPrm:
    def test_two_close_samples_one_edge(self):
        s = explicit_samples([[0.4, 0.5], [0.5, 0.5]])
        m = MotionProblem(workspace=EMPTY_2D, start=(0.4, 0.5), goal=(0.5, 0.5))
        r = build_prm(m, s, radius=0.15)
        assert r.num_vertices == 2
        assert r.edge_set() == {(0, 1)}

    def test_blocked_segment_no_edge(self):
        ws = Workspace(dim=2, obstacles=(Disc((0.45, 0.5), 0.02),))
        s = explicit_samples([[0.4, 0.5], [0.5, 0.5]])
        m = MotionProblem(workspace=ws, start=(0.4, 0.5), goal=(0.5, 0.5))
        r = build_prm(m, s, radius=0.15)
        assert r.num_edges == 0

    def test_interior_grid_vertex_has_at_least_8_neighbors(self):
        p = single_robot_params(1.0, 0.1, 2)
        grid = grid_for_params(p)
        m = MotionProblem(workspace=EMPTY_2D, start=(0.5, 0.5), goal=(0.9, 0.9))
        r = build_prm(m, grid, p.radius)
        center = r.vertex_index(np.array([0.5, 0.5]))
        if center is None:
            d = np.linalg.norm(r.vertices - np.array([0.5, 0.5]), axis=1)
            center = int(d.argmin())
            assert d[center] < 0.15
        assert r.degree(center) >= 8

    def test_out_of_cube_and_colliding_samples_dropped(self):
        ws = Workspace(dim=2, obstacles=(Disc((0.5, 0.5), 0.1),))
        s = explicit_samples([[1.2, 0.5], [-0.1, 0.2], [0.5, 0.5], [0.2, 0.2]])
        m = MotionProblem(workspace=ws, start=(0.2, 0.2), goal=(0.8, 0.8))
        r = build_prm(m, s, radius=0.3)
        # Only (0.2, 0.2) survives from the samples; goal is inserted.
        assert r.num_vertices == 2
        kept = {tuple(v) for v in r.vertices}
        assert (0.2, 0.2) in kept and (0.8, 0.8) in kept

    def test_endpoint_coinciding_with_sample_not_duplicated(self):
        s = explicit_samples([[0.3, 0.3], [0.7, 0.7]])
        m = MotionProblem(workspace=EMPTY_2D, start=(0.3, 0.3), goal=(0.6, 0.6))
        r = build_prm(m, s, radius=0.2)
        assert r.num_vertices == 3

    def test_colliding_endpoints_rejected(self):
        ws = Workspace(dim=2, obstacles=(Disc((0.5, 0.5), 0.1),))
        s = explicit_samples([[0.2, 0.2]])
        with pytest.raises(InvalidProblemError):
            build_prm(MotionProblem(workspace=ws, start=(0.5, 0.5), goal=(0.8, 0.8)), s, 0.2)
        with pytest.raises(InvalidProblemError):
            # Grazing contact counts as collision under the strict rule.
            build_prm(MotionProblem(workspace=ws, start=(0.6, 0.5), goal=(0.8, 0.8)), s, 0.2)

    def test_dimension_mismatch_rejected(self):
        s = explicit_samples([[0.2, 0.2, 0.2]])
        with pytest.raises(InvalidInputError):
            build_prm(MotionProblem(workspace=EMPTY_2D, start=(0.1, 0.1), goal=(0.9, 0.9)), s, 0.2)

    def test_nonpositive_radius_rejected(self):
        s = explicit_samples([[0.2, 0.2]])
        m = MotionProblem(workspace=EMPTY_2D, start=(0.1, 0.1), goal=(0.9, 0.9))
        with pytest.raises(InvalidInputError):
            build_prm(m, s, 0.0)


class TestBruteForceEquivalence:
    @pytest.mark.parametrize("seed", range(12))
    def test_edge_set_matches_all_pairs_oracle(self, seed):
        rng = np.random.default_rng(seed)
        obstacles = []
        for _ in range(int(rng.integers(0, 4))):
            if rng.random() < 0.5:
                c = rng.uniform(0.2, 0.8, size=2)
                obstacles.append(HyperSphere(c, float(rng.uniform(0.03, 0.1))))
            else:
                lo = rng.uniform(0.1, 0.7, size=2)
                hi = lo + rng.uniform(0.05, 0.2, size=2)
                obstacles.append(HyperBox(lo, np.minimum(hi, 0.95)))
        ws = Workspace(dim=2, obstacles=tuple(obstacles))
        start = goal = None
        while start is None or ws.signed_clearance(start) <= CLEARANCE_TOL:
            start = rng.uniform(0.05, 0.95, size=2)
        while goal is None or ws.signed_clearance(goal) <= CLEARANCE_TOL:
            goal = rng.uniform(0.05, 0.95, size=2)
        n = int(rng.integers(20, 180))
        samples = random_samples(n, 0.02, 2, seed=seed + 1000)
        radius = float(rng.uniform(0.08, 0.3))
        r = build_prm(MotionProblem(workspace=ws, start=start, goal=goal), samples, radius)

        V = r.vertices
        expected = set()
        for i in range(V.shape[0]):
            for j in range(i + 1, V.shape[0]):
                if np.linalg.norm(V[i] - V[j]) <= radius:
                    if ws.segment_clearance(V[i], V[j]) > CLEARANCE_TOL:
                        expected.add((i, j))
        assert r.edge_set() == expected

    def test_csr_bookkeeping_consistent(self):
        samples = random_samples(80, 0.05, 2, seed=5)
        m = MotionProblem(workspace=EMPTY_2D, start=(0.1, 0.1), goal=(0.9, 0.9))
        r = build_prm(m, samples, 0.25)
        assert sum(r.degree(i) for i in range(r.num_vertices)) == 2 * r.num_edges
        for i in range(r.num_vertices):
            nbrs, lens = r.neighbors(i)
            for v, w in zip(nbrs, lens):
                assert w == pytest.approx(float(np.linalg.norm(r.vertices[i] - r.vertices[v])))
                assert (min(i, int(v)), max(i, int(v))) in r.edge_set()


class TestShortestPath:
    def build_simple(self):
        p = single_robot_params(1.0, 0.1, 2)
        grid = grid_for_params(p)
        m = MotionProblem(workspace=EMPTY_2D, start=(0.2, 0.5), goal=(0.8, 0.5))
        return build_prm(m, grid, p.radius), m

    def test_same_endpoint_zero_length(self):
        r, m = self.build_simple()
        res = shortest_path(r, m.start, m.start)
        assert res.reachable
        assert res.length == 0.0
        assert res.path.shape == (1, 2)

    def test_isolated_vertices_unreachable(self):
        r = Roadmap(np.array([[0.2, 0.2], [0.8, 0.8]]), np.empty((0, 2), dtype=np.int64), 0.1)
        res = shortest_path(r, np.array([0.2, 0.2]), np.array([0.8, 0.8]))
        assert not res.reachable
        assert math.isinf(res.length)
        assert res.path is None

    def test_straight_corridor_within_stretch(self):
        r, m = self.build_simple()
        res = shortest_path(r, m.start, m.goal)
        straight = float(np.linalg.norm(m.goal - m.start))
        assert res.reachable
        assert straight - 1e-12 <= res.length <= 2.0 * straight + 1e-12
        assert path_length(res.path) == pytest.approx(res.length, rel=1e-12)

    def test_unknown_endpoint_rejected(self):
        r, m = self.build_simple()
        with pytest.raises(InvalidInputError):
            shortest_path(r, np.array([0.123, 0.456]), m.goal)

    def test_permutation_invariance(self):
        rng = np.random.default_rng(11)
        samples = random_samples(120, 0.05, 2, seed=2)
        ws = Workspace(dim=2, obstacles=(Disc((0.5, 0.5), 0.12),))
        m = MotionProblem(workspace=ws, start=(0.1, 0.1), goal=(0.9, 0.9))
        r = build_prm(m, samples, 0.3)
        base = shortest_path(r, m.start, m.goal)
        assert base.reachable
        for _ in range(5):
            perm = rng.permutation(r.num_vertices)
            inv = np.empty_like(perm)
            inv[perm] = np.arange(perm.size)
            d = r.to_dict()
            pairs = np.asarray([[inv[e[0]], inv[e[1]]] for e in d["edges"]], dtype=np.int64)
            shuffled = Roadmap(r.vertices[perm], pairs, r.radius)
            res = shortest_path(shuffled, m.start, m.goal)
            assert res.length == base.length
            assert np.array_equal(res.path, base.path)

    def test_corridor_worlds_meet_stretch_guarantee(self):
        # Twenty randomized worlds with a known clearance-respecting optimum:
        # the roadmap path must stay within the advertised stretch.
        eps = 1.0
        for seed in range(20):
            ws, start, goal, delta, optimal = corridor_world(seed)
            p = single_robot_params(eps, delta, 2)
            grid = grid_for_params(p)
            m = MotionProblem(workspace=ws, start=start, goal=goal)
            r = build_prm(m, grid, p.radius)
            res = shortest_path(r, m.start, m.goal)
            assert res.reachable, f"seed {seed}: corridor world unexpectedly unsolved"
            assert res.length <= (1.0 + eps) * optimal + 1e-9, (
                f"seed {seed}: {res.length} > (1+eps) * {optimal}"
            )
            assert res.length >= optimal - 1e-9


class TestRoadmapSerialization:
    def test_round_trip(self, tmp_path):
        samples = random_samples(60, 0.05, 2, seed=9)
        ws = Workspace(dim=2, obstacles=(Disc((0.4, 0.6), 0.1),))
        m = MotionProblem(workspace=ws, start=(0.1, 0.1), goal=(0.9, 0.9))
        r = build_prm(m, samples, 0.25)
        path = tmp_path / "roadmap.json"
        r.save_json(str(path))
        r2 = Roadmap.load_json(str(path))
        assert np.array_equal(r.vertices, r2.vertices)
        assert r.edge_set() == r2.edge_set()
        assert r.radius == r2.radius
        assert r.meta == r2.meta


class TestSnapPath:
    def test_straight_line_thirds(self):
        p = single_robot_params(1.0, 0.1, 2)
        grid = grid_for_params(p)
        sigma = np.array([[0.2, 0.5], [0.8, 0.5]])
        L = 0.6
        snapped = snap_path(sigma, L / 3.0, grid)
        assert len(snapped) == 4
        assert np.allclose(snapped.times, [0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0], atol=1e-12)
        assert np.array_equal(snapped.points[0], sigma[0])
        assert np.array_equal(snapped.points[-1], sigma[-1])

    def test_validation(self):
        p = single_robot_params(1.0, 0.1, 2)
        grid = grid_for_params(p)
        sigma = np.array([[0.2, 0.5], [0.8, 0.5]])
        with pytest.raises(InvalidInputError):
            snap_path(sigma, 0.0, grid)
        with pytest.raises(InvalidInputError):
            snap_path(np.array([[0.2, 0.5]]), 0.1, grid)
        with pytest.raises(InvalidInputError):
            snap_path(np.array([[0.2, 0.5], [0.25, 0.5]]), 0.2, grid)
        empty = SampleSet(points=np.empty((0, 2)), provenance="explicit")
        with pytest.raises(InvalidInputError):
            snap_path(sigma, 0.1, empty)

    def test_chord_spacing_and_grid_membership(self):
        rng = np.random.default_rng(17)
        for _ in range(10):
            ws, sigma, gamma, beta, rho = clear_path_instance(int(rng.integers(0, 10_000)))
            grid = staggered_grid(GridParams(beta=beta, gamma=gamma, dim=sigma.shape[1]))
            snapped = snap_path(sigma, rho, grid)
            assert snapped.times[0] == 0.0 and snapped.times[-1] == 1.0
            assert np.all(np.diff(snapped.times) > 0)
            # Pre-snap stops are at chord distance exactly rho, except the
            # final hop which may be shorter.
            stops = [point_along(sigma, t) for t in snapped.times]
            for a, b in zip(stops[:-2], stops[1:-1]):
                assert np.linalg.norm(b - a) == pytest.approx(rho, abs=1e-9)
            assert np.linalg.norm(stops[-1] - stops[-2]) <= rho + 1e-9
            # Interior points are grid members; endpoints are the path's own.
            grid_rows = {g.tobytes() for g in grid.points}
            for z in snapped.points[1:-1]:
                assert z.tobytes() in grid_rows

    def test_lemma_properties_on_clear_path_corpus(self):
        checked = 0
        seed = 0
        while checked < 100:
            ws, sigma, gamma, beta, rho = clear_path_instance(seed)
            seed += 1
            # Precondition of the snapping guarantee.
            assert beta**2 + (rho / 2.0) ** 2 <= gamma**2 + 1e-12
            grid = staggered_grid(GridParams(beta=beta, gamma=gamma, dim=sigma.shape[1]))
            snapped = snap_path(sigma, rho, grid)
            Z = snapped.points
            # (i) each snapped point is within beta of its path sample
            for t, z in zip(snapped.times[1:-1], Z[1:-1]):
                assert np.linalg.norm(z - point_along(sigma, t)) <= beta + 1e-9
            # (iv) consecutive snapped points within 2*beta + rho
            hops = np.linalg.norm(np.diff(Z, axis=0), axis=1)
            assert np.all(hops <= 2.0 * beta + rho + 1e-9)
            # (v) every snapped segment is strictly free
            for a, b in zip(Z[:-1], Z[1:]):
                assert ws.segment_clearance(a, b) > CLEARANCE_TOL
            # (vi) total snapped length within the advertised stretch
            assert snapped.total_length() <= (1.0 + 2.0 * beta / rho) * polyline_length(
                sigma
            ) + 1e-9
            checked += 1

    def test_total_length_helper(self):
        p = single_robot_params(1.0, 0.1, 2)
        grid = grid_for_params(p)
        sigma = np.array([[0.2, 0.5], [0.8, 0.5]])
        snapped = snap_path(sigma, 0.2, grid)
        assert snapped.total_length() == pytest.approx(
            path_length(snapped.points), rel=1e-12
        )
