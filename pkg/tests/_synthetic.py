"""Synthetic problem generators shared across tests: corridor worlds with a
known optimal clear solution, and clear piecewise-linear paths with obstacle
fields for the path-snapping property suite."""

from __future__ import annotations

import math

import numpy as np

from gridplan.geometry import HyperBox, HyperSphere, Workspace


def corridor_world(seed: int):
    """An axis-aligned corridor between two slab obstacles.

    The straight segment from start to goal runs along the corridor center
    line with clearance exactly the corridor half-width, so the shortest
    delta-clear solution is that segment for any delta below the half-width.
    Returns (workspace, start, goal, delta, optimal_length).
    """
    rng = np.random.default_rng(seed)
    y0 = rng.uniform(0.35, 0.65)
    half = rng.uniform(0.09, 0.16)
    x_lo = rng.uniform(0.04, 0.10)
    x_hi = rng.uniform(0.90, 0.96)
    sx = rng.uniform(0.16, 0.30)
    gx = rng.uniform(0.70, 0.84)
    below = HyperBox(lo=(x_lo, 0.0), hi=(x_hi, y0 - half))
    above = HyperBox(lo=(x_lo, y0 + half), hi=(x_hi, 1.0))
    ws = Workspace(dim=2, obstacles=(below, above))
    start = np.array([sx, y0])
    goal = np.array([gx, y0])
    delta = 0.9 * half
    if rng.integers(2):
        # Transpose to a vertical corridor for variety.
        below = HyperBox(lo=(0.0, x_lo), hi=(y0 - half, x_hi))
        above = HyperBox(lo=(y0 + half, x_lo), hi=(1.0, x_hi))
        ws = Workspace(dim=2, obstacles=(below, above))
        start = start[::-1].copy()
        goal = goal[::-1].copy()
    return ws, start, goal, delta, float(np.linalg.norm(goal - start))


def clear_path_instance(seed: int):
    """A piecewise-linear path plus snap parameters and an obstacle field
    that keeps the whole path gamma-clear.

    Parameters satisfy beta^2 + (rho/2)^2 <= gamma^2. Returns
    (workspace, path_points, gamma, beta, rho).
    """
    rng = np.random.default_rng(seed)
    dim = int(rng.choice([2, 3]))
    gamma = rng.uniform(0.08, 0.2)
    beta = gamma * rng.uniform(0.35, 0.75)
    rho = 2.0 * math.sqrt(gamma * gamma - beta * beta) * rng.uniform(0.4, 0.9)

    n_verts = int(rng.integers(3, 7))
    # The snapper requires endpoint separation at least rho; regenerate the
    # polyline until the wandering walk ends far enough from its start.
    while True:
        pts = [rng.uniform(0.3, 0.7, size=dim)]
        while len(pts) < n_verts:
            step = rng.uniform(-0.22, 0.22, size=dim)
            cand = np.clip(pts[-1] + step, 0.3, 0.7)
            if np.linalg.norm(cand - pts[-1]) > 0.05:
                pts.append(cand)
        if np.linalg.norm(pts[-1] - pts[0]) >= rho * 1.05:
            break
    path = np.stack(pts)

    obstacles = []
    attempts = 0
    while len(obstacles) < 3 and attempts < 60:
        attempts += 1
        if rng.integers(2):
            center = rng.uniform(0.0, 1.0, size=dim)
            radius = rng.uniform(0.02, 0.08)
            obs = HyperSphere(center=tuple(center), radius=radius)
        else:
            lo = rng.uniform(0.0, 0.85, size=dim)
            hi = lo + rng.uniform(0.04, 0.15, size=dim)
            obs = HyperBox(lo=tuple(lo), hi=tuple(np.minimum(hi, 1.0)))
        trial = Workspace(dim=dim, obstacles=(obs,))
        min_clear = min(
            trial.segment_clearance(path[k], path[k + 1]) for k in range(len(path) - 1)
        )
        if min_clear > gamma + 0.02:
            obstacles.append(obs)
    ws = Workspace(dim=dim, obstacles=tuple(obstacles))
    return ws, path, gamma, beta, rho


def polyline_length(path: np.ndarray) -> float:
    return float(np.linalg.norm(np.diff(path, axis=0), axis=1).sum())


def point_along(path: np.ndarray, tau: float) -> np.ndarray:
    """Point at normalized arc-length tau along a polyline (independent
    reimplementation used as a test oracle)."""
    lengths = np.linalg.norm(np.diff(path, axis=0), axis=1)
    total = float(lengths.sum())
    target = min(max(tau, 0.0), 1.0) * total
    acc = 0.0
    for k, seg in enumerate(lengths):
        if acc + seg >= target - 1e-15:
            t = 0.0 if seg == 0 else (target - acc) / seg
            return path[k] + t * (path[k + 1] - path[k])
        acc += float(seg)
    return path[-1]
