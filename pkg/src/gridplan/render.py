"""Static SVG rendering of planar workspaces, scenes, sample sets, and
planned trajectories. Output is a self-contained SVG string; there is no
interactive component.

The drawing is a fixed 1000x1000 viewBox mapping the unit square with the
y axis flipped (SVG y grows downward). Obstacles are drawn filled; robots
get one palette color each, with a solid disc at the start, a hollow disc at
the goal, and an optional trajectory polyline.
"""

from __future__ import annotations

import io

import numpy as np

from .errors import InvalidInputError
from .geometry import ConvexPolygon, HyperBox, HyperSphere, Workspace

_PALETTE = (
    "#1f77b4",
    "#d62728",
    "#2ca02c",
    "#9467bd",
    "#ff7f0e",
    "#17becf",
    "#8c564b",
    "#e377c2",
    "#7f7f7f",
    "#bcbd22",
)

_SCALE = 1000.0


def _sx(x: float) -> float:
    return round(_SCALE * x, 2)


def _sy(y: float) -> float:
    return round(_SCALE * (1.0 - y), 2)


def _obstacle_svg(obs, out: io.StringIO) -> None:
    style = 'fill="#4a4a4a" fill-opacity="0.85" stroke="none"'
    if isinstance(obs, HyperSphere):
        c = obs.center
        out.write(
            f'<circle cx="{_sx(c[0])}" cy="{_sy(c[1])}" r="{round(_SCALE * obs.radius, 2)}" {style}/>\n'
        )
    elif isinstance(obs, HyperBox):
        lo, hi = obs.lo, obs.hi
        w = round(_SCALE * (hi[0] - lo[0]), 2)
        h = round(_SCALE * (hi[1] - lo[1]), 2)
        out.write(f'<rect x="{_sx(lo[0])}" y="{_sy(hi[1])}" width="{w}" height="{h}" {style}/>\n')
    elif isinstance(obs, ConvexPolygon):
        pts = " ".join(f"{_sx(v[0])},{_sy(v[1])}" for v in obs.vertices)
        out.write(f'<polygon points="{pts}" {style}/>\n')
    else:
        raise InvalidInputError(f"cannot render obstacle type {type(obs).__name__}")


def render_svg(
    workspace: Workspace,
    *,
    robots=None,
    trajectories=None,
    samples: np.ndarray | None = None,
    title: str = "",
) -> str:
    """Render a planar workspace with optional robots, trajectories, and
    sample points.

    robots: iterable of objects with .radius, .start, .goal (ScenarioRobot or
    RobotSpec). trajectories: optional list of (steps, 2) arrays, one per
    robot, drawn in the robot's color. samples: optional (n, 2) array drawn
    as small dots."""
    if workspace.dim != 2:
        raise InvalidInputError("rendering supports planar workspaces only")
    robots = list(robots) if robots is not None else []
    if trajectories is not None and len(trajectories) != len(robots):
        raise InvalidInputError("need exactly one trajectory per robot")
    out = io.StringIO()
    out.write(
        '<svg xmlns="http://www.w3.org/2000/svg" viewBox="-20 -20 1040 1040" '
        'width="640" height="640">\n'
    )
    if title:
        out.write(f"<title>{title}</title>\n")
    out.write('<rect x="-20" y="-20" width="1040" height="1040" fill="#ffffff"/>\n')
    out.write(
        '<rect x="0" y="0" width="1000" height="1000" fill="#fbfbf8" '
        'stroke="#333333" stroke-width="2"/>\n'
    )
    for obs in workspace.obstacles:
        _obstacle_svg(obs, out)
    if samples is not None and len(samples):
        pts = np.asarray(samples, dtype=np.float64)
        out.write('<g fill="#888888">\n')
        for p in pts:
            out.write(f'<circle cx="{_sx(p[0])}" cy="{_sy(p[1])}" r="1.6"/>\n')
        out.write("</g>\n")
    for i, rb in enumerate(robots):
        color = _PALETTE[i % len(_PALETTE)]
        r_px = round(_SCALE * rb.radius, 2)
        if trajectories is not None:
            traj = np.asarray(trajectories[i], dtype=np.float64)
            coords = " ".join(f"{_sx(p[0])},{_sy(p[1])}" for p in traj)
            out.write(
                f'<polyline points="{coords}" fill="none" stroke="{color}" '
                'stroke-width="3" stroke-opacity="0.9"/>\n'
            )
        s, g = rb.start, rb.goal
        out.write(
            f'<circle cx="{_sx(s[0])}" cy="{_sy(s[1])}" r="{r_px}" fill="{color}" '
            'fill-opacity="0.45" stroke="none"/>\n'
        )
        out.write(
            f'<circle cx="{_sx(g[0])}" cy="{_sy(g[1])}" r="{r_px}" fill="none" '
            f'stroke="{color}" stroke-width="2.5" stroke-dasharray="8 5"/>\n'
        )
        out.write(
            f'<text x="{_sx(s[0])}" y="{_sy(s[1])}" font-size="28" text-anchor="middle" '
            f'dominant-baseline="central" fill="#111111">{i + 1}</text>\n'
        )
    out.write("</svg>\n")
    return out.getvalue()


def render_scenario_svg(scenario, *, composite_positions=None, samples=None) -> str:
    """Render a ScenarioFile; composite_positions is an optional
    (steps+1, R, 2) array from a CompositePath whose per-robot slices are
    drawn as trajectories."""
    trajectories = None
    if composite_positions is not None:
        arr = np.asarray(composite_positions, dtype=np.float64)
        if arr.ndim != 3 or arr.shape[1] != len(scenario.robots):
            raise InvalidInputError("composite positions must have shape (steps+1, R, 2)")
        trajectories = [arr[:, i, :] for i in range(arr.shape[1])]
    return render_svg(
        scenario.workspace,
        robots=scenario.robots,
        trajectories=trajectories,
        samples=samples,
        title=scenario.name,
    )
