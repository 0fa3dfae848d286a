"""Finite-sample near-optimal sampling-based motion planning.

Deterministic staggered-grid sampling with prescribed PRM connection radii
gives single- and multi-robot planners whose solution cost is within a
chosen factor (1 + epsilon) of the best well-separated solution, using a
number of samples known in advance. The package bundles the sample-size
calculators, the grid generator, roadmap construction and search, a
tensor-roadmap multi-robot planner, benchmark scenes with experiment
drivers, an SVG renderer, an HTTP service, and a CLI.
"""

from .errors import (
    GridplanError,
    InternalInvariantError,
    InvalidInputError,
    InvalidProblemError,
)
from .geometry import (
    ConvexPolygon,
    Disc,
    HyperBox,
    HyperSphere,
    Obstacle,
    Workspace,
    moving_pair_min_distance,
    point_segment_distance,
    segment_segment_distance,
)
from .mrmp import (
    CompositePath,
    MultiRobotProblem,
    PlanOutcome,
    PlannerConfig,
    RobotSpec,
    multi_robot_params,
    path_cost,
    plan_composite_astar,
    plan_prioritized_timing,
    tensor_neighbors,
    validate_composite_path,
)
from .render import render_scenario_svg, render_svg
from .roadmap import (
    MotionProblem,
    PlannerParams,
    Roadmap,
    ShortestPathResult,
    SnappedPath,
    build_prm,
    shortest_path,
    single_robot_params,
    snap_path,
)
from .sampling import (
    BoundsQuery,
    CoverReport,
    GridParams,
    SampleSet,
    asymptotic_ratios,
    format_count,
    format_real,
    grid_point_count,
    layer_count,
    multi_robot_sample_count,
    parse_epsilon,
    random_samples,
    size_curr,
    size_lower_bound,
    size_prev,
    staggered_grid,
    verify_beta_cover,
)
from .scenarios import (
    DEFAULT_EPSILON_GRID,
    ComparisonRow,
    ExperimentResult,
    ScenarioFile,
    ScenarioRobot,
    SweepRow,
    builtin_scenario,
    builtin_scenarios,
    compute_static_clearance,
    reference_cost,
    run_random_comparison,
    run_ratio_sweep,
    scenario_names,
)

__version__ = "0.1.0"

__all__ = [
    "BoundsQuery",
    "ComparisonRow",
    "CompositePath",
    "ConvexPolygon",
    "CoverReport",
    "DEFAULT_EPSILON_GRID",
    "Disc",
    "ExperimentResult",
    "GridParams",
    "GridplanError",
    "HyperBox",
    "HyperSphere",
    "InternalInvariantError",
    "InvalidInputError",
    "InvalidProblemError",
    "MotionProblem",
    "MultiRobotProblem",
    "Obstacle",
    "PlanOutcome",
    "PlannerConfig",
    "PlannerParams",
    "Roadmap",
    "RobotSpec",
    "SampleSet",
    "ScenarioFile",
    "ScenarioRobot",
    "ShortestPathResult",
    "SnappedPath",
    "SweepRow",
    "Workspace",
    "asymptotic_ratios",
    "build_prm",
    "builtin_scenario",
    "builtin_scenarios",
    "compute_static_clearance",
    "format_count",
    "format_real",
    "grid_point_count",
    "layer_count",
    "moving_pair_min_distance",
    "multi_robot_params",
    "multi_robot_sample_count",
    "parse_epsilon",
    "path_cost",
    "plan_composite_astar",
    "plan_prioritized_timing",
    "point_segment_distance",
    "random_samples",
    "reference_cost",
    "render_scenario_svg",
    "render_svg",
    "run_random_comparison",
    "run_ratio_sweep",
    "scenario_names",
    "segment_segment_distance",
    "shortest_path",
    "single_robot_params",
    "size_curr",
    "size_lower_bound",
    "size_prev",
    "snap_path",
    "staggered_grid",
    "tensor_neighbors",
    "validate_composite_path",
    "verify_beta_cover",
]
