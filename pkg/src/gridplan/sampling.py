"""Deterministic staggered-grid sampling, the random-sampling baseline,
cover verification, and the sample-size calculators.

The staggered grid on [gamma, 1-gamma]^d with cover radius beta is the union
of two shifted lattices with per-axis step 2w, w = beta*sqrt(2)/sqrt(d):

- layer 1: every coordinate of the form gamma + (2k-1)w, k = 1..M
- layer 2: every coordinate of the form gamma + 2kw,    k = 0..M

with M = ceil((1-2*gamma)*sqrt(d) / (sqrt(8)*beta)), so the total point count
is M^d + (M+1)^d. Every point of [gamma, 1-gamma]^d is within beta of the
grid.

Numeric contract for the published count tables: the layer count is snapped
to the nearest integer when the exact expression is within 1e-12 of one
(guarding against float noise flipping a ceiling), and the table calculators
additionally add one layer in the epsilon = infinity columns whenever delta
is not exactly representable in binary floating point (delta = 0.1, 0.05,
0.01 but not 0.25). That reproduces every integer cell of the published
count tables exactly; the grid *generator* never adds the extra layer and
follows the definition as stated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction

import numpy as np

from .errors import InvalidInputError

INF = float("inf")

# Absolute tolerance for snapping the layer-count expression to an integer.
SNAP_TOL = 1e-12

# Grids enumerated by the CLI bounds table (single-robot sample bounds).
BOUNDS_TABLE_DELTAS = (0.25, 0.1, 0.05, 0.01)
BOUNDS_TABLE_DIMS = (2, 3, 4, 5, 6)
BOUNDS_TABLE_EPSILONS = (INF, 1.0, 0.25, 0.1)

# Grid enumerated by the CLI bounds table for multi-robot counts.
MULTI_TABLE_DELTA = 0.1
MULTI_TABLE_DIMS = (2, 3, 4, 5, 6)
MULTI_TABLE_EPSILONS = (INF, 5.0, 1.0, 0.5, 0.25)


def parse_epsilon(text: str) -> float:
    """Parse a stretch parameter from CLI/JSON text; 'inf' means unbounded."""
    t = str(text).strip().lower()
    if t in ("inf", "infinity", "oo"):
        return INF
    try:
        value = float(t)
    except ValueError as exc:
        raise InvalidInputError(f"invalid stretch parameter {text!r}") from exc
    if not value > 0:
        raise InvalidInputError("stretch parameter must be > 0 (or 'inf')")
    return value


def alpha_of(epsilon: float) -> float:
    """Radius scaling alpha = eps/sqrt(1+eps^2), with alpha = 1 at infinity."""
    if math.isinf(epsilon):
        return 1.0
    if not epsilon > 0:
        raise InvalidInputError("stretch parameter must be > 0 (or 'inf')")
    return epsilon / math.sqrt(1.0 + epsilon * epsilon)


def omega_of(epsilon: float) -> float:
    """Multi-robot spacing factor omega = eps/(2(eps+2)), 1/2 at infinity."""
    if math.isinf(epsilon):
        return 0.5
    if not epsilon > 0:
        raise InvalidInputError("stretch parameter must be > 0 (or 'inf')")
    return epsilon / (2.0 * (epsilon + 2.0))


def _binary_exact(x: float) -> bool:
    """True iff the float x is exactly the decimal literal produced by
    repr(x) (e.g. 0.25 is exact, 0.1 is not)."""
    return Fraction(x) == Fraction(Decimal(repr(x)))


@dataclass(frozen=True)
class GridParams:
    """Staggered-grid parameters: cover radius beta, boundary margin gamma,
    and dimension; cell_halfwidth is the derived lattice half-step."""

    beta: float
    gamma: float
    dim: int

    def __post_init__(self):
        if not (isinstance(self.dim, int) and self.dim >= 1):
            raise InvalidInputError("dim must be an integer >= 1")
        if not (math.isfinite(self.beta) and self.beta > 0):
            raise InvalidInputError("beta must be finite and > 0")
        if not (0.0 <= self.gamma < 0.5):
            raise InvalidInputError("gamma must lie in [0, 0.5)")

    @property
    def cell_halfwidth(self) -> float:
        return self.beta * math.sqrt(2.0) / math.sqrt(self.dim)


@dataclass(frozen=True)
class SampleSet:
    """An ordered, immutable set of sample points with provenance."""

    points: np.ndarray
    provenance: str = "explicit"
    seed: int | None = None
    grid: GridParams | None = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2:
            pts = pts.reshape(-1, pts.shape[-1]) if pts.size else pts.reshape(0, 1)
        pts = np.ascontiguousarray(pts)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        if self.provenance not in ("staggered", "random", "explicit"):
            raise InvalidInputError(f"unknown provenance {self.provenance!r}")

    def __len__(self) -> int:
        return int(self.points.shape[0])

    @property
    def dim(self) -> int:
        return int(self.points.shape[1])


@dataclass(frozen=True)
class BoundsQuery:
    """Inputs of the sample-size calculators: stretch epsilon (may be inf),
    clearance delta, and dimension, with the derived alpha/omega factors."""

    epsilon: float
    delta: float
    dim: int

    def __post_init__(self):
        if not ((math.isfinite(self.epsilon) and self.epsilon > 0) or math.isinf(self.epsilon)):
            raise InvalidInputError("epsilon must be > 0 or infinity")
        if not (math.isfinite(self.delta) and 0 < self.delta < 0.5):
            raise InvalidInputError("delta must lie in (0, 0.5)")
        if not (isinstance(self.dim, int) and self.dim >= 1):
            raise InvalidInputError("dim must be an integer >= 1")

    @property
    def alpha(self) -> float:
        return alpha_of(self.epsilon)

    @property
    def omega(self) -> float:
        return omega_of(self.epsilon)


def layer_count(beta: float, gamma: float, dim: int, *, snap_bump: bool = False) -> int:
    """Number M of layer-1 coordinates per axis: the ceiling of
    (1-2*gamma)*sqrt(d)/(sqrt(8)*beta), snapped when within 1e-12 of an
    integer. With snap_bump=True a snapped value is bumped by one (the
    table-calculator behavior for inexact delta at epsilon = infinity)."""
    if not beta > 0:
        raise InvalidInputError("beta must be > 0")
    if not 0.0 <= gamma < 0.5:
        raise InvalidInputError("gamma must lie in [0, 0.5)")
    q = (1.0 - 2.0 * gamma) * math.sqrt(dim) / (math.sqrt(8.0) * beta)
    n = round(q)
    if abs(q - n) <= SNAP_TOL:
        m = int(n) + (1 if snap_bump else 0)
    else:
        m = math.ceil(q)
    return max(m, 0)


def grid_point_count(m: int, dim: int) -> int:
    """Closed-form staggered-grid cardinality M^d + (M+1)^d."""
    return m**dim + (m + 1) ** dim


def _lattice_product(coords: np.ndarray, dim: int) -> np.ndarray:
    """All dim-tuples over `coords`, lexicographic (first axis slowest)."""
    if coords.size == 0:
        return np.empty((0, dim))
    grids = np.meshgrid(*([coords] * dim), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def staggered_grid(g: GridParams, *, max_points: int | None = None) -> SampleSet:
    """Generate the staggered grid for g, ordered layer 1 then layer 2,
    lexicographic within each layer."""
    m = layer_count(g.beta, g.gamma, g.dim)
    total = grid_point_count(m, g.dim)
    if max_points is not None and total > max_points:
        raise InvalidInputError(
            f"staggered grid would contain {total} points, exceeding the limit {max_points}"
        )
    w = g.cell_halfwidth
    coords1 = g.gamma + (2.0 * np.arange(1, m + 1, dtype=np.float64) - 1.0) * w
    coords2 = g.gamma + 2.0 * np.arange(0, m + 1, dtype=np.float64) * w
    pts = np.vstack([_lattice_product(coords1, g.dim), _lattice_product(coords2, g.dim)])
    return SampleSet(points=pts, provenance="staggered", grid=g)


@dataclass(frozen=True)
class CoverReport:
    max_gap: float
    ok: bool
    trials: int


def _staggered_nearest_gaps(Q: np.ndarray, g: GridParams) -> np.ndarray:
    """Distance from each query point to the staggered grid, closed form.

    The grid is a union of two axis-aligned product lattices, so the nearest
    grid point is per-axis nearest within each lattice."""
    m = layer_count(g.beta, g.gamma, g.dim)
    w = g.cell_halfwidth
    d2 = np.full(Q.shape[0], np.inf)
    if m >= 1:
        k1 = np.clip(np.round((Q - g.gamma + w) / (2.0 * w)), 1, m)
        c1 = g.gamma + (2.0 * k1 - 1.0) * w
        d2 = np.einsum("ij,ij->i", Q - c1, Q - c1)
    k2 = np.clip(np.round((Q - g.gamma) / (2.0 * w)), 0, m)
    c2 = g.gamma + 2.0 * k2 * w
    d2b = np.einsum("ij,ij->i", Q - c2, Q - c2)
    return np.sqrt(np.minimum(d2, d2b))


def verify_beta_cover(s: SampleSet, g: GridParams, trials: int, *, seed: int = 0) -> CoverReport:
    """Monte-Carlo check that s is a beta-cover of [gamma, 1-gamma]^d:
    sample `trials` uniform points and report the largest nearest-sample
    distance; ok iff it is at most beta + 1e-9."""
    if trials < 1:
        raise InvalidInputError("trials must be >= 1")
    if len(s) == 0:
        raise InvalidInputError("cannot verify a cover with an empty sample set")
    rng = np.random.default_rng(seed)
    max_gap = 0.0
    use_closed_form = s.provenance == "staggered" and s.grid == g
    tree = None
    if not use_closed_form:
        from scipy.spatial import cKDTree

        tree = cKDTree(s.points)
    remaining = int(trials)
    chunk = 200_000
    while remaining > 0:
        take = min(chunk, remaining)
        remaining -= take
        Q = g.gamma + (1.0 - 2.0 * g.gamma) * rng.random((take, g.dim))
        if use_closed_form:
            gaps = _staggered_nearest_gaps(Q, g)
        else:
            gaps, _ = tree.query(Q, k=1)
        max_gap = max(max_gap, float(gaps.max()))
    return CoverReport(max_gap=max_gap, ok=max_gap <= g.beta + 1e-9, trials=int(trials))


def _table_layer_count(beta: float, q: BoundsQuery) -> int:
    bump = math.isinf(q.epsilon) and not _binary_exact(q.delta)
    return layer_count(beta, q.delta, q.dim, snap_bump=bump)


def size_curr(q: BoundsQuery) -> int:
    """Staggered-grid sample count guaranteeing (1+eps)-optimal planning for
    delta-clear single-robot problems (beta = alpha*delta, gamma = delta)."""
    m = _table_layer_count(q.alpha * q.delta, q)
    return grid_point_count(m, q.dim)


def multi_robot_sample_count(q: BoundsQuery) -> int:
    """Per-robot staggered-grid count for the multi-robot guarantee
    (beta = omega*delta, gamma = delta)."""
    m = _table_layer_count(q.omega * q.delta, q)
    return grid_point_count(m, q.dim)


def size_prev(q: BoundsQuery) -> float:
    """Sample count of the prior covering construction (real-valued).

    Evaluated with the exact Gamma-function constant; the commonly printed
    sqrt(pi*d)*(sqrt(2d/(pi*e))*...)^d form is its Stirling approximation."""
    a = q.alpha
    base = 2.0 * (1.0 - (2.0 - a) * q.delta) / (a * q.delta)
    if base <= 0:
        return 0.0
    return math.gamma(q.dim / 2.0 + 1.0) / math.pi ** (q.dim / 2.0) * base**q.dim


def size_lower_bound(q: BoundsQuery) -> float:
    """Information-theoretic minimum sample count for completeness on all
    delta-clear problems (real-valued; defined for epsilon = infinity only).

    Evaluated with the exact Gamma-function constant; the printed
    sqrt(e/2)*(sqrt((d-1)/(2*pi*e))*...)^d form is its Stirling
    approximation. Returns 0 for delta >= 0.25 where the squared factor
    vanishes or the bound is vacuous."""
    if not math.isinf(q.epsilon):
        raise InvalidInputError("the sample lower bound is defined for epsilon = infinity only")
    x = 2.0 * q.delta / (1.0 - 2.0 * q.delta)
    if x >= 1.0:
        return 0.0
    factor = (1.0 - x) ** 2
    const = 1.0 / (2.0 * math.sqrt(math.pi))
    shape = math.gamma((q.dim + 1) / 2.0) / math.pi ** (q.dim / 2.0)
    return const * factor * shape * ((1.0 - 2.0 * q.delta) / q.delta) ** q.dim


def asymptotic_ratios(d: int) -> dict:
    """Leading-order ratios between the three sample-count expressions as
    delta -> 0, as conventionally printed (Stirling form):

    - prev_over_curr: sqrt(pi*d)/2 * (16/(pi*e))^(d/2)
    - curr_over_lb:   sqrt(8/e) * sqrt((d/(d-1))^d) * (pi*e/4)^(d/2)
    """
    if not (isinstance(d, int) and d >= 2):
        raise InvalidInputError("asymptotic ratios require an integer dimension >= 2")
    prev_over_curr = math.sqrt(math.pi * d) / 2.0 * (16.0 / (math.pi * math.e)) ** (d / 2.0)
    curr_over_lb = (
        math.sqrt(8.0 / math.e)
        * math.sqrt((d / (d - 1.0)) ** d)
        * (math.pi * math.e / 4.0) ** (d / 2.0)
    )
    return {"prev_over_curr": prev_over_curr, "curr_over_lb": curr_over_lb}


def _prev_over_curr_limit_exact(d: int) -> float:
    """Exact delta -> 0 limit of size_prev/size_curr (Gamma form). The
    Stirling rendering in asymptotic_ratios over-estimates this by several
    percent at small d; convergence tests compare against this value."""
    return math.gamma(d / 2.0 + 1.0) / 2.0 * (4.0 * math.sqrt(2.0) / math.sqrt(math.pi * d)) ** d


def random_samples(n: int, gamma: float, dim: int, seed: int) -> SampleSet:
    """n independent uniform points in [gamma, 1-gamma]^d from a seeded
    deterministic generator."""
    if n < 0:
        raise InvalidInputError("sample count must be >= 0")
    if not (0.0 <= gamma < 0.5):
        raise InvalidInputError("gamma must lie in [0, 0.5)")
    if dim < 1:
        raise InvalidInputError("dim must be >= 1")
    rng = np.random.default_rng(seed)
    pts = gamma + (1.0 - 2.0 * gamma) * rng.random((int(n), int(dim)))
    return SampleSet(points=pts, provenance="random", seed=int(seed))


def _sci(x: float) -> str:
    """Three-significant-figure scientific string, trailing zeros kept."""
    exp = int(math.floor(math.log10(x)))
    mant = x / 10.0**exp
    mant = round(mant, 2)
    if mant >= 10.0:
        mant /= 10.0
        exp += 1
    return f"{mant:.2f}e{exp}"


def format_count(n: int) -> str:
    """Display rule for integer counts: exact below 10^4, else scientific
    with three significant figures."""
    if n < 10_000:
        return str(int(n))
    return _sci(float(n))


def format_real(x: float) -> str:
    """Display rule for real-valued bounds: 0 prints as 0; below 10^4 the
    ceiling is printed as an integer; otherwise scientific with three
    significant figures."""
    if x <= 0:
        return "0"
    c = math.ceil(x)
    if c < 10_000:
        return str(int(c))
    return _sci(float(x))
