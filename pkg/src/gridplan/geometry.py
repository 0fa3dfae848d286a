"""Geometric primitives: obstacles, workspaces, clearance queries, and
continuous collision predicates.

Conventions used throughout the library:

- A configuration is a point of the unit cube [0,1]^d and describes a robot
  center; disc robots are handled by inflating obstacles by the robot radius
  (``Workspace.inflation``), which is exact for disc obstacles.
- Signed distances are negative inside an obstacle.
- A configuration or straight edge is *free* iff its clearance exceeds
  ``CLEARANCE_TOL`` (strict inequality; grazing contact counts as collision).
- All operations are pure functions of their inputs: identical inputs give
  bit-identical outputs.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidInputError

# Strictness tolerance for every free/colliding decision: free iff
# clearance > CLEARANCE_TOL.
CLEARANCE_TOL = 1e-9


def as_point(p: Sequence[float], dim: int | None = None) -> np.ndarray:
    """Coerce a coordinate sequence to a float64 vector, validating shape."""
    arr = np.asarray(p, dtype=np.float64)
    if arr.ndim != 1 or arr.size < 1:
        raise InvalidInputError(f"a point must be a 1-D coordinate sequence, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("point coordinates must be finite")
    if dim is not None and arr.size != dim:
        raise InvalidInputError(f"dimension mismatch: expected {dim}, got {arr.size}")
    return arr


def point_segment_distance(p, a, b) -> float:
    """Exact Euclidean distance from point ``p`` to segment ``a``-``b``."""
    p = np.asarray(p, dtype=np.float64)
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    u = b - a
    uu = float(u @ u)
    if uu == 0.0:
        return float(np.linalg.norm(p - a))
    t = float((p - a) @ u) / uu
    t = min(1.0, max(0.0, t))
    return float(np.linalg.norm(a + t * u - p))


def _points_segments_distance(P: np.ndarray, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Distance from each point P[i] to each segment A[i]-B[i] (vectorized)."""
    U = B - A
    UU = np.einsum("ij,ij->i", U, U)
    W = P - A
    t = np.divide(np.einsum("ij,ij->i", W, U), UU, out=np.zeros_like(UU), where=UU > 0)
    t = np.clip(t, 0.0, 1.0)
    closest = A + t[:, None] * U
    return np.linalg.norm(closest - P, axis=1)


def _orient(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> float:
    return float((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))


def segment_segment_distance(a0, a1, b0, b1) -> float:
    """Exact distance between two planar segments (0 if they intersect)."""
    a0 = np.asarray(a0, dtype=np.float64)
    a1 = np.asarray(a1, dtype=np.float64)
    b0 = np.asarray(b0, dtype=np.float64)
    b1 = np.asarray(b1, dtype=np.float64)
    d1 = _orient(b0, b1, a0)
    d2 = _orient(b0, b1, a1)
    d3 = _orient(a0, a1, b0)
    d4 = _orient(a0, a1, b1)
    if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and ((d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)):
        return 0.0
    return min(
        point_segment_distance(a0, b0, b1),
        point_segment_distance(a1, b0, b1),
        point_segment_distance(b0, a0, a1),
        point_segment_distance(b1, a0, a1),
    )


class Obstacle:
    """Base class for obstacle primitives. Subclasses implement exact signed
    distances for points and segments, plus vectorized batch variants."""

    dim: int

    def signed_distance(self, p: np.ndarray) -> float:
        raise NotImplementedError

    def signed_distance_batch(self, P: np.ndarray) -> np.ndarray:
        return np.array([self.signed_distance(P[i]) for i in range(P.shape[0])])

    def segment_signed_distance(self, a: np.ndarray, b: np.ndarray) -> float:
        raise NotImplementedError

    def segment_signed_distance_batch(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        return np.array([self.segment_signed_distance(A[i], B[i]) for i in range(A.shape[0])])

    def to_dict(self) -> dict:
        raise NotImplementedError

    @staticmethod
    def from_dict(d: dict) -> "Obstacle":
        kind = d.get("type")
        if kind == "disc":
            return Disc(d["center"], d["radius"])
        if kind == "sphere":
            return HyperSphere(d["center"], d["radius"])
        if kind == "box":
            return HyperBox(d["lo"], d["hi"])
        if kind == "polygon":
            return ConvexPolygon(d["vertices"])
        raise InvalidInputError(f"unknown obstacle type {kind!r}")


class HyperSphere(Obstacle):
    """Solid ball: signed distance is ||p - center|| - radius."""

    def __init__(self, center: Sequence[float], radius: float):
        self.center = as_point(center)
        self.radius = float(radius)
        if not (self.radius > 0):
            raise InvalidInputError("sphere radius must be > 0")
        self.dim = self.center.size

    def signed_distance(self, p: np.ndarray) -> float:
        return float(np.linalg.norm(p - self.center)) - self.radius

    def signed_distance_batch(self, P: np.ndarray) -> np.ndarray:
        return np.linalg.norm(P - self.center, axis=1) - self.radius

    def segment_signed_distance(self, a: np.ndarray, b: np.ndarray) -> float:
        return point_segment_distance(self.center, a, b) - self.radius

    def segment_signed_distance_batch(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        C = np.broadcast_to(self.center, A.shape)
        return _points_segments_distance(C, A, B) - self.radius

    def to_dict(self) -> dict:
        kind = "disc" if isinstance(self, Disc) else "sphere"
        return {"type": kind, "center": self.center.tolist(), "radius": self.radius}


class Disc(HyperSphere):
    """Planar disc obstacle (a 2-D hypersphere)."""

    def __init__(self, center: Sequence[float], radius: float):
        super().__init__(center, radius)
        if self.dim != 2:
            raise InvalidInputError("a disc is two-dimensional")


class ConvexPolygon(Obstacle):
    """Solid convex polygon with counterclockwise-ordered vertices (2-D)."""

    def __init__(self, vertices: Sequence[Sequence[float]]):
        V = np.asarray(vertices, dtype=np.float64)
        if V.ndim != 2 or V.shape[0] < 3 or V.shape[1] != 2:
            raise InvalidInputError("a polygon needs at least 3 planar vertices")
        if not np.all(np.isfinite(V)):
            raise InvalidInputError("polygon vertices must be finite")
        area2 = 0.0
        n = V.shape[0]
        for i in range(n):
            j = (i + 1) % n
            area2 += V[i, 0] * V[j, 1] - V[j, 0] * V[i, 1]
        if area2 <= 0:
            raise InvalidInputError("polygon vertices must be counterclockwise with positive area")
        for i in range(n):
            cross = _orient(V[i], V[(i + 1) % n], V[(i + 2) % n])
            if cross < -1e-12:
                raise InvalidInputError("polygon must be convex")
        self.vertices = V
        self.dim = 2
        E = np.roll(V, -1, axis=0) - V
        lengths = np.linalg.norm(E, axis=1)
        if np.any(lengths == 0):
            raise InvalidInputError("polygon has a zero-length edge")
        # Interior lies to the left of each CCW edge: inward unit normals.
        self._normals = np.stack([-E[:, 1], E[:, 0]], axis=1) / lengths[:, None]
        self._offsets = np.einsum("ij,ij->i", self._normals, V)

    def _margins(self, p: np.ndarray) -> np.ndarray:
        return self._normals @ p - self._offsets

    def signed_distance(self, p: np.ndarray) -> float:
        m = self._margins(p)
        if np.all(m >= 0):
            return -float(m.min())
        n = self.vertices.shape[0]
        return min(
            point_segment_distance(p, self.vertices[i], self.vertices[(i + 1) % n]) for i in range(n)
        )

    def signed_distance_batch(self, P: np.ndarray) -> np.ndarray:
        M = P @ self._normals.T - self._offsets
        inside = np.all(M >= 0, axis=1)
        out = np.empty(P.shape[0])
        out[inside] = -M[inside].min(axis=1)
        idx = np.where(~inside)[0]
        if idx.size:
            best = np.full(idx.size, np.inf)
            n = self.vertices.shape[0]
            for i in range(n):
                a = self.vertices[i]
                b = self.vertices[(i + 1) % n]
                A = np.broadcast_to(a, (idx.size, 2))
                B = np.broadcast_to(b, (idx.size, 2))
                best = np.minimum(best, _points_segments_distance(P[idx], A, B))
            out[idx] = best
        return out

    def _clip_interval(self, ma: np.ndarray, mb: np.ndarray) -> tuple[float, float] | None:
        """Parameter interval of a segment (margins at endpoints) inside the
        polygon, or None if the segment misses the interior."""
        lo, hi = 0.0, 1.0
        for i in range(ma.size):
            s = mb[i] - ma[i]
            if s == 0.0:
                if ma[i] < 0:
                    return None
                continue
            t = -ma[i] / s
            if s > 0:
                lo = max(lo, t)
            else:
                hi = min(hi, t)
            if lo > hi:
                return None
        return lo, hi

    def segment_signed_distance(self, a: np.ndarray, b: np.ndarray) -> float:
        ma = self._margins(a)
        mb = self._margins(b)
        interval = self._clip_interval(ma, mb)
        if interval is not None:
            lo, hi = interval
            # Depth along the segment is a concave piecewise-linear min of
            # affine margins; its maximum sits at an interval end or at a
            # crossing of two margin lines.
            cands = [lo, hi]
            k = ma.size
            for i in range(k):
                si = mb[i] - ma[i]
                for j in range(i + 1, k):
                    sj = mb[j] - ma[j]
                    denom = si - sj
                    if denom != 0.0:
                        t = (ma[j] - ma[i]) / denom
                        if lo < t < hi:
                            cands.append(t)
            depth = max(min(ma + t * (mb - ma)) for t in cands)
            if depth >= 0:
                return -float(depth)
        n = self.vertices.shape[0]
        return min(
            segment_segment_distance(a, b, self.vertices[i], self.vertices[(i + 1) % n])
            for i in range(n)
        )

    def segment_signed_distance_batch(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        nseg = A.shape[0]
        MA = A @ self._normals.T - self._offsets
        MB = B @ self._normals.T - self._offsets
        S = MB - MA
        # Vectorized clipping of all segments against all half-planes.
        with np.errstate(divide="ignore", invalid="ignore"):
            T = np.where(S != 0.0, -MA / S, 0.0)
        lo = np.where(S > 0, T, 0.0).max(axis=1, initial=0.0)
        hi = np.where(S < 0, T, 1.0).min(axis=1, initial=1.0)
        degenerate_miss = np.any((S == 0.0) & (MA < 0), axis=1)
        penetrating = (lo <= hi) & ~degenerate_miss
        out = np.full(nseg, np.inf)
        pen_idx = np.where(penetrating)[0]
        for i in pen_idx:
            out[i] = self.segment_signed_distance(A[i], B[i])
        miss_idx = np.where(~penetrating)[0]
        if miss_idx.size:
            best = np.full(miss_idx.size, np.inf)
            n = self.vertices.shape[0]
            Am, Bm = A[miss_idx], B[miss_idx]
            for i in range(n):
                va = self.vertices[i]
                vb = self.vertices[(i + 1) % n]
                VA = np.broadcast_to(va, (miss_idx.size, 2))
                VB = np.broadcast_to(vb, (miss_idx.size, 2))
                # Segments here never cross the polygon boundary, so the
                # min over endpoint-to-segment distances is exact.
                best = np.minimum(best, _points_segments_distance(Am, VA, VB))
                best = np.minimum(best, _points_segments_distance(Bm, VA, VB))
                EA = np.broadcast_to(va, (miss_idx.size, 2))
                d_ea = _points_segments_distance(EA, Am, Bm)
                EB = np.broadcast_to(vb, (miss_idx.size, 2))
                d_eb = _points_segments_distance(EB, Am, Bm)
                best = np.minimum(best, np.minimum(d_ea, d_eb))
            out[miss_idx] = best
        return out

    def to_dict(self) -> dict:
        return {"type": "polygon", "vertices": self.vertices.tolist()}


class HyperBox(Obstacle):
    """Axis-aligned solid box lo <= x <= hi (componentwise)."""

    def __init__(self, lo: Sequence[float], hi: Sequence[float]):
        self.lo = as_point(lo)
        self.hi = as_point(hi, dim=self.lo.size)
        if not np.all(self.lo < self.hi):
            raise InvalidInputError("box must satisfy lo < hi componentwise")
        self.dim = self.lo.size
        # Planar boxes delegate segment queries to the polygon machinery,
        # which has exact vectorized paths.
        self._poly = None
        if self.dim == 2:
            x0, y0 = self.lo
            x1, y1 = self.hi
            self._poly = ConvexPolygon([[x0, y0], [x1, y0], [x1, y1], [x0, y1]])

    def signed_distance(self, p: np.ndarray) -> float:
        below = self.lo - p
        above = p - self.hi
        outside = np.maximum(np.maximum(below, above), 0.0)
        d = float(np.linalg.norm(outside))
        if d > 0:
            return d
        return -float(np.minimum(p - self.lo, self.hi - p).min())

    def signed_distance_batch(self, P: np.ndarray) -> np.ndarray:
        below = self.lo - P
        above = P - self.hi
        outside = np.maximum(np.maximum(below, above), 0.0)
        d = np.linalg.norm(outside, axis=1)
        inside = d == 0
        if np.any(inside):
            depth = np.minimum(P[inside] - self.lo, self.hi - P[inside]).min(axis=1)
            d[inside] = -depth
        return d

    def segment_signed_distance(self, a: np.ndarray, b: np.ndarray) -> float:
        if self._poly is not None:
            return self._poly.segment_signed_distance(a, b)
        return self._segment_signed_distance_nd(a, b)

    def _segment_signed_distance_nd(self, a: np.ndarray, b: np.ndarray) -> float:
        u = b - a
        cuts = {0.0, 1.0}
        for i in range(self.dim):
            if u[i] != 0.0:
                for face in (self.lo[i], self.hi[i]):
                    t = (face - a[i]) / u[i]
                    if 0.0 < t < 1.0:
                        cuts.add(float(t))
        ts = sorted(cuts)
        best = math.inf
        for t0, t1 in zip(ts[:-1], ts[1:]):
            tm = 0.5 * (t0 + t1)
            pm = a + tm * u
            below = pm < self.lo
            above = pm > self.hi
            if not below.any() and not above.any():
                # Penetrating piece: maximize the concave piecewise-linear
                # depth over [t0, t1]; candidates are the ends plus pairwise
                # crossings of the margin lines.
                margins0, slopes = [], []
                for i in range(self.dim):
                    margins0.append(a[i] - self.lo[i]); slopes.append(u[i])
                    margins0.append(self.hi[i] - a[i]); slopes.append(-u[i])
                cands = [t0, t1]
                k = len(margins0)
                for i in range(k):
                    for j in range(i + 1, k):
                        den = slopes[i] - slopes[j]
                        if den != 0.0:
                            t = (margins0[j] - margins0[i]) / den
                            if t0 < t < t1:
                                cands.append(t)
                depth = max(
                    min(margins0[i] + t * slopes[i] for i in range(k)) for t in cands
                )
                best = min(best, -depth)
            else:
                # Outside piece: squared distance is a single quadratic.
                A2 = B1 = C0 = 0.0
                for i in range(self.dim):
                    if below[i]:
                        c0 = self.lo[i] - a[i]
                        c1 = -u[i]
                    elif above[i]:
                        c0 = a[i] - self.hi[i]
                        c1 = u[i]
                    else:
                        continue
                    A2 += c1 * c1
                    B1 += 2 * c0 * c1
                    C0 += c0 * c0
                if A2 > 0:
                    tstar = min(t1, max(t0, -B1 / (2 * A2)))
                else:
                    tstar = t0
                val = A2 * tstar * tstar + B1 * tstar + C0
                best = min(best, math.sqrt(max(val, 0.0)))
        return best

    def segment_signed_distance_batch(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        if self._poly is not None:
            return self._poly.segment_signed_distance_batch(A, B)
        return super().segment_signed_distance_batch(A, B)

    def to_dict(self) -> dict:
        return {"type": "box", "lo": self.lo.tolist(), "hi": self.hi.tolist()}


@dataclass(frozen=True)
class Workspace:
    """Unit hypercube with obstacles; ``inflation`` grows every obstacle by
    the robot's physical radius so configurations are robot centers."""

    dim: int
    obstacles: tuple[Obstacle, ...] = ()
    inflation: float = 0.0

    def __post_init__(self):
        if self.dim < 1:
            raise InvalidInputError("workspace dimension must be >= 1")
        if not math.isfinite(self.inflation) or self.inflation < 0:
            raise InvalidInputError("inflation must be finite and >= 0")
        object.__setattr__(self, "obstacles", tuple(self.obstacles))
        for obs in self.obstacles:
            if obs.dim != self.dim:
                raise InvalidInputError(
                    f"obstacle dimension {obs.dim} does not match workspace dimension {self.dim}"
                )

    def inflate(self, extra: float) -> "Workspace":
        """Same workspace with ``extra`` added to the inflation radius."""
        return Workspace(self.dim, self.obstacles, self.inflation + extra)

    def _boundary_margin(self, p: np.ndarray) -> float:
        return float(min(p.min(), (1.0 - p).min()))

    def signed_clearance(self, p: Sequence[float], boundary_aware: bool = False) -> float:
        """Minimum over obstacles of (signed distance - inflation); capped by
        the raw distance to the cube boundary in boundary-aware mode. Positive
        means free; the point is treated as free iff the result exceeds
        CLEARANCE_TOL."""
        q = as_point(p, dim=self.dim)
        best = math.inf
        for obs in self.obstacles:
            best = min(best, obs.signed_distance(q) - self.inflation)
        if boundary_aware:
            best = min(best, self._boundary_margin(q))
        return best

    def signed_clearance_batch(self, P: np.ndarray, boundary_aware: bool = False) -> np.ndarray:
        P = np.asarray(P, dtype=np.float64)
        out = np.full(P.shape[0], np.inf)
        for obs in self.obstacles:
            np.minimum(out, obs.signed_distance_batch(P) - self.inflation, out=out)
        if boundary_aware:
            margin = np.minimum(P.min(axis=1), (1.0 - P).min(axis=1))
            np.minimum(out, margin, out=out)
        return out

    def segment_clearance(self, a: Sequence[float], b: Sequence[float], boundary_aware: bool = False) -> float:
        """Exact minimum of signed_clearance over the segment a-b."""
        pa = as_point(a, dim=self.dim)
        pb = as_point(b, dim=self.dim)
        best = math.inf
        for obs in self.obstacles:
            best = min(best, obs.segment_signed_distance(pa, pb) - self.inflation)
        if boundary_aware:
            # Each per-axis margin is affine along the segment, so the segment
            # minimum of the boundary distance is attained at an endpoint.
            best = min(best, self._boundary_margin(pa), self._boundary_margin(pb))
        return best

    def segment_clearance_batch(self, A: np.ndarray, B: np.ndarray, boundary_aware: bool = False) -> np.ndarray:
        A = np.asarray(A, dtype=np.float64)
        B = np.asarray(B, dtype=np.float64)
        out = np.full(A.shape[0], np.inf)
        for obs in self.obstacles:
            np.minimum(out, obs.segment_signed_distance_batch(A, B) - self.inflation, out=out)
        if boundary_aware:
            ma = np.minimum(A.min(axis=1), (1.0 - A).min(axis=1))
            mb = np.minimum(B.min(axis=1), (1.0 - B).min(axis=1))
            np.minimum(out, np.minimum(ma, mb), out=out)
        return out

    def segments_free_mask(self, A: np.ndarray, B: np.ndarray, tol: float = CLEARANCE_TOL) -> np.ndarray:
        """Boolean mask of segments whose clearance exceeds `tol`, equivalent
        to segment_clearance_batch(A, B) > tol in the default (non
        boundary-aware) mode but faster when most segments are far from every
        obstacle. Signed obstacle distance is 1-Lipschitz, so a segment whose
        midpoint distance exceeds half its length plus the threshold cannot
        violate that obstacle; only the remainder gets the exact check."""
        A = np.asarray(A, dtype=np.float64)
        B = np.asarray(B, dtype=np.float64)
        mask = np.ones(A.shape[0], dtype=bool)
        if not self.obstacles or not A.shape[0]:
            return mask
        mid = 0.5 * (A + B)
        half = 0.5 * np.linalg.norm(B - A, axis=1)
        threshold = self.inflation + tol
        for obs in self.obstacles:
            alive = np.flatnonzero(mask)
            if not alive.size:
                break
            sd_mid = obs.signed_distance_batch(mid[alive])
            suspect = alive[sd_mid <= half[alive] + threshold]
            if suspect.size:
                exact = obs.segment_signed_distance_batch(A[suspect], B[suspect])
                mask[suspect[exact <= threshold]] = False
        return mask

    def is_free_point(self, p: Sequence[float], boundary_aware: bool = False) -> bool:
        return self.signed_clearance(p, boundary_aware) > CLEARANCE_TOL

    def is_free_segment(self, a: Sequence[float], b: Sequence[float], boundary_aware: bool = False) -> bool:
        return self.segment_clearance(a, b, boundary_aware) > CLEARANCE_TOL

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "inflation": self.inflation,
            "obstacles": [obs.to_dict() for obs in self.obstacles],
        }

    @staticmethod
    def from_dict(d: dict) -> "Workspace":
        return Workspace(
            dim=int(d["dim"]),
            obstacles=tuple(Obstacle.from_dict(o) for o in d.get("obstacles", ())),
            inflation=float(d.get("inflation", 0.0)),
        )

    def fingerprint(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def moving_pair_min_distance(
    p0: Sequence[float], p1: Sequence[float], q0: Sequence[float], q1: Sequence[float]
) -> float:
    """Exact minimum distance between two points moving simultaneously along
    straight segments with the same linear time parameter tau in [0, 1]."""
    a0 = as_point(p0)
    a1 = as_point(p1, dim=a0.size)
    b0 = as_point(q0, dim=a0.size)
    b1 = as_point(q1, dim=a0.size)
    u = a0 - b0
    v = (a1 - a0) - (b1 - b0)
    vv = float(v @ v)
    if vv == 0.0:
        return float(np.linalg.norm(u))
    t = min(1.0, max(0.0, -float(u @ v) / vv))
    return float(np.linalg.norm(u + t * v))


def moving_pair_min_distance_batch(
    P0: np.ndarray, P1: np.ndarray, Q0: np.ndarray, Q1: np.ndarray
) -> np.ndarray:
    """Vectorized moving_pair_min_distance over rows."""
    U = P0 - Q0
    V = (P1 - P0) - (Q1 - Q0)
    VV = np.einsum("ij,ij->i", V, V)
    t = np.divide(
        -np.einsum("ij,ij->i", U, V), VV, out=np.zeros_like(VV), where=VV > 0
    )
    t = np.clip(t, 0.0, 1.0)
    return np.linalg.norm(U + t[:, None] * V, axis=1)
