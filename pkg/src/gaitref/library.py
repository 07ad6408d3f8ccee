"""Gait and gait-library data model.

A library stores one canonical left-stance gait per velocity and derives
the right-stance counterpart through a mirror map (an index permutation
with sign flips). Velocity space is indexed with a Delaunay triangulation
so that any query inside the hull resolves to the convex combination of
the three gaits whose triangle contains it; queries outside the hull are
projected to the nearest hull boundary point first, which reduces them to
a two-gait edge combination or a single vertex.

Degenerate libraries are supported with reduced interpolation modes:
collinear velocity grids fall back to piecewise-linear interpolation
along the line, and one- or two-gait libraries to a point/segment lookup.
A GaitLibrary is immutable after build_index and safe for concurrent
reads.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import Delaunay, QhullError

from .bezier import BezierCurve
from .errors import (
    DimensionError,
    DuplicateVelocityError,
    LibraryError,
    MirrorMapError,
)


class Stance(enum.Enum):
    LEFT = "L"
    RIGHT = "R"

    @property
    def other(self) -> "Stance":
        return Stance.RIGHT if self is Stance.LEFT else Stance.LEFT


@dataclass(frozen=True)
class Gait:
    """One step's reference motion: a curve plus its velocity label."""

    curve: BezierCurve
    velocity: tuple[float, float]
    step_duration: float
    stance: Stance = Stance.LEFT
    name: str = ""

    def __post_init__(self) -> None:
        v = (float(self.velocity[0]), float(self.velocity[1]))
        if not all(np.isfinite(v)):
            raise ValueError(f"gait {self.name!r}: velocity must be finite, got {v}")
        object.__setattr__(self, "velocity", v)
        T = float(self.step_duration)
        if not np.isfinite(T) or T <= 0.0:
            raise ValueError(f"gait {self.name!r}: step_duration must be > 0, got {T}")
        object.__setattr__(self, "step_duration", T)


@dataclass(frozen=True)
class MirrorMap:
    """Left/right symmetry: output row i maps to signs[i] * row permutation[i].

    Applying the map twice must be the identity, which requires the
    permutation to be an involution and the signs to agree across each
    swapped pair. Both conditions are checked here, at load time, not on
    every call.
    """

    permutation: np.ndarray
    signs: np.ndarray

    def __post_init__(self) -> None:
        perm = np.asarray(self.permutation, dtype=np.intp).copy()
        signs = np.asarray(self.signs, dtype=np.float64).copy()
        n = len(perm)
        if n < 1 or signs.shape != (n,):
            raise MirrorMapError(
                f"permutation and signs must be equal-length vectors, got {n} and {signs.shape}"
            )
        if not np.array_equal(np.sort(perm), np.arange(n)):
            raise MirrorMapError("permutation is not a bijection on output indices")
        if not np.all(np.abs(signs) == 1.0):
            raise MirrorMapError("signs must be +1 or -1")
        if not np.array_equal(perm[perm], np.arange(n)):
            raise MirrorMapError("permutation is not an involution")
        if not np.all(signs * signs[perm] == 1.0):
            raise MirrorMapError("signs do not agree across swapped index pairs")
        perm.flags.writeable = False
        signs.flags.writeable = False
        object.__setattr__(self, "permutation", perm)
        object.__setattr__(self, "signs", signs)

    @property
    def n_outputs(self) -> int:
        return len(self.permutation)

    def apply_matrix(self, m: np.ndarray) -> np.ndarray:
        return self.signs[:, None] * m[self.permutation, :]

    def apply_vector(self, v: np.ndarray) -> np.ndarray:
        return self.signs * v[self.permutation]

    @classmethod
    def identity(cls, n: int) -> "MirrorMap":
        return cls(np.arange(n), np.ones(n))


def mirror_gait(gait: Gait, mm: MirrorMap) -> Gait:
    """Swap stance legs: permute/sign-flip rows, flip stance and lateral velocity."""
    if mm.n_outputs != gait.curve.n_rows:
        raise DimensionError(
            f"mirror map has {mm.n_outputs} outputs but gait {gait.name!r} has "
            f"{gait.curve.n_rows} rows"
        )
    return Gait(
        curve=BezierCurve(mm.apply_matrix(gait.curve.coeffs)),
        velocity=(gait.velocity[0], -gait.velocity[1]),
        step_duration=gait.step_duration,
        stance=gait.stance.other,
        name=gait.name,
    )


def barycentric_weights(p0: np.ndarray, p1: np.ndarray, p2: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Weights (w0, w1, w2) with q = w0 p0 + w1 p1 + w2 p2 and sum(w) = 1."""
    d1 = p1 - p0
    d2 = p2 - p0
    r = q - p0
    det = d1[0] * d2[1] - d1[1] * d2[0]
    if det == 0.0:
        raise ValueError("degenerate triangle: zero area")
    w1 = (r[0] * d2[1] - r[1] * d2[0]) / det
    w2 = (d1[0] * r[1] - d1[1] * r[0]) / det
    return np.array([1.0 - w1 - w2, w1, w2])


def _project_to_segment(a: np.ndarray, b: np.ndarray, q: np.ndarray) -> tuple[float, np.ndarray, float]:
    """Nearest point on segment [a, b] to q: (param u in [0,1], point, squared distance)."""
    d = b - a
    denom = float(d @ d)
    u = float(np.clip((q - a) @ d / denom, 0.0, 1.0)) if denom > 0.0 else 0.0
    p = a + u * d
    return u, p, float((q - p) @ (q - p))


@dataclass(frozen=True)
class GaitLibrary:
    """Validated, immutable set of canonical left-stance gaits.

    Construct through :func:`build_index`; every instance that exists
    satisfies all structural invariants (consistent dimensions, distinct
    velocities, valid mirror map, usable velocity index).
    """

    gaits: tuple[Gait, ...] = field(repr=False)
    mirror: MirrorMap
    n_outputs: int
    degree: int
    triangulation: tuple[tuple[int, int, int], ...] = field(repr=False)
    metadata: dict = field(default_factory=dict)
    warnings: tuple[str, ...] = ()
    # Velocity-space index internals (set by build_index).
    _points: np.ndarray = field(default=None, repr=False)
    _mode: str = "point"
    _delaunay: object = field(default=None, repr=False)
    _hull_edges: tuple[tuple[int, int], ...] = field(default=(), repr=False)
    _line_order: np.ndarray = field(default=None, repr=False)
    _line_params: np.ndarray = field(default=None, repr=False)
    _line_origin: np.ndarray = field(default=None, repr=False)
    _line_dir: np.ndarray = field(default=None, repr=False)

    @property
    def velocities(self) -> np.ndarray:
        """Copy of the (n_gaits, 2) velocity points."""
        return self._points.copy()

    @property
    def interpolation_mode(self) -> str:
        """'planar' (triangulated), 'segment' (collinear or 2 gaits) or 'point'."""
        return self._mode

    def interpolation_weights(
        self, v_query: tuple[float, float]
    ) -> tuple[tuple[int, ...], np.ndarray, tuple[float, float]]:
        """Resolve a velocity query to (gait indices, convex weights, projected query).

        The projected query equals the query itself whenever it lies inside
        the velocity hull; otherwise it is the nearest point on the hull
        boundary.
        """
        q = np.array([float(v_query[0]), float(v_query[1])])
        if not np.all(np.isfinite(q)):
            raise ValueError(f"velocity query must be finite, got {v_query}")

        exact = np.nonzero((self._points == q).all(axis=1))[0]
        if exact.size:
            i = int(exact[0])
            return (i,), np.array([1.0]), self.gaits[i].velocity

        if self._mode == "point":
            return (0,), np.array([1.0]), self.gaits[0].velocity

        if self._mode == "segment":
            t = float((q - self._line_origin) @ self._line_dir)
            params = self._line_params
            order = self._line_order
            lo, hi = params[order[0]], params[order[-1]]
            t = min(max(t, lo), hi)
            pos = int(np.searchsorted(params[order], t, side="right"))
            pos = min(max(pos, 1), len(order) - 1)
            i, j = int(order[pos - 1]), int(order[pos])
            ti, tj = params[i], params[j]
            w = (t - ti) / (tj - ti)
            p = self._line_origin + t * self._line_dir
            return (i, j), np.array([1.0 - w, w]), (float(p[0]), float(p[1]))

        simplex = int(self._delaunay.find_simplex(q[None, :])[0])
        if simplex >= 0:
            tri = self.triangulation[simplex]
            pts = self._points
            w = barycentric_weights(pts[tri[0]], pts[tri[1]], pts[tri[2]], q)
            w[w < 0.0] = 0.0
            return tri, w, (float(q[0]), float(q[1]))

        # Outside the hull: project onto the nearest hull edge, then the
        # combination degenerates to that edge's two endpoint gaits.
        best = None
        for ia, ib in self._hull_edges:
            u, p, d2 = _project_to_segment(self._points[ia], self._points[ib], q)
            if best is None or d2 < best[0]:
                best = (d2, ia, ib, u, p)
        _, ia, ib, u, p = best
        return (ia, ib), np.array([1.0 - u, u]), (float(p[0]), float(p[1]))

    def interpolate(self, v_query: tuple[float, float]) -> Gait:
        """Gait at an arbitrary velocity: convex combination of coefficient
        matrices and step durations with barycentric weights.

        Queries exactly at a library node return that node's gait object
        (coefficients bit-identical)."""
        idx, w, v_proj = self.interpolation_weights(v_query)
        if len(idx) == 1:
            return self.gaits[idx[0]]
        coeffs = np.zeros((self.n_outputs, self.degree + 1))
        duration = 0.0
        for k, i in enumerate(idx):
            coeffs += w[k] * self.gaits[i].curve.coeffs
            duration += w[k] * self.gaits[i].step_duration
        return Gait(
            curve=BezierCurve(coeffs),
            velocity=v_proj,
            step_duration=duration,
            stance=Stance.LEFT,
            name=f"interp({v_proj[0]:.6g},{v_proj[1]:.6g})",
        )

    def clamp_velocity(self, v: tuple[float, float]) -> tuple[float, float]:
        """Project a velocity onto the library hull (identity when inside)."""
        return self.interpolation_weights(v)[2]

    def hull_distance(self, v: tuple[float, float]) -> float:
        """Distance from v to the velocity hull; 0 inside."""
        q = np.array([float(v[0]), float(v[1])])
        if self._mode == "point":
            return float(np.linalg.norm(q - self._points[0]))
        if self._mode == "segment":
            order = self._line_order
            a = self._line_origin + self._line_params[order[0]] * self._line_dir
            b = self._line_origin + self._line_params[order[-1]] * self._line_dir
            return float(np.sqrt(_project_to_segment(a, b, q)[2]))
        if int(self._delaunay.find_simplex(q[None, :])[0]) >= 0:
            return 0.0
        return float(
            np.sqrt(
                min(
                    _project_to_segment(self._points[ia], self._points[ib], q)[2]
                    for ia, ib in self._hull_edges
                )
            )
        )


def build_index(
    gaits: list[Gait],
    mirror: MirrorMap | None = None,
    metadata: dict | None = None,
) -> GaitLibrary:
    """Validate gaits and build the velocity-space index.

    Raises the specific library error (dimension mismatch, duplicate
    velocity, invalid mirror map) rather than returning a partially valid
    object. Collinear velocity grids degrade to a 1-D segment index with a
    recorded warning; fewer than three gaits degrade likewise.
    """
    if not gaits:
        raise LibraryError("gait library needs at least one gait")
    gaits = tuple(gaits)
    warnings: list[str] = []

    first = gaits[0]
    n_outputs = first.curve.n_rows
    degree = first.curve.degree
    for g in gaits:
        if g.curve.n_rows != n_outputs or g.curve.degree != degree:
            raise DimensionError(
                f"gait {g.name!r} has shape ({g.curve.n_rows}, {g.curve.degree + 1}), "
                f"library expects ({n_outputs}, {degree + 1})"
            )
        if g.stance is not Stance.LEFT:
            raise LibraryError(
                f"gait {g.name!r} has stance {g.stance.value}; libraries store the "
                "canonical left-stance side only"
            )

    points = np.array([g.velocity for g in gaits])
    seen: dict[tuple[float, float], int] = {}
    for i, g in enumerate(gaits):
        if g.velocity in seen:
            other = gaits[seen[g.velocity]]
            raise DuplicateVelocityError(
                f"gaits {other.name!r} and {g.name!r} share velocity {g.velocity}"
            )
        seen[g.velocity] = i

    if mirror is None:
        mirror = MirrorMap.identity(n_outputs)
    if mirror.n_outputs != n_outputs:
        raise MirrorMapError(
            f"mirror map covers {mirror.n_outputs} outputs, library has {n_outputs}"
        )

    mode = "planar"
    triangulation: tuple[tuple[int, int, int], ...] = ()
    delaunay = None
    hull_edges: tuple[tuple[int, int], ...] = ()
    line_order = line_params = line_origin = line_dir = None

    if len(gaits) == 1:
        mode = "point"
        warnings.append("single gait: no 2-D interpolation, every query returns it")
    elif len(gaits) == 2:
        mode = "segment"
        warnings.append("two gaits: no 2-D interpolation, queries reduce to a segment")
    else:
        try:
            delaunay = Delaunay(points)
            triangulation = tuple(tuple(int(i) for i in s) for s in delaunay.simplices)
            hull_edges = tuple(tuple(int(i) for i in e) for e in delaunay.convex_hull)
        except QhullError:
            mode = "segment"
            warnings.append(
                "velocity points are collinear: no 2-D interpolation, using "
                "piecewise-linear interpolation along the line"
            )

    if mode == "segment":
        # Direction from the farthest-apart node pair; every node projects
        # onto it exactly (collinearity is what got us here).
        diffs = points[:, None, :] - points[None, :, :]
        d2 = (diffs**2).sum(axis=2)
        ia, ib = np.unravel_index(int(np.argmax(d2)), d2.shape)
        line_origin = points[ia].copy()
        line_dir = points[ib] - points[ia]
        line_dir = line_dir / np.linalg.norm(line_dir)
        line_params = (points - line_origin) @ line_dir
        line_order = np.argsort(line_params, kind="stable")
        for arr in (line_origin, line_dir, line_params, line_order):
            arr.flags.writeable = False

    points.flags.writeable = False
    return GaitLibrary(
        gaits=gaits,
        mirror=mirror,
        n_outputs=n_outputs,
        degree=degree,
        triangulation=triangulation,
        metadata=dict(metadata or {}),
        warnings=tuple(warnings),
        _points=points,
        _mode=mode,
        _delaunay=delaunay,
        _hull_edges=hull_edges,
        _line_order=line_order,
        _line_params=line_params,
        _line_origin=line_origin,
        _line_dir=line_dir,
    )


__all__ = [
    "Stance",
    "Gait",
    "MirrorMap",
    "GaitLibrary",
    "build_index",
    "mirror_gait",
    "barycentric_weights",
]
