"""Crack geometry, tip frames, quadrature contours around the tip and
shrink sequences used to approximate limits at the tip."""
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

import numpy as np

from .errors import DegenerateGeometry, InvalidArgument

FRAME_TOL = 1e-12
DEFAULT_DELTA_THETA = 1e-3
DEFAULT_MIN_RADIUS = 1e-6


class CrackMode(str, Enum):
    STRAIGHT_PLANAR = "straight_planar"
    PARAMETRIZED = "parametrized"


def _unit(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


@dataclass(frozen=True)
class TipFrame:
    t: np.ndarray
    n: np.ndarray
    m: np.ndarray
    curvature_vector: np.ndarray
    curvature: float

    def __iter__(self):
        return iter((self.t, self.n, self.m, self.curvature_vector, self.curvature))


@dataclass(frozen=True, eq=False)
class CrackGeometry:
    """Reference picture of the crack.

    ``StraightPlanar``: the half plane {(X - Z).n <= 0, (X - Z).m = 0}
    bounded by the straight tip line through Z along t.

    ``Parametrized``: the crack lies in the zero set of ``level_set`` and
    is bounded by the tip curve ``tip_curve(s)`` (arclength, s in
    [0, s_max]). ``front(X)`` is negative on the cracked side of the tip and
    positive ahead of it; it fixes the orientation of n.
    """

    mode: CrackMode
    tip_point: np.ndarray
    t: np.ndarray
    n: np.ndarray
    m: np.ndarray
    curvature_vector: np.ndarray = field(default_factory=lambda: np.zeros(3))
    curvature: float = 0.0
    level_set: Optional[Callable] = None
    level_set_gradient: Optional[Callable] = None
    tip_curve: Optional[Callable] = None
    front: Optional[Callable] = None
    s_max: Optional[float] = None
    s0: float = 0.0

    @classmethod
    def straight(cls, tip=(0.0, 0.0, 0.0), t=(0.0, 0.0, 1.0), n=(1.0, 0.0, 0.0), m=(0.0, 1.0, 0.0)):
        crack = cls(
            CrackMode.STRAIGHT_PLANAR,
            np.asarray(tip, dtype=float),
            np.asarray(t, dtype=float),
            np.asarray(n, dtype=float),
            np.asarray(m, dtype=float),
        )
        _check_frame(crack.t, crack.n, crack.m)
        return crack

    @classmethod
    def parametrized(cls, level_set, tip_curve, front, s_max, s0=0.0, level_set_gradient=None):
        stub = cls(
            CrackMode.PARAMETRIZED,
            np.zeros(3), np.eye(3)[2], np.eye(3)[0], np.eye(3)[1],
            level_set=level_set,
            level_set_gradient=level_set_gradient,
            tip_curve=tip_curve,
            front=front,
            s_max=float(s_max),
            s0=float(s0),
        )
        frame = tip_frame(stub, s0)
        return cls(
            CrackMode.PARAMETRIZED,
            np.asarray(tip_curve(s0), dtype=float),
            frame.t, frame.n, frame.m,
            frame.curvature_vector, frame.curvature,
            level_set, level_set_gradient, tip_curve, front, float(s_max), float(s0),
        )

    @property
    def is_straight(self):
        return self.mode is CrackMode.STRAIGHT_PLANAR

    def distance_to_tip(self, X):
        X = np.asarray(X, dtype=float)
        if self.is_straight:
            d = X - self.tip_point
            d = d - np.einsum("...i,i->...", d, self.t)[..., None] * self.t
            return np.linalg.norm(d, axis=-1)
        s = np.linspace(0.0, self.s_max, 401)
        Z = np.array([self.tip_curve(si) for si in s])
        return np.min(np.linalg.norm(X[..., None, :] - Z, axis=-1), axis=-1)

    def on_crack(self, X, tol):
        """Mask of points within ``tol`` of the crack surface (behind the tip)."""
        X = np.asarray(X, dtype=float)
        if self.is_straight:
            d = X - self.tip_point
            return (np.abs(d @ self.m) <= tol) & (d @ self.n <= 0.0)
        f = np.apply_along_axis(self.level_set, -1, X)
        g = np.linalg.norm(np.apply_along_axis(self._grad_f, -1, X), axis=-1)
        behind = np.apply_along_axis(self.front, -1, X) < 0.0
        return (np.abs(f) <= tol * g) & behind

    def normal_at(self, X):
        if self.is_straight:
            return self.m
        return _unit(self._grad_f(X))

    def _grad_f(self, X):
        if self.level_set_gradient is not None:
            return np.asarray(self.level_set_gradient(X), dtype=float)
        X = np.asarray(X, dtype=float)
        h = 1e-6 * max(1.0, np.linalg.norm(X))
        return np.array([(self.level_set(X + h * e) - self.level_set(X - h * e)) / (2 * h) for e in np.eye(3)])


def _check_frame(t, n, m):
    for name, v in (("t", t), ("n", n), ("m", m)):
        if abs(np.linalg.norm(v) - 1.0) > FRAME_TOL:
            raise InvalidArgument(f"{name} is not a unit vector")
    if abs(m @ n) > FRAME_TOL or abs(t @ n) > FRAME_TOL or abs(t @ m) > FRAME_TOL:
        raise InvalidArgument("tip frame (t, n, m) is not orthogonal")


def tip_frame(crack, s=None):
    """Frame (t, n, m), curvature vector h = -Z'' and scalar curvature h.n at arclength s."""
    if crack.is_straight:
        return TipFrame(crack.t, crack.n, crack.m, np.zeros(3), 0.0)
    s = crack.s0 if s is None else float(s)
    if not (0.0 <= s <= crack.s_max):
        raise InvalidArgument(f"s={s} outside [0, {crack.s_max}]")
    h = 1e-4 * max(crack.s_max, 1e-3)
    Zp = np.asarray(crack.tip_curve(s + h), dtype=float)
    Z0 = np.asarray(crack.tip_curve(s), dtype=float)
    Zm = np.asarray(crack.tip_curve(s - h), dtype=float)
    Zs = (Zp - Zm) / (2 * h)
    speed = np.linalg.norm(Zs)
    if speed < 1e-8:
        raise DegenerateGeometry(f"tip curve is not regular at s={s}")
    Zss = (Zp - 2 * Z0 + Zm) / h**2
    m = crack.normal_at(Z0)
    t = Zs - (Zs @ m) * m
    t = t / np.linalg.norm(t)
    n = np.cross(m, t)
    eps = 1e-6 * max(1.0, np.linalg.norm(Z0))
    if crack.front(Z0 + eps * n) < crack.front(Z0 - eps * n):
        n = -n
    hvec = -Zss
    return TipFrame(t, n, m, hvec, float(hvec @ n))


@dataclass(frozen=True, eq=False)
class Contour:
    """Circle of quadrature nodes in the plane orthogonal to the tip tangent.

    Angles are measured from n towards m, so the crack faces sit at +-pi.
    """

    center: np.ndarray
    radius: float
    angles: np.ndarray
    points: np.ndarray
    normals: np.ndarray
    weights: np.ndarray
    cut_aware: bool
    delta_theta: float
    t: np.ndarray
    n: np.ndarray
    m: np.ndarray

    @property
    def length(self):
        return 2.0 * np.pi * self.radius

    def integrate(self, values):
        """Quadrature of nodal values (first axis runs over the nodes)."""
        return np.tensordot(self.weights, np.asarray(values, dtype=float), axes=(0, 0))


def make_contour(crack, radius, n_nodes=256, cut_aware=True, delta_theta=DEFAULT_DELTA_THETA, center=None):
    """Closed circular path about the tip.

    Cut-aware contours place the end nodes at +-(pi - delta_theta), use
    composite trapezoid weights in between and let the end weights absorb
    the two gaps next to the faces, so the weights still sum to 2 pi r.
    Closed contours use the periodic trapezoid rule on offset nodes.
    """
    if not radius > 0:
        raise InvalidArgument("contour radius must be positive")
    if n_nodes < 16:
        raise InvalidArgument("a contour needs at least 16 nodes")
    frame = tip_frame(crack)
    N = int(n_nodes)
    if cut_aware:
        if not 0 < delta_theta < np.pi / 2:
            raise InvalidArgument("delta_theta must lie in (0, pi/2)")
        angles = np.linspace(-np.pi + delta_theta, np.pi - delta_theta, N)
        dth = angles[1] - angles[0]
        w = np.full(N, dth)
        w[0] = w[-1] = 0.5 * dth + delta_theta
    else:
        delta_theta = 0.0
        angles = -np.pi + (np.arange(N) + 0.5) * (2 * np.pi / N)
        w = np.full(N, 2 * np.pi / N)
    center = crack.tip_point if center is None else np.asarray(center, dtype=float)
    normals = np.cos(angles)[:, None] * frame.n + np.sin(angles)[:, None] * frame.m
    return Contour(
        center=center,
        radius=float(radius),
        angles=angles,
        points=center + radius * normals,
        normals=normals,
        weights=radius * w,
        cut_aware=bool(cut_aware),
        delta_theta=float(delta_theta),
        t=frame.t, n=frame.n, m=frame.m,
    )


def shrink_sequence(r0, factor, count, floor=DEFAULT_MIN_RADIUS):
    """Geometric radii r0 * factor**k, k = 0..count-1."""
    if not r0 > 0:
        raise InvalidArgument("r0 must be positive")
    if not 0 < factor < 1:
        raise InvalidArgument("factor must lie in (0, 1)")
    if count < 2:
        raise InvalidArgument("need at least two radii")
    radii = [r0 * factor**k for k in range(count)]
    if radii[-1] <= floor:
        raise InvalidArgument(f"smallest radius {radii[-1]:g} is below the floor {floor:g}")
    return radii


def richardson(radii, values, order=2):
    """Extrapolate values sampled at shrinking radii to r -> 0.

    Assumes Q(r) = Q0 + C r**order and eliminates C using the two smallest
    radii. ``values`` may carry trailing dimensions.
    """
    radii = np.asarray(radii, dtype=float)
    values = np.asarray(values, dtype=float)
    if len(radii) < 2:
        return values[-1].copy()
    i, j = np.argsort(radii)[:2][::-1]  # j: smallest radius
    q = (radii[j] / radii[i]) ** order
    return (values[j] - q * values[i]) / (1.0 - q)


def spread(values):
    """Max minus min over the radius axis (per component)."""
    values = np.asarray(values, dtype=float)
    return values.max(axis=0) - values.min(axis=0)
