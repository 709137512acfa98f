"""Deformation, order-parameter and rate fields.

Two providers feed :func:`evaluate`:

* :class:`AnalyticProvider` takes sympy expressions in the reference
  coordinates ``X1, X2, X3``; gradients are differentiated symbolically.
* :class:`GridProvider` takes samples on a regular grid of the (X1, X2)
  cross-section (fields independent of X3), interpolates bicubically and
  differentiates with central differences that never cross the crack.

Everything is vectorised over leading batch dimensions of ``X``.
"""
import warnings
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
import sympy as sp
from scipy.interpolate import RectBivariateSpline

from .errors import AmbiguousTrace, InvalidArgument, InvalidState, UnreliableTraceWarning
from .manifolds import OrderParameterSpace, SpaceKind, check_value

X1, X2, X3 = sp.symbols("X1 X2 X3", real=True)
COORDS = (X1, X2, X3)


@dataclass(frozen=True, eq=False)
class MaterialState:
    X: np.ndarray
    x: np.ndarray
    F: np.ndarray
    nu: np.ndarray
    grad_nu: np.ndarray
    xdot: np.ndarray
    nudot: np.ndarray
    rho: float = 1.0

    @property
    def batch_shape(self):
        return self.X.shape[:-1]

    def take(self, idx):
        """Sub-state at batch index ``idx``."""
        return MaterialState(
            self.X[idx], self.x[idx], self.F[idx], self.nu[idx], self.grad_nu[idx],
            self.xdot[idx], self.nudot[idx], self.rho,
        )


def make_state(F, nu, grad_nu, X=None, x=None, xdot=None, nudot=None, rho=1.0):
    """Assemble a state from its parts, filling kinematic gaps with zeros."""
    F = np.asarray(F, dtype=float)
    nu = np.atleast_1d(np.asarray(nu, dtype=float))
    grad_nu = np.asarray(grad_nu, dtype=float)
    batch = F.shape[:-2]
    X = np.zeros(batch + (3,)) if X is None else np.asarray(X, dtype=float)
    x = X.copy() if x is None else np.asarray(x, dtype=float)
    xdot = np.zeros(batch + (3,)) if xdot is None else np.asarray(xdot, dtype=float)
    nudot = np.zeros_like(nu) if nudot is None else np.asarray(nudot, dtype=float)
    return MaterialState(X, x, F, nu, grad_nu, xdot, nudot, rho)


# -- analytic provider -------------------------------------------------------


def _compile(exprs):
    exprs = [sp.sympify(e) for e in exprs]
    fn = sp.lambdify(COORDS, exprs, modules="numpy")

    def evaluate(X):
        out = fn(X[..., 0], X[..., 1], X[..., 2])
        return np.stack([np.broadcast_to(np.asarray(o, dtype=float), X.shape[:-1]) for o in out], axis=-1)

    return evaluate


class AnalyticProvider:
    """Fields given as closed-form expressions of X1, X2, X3.

    ``x`` is the deformation (3 expressions), ``nu`` the order parameter in
    ambient coordinates, ``xdot``/``nudot`` the rates (default zero). With
    ``nu_is_F`` the order parameter is bound to the deformation gradient
    (row-major), which realises the strain-gradient latency.
    """

    smooth_order = 3

    def __init__(self, x, nu=None, xdot=None, nudot=None, nu_is_F=False, ambient_dim=1):
        self.x_expr = [sp.sympify(e) for e in x]
        F = sp.Matrix(self.x_expr).jacobian(COORDS)
        if nu_is_F:
            nu = list(F)  # row-major
        elif nu is None:
            nu = [0] * ambient_dim
        self.nu_expr = [sp.sympify(e) for e in nu]
        G = sp.Matrix(self.nu_expr).jacobian(COORDS)
        self.xdot_expr = [sp.sympify(e) for e in (xdot if xdot is not None else [0, 0, 0])]
        self.nudot_expr = [sp.sympify(e) for e in (nudot if nudot is not None else [0] * len(self.nu_expr))]
        self.dim = len(self.nu_expr)
        self._x = _compile(self.x_expr)
        self._F = _compile(list(F))
        self._nu = _compile(self.nu_expr)
        self._G = _compile(list(G))
        self._xdot = _compile(self.xdot_expr)
        self._nudot = _compile(self.nudot_expr)

    @property
    def F_expr(self):
        return sp.Matrix(self.x_expr).jacobian(COORDS)

    def raw(self, X):
        batch = X.shape[:-1]
        return dict(
            x=self._x(X),
            F=self._F(X).reshape(batch + (3, 3)),
            nu=self._nu(X),
            grad_nu=self._G(X).reshape(batch + (self.dim, 3)),
            xdot=self._xdot(X),
            nudot=self._nudot(X),
        )


# -- grid provider -------------------------------------------------------------


class GridProvider:
    """Cross-sectional samples on a uniform (X1, X2) grid.

    Arrays are indexed ``[j, i, component]`` with X1 = x0 + i*h (fastest)
    and X2 = y0 + j*h. ``u`` is the displacement x - X. For a cracked grid
    the crack is the half line X2 = 0, X1 <= 0; no row may sit on X2 = 0
    and each side gets its own interpolant, padded with two extrapolated
    ghost rows so stencils near the faces stay one-sided.
    """

    smooth_order = 1

    def __init__(self, x0, y0, spacing, u, nu=None, xdot=None, nudot=None, cracked=False, step=None):
        u = np.asarray(u, dtype=float)
        ny, nx, _ = u.shape
        self.x0, self.y0, self.h = float(x0), float(y0), float(spacing)
        self.nx, self.ny = nx, ny
        self.cracked = bool(cracked)
        self.step = self.h if step is None else float(step)
        self.u = u
        self.nu = np.zeros((ny, nx, 1)) if nu is None else np.asarray(nu, dtype=float)
        self.xdot = np.zeros((ny, nx, 3)) if xdot is None else np.asarray(xdot, dtype=float)
        self.nudot = np.zeros_like(self.nu) if nudot is None else np.asarray(nudot, dtype=float)
        self.dim = self.nu.shape[-1]
        self.X1 = self.x0 + self.h * np.arange(nx)
        self.X2 = self.y0 + self.h * np.arange(ny)
        stacked = np.concatenate([self.u, self.nu, self.xdot, self.nudot], axis=-1)
        if self.cracked:
            if np.any(np.abs(self.X2) < 1e-12 * max(1.0, self.h)):
                raise InvalidArgument("cracked grids must not place a row on the crack line X2 = 0")
            up, lo = self.X2 > 0, self.X2 < 0
            if up.sum() < 4 or lo.sum() < 4:
                raise InvalidArgument("cracked grids need at least four rows on each side")
            self._splines = {
                +1: self._build(*self._pad(self.X2[up], stacked[up], below=True)),
                -1: self._build(*self._pad(self.X2[lo], stacked[lo], below=False)),
            }
        else:
            self._splines = {0: self._build(self.X2, stacked)}

    def _pad(self, y, data, below):
        # cubic extrapolation of two ghost rows towards the crack line
        h = self.h
        if below:
            near = data[:4]
            ghosts = [4 * near[0] - 6 * near[1] + 4 * near[2] - near[3]]
            ghosts.insert(0, 4 * ghosts[0] - 6 * near[0] + 4 * near[1] - near[2])
            return np.concatenate([[y[0] - 2 * h, y[0] - h], y]), np.concatenate([np.stack(ghosts), data])
        near = data[-4:][::-1]
        g1 = 4 * near[0] - 6 * near[1] + 4 * near[2] - near[3]
        g2 = 4 * g1 - 6 * near[0] + 4 * near[1] - near[2]
        return np.concatenate([y, [y[-1] + h, y[-1] + 2 * h]]), np.concatenate([data, np.stack([g1, g2])])

    def _build(self, y, data):
        return [RectBivariateSpline(y, self.X1, data[..., c], kx=3, ky=3) for c in range(data.shape[-1])]

    def _interp(self, P, side):
        splines = self._splines[side]
        flat = P.reshape(-1, 2)
        vals = np.stack([s.ev(flat[:, 1], flat[:, 0]) for s in splines], axis=-1)
        return vals.reshape(P.shape[:-1] + (len(splines),))

    def _sample(self, P, side):
        if not self.cracked:
            return self._interp(P, 0)
        if side is None:
            side_arr = np.where(P[..., 1] >= 0.0, 1, -1)
            out = np.empty(P.shape[:-1] + (6 + 2 * self.dim,))
            for s in (1, -1):
                mask = side_arr == s
                if np.any(mask):
                    out[mask] = self._interp(P[mask], s)
            return out
        return self._interp(P, side)

    def raw(self, X, side=None):
        P = np.asarray(X, dtype=float)[..., :2]
        batch = P.shape[:-1]
        if self.cracked and side is None:
            side = np.where(P[..., 1] >= 0.0, 1, -1)
        d = self.dim
        vals = self._sample_sided(P, side)
        grads = []
        for e in np.eye(2):
            vp = self._sample_sided(P + self.step * e, side)
            vm = self._sample_sided(P - self.step * e, side)
            grads.append((vp - vm) / (2 * self.step))
        grads.append(np.zeros_like(vals))
        D = np.stack(grads, axis=-1)  # (..., ncomp, 3)
        F = np.eye(3) + D[..., 0:3, :]
        X = np.asarray(X, dtype=float)
        return dict(
            x=X + vals[..., 0:3],
            F=F.reshape(batch + (3, 3)),
            nu=vals[..., 3:3 + d],
            grad_nu=D[..., 3:3 + d, :],
            xdot=vals[..., 3 + d:6 + d],
            nudot=vals[..., 6 + d:6 + 2 * d],
        )

    def _sample_sided(self, P, side):
        if side is None or np.isscalar(side):
            return self._sample(P, side)
        out = np.empty(P.shape[:-1] + (6 + 2 * self.dim,))
        for s in (1, -1):
            mask = side == s
            if np.any(mask):
                out[mask] = self._interp(P[mask], s)
        return out


GRID_MAGIC = "cracksub-grid 1"


def save_grid(path, grid):
    """Write a grid provider as text (``.txt``/``.dat``) or binary (``.npz``).

    Text layout: three ``#`` header lines (magic; ``nx ny x0 y0 spacing
    cracked dim``; column names) followed by one row per node, X1 varying
    fastest. Columns: X1 X2 u1 u2 u3 nu_1..nu_d xdot1..xdot3 nudot_1..nudot_d.
    """
    path = str(path)
    if path.endswith(".npz"):
        np.savez(
            path, x0=grid.x0, y0=grid.y0, spacing=grid.h, cracked=grid.cracked,
            u=grid.u, nu=grid.nu, xdot=grid.xdot, nudot=grid.nudot,
        )
        return
    d = grid.dim
    XX, YY = np.meshgrid(grid.X1, grid.X2)
    cols = [XX[..., None], YY[..., None], grid.u, grid.nu, grid.xdot, grid.nudot]
    table = np.concatenate(cols, axis=-1).reshape(-1, 8 + 2 * d)
    names = grid_columns(d)
    header = "\n".join([
        GRID_MAGIC,
        f"{grid.nx} {grid.ny} {grid.x0!r} {grid.y0!r} {grid.h!r} {int(grid.cracked)} {d}",
        " ".join(names),
    ])
    np.savetxt(path, table, header=header, fmt="%.17g")


def grid_columns(dim):
    return (
        ["X1", "X2", "u1", "u2", "u3"]
        + [f"nu{k + 1}" for k in range(dim)]
        + ["xdot1", "xdot2", "xdot3"]
        + [f"nudot{k + 1}" for k in range(dim)]
    )


def load_grid(path, step=None):
    path = str(path)
    if path.endswith(".npz"):
        z = np.load(path)
        return GridProvider(
            float(z["x0"]), float(z["y0"]), float(z["spacing"]), z["u"], z["nu"], z["xdot"], z["nudot"],
            cracked=bool(z["cracked"]), step=step,
        )
    with open(path) as fh:
        magic = fh.readline().lstrip("#").strip()
        if magic != GRID_MAGIC:
            raise InvalidArgument(f"{path}: not a grid file (header {magic!r})")
        nx, ny, x0, y0, h, cracked, d = fh.readline().lstrip("#").split()
    nx, ny, d = int(nx), int(ny), int(d)
    table = np.loadtxt(path, comments="#").reshape(ny, nx, -1)
    if table.shape[-1] != 8 + 2 * d:
        raise InvalidArgument(f"{path}: expected {8 + 2 * d} columns, found {table.shape[-1]}")
    return GridProvider(
        float(x0), float(y0), float(h),
        table[..., 2:5], table[..., 5:5 + d], table[..., 5 + d:8 + d], table[..., 8 + d:],
        cracked=bool(int(cracked)), step=step,
    )


def sample_to_grid(provider, x0, y0, spacing, nx, ny, cracked=False):
    """Sample an analytic provider on a grid (handy for building grid files)."""
    X1g = x0 + spacing * np.arange(nx)
    X2g = y0 + spacing * np.arange(ny)
    XX, YY = np.meshgrid(X1g, X2g)
    X = np.stack([XX, YY, np.zeros_like(XX)], axis=-1)
    r = provider.raw(X)
    return GridProvider(x0, y0, spacing, r["x"] - X, r["nu"], r["xdot"], r["nudot"], cracked=cracked)


# -- field sets and evaluation ---------------------------------------------------


@dataclass(frozen=True, eq=False)
class FieldSet:
    provider: object
    space: OrderParameterSpace
    rho: float = 1.0
    crack: Optional[object] = None
    domain_size: float = 1.0
    trace_offset: Optional[float] = None  # delta_j
    on_crack_tol: Optional[float] = None  # delta_c

    def __post_init__(self):
        if self.trace_offset is None:
            object.__setattr__(self, "trace_offset", 1e-4 * self.domain_size)
        if self.on_crack_tol is None:
            object.__setattr__(self, "on_crack_tol", 1e-9 * self.domain_size)
        if self.provider.dim != self.space.ambient_dim:
            raise InvalidArgument(
                f"provider supplies {self.provider.dim} order-parameter components, "
                f"{self.space.kind.value} needs {self.space.ambient_dim}"
            )

    def with_rates(self, provider):
        return replace(self, provider=provider)


def _state_from(fs, X, raw, validate=True):
    detF = np.linalg.det(raw["F"])
    if np.any(detF <= 0.0):
        raise InvalidState("det F <= 0: deformation is not orientation preserving")
    if validate:
        try:
            check_value(fs.space, raw["nu"], tol=1e-10)
        except InvalidArgument as exc:
            raise InvalidState(str(exc)) from None
    return MaterialState(X, raw["x"], raw["F"], raw["nu"], raw["grad_nu"], raw["xdot"], raw["nudot"], fs.rho)


def _raw(fs, X, side=None):
    if isinstance(fs.provider, GridProvider):
        return fs.provider.raw(X, side)
    return fs.provider.raw(X)


def _offset_points(fs, X, side, k):
    m = fs.crack.normal_at(X) if fs.crack is not None else np.eye(3)[1]
    return X + side * k * fs.trace_offset * m


def evaluate(fs, X, side=None):
    """Material state at reference point(s) X.

    Points within ``on_crack_tol`` of the crack need ``side`` (+1 or -1);
    the one-sided limit is then obtained by linear extrapolation from the
    points X + side*delta*m and X + side*2*delta*m.
    """
    X = np.asarray(X, dtype=float)
    if side is None:
        if fs.crack is not None and np.any(fs.crack.on_crack(X, fs.on_crack_tol)):
            raise AmbiguousTrace("point lies on the crack surface; choose side=+1 or side=-1")
        return _state_from(fs, X, _raw(fs, X))
    side = _side_sign(side)
    r1 = _raw(fs, _offset_points(fs, X, side, 1), side)
    r2 = _raw(fs, _offset_points(fs, X, side, 2), side)
    raw = {k: 2 * r1[k] - r2[k] for k in r1}
    state = _state_from(fs, X, raw, validate=False)
    return state


def _side_sign(side):
    if side in (+1, "+", "plus"):
        return 1
    if side in (-1, "-", "minus"):
        return -1
    raise InvalidArgument(f"side must be +1 or -1, got {side!r}")


def one_sided(fs, X, side, quantity):
    """One-sided limit of ``quantity(state)`` at crack point(s) X."""
    side = _side_sign(side)
    X = np.asarray(X, dtype=float)
    s1 = _state_from(fs, X, _raw(fs, _offset_points(fs, X, side, 1), side), validate=False)
    s2 = _state_from(fs, X, _raw(fs, _offset_points(fs, X, side, 2), side), validate=False)
    return 2 * np.asarray(quantity(s1)) - np.asarray(quantity(s2))


def _selector(component):
    if callable(component):
        return component
    return lambda st: getattr(st, component)


def jump(fs, X, component):
    """Jump [e] = e+ - e- and mean <e> of a state component across the crack."""
    if fs.crack is None:
        raise InvalidArgument("field set has no crack")
    X = np.asarray(X, dtype=float)
    if not np.all(fs.crack.on_crack(X, max(fs.on_crack_tol, 1e-12))):
        raise InvalidArgument("jump requested away from the crack surface")
    if np.any(fs.crack.distance_to_tip(X) < 10 * fs.trace_offset):
        warnings.warn("trace taken within the trace stencil of the tip", UnreliableTraceWarning, stacklevel=2)
    sel = _selector(component)
    plus = one_sided(fs, X, +1, sel)
    minus = one_sided(fs, X, -1, sel)
    return plus - minus, 0.5 * (plus + minus)


def rates_following_tip(state, v_tip):
    """Rates perceived by an observer riding on the tip: (xdot + F v, nudot + grad_nu v)."""
    v = np.asarray(v_tip, dtype=float)
    return (
        state.xdot + np.einsum("...ij,j->...i", state.F, v),
        state.nudot + np.einsum("...aj,j->...a", state.grad_nu, v),
    )


def rates_following_boundary(state, u):
    """Rates following a moving boundary with velocity u (pointwise, same form as the tip rule)."""
    u = np.asarray(u, dtype=float)
    return (
        state.xdot + np.einsum("...ij,...j->...i", state.F, u),
        state.nudot + np.einsum("...aj,...j->...a", state.grad_nu, u),
    )


def normal_speed(u, n):
    return np.einsum("...i,...i->...", np.asarray(u, dtype=float), np.asarray(n, dtype=float))


def curl_residual(fs, X, h=1e-4):
    """max |d_B F_iA - d_A F_iB| (compatibility of F).

    Analytic providers differentiate symbolically; gridded ones use
    central differences of F with step h.
    """
    X = np.asarray(X, dtype=float)
    if isinstance(fs.provider, AnalyticProvider):
        F = fs.provider.F_expr
        D = [sp.diff(F[i, A], COORDS[B]) - sp.diff(F[i, B], COORDS[A])
             for i in range(3) for A in range(3) for B in range(3)]
        return float(np.max(np.abs(_compile(D)(X))))
    dF = []
    for e in np.eye(3):
        Fp = _raw(fs, X + h * e)["F"]
        Fm = _raw(fs, X - h * e)["F"]
        dF.append((Fp - Fm) / (2 * h))
    D = np.stack(dF, axis=-1)  # [..., i, A, B] = d_B F_iA
    return float(np.max(np.abs(D - np.swapaxes(D, -1, -2))))


__all__ = [
    "X1", "X2", "X3", "MaterialState", "make_state", "AnalyticProvider", "GridProvider", "FieldSet",
    "evaluate", "jump", "one_sided", "rates_following_tip", "rates_following_boundary", "normal_speed",
    "save_grid", "load_grid", "sample_to_grid", "curl_residual", "grid_columns", "SpaceKind",
]
