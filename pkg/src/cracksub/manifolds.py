"""Order-parameter spaces, their rotation generators and the star pairing.

Order parameters live in ambient coordinates: a scalar is stored as a
length-1 vector, a second-order tensor as its 9 row-major components.
All functions accept arrays with arbitrary leading batch dimensions.
"""
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DegenerateInput, InvalidArgument

VALUE_TOL = 1e-12

LEVI_CIVITA = np.zeros((3, 3, 3))
for _i, _j, _k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    LEVI_CIVITA[_i, _j, _k] = 1.0
    LEVI_CIVITA[_i, _k, _j] = -1.0


class SpaceKind(str, Enum):
    SCALAR = "scalar"
    VECTOR3 = "vector3"
    UNIT_VECTOR3 = "unit_vector3"
    BALL3 = "ball3"
    TENSOR2 = "tensor2"


_DIMS = {
    SpaceKind.SCALAR: 1,
    SpaceKind.VECTOR3: 3,
    SpaceKind.UNIT_VECTOR3: 3,
    SpaceKind.BALL3: 3,
    SpaceKind.TENSOR2: 9,
}


@dataclass(frozen=True)
class OrderParameterSpace:
    kind: SpaceKind
    radius: float = None  # Ball3 only: saturation magnitude p_m

    def __post_init__(self):
        object.__setattr__(self, "kind", SpaceKind(self.kind))
        if self.kind is SpaceKind.BALL3:
            if self.radius is None or not self.radius > 0:
                raise InvalidArgument("Ball3 space needs a radius p_m > 0")
        elif self.radius is not None:
            raise InvalidArgument(f"radius is only meaningful for Ball3, not {self.kind.value}")

    @property
    def ambient_dim(self):
        return _DIMS[self.kind]

    @property
    def constrained(self):
        return self.kind in (SpaceKind.UNIT_VECTOR3, SpaceKind.BALL3)

    @property
    def rotates(self):
        """False for the scalar case, where the generator vanishes identically."""
        return self.kind is not SpaceKind.SCALAR

    @classmethod
    def scalar(cls):
        return cls(SpaceKind.SCALAR)

    @classmethod
    def vector(cls):
        return cls(SpaceKind.VECTOR3)

    @classmethod
    def unit_vector(cls):
        return cls(SpaceKind.UNIT_VECTOR3)

    @classmethod
    def ball(cls, radius):
        return cls(SpaceKind.BALL3, radius)

    @classmethod
    def tensor(cls):
        return cls(SpaceKind.TENSOR2)


def check_value(space, nu, tol=VALUE_TOL):
    """Validate shape and manifold constraint of ``nu``; return it as an array."""
    nu = np.asarray(nu, dtype=float)
    if nu.ndim == 0:
        nu = nu.reshape(1)
    if nu.shape[-1] != space.ambient_dim:
        raise InvalidArgument(
            f"order parameter has {nu.shape[-1]} components, {space.kind.value} needs {space.ambient_dim}"
        )
    if not np.all(np.isfinite(nu)):
        raise InvalidArgument("order parameter has non-finite entries")
    if space.kind is SpaceKind.UNIT_VECTOR3:
        if np.any(np.abs(np.linalg.norm(nu, axis=-1) - 1.0) > tol):
            raise InvalidArgument("unit-vector order parameter is off the sphere")
    elif space.kind is SpaceKind.BALL3:
        if np.any(np.linalg.norm(nu, axis=-1) > space.radius + tol):
            raise InvalidArgument(f"order parameter exceeds ball radius {space.radius}")
    return nu


def cross_matrix(v):
    """(v x)_ij = e_ijk v_k, so that cross_matrix(v) @ q == q x v."""
    return np.einsum("ijk,...k->...ij", LEVI_CIVITA, np.asarray(v, dtype=float))


def skew(q):
    """Spin tensor W with W a == q x a."""
    return -cross_matrix(q)


def _tensor_generator(nu):
    N = nu.reshape(nu.shape[:-1] + (3, 3))
    cols = []
    for j in range(3):
        W = skew(np.eye(3)[j])
        C = np.einsum("ab,...bc->...ac", W, N) - np.einsum("...ab,bc->...ac", N, W)
        cols.append(C.reshape(nu.shape[:-1] + (9,)))
    return np.stack(cols, axis=-1)


def generator_of(space, nu):
    """Generator without constraint validation (it is linear in ``nu``)."""
    nu = np.asarray(nu, dtype=float)
    if space.kind is SpaceKind.SCALAR:
        return np.zeros(nu.shape[:-1] + (1, 3))
    if space.kind is SpaceKind.TENSOR2:
        return _tensor_generator(nu)
    return cross_matrix(nu)


def so3_generator(space, nu):
    """Matrix of the infinitesimal rotation action on the order parameter.

    Returns an array of shape (..., ambient_dim, 3) mapping a rotation rate
    q to the induced order-parameter rate. Vector kinds give (nu x), the
    tensor kind gives the generator of nu -> R nu R^T, the scalar kind zero.
    """
    nu = check_value(space, nu)
    return generator_of(space, nu)


def star_product(grad_nu, S, space=None):
    """Pairing of the order-parameter gradient with a microstress.

    The result M (3x3) satisfies (M n).u == (S n).(grad_nu u) for all n, u,
    i.e. M = grad_nu^T S in ambient coordinates.
    """
    G = np.asarray(grad_nu, dtype=float)
    S = np.asarray(S, dtype=float)
    if G.shape != S.shape or G.shape[-1] != 3:
        raise InvalidArgument(f"shape mismatch: grad_nu {G.shape} vs microstress {S.shape}")
    if space is not None and G.shape[-2] != space.ambient_dim:
        raise InvalidArgument(f"{space.kind.value} needs {space.ambient_dim} rows, got {G.shape[-2]}")
    return np.einsum("...ak,...aj->...kj", G, S)


def project(space, ambient):
    """Nearest admissible order parameter to an ambient vector."""
    v = np.asarray(ambient, dtype=float)
    if v.ndim == 0:
        v = v.reshape(1)
    if v.shape[-1] != space.ambient_dim:
        raise InvalidArgument(f"expected {space.ambient_dim} components, got {v.shape[-1]}")
    if space.kind is SpaceKind.UNIT_VECTOR3:
        norm = np.linalg.norm(v, axis=-1, keepdims=True)
        if np.any(norm == 0.0):
            raise DegenerateInput("cannot project the zero vector onto the unit sphere")
        return v / norm
    if space.kind is SpaceKind.BALL3:
        norm = np.linalg.norm(v, axis=-1, keepdims=True)
        scale = np.where(norm > space.radius, space.radius / np.where(norm > 0, norm, 1.0), 1.0)
        return v * scale
    return v.copy()


def tangent_basis(space, nu):
    """Orthonormal directions along which ``nu`` may be perturbed.

    For the sphere (and the ball surface) these span the tangent plane; for
    unconstrained kinds they are the ambient unit vectors.
    """
    nu = np.asarray(nu, dtype=float)
    d = space.ambient_dim
    on_sphere = space.kind is SpaceKind.UNIT_VECTOR3 or (
        space.kind is SpaceKind.BALL3 and np.linalg.norm(nu) >= space.radius * (1 - 1e-9)
    )
    if not on_sphere:
        return np.eye(d)
    u = nu / np.linalg.norm(nu)
    # complete u to an orthonormal frame
    q, _ = np.linalg.qr(np.column_stack([u, np.eye(3)]))
    return q[:, 1:3].T
