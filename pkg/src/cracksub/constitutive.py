"""Free energies psi(X, F, nu, grad nu), their partial derivatives,
kinetic densities and the viscous self-force.

Constitutive relations: T = d psi/dF, z = d psi/d nu, S = d psi/d grad nu.
Partials are hand-coded per model; :func:`fd_check` checks them against
central differences of psi.
"""
from dataclasses import dataclass

import numpy as np

from .errors import InvalidModel, InvalidState, UnsupportedModel
from .fields import make_state
from .manifolds import OrderParameterSpace, SpaceKind, project, tangent_basis

FD_TOL = 1e-6


def _dot(a, b):
    return np.einsum("...i,...i->...", a, b)


def _ddot(A, B):
    return np.einsum("...ij,...ij->...", A, B)


def _inv_T(F):
    return np.swapaxes(np.linalg.inv(F), -1, -2)


# -- elastic parts ---------------------------------------------------------------


@dataclass(frozen=True)
class LinearElastic:
    """Small-strain isotropic energy mu eps:eps + lam/2 (tr eps)^2, eps = sym(F - I)."""

    mu: float
    lam: float = 0.0

    def psi(self, F):
        eps = 0.5 * (F + np.swapaxes(F, -1, -2)) - np.eye(3)
        tr = np.trace(eps, axis1=-2, axis2=-1)
        return self.mu * _ddot(eps, eps) + 0.5 * self.lam * tr**2

    def d_F(self, F):
        eps = 0.5 * (F + np.swapaxes(F, -1, -2)) - np.eye(3)
        tr = np.trace(eps, axis1=-2, axis2=-1)
        return 2 * self.mu * eps + self.lam * tr[..., None, None] * np.eye(3)


@dataclass(frozen=True)
class NeoHookean:
    """Compressible neo-Hookean: mu/2 (tr C - 3) - mu ln J + lam/2 (ln J)^2."""

    mu: float
    lam: float

    def psi(self, F):
        J = np.linalg.det(F)
        if np.any(J <= 0):
            raise InvalidState("det F <= 0")
        lnJ = np.log(J)
        return 0.5 * self.mu * (_ddot(F, F) - 3.0) - self.mu * lnJ + 0.5 * self.lam * lnJ**2

    def d_F(self, F):
        lnJ = np.log(np.linalg.det(F))
        return self.mu * F + (self.lam * lnJ - self.mu)[..., None, None] * _inv_T(F)


# -- order-parameter parts ---------------------------------------------------------


@dataclass(frozen=True)
class DoubleWell:
    """b/4 (|nu|^2 - nu0^2)^2: two wells for a scalar, a sphere of minima for vectors."""

    b: float
    nu0: float = 1.0

    def psi(self, nu):
        return 0.25 * self.b * (_dot(nu, nu) - self.nu0**2) ** 2

    def d_nu(self, nu):
        return self.b * (_dot(nu, nu) - self.nu0**2)[..., None] * nu


@dataclass(frozen=True)
class LinearProfile:
    """Exchange coefficient a(X) = a0 + g.X (homogeneous when g = 0)."""

    a0: float
    gradient: tuple = (0.0, 0.0, 0.0)

    @property
    def homogeneous(self):
        return not np.any(np.asarray(self.gradient))

    def __call__(self, X):
        g = np.asarray(self.gradient, dtype=float)
        a = self.a0 + np.einsum("...i,i->...", X, g)
        if np.any(a <= 0):
            raise InvalidState("exchange coefficient a(X) must stay positive")
        return a, np.broadcast_to(g, np.shape(X))


# -- models ------------------------------------------------------------------------


class EnergyModel:
    """Base class. Subclasses implement psi and whichever partials they support."""

    name = "model"
    space = OrderParameterSpace.scalar()
    micro_inertia = 0.0
    rho = 1.0

    @property
    def homogeneous(self):
        return True

    def psi(self, X, F, nu, G):
        raise UnsupportedModel(f"{self.name}: psi not provided")

    def d_F(self, X, F, nu, G):
        raise UnsupportedModel(f"{self.name}: dpsi/dF not provided")

    def d_nu(self, X, F, nu, G):
        raise UnsupportedModel(f"{self.name}: dpsi/dnu not provided")

    def d_G(self, X, F, nu, G):
        raise UnsupportedModel(f"{self.name}: dpsi/dgrad_nu not provided")

    def d_X(self, X, F, nu, G):
        raise UnsupportedModel(f"{self.name}: dpsi/dX not provided")

    def viscosity(self, X, F, nu, G):
        return np.zeros(np.shape(F)[:-2])

    def kinetic(self, nu, nudot):
        """Quadratic substructural kinetics k = chi = m/2 |nudot|^2."""
        k = 0.5 * self.micro_inertia * _dot(nudot, nudot)
        return k, k, self.micro_inertia * np.asarray(nudot, dtype=float)


class GLModel(EnergyModel):
    """psi = psi_1(F) + psi_2(nu) + c |F^T nu|^2 + eta (nu.d)^2 + a(X)/2 |grad nu|^2.

    The coupling term c is frame indifferent; the fixed-axis term eta is not
    (it exists to probe the rotational balance).
    """

    def __init__(self, space, elastic=None, well=None, a=0.0, coupling=0.0, fixed_axis=None,
                 micro_inertia=0.0, viscosity=0.0, rho=1.0, name="gl"):
        self.space = space
        self.elastic = elastic
        self.well = well
        self.a = a
        self.coupling = float(coupling)
        self.fixed_axis = fixed_axis  # (eta, direction)
        self.micro_inertia = float(micro_inertia)
        self._viscosity = viscosity
        self.rho = float(rho)
        self.name = name
        if (self.coupling or fixed_axis) and space.ambient_dim != 3:
            raise InvalidModel("coupling and fixed-axis terms need a vector order parameter")
        if not callable(viscosity) and viscosity < 0:
            raise InvalidModel("viscosity must be non-negative")

    @property
    def homogeneous(self):
        return not isinstance(self.a, LinearProfile) or self.a.homogeneous

    def _a(self, X):
        if isinstance(self.a, LinearProfile):
            return self.a(X)
        return np.full(np.shape(X)[:-1], float(self.a)), np.zeros(np.shape(X))

    def psi(self, X, F, nu, G):
        a, _ = self._a(X)
        out = 0.5 * a * _ddot(G, G)
        if self.elastic is not None:
            out = out + self.elastic.psi(F)
        if self.well is not None:
            out = out + self.well.psi(nu)
        if self.coupling:
            FTn = np.einsum("...iA,...i->...A", F, nu)
            out = out + self.coupling * _dot(FTn, FTn)
        if self.fixed_axis:
            eta, d = self.fixed_axis
            out = out + eta * _dot(nu, np.asarray(d, dtype=float)) ** 2
        return out

    def d_F(self, X, F, nu, G):
        T = np.zeros(np.shape(F)) if self.elastic is None else self.elastic.d_F(F)
        if self.coupling:
            FTn = np.einsum("...iA,...i->...A", F, nu)
            T = T + 2 * self.coupling * np.einsum("...i,...A->...iA", nu, FTn)
        return T

    def d_nu(self, X, F, nu, G):
        z = np.zeros(np.shape(nu)) if self.well is None else self.well.d_nu(nu)
        if self.coupling:
            z = z + 2 * self.coupling * np.einsum("...iA,...jA,...j->...i", F, F, nu)
        if self.fixed_axis:
            eta, d = self.fixed_axis
            d = np.asarray(d, dtype=float)
            z = z + 2 * eta * _dot(nu, d)[..., None] * d
        return z

    def d_G(self, X, F, nu, G):
        a, _ = self._a(X)
        return a[..., None, None] * G

    def d_X(self, X, F, nu, G):
        _, ga = self._a(X)
        return 0.5 * _ddot(G, G)[..., None] * ga

    def viscosity(self, X, F, nu, G):
        if callable(self._viscosity):
            return np.asarray(self._viscosity(X, F, nu, G), dtype=float)
        return np.full(np.shape(F)[:-2], float(self._viscosity))


def _checked(model, verify):
    if verify:
        verify_model(model)
    return model


def antiplane_elastic(mu=1.0, lam=0.0, rho=1.0, verify=True):
    """Linear elastic body with the substructure switched off (scalar nu, no energy)."""
    model = GLModel(OrderParameterSpace.scalar(), elastic=LinearElastic(mu, lam), rho=rho, name="antiplane_elastic")
    return _checked(model, verify)


def gl_vector_model(mu=1.0, lam=1.5, b=1.0, a=0.5, coupling=0.2, rho=1.0, micro_inertia=0.0, viscosity=0.0,
                    verify=True):
    """Neo-Hookean matrix with a Ginzburg-Landau vector order parameter (frame indifferent)."""
    model = GLModel(
        OrderParameterSpace.vector(), elastic=NeoHookean(mu, lam), well=DoubleWell(b), a=a,
        coupling=coupling, rho=rho, micro_inertia=micro_inertia, viscosity=viscosity, name="gl_vector",
    )
    return _checked(model, verify)


def gl_scalar_model(mu=1.0, lam=0.0, b=1.0, a=1.0, rho=1.0, verify=True):
    """Linear elastic matrix with a scalar Ginzburg-Landau order parameter."""
    model = GLModel(OrderParameterSpace.scalar(), elastic=LinearElastic(mu, lam), well=DoubleWell(b), a=a,
                    rho=rho, name="gl_scalar")
    return _checked(model, verify)


# -- evaluation --------------------------------------------------------------------


def energy_eval(model, state):
    return model.psi(state.X, state.F, state.nu, state.grad_nu)


def stresses(model, state):
    """(T, z, S) = (dpsi/dF, dpsi/dnu, dpsi/dgrad nu)."""
    args = (state.X, state.F, state.nu, state.grad_nu)
    return model.d_F(*args), model.d_nu(*args), model.d_G(*args)


@dataclass
class FDReport:
    T: float
    z: float
    S: float
    X: float

    @property
    def max(self):
        return max(self.T, self.z, self.S, self.X)

    def as_dict(self):
        return {"T": self.T, "z": self.z, "S": self.S, "X": self.X, "max": self.max}


def _rel(a, b, floor):
    a, b = np.asarray(a), np.asarray(b)
    den = max(np.max(np.abs(a), initial=0.0), np.max(np.abs(b), initial=0.0), floor)
    return float(np.max(np.abs(a - b), initial=0.0) / den) if den > 0 else 0.0


def fd_check(model, state, h_fd=1e-5):
    """Largest relative gap between analytic partials and central differences.

    Each entry is perturbed by h_fd * max(1, |entry|). A constrained order
    parameter is perturbed along its tangent directions and projected back,
    so only the tangential part of z is checked there. Blocks whose
    partials vanish are compared against 1e-3 of the largest partial.
    """
    X, F, nu, G = state.X, state.F, state.nu, state.grad_nu
    space = model.space

    def psi(X_=X, F_=F, nu_=nu, G_=G):
        return float(model.psi(X_, F_, nu_, G_))

    def central(arr, setter):
        out = np.zeros(arr.size)
        flat = arr.ravel()
        for i in range(arr.size):
            h = h_fd * max(1.0, abs(flat[i]))
            p, m = flat.copy(), flat.copy()
            p[i] += h
            m[i] -= h
            out[i] = (setter(p.reshape(arr.shape)) - setter(m.reshape(arr.shape))) / (2 * h)
        return out.reshape(arr.shape)

    T, z, S = stresses(model, state)
    dX = model.d_X(X, F, nu, G)

    fd_T = central(F, lambda v: psi(F_=v))
    fd_S = central(G, lambda v: psi(G_=v))
    fd_X = central(X, lambda v: psi(X_=v))
    basis = tangent_basis(space, nu)
    z_proj = basis @ z
    fd_z = np.zeros(len(basis))
    for k, t in enumerate(basis):
        h = h_fd * max(1.0, float(np.max(np.abs(nu))))
        fd_z[k] = (psi(nu_=project(space, nu + h * t)) - psi(nu_=project(space, nu - h * t))) / (2 * h)

    scale = max(np.max(np.abs(a)) for a in (T, z_proj, S, dX, np.zeros(1)))
    floor = 1e-3 * scale
    return FDReport(
        T=_rel(T, fd_T, floor),
        z=_rel(z_proj, fd_z, floor),
        S=_rel(S, fd_S, floor),
        X=_rel(dX, fd_X, floor),
    )


def viscous_self_force(model, state):
    """z_v = lambda nudot; lambda must be non-negative."""
    lam = np.asarray(model.viscosity(state.X, state.F, state.nu, state.grad_nu), dtype=float)
    if np.any(lam < 0):
        raise InvalidModel("negative viscosity violates the dissipation inequality")
    return lam[..., None] * state.nudot


def kinetic_densities(model, nu, nudot):
    """(k, chi, dchi/dnudot) of the substructural kinetics."""
    return model.kinetic(np.asarray(nu, dtype=float), np.asarray(nudot, dtype=float))


# -- random admissible states --------------------------------------------------------


def random_state(space, rng, strain=0.1, grad=0.3):
    """Random admissible single-point state (used for property sweeps and self-checks)."""
    F = np.eye(3) + strain * rng.standard_normal((3, 3))
    while np.linalg.det(F) <= 0.2:
        F = np.eye(3) + strain * rng.standard_normal((3, 3))
    d = space.ambient_dim
    nu = rng.standard_normal(d)
    if space.kind is SpaceKind.UNIT_VECTOR3:
        nu = nu / np.linalg.norm(nu)
    elif space.kind is SpaceKind.BALL3:
        nu = 0.8 * space.radius * nu / max(np.linalg.norm(nu), 1.0)
    G = grad * rng.standard_normal((d, 3))
    X = 0.3 * rng.standard_normal(3)
    return make_state(F, nu, G, X=X, xdot=rng.standard_normal(3), nudot=rng.standard_normal(d))


def verify_model(model, seed=42, n_states=3, tol=FD_TOL):
    """Cross-check analytic partials on a few random states; raise InvalidModel on failure."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_states):
        worst = max(worst, fd_check(model, random_state(model.space, rng)).max)
    if worst > tol:
        raise InvalidModel(f"{model.name}: analytic partials disagree with finite differences ({worst:.2e})")
    return worst
