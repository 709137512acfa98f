"""Ferroelectric and strain-gradient specializations.

Ferroelectrics: the order parameter is the specific polarization p (a
vector in the ball of radius p_m); an external electric field E(x) adds
purely electric bulk and surface actions.

Strain-gradient materials: the order parameter is bound to F itself
(``AnalyticProvider(..., nu_is_F=True)``), so grad nu = grad F and the
microstress is the hyperstress dpsi/dgradF.
"""
from dataclasses import dataclass

import numpy as np

from .configurational import bulk_residuals, check_stencil, divergence
from .constitutive import DoubleWell, EnergyModel, GLModel, LinearElastic, NeoHookean
from .errors import InvalidArgument, UnsupportedOperation
from .fields import evaluate
from .manifolds import OrderParameterSpace
from .tip_integrals import j_qs, sample_contour


# -- electric fields ------------------------------------------------------------------


@dataclass(frozen=True)
class LinearField:
    """E(x) = E0 + grad_E x (uniform when grad_E = 0)."""

    E0: tuple = (0.0, 0.0, 0.0)
    grad: tuple = ((0.0, 0.0, 0.0),) * 3

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        g = np.asarray(self.grad, dtype=float)
        E = np.asarray(self.E0, dtype=float) + np.einsum("ij,...j->...i", g, x)
        return E, np.broadcast_to(g, x.shape[:-1] + (3, 3))


def uniform_field(E):
    return LinearField(tuple(float(c) for c in E))


class FerroelectricModel(GLModel):
    """psi = psi_1(F) + b/4 (|p|^2 - p0^2)^2 + c |F^T p|^2 + a/2 |grad p|^2 on Ball3(p_m).

    ``field`` maps current positions x to (E, grad E).
    """

    def __init__(self, p_m=1.0, elastic=None, b=1.0, p0=0.8, coupling=0.1, a=0.5,
                 field=None, rho=1.0, micro_inertia=0.0, name="ferroelectric"):
        if p0 > p_m:
            raise InvalidArgument("spontaneous polarization p0 must not exceed p_m")
        super().__init__(
            OrderParameterSpace.ball(p_m),
            elastic=NeoHookean(1.0, 1.5) if elastic is None else elastic,
            well=DoubleWell(b, p0), a=a, coupling=coupling,
            micro_inertia=micro_inertia, rho=rho, name=name,
        )
        self.p_m = float(p_m)
        self.field = LinearField() if field is None else field


@dataclass
class ElectricTerms:
    b_el: np.ndarray
    beta_el: np.ndarray
    t_el: np.ndarray
    tau_el: np.ndarray


def electric_body_terms(model, state, n=None):
    """b_el = rho (grad E) p, beta_el = rho E, t_el = 1/2 det F p_n^2 F^-T n, tau_el = 0.

    p_n is the component of p along the current normal F^-T n / |F^-T n|.
    Without ``n`` the surface terms are returned as zeros.
    """
    E, gE = model.field(state.x)
    p = state.nu
    rho = state.rho
    b_el = rho * np.einsum("...ij,...j->...i", gE, p)
    beta_el = rho * E
    if n is None:
        t_el = np.zeros(np.shape(b_el))
    else:
        n = np.asarray(n, dtype=float)
        FinvT_n = np.einsum("...Ai,...A->...i", np.linalg.inv(state.F), n)
        nc = FinvT_n / np.linalg.norm(FinvT_n, axis=-1, keepdims=True)
        pn = np.einsum("...i,...i->...", p, nc)
        t_el = 0.5 * (np.linalg.det(state.F) * pn**2)[..., None] * FinvT_n
    return ElectricTerms(b_el, beta_el, t_el, np.zeros(np.shape(p)))


def ferroelectric_balances(model, fs, X, h, b_em=None, beta_em=None):
    """Residual vectors of b_em + Div T + rho (grad E) p = 0 and
    beta_em - z + Div S + rho E = 0 (callables b_em(X), beta_em(X))."""

    def total_b(Y):
        el = electric_body_terms(model, evaluate(fs, Y)).b_el
        return el if b_em is None else el + np.asarray(b_em(Y), dtype=float)

    def total_beta(Y):
        el = electric_body_terms(model, evaluate(fs, Y)).beta_el
        return el if beta_em is None else el + np.asarray(beta_em(Y), dtype=float)

    r = bulk_residuals(fs, model, X, h, total_b, total_beta)
    return r.linear_momentum, r.micro


def ferroelectric_j_qs(fs, model, contour):
    return j_qs(fs, model, contour)


def electric_energy(model, fs, points, weights):
    """D = -1/2 int rho E . p over a quadrature of the part."""
    st = evaluate(fs, points)
    E, _ = model.field(st.x)
    return float(-0.5 * np.sum(weights * st.rho * np.einsum("ni,ni->n", E, st.nu)))


def electric_energy_rate(model, fs, points, weights, boundary):
    """Rate of D assembled from the pulled-back Tiersten formula:
    -int rho (grad E) p . xdot - int_boundary t_el . xdot - int rho E . pdot."""
    st = evaluate(fs, points)
    terms = electric_body_terms(model, st)
    bulk = -np.sum(weights * (np.einsum("ni,ni->n", terms.b_el, st.xdot)
                              + np.einsum("ni,ni->n", terms.beta_el, st.nudot)))
    sb = evaluate(fs, boundary.points)
    tb = electric_body_terms(model, sb, boundary.normals)
    surf = -boundary.integrate(np.einsum("ni,ni->n", tb.t_el, sb.xdot))
    return float(bulk + surf)


def disc_quadrature(center, radius, n_r=24, n_theta=64, t=(0.0, 0.0, 1.0), n=(1.0, 0.0, 0.0), m=(0.0, 1.0, 0.0)):
    """Gauss-Legendre in r times periodic trapezoid in theta over a disc (per unit length)."""
    xg, wg = np.polynomial.legendre.leggauss(n_r)
    r = 0.5 * radius * (xg + 1.0)
    wr = 0.5 * radius * wg * r
    th = (np.arange(n_theta) + 0.5) * 2 * np.pi / n_theta
    dirs = np.cos(th)[:, None] * np.asarray(n, dtype=float) + np.sin(th)[:, None] * np.asarray(m, dtype=float)
    pts = np.asarray(center, dtype=float) + r[:, None, None] * dirs[None]
    w = wr[:, None] * np.full(n_theta, 2 * np.pi / n_theta)[None]
    return pts.reshape(-1, 3), w.ravel()


# -- strain gradient ----------------------------------------------------------------------


class StrainGradientModel(EnergyModel):
    """psi(F, grad F) = psi_1(F) + l^2 mu / 2 |grad F|^2 with nu bound to F."""

    def __init__(self, elastic=None, length=0.1, mu=1.0, rho=1.0, name="strain_gradient"):
        self.space = OrderParameterSpace.tensor()
        self.elastic = LinearElastic(1.0, 0.5) if elastic is None else elastic
        self.length = float(length)
        self.mu = float(mu)
        self.rho = float(rho)
        self.name = name

    @property
    def stiffness(self):
        return self.length**2 * self.mu

    def psi(self, X, F, nu, G):
        return self.elastic.psi(F) + 0.5 * self.stiffness * np.einsum("...ij,...ij->...", G, G)

    def d_F(self, X, F, nu, G):
        return self.elastic.d_F(F)

    def d_nu(self, X, F, nu, G):
        return np.zeros(np.shape(nu))

    def d_G(self, X, F, nu, G):
        return self.stiffness * np.asarray(G, dtype=float)

    def d_X(self, X, F, nu, G):
        return np.zeros(np.shape(X))


def _hyperstress(model, st):
    S = model.d_G(st.X, st.F, st.nu, st.grad_nu)
    return S.reshape(S.shape[:-2] + (3, 3, 3))  # [i, C, B]: d psi / d F_iC,B


def strain_gradient_balance(model, fs, X, h, body_force=None):
    """Residual of Div(T - Div S) + b by nested central differences (step h)."""
    if getattr(fs.provider, "smooth_order", 0) < 3:
        raise UnsupportedOperation("nested differences need a provider with three continuous derivatives")
    X = np.asarray(X, dtype=float)
    check_stencil(fs, X, 3 * h)

    def div_S(Y):
        return divergence(lambda Z: _hyperstress(model, evaluate(fs, Z)), Y, h)

    def reduced(Y):
        st = evaluate(fs, Y)
        return model.d_F(st.X, st.F, st.nu, st.grad_nu) - div_S(Y)

    b = np.zeros(X.shape) if body_force is None else np.asarray(body_force(X), dtype=float)
    return divergence(reduced, X, h) + b


def strain_gradient_j_qs(fs, model, contour):
    """n . int (psi I - F^T T - grad F^T : S) n with the third-order contraction written out."""
    s = sample_contour(fs, model, contour)
    st = s.state
    gF = st.grad_nu.reshape(-1, 3, 3, 3)  # [i, C, A] = F_iC,A
    H = _hyperstress(model, st)
    P = (s.psi[:, None, None] * np.eye(3) - np.einsum("niA,niB->nAB", st.F, s.T)
         - np.einsum("niCA,niCB->nAB", gF, H))
    flux = contour.integrate(np.einsum("nAB,nB->nA", P, contour.normals))
    return float(contour.n @ flux)
