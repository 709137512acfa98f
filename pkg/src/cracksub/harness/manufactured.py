"""Symbolic body and micro forces that make given fields exact equilibria.

Energies are written here as sympy expressions of generic F, nu, grad nu
symbols, independently of the hand-coded partials in the constitutive
module, so the two act as mutual checks.
"""
import numpy as np
import sympy as sp

from ..fields import COORDS


def _symbols(dim):
    F = sp.Matrix(3, 3, lambda i, A: sp.Symbol(f"F{i}{A}", real=True))
    nu = sp.Matrix(dim, 1, lambda a, _: sp.Symbol(f"n{a}", real=True))
    G = sp.Matrix(dim, 3, lambda a, A: sp.Symbol(f"G{a}{A}", real=True))
    return F, nu, G


def _lambdify_vec(exprs):
    fn = sp.lambdify(COORDS, list(exprs), modules="numpy")

    def evaluate(X):
        X = np.asarray(X, dtype=float)
        out = fn(X[..., 0], X[..., 1], X[..., 2])
        return np.stack([np.broadcast_to(np.asarray(o, dtype=float), X.shape[:-1]) for o in out], axis=-1)

    return evaluate


def _div(M):
    return [sum(sp.diff(M[i, A], COORDS[A]) for A in range(3)) for i in range(M.rows)]


def stress_fields(psi, provider):
    """Symbolic T, z, S along the provider's fields for psi(F, nu, G, X)."""
    dim = provider.dim
    F, nu, G = _symbols(dim)
    e = psi(F, nu, G, COORDS)
    T = sp.Matrix(3, 3, lambda i, A: sp.diff(e, F[i, A]))
    z = sp.Matrix(dim, 1, lambda a, _: sp.diff(e, nu[a]))
    S = sp.Matrix(dim, 3, lambda a, A: sp.diff(e, G[a, A]))
    Ff = provider.F_expr
    Gf = sp.Matrix(provider.nu_expr).jacobian(COORDS)
    subs = {F[i, A]: Ff[i, A] for i in range(3) for A in range(3)}
    subs.update({nu[a]: provider.nu_expr[a] for a in range(dim)})
    subs.update({G[a, A]: Gf[a, A] for a in range(dim) for A in range(3)})
    return T.xreplace(subs), z.xreplace(subs), S.xreplace(subs)


def equilibrium_sources(psi, provider):
    """Callables b(X) = -Div T and beta(X) = z - Div S."""
    T, z, S = stress_fields(psi, provider)
    b = [-d for d in _div(T)]
    beta = [z[a] - d for a, d in enumerate(_div(S))]
    return _lambdify_vec(b), _lambdify_vec(beta)


def strain_gradient_source(psi, provider):
    """Callable b(X) = -Div(T - Div S) for psi(F, grad F), nu bound to F."""
    T, _, S = stress_fields(psi, provider)
    # S rows are F_iC (row-major), columns the gradient index B
    divS = sp.Matrix(3, 3, lambda i, C: sum(sp.diff(S[3 * i + C, B], COORDS[B]) for B in range(3)))
    return _lambdify_vec([-d for d in _div(T - divS)])


# -- symbolic energies mirroring the catalog models --------------------------------------


def sym_linear_elastic(mu, lam):
    def psi(F):
        eps = (F + F.T) / 2 - sp.eye(3)
        return mu * sum(eps[i, j] ** 2 for i in range(3) for j in range(3)) + sp.Rational(1, 2) * lam * eps.trace() ** 2
    return psi


def sym_gl(elastic, b=0.0, nu0=1.0, a=0.0, coupling=0.0):
    """psi_1(F) + b/4 (|nu|^2 - nu0^2)^2 + c |F^T nu|^2 + a/2 |G|^2."""

    def psi(F, nu, G, X):
        out = elastic(F) + sp.Rational(1, 2) * a * sum(g**2 for g in G)
        nn = sum(v**2 for v in nu)
        out += sp.Rational(1, 4) * b * (nn - nu0**2) ** 2
        if coupling:
            FTn = F.T * nu
            out += coupling * sum(v**2 for v in FTn)
        return out

    return psi
