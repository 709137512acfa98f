"""Extended Eshelby tensor, configurational bulk forces and residual
checkers for the pointwise and jump balances."""
from dataclasses import dataclass

import numpy as np

from .constitutive import energy_eval, stresses
from .errors import InvalidArgument, StencilViolation, UnsupportedGeometry, UnsupportedOperation
from .fields import evaluate, one_sided
from .manifolds import LEVI_CIVITA, generator_of, star_product


def eshelby(psi, F, T, grad_nu, S):
    """P = psi I - F^T T - grad_nu^T * S."""
    F = np.asarray(F, dtype=float)
    T = np.asarray(T, dtype=float)
    if F.shape[-2:] != (3, 3) or T.shape != F.shape:
        raise InvalidArgument(f"F {F.shape} and T {T.shape} must be matching 3x3 arrays")
    psi = np.asarray(psi, dtype=float)
    return (
        psi[..., None, None] * np.eye(3)
        - np.einsum("...iA,...iB->...AB", F, T)
        - star_product(grad_nu, S)
    )


def eshelby_of(model, state):
    T, _, S = stresses(model, state)
    return eshelby(energy_eval(model, state), state.F, T, state.grad_nu, S)


def config_bulk_forces(model, state, b=None, beta=None):
    """Internal g = -dpsi/dX and external e = -F^T b - grad_nu^T beta."""
    g = -model.d_X(state.X, state.F, state.nu, state.grad_nu)
    batch = state.F.shape[:-2]
    b = np.zeros(batch + (3,)) if b is None else np.asarray(b, dtype=float)
    beta = np.zeros(state.nu.shape) if beta is None else np.asarray(beta, dtype=float)
    e = -np.einsum("...iA,...i->...A", state.F, b) - np.einsum("...aA,...a->...A", state.grad_nu, beta)
    return g, e


@dataclass
class BulkResiduals:
    linear_momentum: np.ndarray  # b + Div T
    micro: np.ndarray  # Div S - z + beta
    configurational: np.ndarray  # Div P + g + e

    @property
    def norms(self):
        return tuple(float(np.max(np.linalg.norm(np.atleast_2d(r), axis=-1)))
                     for r in (self.linear_momentum, self.micro, self.configurational))


def _distance_to_crack(crack, X):
    if crack.is_straight:
        d = X - crack.tip_point
        dn, dm = d @ crack.n, d @ crack.m
        return np.where(dn <= 0.0, np.abs(dm), np.hypot(dn, dm))
    f = np.apply_along_axis(crack.level_set, -1, X)
    g = np.linalg.norm(np.apply_along_axis(crack._grad_f, -1, X), axis=-1)
    return np.abs(f) / g


def check_stencil(fs, X, reach):
    if fs.crack is None:
        return
    if np.any(_distance_to_crack(fs.crack, np.asarray(X, dtype=float)) < reach):
        raise StencilViolation(f"finite-difference stencil of reach {reach:g} touches the crack")


def divergence(fn, X, h):
    """Central-difference divergence over the last axis of fn(X) (shape (..., k, 3))."""
    X = np.asarray(X, dtype=float)
    out = 0.0
    for A, e in enumerate(np.eye(3)):
        out = out + (fn(X + h * e)[..., A] - fn(X - h * e)[..., A]) / (2 * h)
    return out


def bulk_residuals(fs, model, X, h, body_force=None, micro_force=None):
    """Residuals of b + Div T = 0, Div S - z + beta = 0 and Div P + g + e = 0.

    Divergences are central differences (step h) of the constitutively
    evaluated stress fields. ``body_force``/``micro_force`` are callables of X.
    """
    X = np.asarray(X, dtype=float)
    check_stencil(fs, X, 3 * h)

    def T_of(Y):
        return stresses(model, evaluate(fs, Y))[0]

    def S_of(Y):
        return stresses(model, evaluate(fs, Y))[2]

    def P_of(Y):
        return eshelby_of(model, evaluate(fs, Y))

    state = evaluate(fs, X)
    _, z, _ = stresses(model, state)
    b = np.zeros(X.shape) if body_force is None else np.asarray(body_force(X), dtype=float)
    beta = np.zeros(state.nu.shape) if micro_force is None else np.asarray(micro_force(X), dtype=float)
    g, e = config_bulk_forces(model, state, b, beta)
    return BulkResiduals(
        linear_momentum=b + divergence(T_of, X, h),
        micro=divergence(S_of, X, h) - z + beta,
        configurational=divergence(P_of, X, h) + g + e,
    )


def rotational_residual(model, state):
    """A^T z - e(T F^T) + (grad A^T) S, which vanishes for frame-indifferent energies."""
    space = model.space
    if not space.rotates:
        raise UnsupportedOperation("scalar order parameters have a vanishing generator")
    T, z, S = stresses(model, state)
    A = generator_of(space, state.nu)
    TFt = np.einsum("...iA,...jA->...ij", T, state.F)
    r = np.einsum("...ak,...a->...k", A, z) - np.einsum("kij,...ij->...k", LEVI_CIVITA, TFt)
    for col in range(3):
        dA = generator_of(space, state.grad_nu[..., col])
        r = r + np.einsum("...ak,...a->...k", dA, S[..., col])
    return r


def stress_asymmetry_check(state, model):
    """Norm of the rotational-balance residual at a state."""
    return float(np.max(np.linalg.norm(np.atleast_2d(rotational_residual(model, state)), axis=-1)))


@dataclass
class SideJumps:
    traction_jump: np.ndarray  # [T] m
    micro_jump: np.ndarray  # A^T [S] m
    micro_remainder: np.ndarray  # z'_C = [S] m
    dissipation: float  # [T m . xdot] + [S m . nudot]
    dissipation_ok: bool


def side_jump_residuals(fs, model, X, tol=1e-10):
    """Jump balances and side dissipation at a point of the crack away from the tip."""
    X = np.asarray(X, dtype=float)
    m = fs.crack.normal_at(X)

    def parts(st):
        T, _, S = stresses(model, st)
        Tm = T @ m
        Sm = S @ m
        power = Tm @ st.xdot + Sm @ st.nudot
        return np.concatenate([Tm, Sm, [power]])

    plus = one_sided(fs, X, +1, parts)
    minus = one_sided(fs, X, -1, parts)
    jmp = plus - minus
    d = fs.space.ambient_dim
    nu_mean = 0.5 * (one_sided(fs, X, +1, lambda s: s.nu) + one_sided(fs, X, -1, lambda s: s.nu))
    A = generator_of(fs.space, nu_mean)
    Sm_jump = jmp[3:3 + d]
    diss = float(jmp[-1])
    return SideJumps(jmp[:3], A.T @ Sm_jump, Sm_jump, diss, diss <= tol)


def side_config_residual(fs, model, X, sigma_bar, g_C=None, curvature=None, h=1e-4):
    """Residual of [P]m + g_C + grad_C sigma + sigma (K I - L) m along the crack.

    ``sigma_bar`` is a constant or a callable of X. When ``g_C`` is not
    given it is reported as the remainder that closes the balance.
    ``curvature`` = (L, K) is required for curved cracks.
    """
    X = np.asarray(X, dtype=float)
    crack = fs.crack
    m = crack.normal_at(X)
    if crack.is_straight:
        L, K = np.zeros((3, 3)), 0.0
    elif curvature is None:
        raise UnsupportedGeometry("curved crack surface needs curvature data (L, K)")
    else:
        L, K = np.asarray(curvature[0], dtype=float), float(curvature[1])

    sig = sigma_bar if callable(sigma_bar) else (lambda Y, c=float(sigma_bar): c)
    tangents = np.linalg.svd(np.eye(3) - np.outer(m, m))[0][:, :2].T
    grad_sig = sum((sig(X + h * e) - sig(X - h * e)) / (2 * h) * e for e in tangents)

    def Pm(st):
        return eshelby_of(model, st) @ m

    P_jump_m = one_sided(fs, X, +1, Pm) - one_sided(fs, X, -1, Pm)
    known = P_jump_m + grad_sig + sig(X) * ((K * np.eye(3) - L) @ m)
    if g_C is None:
        g_C = -known
    residual = known + np.asarray(g_C, dtype=float)
    return {
        "residual": float(np.linalg.norm(residual)),
        "g_C": np.asarray(g_C, dtype=float),
        "P_jump_m": P_jump_m,
        "surface_gradient": grad_sig,
    }


def residual_sweep(fs, model, points, h, body_force=None, micro_force=None):
    """Rows (X1, X2, X3, |b + Div T|, |Div S - z + beta|, |Div P + g + e|) per point."""
    rows = []
    for X in np.atleast_2d(points):
        r = bulk_residuals(fs, model, X, h, body_force, micro_force)
        rows.append([*X, *r.norms])
    return np.array(rows)
