"""Tip traction, J-integrals, driving force and kinetics, the tip energy
balance, tip inertia terms and process-zone integrals.

Contour normals: ``Contour.normals`` point away from the tip. The tip
traction j is the flux of the dynamic density (rho (|xdot|^2/2 + k) I - P)
through the circle with the normal pointing towards the tip, i.e. the
traction the surrounding bulk exerts on the tip region; with this choice
n.j reduces to the quasi-static J_qs = n . int P n_out when inertia is
absent. Every other tip integral uses the outward normal.
"""
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .configurational import eshelby
from .constitutive import energy_eval, kinetic_densities, stresses
from .errors import InvalidArgument, InvalidModel, InvalidMotion, UndefinedKinetics
from .fields import evaluate, one_sided
from .geometry import make_contour, richardson, spread
from .manifolds import generator_of

MOTION_TOL = 1e-8


@dataclass(frozen=True)
class TipState:
    t: np.ndarray = field(default_factory=lambda: np.eye(3)[2])
    n: np.ndarray = field(default_factory=lambda: np.eye(3)[0])
    m: np.ndarray = field(default_factory=lambda: np.eye(3)[1])
    curvature_vector: np.ndarray = field(default_factory=lambda: np.zeros(3))
    curvature: float = 0.0
    phi_tip: float = 0.0
    lambda_tip: float = 0.0
    g_tip: float = -1.0
    V: float = 0.0

    def __post_init__(self):
        if self.g_tip > 0:
            raise InvalidModel("tip kinetic coefficient must be non-positive")

    @property
    def zeta(self):
        """Line energy of the tip, identified with the line tension."""
        return self.lambda_tip

    @classmethod
    def from_crack(cls, crack, **kw):
        return cls(crack.t, crack.n, crack.m, crack.curvature_vector, crack.curvature, **kw)


@dataclass
class ContourSample:
    contour: object
    state: object
    psi: np.ndarray
    T: np.ndarray
    z: np.ndarray
    S: np.ndarray
    P: np.ndarray
    kin: np.ndarray  # |xdot|^2/2 + k
    dchi: np.ndarray  # d chi / d nudot

    @property
    def dynamic(self):
        """rho (|xdot|^2/2 + k) I - P at each node."""
        return self.state.rho * self.kin[:, None, None] * np.eye(3) - self.P


def sample_contour(fs, model, contour):
    st = evaluate(fs, contour.points)
    T, z, S = stresses(model, st)
    psi = energy_eval(model, st)
    P = eshelby(psi, st.F, T, st.grad_nu, S)
    k, _, dchi = kinetic_densities(model, st.nu, st.nudot)
    kin = 0.5 * np.einsum("ni,ni->n", st.xdot, st.xdot) + k
    return ContourSample(contour, st, psi, T, z, S, P, kin, dchi)


def _flux(sample, tensor):
    return sample.contour.integrate(np.einsum("nij,nj->ni", tensor, sample.contour.normals))


# -- shrink-sequence bookkeeping -----------------------------------------------------


@dataclass
class TipSeries:
    """Values of a tip integral on a shrink sequence and their extrapolant."""

    name: str
    radii: np.ndarray
    values: np.ndarray
    extrapolant: np.ndarray
    spread: float
    converging: bool
    behaviour: str = ""

    @property
    def flags(self):
        out = [] if self.converging else ["non-convergent"]
        if self.behaviour:
            out.append(self.behaviour)
        return out


def _converging(values):
    v = np.asarray(values, dtype=float).reshape(len(values), -1)
    if len(v) < 3:
        return True
    d = np.linalg.norm(np.diff(v, axis=0), axis=1)
    scale = max(np.max(np.abs(v)), 1e-300)
    return bool(d[-1] <= d[0] * (1 + 1e-9) + 1e-12 * scale)


def limit_behaviour(radii, values, tiny=1e-13):
    """'vanishing', 'finite' or 'divergent' from the log-log slope of |Q(r)|."""
    r = np.asarray(radii, dtype=float)
    q = np.linalg.norm(np.asarray(values, dtype=float).reshape(len(r), -1), axis=1)
    if np.all(q <= tiny):
        return "vanishing"
    if len(r) < 2 or np.any(q <= tiny):
        return "finite"
    slope = np.polyfit(np.log(r), np.log(q), 1)[0]
    if slope > 0.25:
        return "vanishing"
    if slope < -0.25:
        return "divergent"
    return "finite"


def make_series(name, radii, values, order=2, behaviour=False):
    radii = np.asarray(radii, dtype=float)
    values = np.asarray(values, dtype=float)
    return TipSeries(
        name, radii, values, richardson(radii, values, order),
        float(np.max(spread(values))), _converging(values),
        limit_behaviour(radii, values) if behaviour else "",
    )


def _radii(contours):
    return np.array([c.radius for c in contours])


# -- J-integrals -------------------------------------------------------------------


def tip_traction(fs, model, contours, order=2):
    """j = int (rho (|xdot|^2/2 + k) I - P) n, n pointing into the tip disc."""
    vals = []
    for c in contours:
        s = sample_contour(fs, model, c)
        vals.append(-_flux(s, s.dynamic))
    return make_series("j", _radii(contours), vals, order)


def j_integral(j, n):
    return float(np.dot(np.asarray(j, dtype=float), np.asarray(n, dtype=float)))


def j_qs(fs, model, contour):
    """Quasi-static J_qs = n . int P n (outward contour normal)."""
    s = sample_contour(fs, model, contour)
    return float(contour.n @ _flux(s, s.P))


def j_qs_series(fs, model, contours, order=2):
    return make_series("J_qs", _radii(contours), [j_qs(fs, model, c) for c in contours], order)


def classical_j_qs(fs, model, contour):
    """n . int (psi I - F^T T) n, assembled node by node without the Eshelby helper."""
    st = evaluate(fs, contour.points)
    T = model.d_F(st.X, st.F, st.nu, st.grad_nu)
    psi = model.psi(st.X, st.F, st.nu, st.grad_nu)
    n = contour.n
    total = 0.0
    for k in range(len(contour.weights)):
        nk = contour.normals[k]
        total += contour.weights[k] * (psi[k] * (n @ nk) - (T[k] @ nk) @ (st.F[k] @ n))
    return float(total)


@dataclass
class DrivingForce:
    f: float
    admissible: bool  # f >= 0 whenever the tip advances


def driving_force(J, tip):
    f = float(J) - tip.phi_tip - tip.lambda_tip * tip.curvature
    return DrivingForce(f, not (tip.V > 0 and f < 0))


def tip_kinetics(f, g_tip):
    """Normal tip speed V from f = -g_tip V."""
    if g_tip == 0:
        raise UndefinedKinetics("g_tip = 0 leaves the tip speed undetermined")
    if g_tip > 0:
        raise InvalidModel("g_tip > 0 would make crack growth produce energy")
    return float(f) / (-float(g_tip))


# -- energy balance at the tip ---------------------------------------------------------


@dataclass
class EnergyBalance:
    radii: np.ndarray
    lhs: np.ndarray  # as printed: rho (psi + kin) (v.n)
    lhs_alt: np.ndarray  # alternative reading: (psi + rho kin) (v.n)
    rhs: np.ndarray
    gap: np.ndarray
    extrapolated: dict
    readings_differ: bool


def energy_release_balance(fs, model, tip, contours, v_tip=None, order=2):
    """Both sides of the tip energy balance on each contour.

    ``v_tip`` defaults to V n. The bulk-flux term is weighted by v_tip.n
    (outward normal).
    """
    v = tip.V * np.asarray(tip.n, dtype=float) if v_tip is None else np.asarray(v_tip, dtype=float)
    lhs, alt, rhs = [], [], []
    line = tip.phi_tip * tip.V + tip.lambda_tip * tip.curvature * tip.V
    for c in contours:
        s = sample_contour(fs, model, c)
        st = s.state
        vn = c.normals @ v
        power = np.einsum("nij,nj,ni->n", s.T, c.normals, st.xdot) + np.einsum(
            "naj,nj,na->n", s.S, c.normals, st.nudot)
        lhs.append(c.integrate(st.rho * (s.psi + s.kin) * vn + power) - line)
        alt.append(c.integrate((s.psi + st.rho * s.kin) * vn + power) - line)
        J = float(tip.n @ (-_flux(s, s.dynamic)))
        rhs.append(driving_force(J, tip).f * tip.V)
    lhs, alt, rhs = map(np.array, (lhs, alt, rhs))
    radii = _radii(contours)
    ext = {k: float(richardson(radii, v_, order)) for k, v_ in (("lhs", lhs), ("lhs_alt", alt), ("rhs", rhs))}
    ext["gap"] = abs(ext["lhs"] - ext["rhs"])
    scale = max(np.max(np.abs(lhs)), np.max(np.abs(alt)), 1e-300)
    return EnergyBalance(radii, lhs, alt, rhs, np.abs(lhs - rhs), ext,
                         bool(np.max(np.abs(lhs - alt)) > 1e-12 * scale))


# -- inertia at the tip ------------------------------------------------------------------


def tip_inertia(fs, model, contours, v_tip, order=2):
    """b_tip, beta_tip, e_tip and the stress fluxes int T n, int S n on a shrink sequence.

    Each series carries a behaviour flag ('vanishing', 'finite',
    'divergent') read off the log-log slope over the radii.
    """
    v = np.asarray(v_tip, dtype=float)
    acc = {k: [] for k in ("b_tip", "beta_tip", "e_tip", "Tn", "Sn")}
    for c in contours:
        s = sample_contour(fs, model, c)
        st = s.state
        vn = c.normals @ v
        acc["b_tip"].append(c.integrate(st.rho * st.xdot * vn[:, None]))
        acc["beta_tip"].append(c.integrate(st.rho * s.dchi * vn[:, None]))
        acc["e_tip"].append(c.integrate(st.rho * s.kin[:, None] * c.normals))
        acc["Tn"].append(_flux(s, s.T))
        acc["Sn"].append(c.integrate(np.einsum("naj,nj->na", s.S, c.normals)))
    radii = _radii(contours)
    return {k: make_series(k, radii, vals, order, behaviour=True) for k, vals in acc.items()}


def tip_micro_remainder(fs, model, contours, v_tip, order=2):
    """z'_tip = beta_tip + int_tip S n and |A_tip^T z'_tip|.

    The remainder has no constitutive description; only the orthogonality
    to the range of A_tip is checked. A_tip is taken at the contour mean of
    nu on the smallest radius.
    """
    terms = tip_inertia(fs, model, contours, v_tip, order)
    z = terms["beta_tip"].values + terms["Sn"].values
    series = make_series("z_tip", terms["Sn"].radii, z, order, behaviour=True)
    smallest = min(contours, key=lambda c: c.radius)
    nu = evaluate(fs, smallest.points).nu
    nu_tip = smallest.integrate(nu) / smallest.weights.sum()
    A = generator_of(fs.space, nu_tip)
    return series, float(np.linalg.norm(A.T @ series.extrapolant))


# -- process zone ------------------------------------------------------------------------


@dataclass
class ZoneMotion:
    """u = u_tr + q_dot x (X - X0) + alpha (X - X0) + u_d(X) on the zone boundary."""

    u_tr: np.ndarray = field(default_factory=lambda: np.zeros(3))
    q_dot: np.ndarray = field(default_factory=lambda: np.zeros(3))
    alpha: float = 0.0
    u_d: Optional[Callable] = None
    X0: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def distortion(self, X):
        X = np.asarray(X, dtype=float)
        return np.zeros(X.shape) if self.u_d is None else np.asarray(self.u_d(X), dtype=float)

    def velocity(self, X):
        X = np.asarray(X, dtype=float)
        d = X - np.asarray(self.X0, dtype=float)
        return (np.asarray(self.u_tr, dtype=float) + np.cross(self.q_dot, d) + self.alpha * d
                + self.distortion(X))

    def check(self, X, u_total):
        """Raise InvalidMotion if the decomposition misses the given boundary velocity."""
        X = np.asarray(X, dtype=float)
        u = np.asarray(u_total(X) if callable(u_total) else u_total, dtype=float)
        err = float(np.max(np.abs(self.velocity(X) - u)))
        if err > MOTION_TOL:
            raise InvalidMotion(f"motion decomposition misses the boundary velocity by {err:.2e}")
        return err


@dataclass
class ProcessZone:
    j: np.ndarray
    L: np.ndarray
    M: float
    I: float
    Phi: float


def process_zone(fs, model, contour, motion, u_total=None):
    """Boundary integrals j, L, M, I over the zone boundary and the dissipation rate
    Phi = u_tr.j + q_dot.L + alpha M + I (outward normal)."""
    if u_total is not None:
        motion.check(contour.points, u_total)
    s = sample_contour(fs, model, contour)
    st = s.state
    w = np.einsum("nij,nj->ni", s.dynamic, contour.normals)
    d = contour.points - np.asarray(motion.X0, dtype=float)
    j = contour.integrate(w)
    L = contour.integrate(np.cross(d, w))
    M = float(contour.integrate(np.einsum("ni,ni->n", w, d)))
    power = np.einsum("nij,nj,ni->n", s.T, contour.normals, st.xdot) + np.einsum(
        "naj,nj,na->n", s.S, contour.normals, st.nudot)
    I = float(contour.integrate(np.einsum("ni,ni->n", w, motion.distortion(contour.points)) - power))
    Phi = float(np.dot(motion.u_tr, j) + np.dot(motion.q_dot, L) + motion.alpha * M + I)
    return ProcessZone(j, L, M, I, Phi)


# -- path independence -------------------------------------------------------------------


@dataclass
class PathReport:
    radii: np.ndarray
    values: np.ndarray
    relative_spread: float
    tolerance: float
    hypotheses_met: bool
    unmet: list
    passed: bool

    @property
    def label(self):
        return "hypotheses met" if self.hypotheses_met else "hypotheses unmet"


def face_traction(fs, model, radii):
    """Largest |T m|, |S m| on both faces at distance r behind the tip."""
    crack = fs.crack
    worst = 0.0
    for r in radii:
        X = crack.tip_point - r * crack.n
        for side in (+1, -1):
            Tm = one_sided(fs, X, side, lambda st: stresses(model, st)[0] @ crack.m)
            Sm = one_sided(fs, X, side, lambda st: stresses(model, st)[2] @ crack.m)
            worst = max(worst, float(np.linalg.norm(Tm)), float(np.linalg.norm(Sm)))
    return worst


def path_independence_report(fs, model, radii, n_nodes=512, tol=1e-6, delta_theta=1e-3, face_tol=1e-4):
    """J_qs on concentric circles and its relative spread.

    Runs regardless of the hypotheses (homogeneous energy, straight planar
    crack, traction-free faces) but labels the report when they fail.
    """
    radii = np.asarray(radii, dtype=float)
    if radii.size == 0:
        raise InvalidArgument("need at least one radius")
    crack = fs.crack
    if crack is None:
        raise InvalidArgument("path independence needs a cracked field set")
    contours = [make_contour(crack, r, n_nodes, True, delta_theta) for r in radii]
    values = np.array([j_qs(fs, model, c) for c in contours])
    unmet = []
    if not model.homogeneous:
        unmet.append("energy depends explicitly on X")
    if not crack.is_straight:
        unmet.append("crack is not straight and planar")
    scale = max(float(np.max(np.abs(stresses(model, evaluate(fs, contours[0].points))[0]))), 1e-300)
    if face_traction(fs, model, radii) > face_tol * scale:
        unmet.append("crack faces are not traction free")
    mean = float(np.mean(values))
    rel = float((values.max() - values.min()) / abs(mean)) if mean != 0 else float(values.max() - values.min())
    met = not unmet
    return PathReport(radii, values, rel, tol, met, unmet, met and rel <= tol)


# -- report --------------------------------------------------------------------------------


@dataclass
class TipReport:
    radii: np.ndarray
    J_qs: TipSeries
    j: TipSeries
    J_dyn: TipSeries
    f: TipSeries
    fV: TipSeries

    def rows(self):
        """Per-radius rows (radius, J_qs, J_dyn, f, spread, flags)."""
        flags = ";".join(sorted(set(self.J_qs.flags + self.J_dyn.flags))) or "ok"
        return [
            (float(r), float(self.J_qs.values[k]), float(self.J_dyn.values[k]), float(self.f.values[k]),
             self.J_qs.spread, flags)
            for k, r in enumerate(self.radii)
        ]


def tip_report(fs, model, tip, contours, order=2):
    j = tip_traction(fs, model, contours, order)
    radii = j.radii
    J_dyn = j.values @ np.asarray(tip.n, dtype=float)
    f = np.array([driving_force(J, tip).f for J in J_dyn])
    return TipReport(
        radii,
        j_qs_series(fs, model, contours, order),
        j,
        make_series("J_dyn", radii, J_dyn, order),
        make_series("f", radii, f, order),
        make_series("fV", radii, f * tip.V, order),
    )
