"""Built-in scenario catalog.

Each scenario has nested default parameters, a list of outputs it can
produce, a ``run`` method filling a :class:`Report` and a ``probe`` method
returning named quantities at one value of a convergence parameter
("radius" or "h").
"""
import json

import numpy as np
import sympy as sp
from scipy.integrate import quad

from ..configurational import bulk_residuals, rotational_residual
from ..constitutive import (
    DoubleWell, EnergyModel, GLModel, LinearElastic, antiplane_elastic, energy_eval, fd_check,
    gl_vector_model, kinetic_densities, random_state, stresses, verify_model,
)
from ..errors import ConfigError, InvalidArgument
from ..fields import X1, X2, X3, AnalyticProvider, FieldSet, evaluate
from ..geometry import CrackGeometry, make_contour, shrink_sequence
from ..manifolds import OrderParameterSpace
from ..models import (
    FerroelectricModel, StrainGradientModel, electric_body_terms, ferroelectric_balances,
    ferroelectric_j_qs, strain_gradient_balance, strain_gradient_j_qs, uniform_field,
)
from ..tip_integrals import (
    TipState, ZoneMotion, classical_j_qs, energy_release_balance, j_qs, path_independence_report,
    process_zone, tip_inertia, tip_kinetics, tip_report,
)
from . import manufactured as mf
from .report import Series, check_ge, check_le, check_near

CATALOG_VERSION = "1"
SAMPLE_POINTS = np.array([[0.3, 0.2, 0.1], [-0.4, 0.5, 0.0], [0.1, -0.3, 0.2]])
SLOPE_TOL = 0.2


def loglog_slope(xs, ys):
    xs, ys = np.asarray(xs, dtype=float), np.abs(np.asarray(ys, dtype=float))
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


def _contours(crack, c, cut_aware=True):
    radii = shrink_sequence(c["r0"], c["factor"], c["count"])
    return [make_contour(crack, r, c["n_nodes"], cut_aware, c["delta_theta"]) for r in radii]


def _check_contours(c):
    if c["n_nodes"] < 16:
        raise ConfigError("contours.n_nodes", "need at least 16 nodes")
    if not c["r0"] > 0:
        raise ConfigError("contours.r0", "must be positive")
    if not 0 < c["factor"] < 1:
        raise ConfigError("contours.factor", "must lie in (0, 1)")
    if c["count"] < 2:
        raise ConfigError("contours.count", "need at least two radii")
    if not 0 < c["delta_theta"] < 0.5:
        raise ConfigError("contours.delta_theta", "must lie in (0, 0.5)")


def _check_positive(params, *keys):
    for key in keys:
        section, name = key.split(".")
        if not params[section][name] > 0:
            raise ConfigError(key, "must be positive")


def _check_steps(key, hs):
    if len(hs) < 1 or any(h <= 0 for h in hs):
        raise ConfigError(key, "steps must be positive")


class Scenario:
    name = ""
    description = ""
    outputs = ()
    probes = ()
    defaults = {}

    def __init__(self):
        self._cache = {}

    def validate(self, params):
        pass

    def context(self, params):
        """Fields and models, cached per parameter set (sympy compilation is the slow part)."""
        key = json.dumps(params, sort_keys=True)
        if key not in self._cache:
            ctx = self.build(params)
            for item in ctx if isinstance(ctx, tuple) else (ctx,):
                if isinstance(item, EnergyModel):
                    verify_model(item)
            self._cache[key] = ctx
        return self._cache[key]

    def build(self, params):
        raise NotImplementedError

    def run(self, params, report):
        raise NotImplementedError

    def probe(self, params, parameter, value):
        raise InvalidArgument(f"{self.name} has no convergence parameter {parameter!r}")

    def catalog_models(self, params):
        return []


# -- classical limit -----------------------------------------------------------------------


class AntiplaneMode3(Scenario):
    name = "antiplane_mode3"
    description = "Mode III crack in a linear elastic body, substructure off; J_qs vs K^2/(2 mu)"
    outputs = ("j_qs", "classical_limit", "path_independence", "tip_report", "energy_balance", "tip_inertia")
    probes = ("radius",)
    defaults = {
        "seed": 42,
        "outputs": ["j_qs", "classical_limit", "path_independence", "tip_report"],
        "model": {"mu": 1.0, "rho": 1.0},
        "field": {"K": 1.0, "V": 0.0},
        "crack": {"tip": [0.0, 0.0]},
        "tip": {"phi": 0.1, "lambda": 0.0, "g": -1.0},
        "contours": {"r0": 0.5, "factor": 0.5, "count": 5, "n_nodes": 512, "delta_theta": 1e-3},
        "path": {"radii": [0.05, 0.1, 0.2, 0.5]},
    }

    def validate(self, params):
        _check_positive(params, "model.mu", "model.rho")
        _check_contours(params["contours"])
        if len(params["crack"]["tip"]) != 2:
            raise ConfigError("crack.tip", "expected [X1, X2]")
        if params["tip"]["g"] > 0:
            raise ConfigError("tip.g", "kinetic coefficient must be non-positive")
        if any(r <= 0 for r in params["path"]["radii"]):
            raise ConfigError("path.radii", "radii must be positive")

    def build(self, params):
        K, mu, V = params["field"]["K"], params["model"]["mu"], params["field"]["V"]
        a, b = params["crack"]["tip"]
        Y1, Y2 = X1 - a, X2 - b
        r = sp.sqrt(Y1**2 + Y2**2)
        w = 2 * K / mu * sp.sqrt(r / (2 * sp.pi)) * sp.sin(sp.atan2(Y2, Y1) / 2)
        xdot = [0, 0, -V * sp.diff(w, X1)]
        prov = AnalyticProvider([X1, X2, X3 + w], xdot=xdot)
        crack = CrackGeometry.straight(tip=(a, b, 0.0))
        fs = FieldSet(prov, OrderParameterSpace.scalar(), rho=params["model"]["rho"], crack=crack)
        model = antiplane_elastic(mu, rho=params["model"]["rho"])
        return fs, model

    def exact(self, params):
        return params["field"]["K"] ** 2 / (2 * params["model"]["mu"])

    def tip_state(self, params, V=0.0):
        t = params["tip"]
        return TipState(phi_tip=t["phi"], lambda_tip=t["lambda"], g_tip=t["g"], V=V)

    def run(self, params, report):
        fs, model = self.context(params)
        outs = params["outputs"]
        exact = self.exact(params)
        contours = _contours(fs.crack, params["contours"]) if outs else []
        if "j_qs" in outs:
            vals = [j_qs(fs, model, c) for c in contours]
            rel = [abs(v - exact) / exact for v in vals]
            report.series.append(Series("J_qs", "radius", [c.radius for c in contours], vals, exact, 5e-3,
                                        "pass" if max(rel) <= 5e-3 else "fail"))
            report.add(check_le("J_qs relative error vs K^2/(2 mu)", max(rel), 5e-3))
        if "classical_limit" in outs:
            gap = max(abs(j_qs(fs, model, c) - classical_j_qs(fs, model, c)) for c in contours)
            report.add(check_le("J_qs minus classical-only quadrature", gap / exact, 1e-12))
        if "path_independence" in outs:
            pr = path_independence_report(fs, model, params["path"]["radii"], params["contours"]["n_nodes"],
                                          1e-6, params["contours"]["delta_theta"])
            report.series.append(Series("J_qs_path", "radius", list(pr.radii), list(pr.values),
                                        float(np.mean(pr.values)), 1e-6, "pass" if pr.passed else "fail"))
            report.extrapolants["path_label"] = pr.label
            report.add(check_le("J_qs relative spread over radii", pr.relative_spread, 1e-6))
        if "tip_report" in outs or "energy_balance" in outs:
            V = params["field"]["V"]
            tip = self.tip_state(params, V)
            tr = tip_report(fs, model, tip, contours)
            report.tables["tip"] = (["radius", "J_qs", "J_dyn", "f", "spread", "flags"], tr.rows())
            f = float(tr.f.extrapolant)
            Vk = tip_kinetics(f, tip.g_tip)
            report.extrapolants.update({"J_qs": float(tr.J_qs.extrapolant), "J_dyn": float(tr.J_dyn.extrapolant),
                                        "f": f, "V_kinetics": Vk})
            report.add(check_ge("tip dissipation f V", f * Vk, 0.0))
        if "energy_balance" in outs:
            tip = self.tip_state(params, params["field"]["V"])
            eb = energy_release_balance(fs, model, tip, contours)
            fv = abs(eb.extrapolated["rhs"])
            report.series.append(Series("energy_balance_gap", "radius", list(eb.radii), list(eb.gap)))
            report.extrapolants.update({f"energy_{k}": v for k, v in eb.extrapolated.items()})
            report.extrapolants["energy_readings_differ"] = eb.readings_differ
            report.add(check_le("tip energy balance gap / |f V|", eb.extrapolated["gap"] / fv if fv else 0.0, 1e-2))
        if "tip_inertia" in outs:
            v_tip = params["field"]["V"] * fs.crack.n
            ti = tip_inertia(fs, model, contours, v_tip)
            for k, s in ti.items():
                report.extrapolants[f"{k}_behaviour"] = s.behaviour
                report.series.append(Series(f"|{k}|", "radius", list(s.radii),
                                            list(np.linalg.norm(s.values, axis=-1))))

    def probe(self, params, parameter, value):
        if parameter != "radius":
            return super().probe(params, parameter, value)
        fs, model = self.context(params)
        c = make_contour(fs.crack, value, params["contours"]["n_nodes"], True, params["contours"]["delta_theta"])
        return {"J_qs": j_qs(fs, model, c)}

    def catalog_models(self, params):
        return [self.context(params)[1]]


# -- Ginzburg-Landau scalar ---------------------------------------------------------------------


def _trig_displacement(eps):
    return [X1 + eps * sp.sin(X1) * sp.cos(X2), X2 + eps * sp.cos(X1) * sp.sin(X2), X3 + eps * sp.sin(X1 + X3)]


def _residual_norms(fs, model, h, body, micro):
    worst = np.zeros(3)
    for X in SAMPLE_POINTS:
        worst = np.maximum(worst, bulk_residuals(fs, model, X, h, body, micro).norms)
    return worst


def _slope_verdicts(report, label, hs, values, target=2.0, tol=SLOPE_TOL, minimum=None):
    slope = loglog_slope(hs, values)
    if minimum is None:
        v = check_near(f"{label} h-slope", slope, target, tol)
    else:
        v = check_ge(f"{label} h-slope", slope, minimum)
    report.series.append(Series(label, "h", list(hs), list(values), float("nan"), tol,
                                "pass" if v.passed else "fail"))
    report.extrapolants[f"{label}_slope"] = slope
    report.add(v)


class GLScalarManufactured(Scenario):
    name = "gl_scalar_manufactured"
    description = "Scalar Ginzburg-Landau kink with a manufactured elastic field; balance residuals under h-refinement"
    outputs = ("residuals", "fd_check")
    probes = ("h",)
    defaults = {
        "seed": 42,
        "outputs": ["residuals", "fd_check"],
        "model": {"mu": 1.0, "lam": 0.5, "b": 1.0, "a": 0.5, "rho": 1.0},
        "field": {"eps": 0.05},
        "residuals": {"h": [0.1, 0.05, 0.025, 0.0125]},
    }

    def validate(self, params):
        _check_positive(params, "model.mu", "model.b", "model.a", "model.rho")
        _check_steps("residuals.h", params["residuals"]["h"])

    def build(self, params):
        m = params["model"]
        width = sp.sqrt(2 * sp.Float(m["a"]) / m["b"])
        prov = AnalyticProvider(_trig_displacement(params["field"]["eps"]), nu=[sp.tanh(X1 / width)])
        model = GLModel(OrderParameterSpace.scalar(), elastic=LinearElastic(m["mu"], m["lam"]),
                        well=DoubleWell(m["b"]), a=m["a"], rho=m["rho"], name="gl_scalar")
        psi = mf.sym_gl(mf.sym_linear_elastic(m["mu"], m["lam"]), b=m["b"], a=m["a"])
        body, micro = mf.equilibrium_sources(psi, prov)
        fs = FieldSet(prov, model.space, rho=m["rho"])
        return fs, model, body, micro

    def residuals(self, params, h):
        fs, model, body, _ = self.context(params)
        # the kink is an exact equilibrium of the order-parameter balance, so beta = 0
        return _residual_norms(fs, model, h, body, None)

    def run(self, params, report):
        fs, model, body, micro = self.context(params)
        outs = params["outputs"]
        if "residuals" in outs:
            beta_exact = float(np.max(np.abs(micro(SAMPLE_POINTS))))
            report.add(check_le("manufactured micro force of the kink", beta_exact, 1e-12))
            hs = params["residuals"]["h"]
            table = np.array([self.residuals(params, h) for h in hs])
            for k, label in enumerate(("standard balance residual", "micro balance residual",
                                       "configurational balance residual")):
                _slope_verdicts(report, label, hs, table[:, k])
        if "fd_check" in outs:
            rng = np.random.default_rng(params["seed"])
            worst = max(fd_check(model, random_state(model.space, rng)).max for _ in range(5))
            report.add(check_le("fd_check gl_scalar", worst, 1e-6))

    def probe(self, params, parameter, value):
        if parameter != "h":
            return super().probe(params, parameter, value)
        r = self.residuals(params, value)
        return {"standard": r[0], "micro": r[1], "configurational": r[2]}

    def catalog_models(self, params):
        return [self.context(params)[1]]


# -- frame indifference ---------------------------------------------------------------------------


class GLVectorFrameIndifferent(Scenario):
    name = "gl_vector_frame_indifferent"
    description = "Neo-Hookean matrix with a vector order parameter; rotational balance on random states"
    outputs = ("rotational_balance", "invariance_probe", "fd_check")
    defaults = {
        "seed": 42,
        "outputs": ["rotational_balance", "invariance_probe", "fd_check"],
        "model": {"mu": 1.0, "lam": 1.5, "b": 1.0, "a": 0.5, "coupling": 0.2},
        "probe": {"eta": 0.5},
        "sweep": {"n_states": 200},
    }

    def validate(self, params):
        _check_positive(params, "model.mu", "model.a")
        if params["sweep"]["n_states"] < 1:
            raise ConfigError("sweep.n_states", "must be at least 1")

    def build(self, params):
        m = params["model"]
        model = gl_vector_model(m["mu"], m["lam"], m["b"], m["a"], m["coupling"])
        probe = GLModel(model.space, elastic=model.elastic, well=model.well, a=m["a"], coupling=m["coupling"],
                        fixed_axis=(params["probe"]["eta"], (0.0, 0.0, 1.0)), name="gl_vector_fixed_axis")
        return model, probe

    def _states(self, params):
        rng = np.random.default_rng(params["seed"])
        return [random_state(OrderParameterSpace.vector(), rng) for _ in range(params["sweep"]["n_states"])]

    def run(self, params, report):
        model, probe = self.context(params)
        outs = params["outputs"]
        states = self._states(params) if outs else []
        if "rotational_balance" in outs:
            worst = max(float(np.linalg.norm(rotational_residual(model, s))) for s in states)
            report.add(check_le("rotational balance residual (frame-indifferent model)", worst, 1e-8))
        if "invariance_probe" in outs:
            worst = max(float(np.linalg.norm(rotational_residual(probe, s))) for s in states)
            report.add(check_ge("rotational balance residual (fixed-axis probe)", worst, 1e-2))
        if "fd_check" in outs:
            rng = np.random.default_rng(params["seed"])
            for mdl in (model, probe):
                worst = max(fd_check(mdl, random_state(mdl.space, rng)).max for _ in range(5))
                report.add(check_le(f"fd_check {mdl.name}", worst, 1e-6))

    def catalog_models(self, params):
        return list(self.context(params))


# -- ferroelectric --------------------------------------------------------------------------------


def electric_terms_oracle(state, E, gradE, n):
    """Entry-by-entry assembly of the electric actions for one state."""
    p, F, rho = state.nu, state.F, state.rho
    b = np.array([rho * sum(gradE[i, j] * p[j] for j in range(3)) for i in range(3)])
    beta = np.array([rho * E[i] for i in range(3)])
    Finv = np.linalg.inv(F)
    m = np.array([sum(Finv[A, i] * n[A] for A in range(3)) for i in range(3)])
    size = np.sqrt(sum(c * c for c in m))
    pn = sum(p[i] * m[i] for i in range(3)) / size
    t = 0.5 * np.linalg.det(F) * pn * pn * m
    return b, beta, t


class FerroelectricUniformE(Scenario):
    name = "ferroelectric_uniform_E"
    description = "Ferroelectric with a uniform applied field; electro-mechanical balances and J_qs"
    outputs = ("balances", "zero_field", "electric_terms", "j_qs", "ball_constraint", "fd_check")
    probes = ("h",)
    defaults = {
        "seed": 42,
        "outputs": ["balances", "zero_field", "electric_terms", "j_qs", "ball_constraint", "fd_check"],
        "model": {"p_m": 1.0, "mu": 1.0, "lam": 0.5, "b": 1.0, "p0": 0.8, "coupling": 0.1, "a": 0.5, "rho": 1.0},
        "field": {"E": [0.0, 0.0, 0.2], "kind": "polynomial", "eps": 0.05},
        "residuals": {"h": 1e-4},
        "contours": {"radius": 0.5, "n_nodes": 256},
    }

    def validate(self, params):
        _check_positive(params, "model.p_m", "model.mu", "model.a", "model.rho")
        if params["model"]["p0"] > params["model"]["p_m"]:
            raise ConfigError("model.p0", "must not exceed p_m")
        if len(params["field"]["E"]) != 3:
            raise ConfigError("field.E", "expected three components")
        if params["field"]["kind"] not in ("polynomial", "trigonometric"):
            raise ConfigError("field.kind", "expected 'polynomial' or 'trigonometric'")
        if params["contours"]["n_nodes"] < 16:
            raise ConfigError("contours.n_nodes", "need at least 16 nodes")
        _check_steps("residuals.h", [params["residuals"]["h"]])

    def _model(self, m, E):
        return FerroelectricModel(m["p_m"], LinearElastic(m["mu"], m["lam"]), m["b"], m["p0"], m["coupling"],
                                  m["a"], uniform_field(E), m["rho"])

    def build(self, params):
        m, f = params["model"], params["field"]
        eps = f["eps"]
        if f["kind"] == "polynomial":
            x = [X1 + eps * X1**2 * X2, X2 + eps * (X2**3 / 3 - X1 * X3**2), X3 + eps * X1 * X2 * X3]
            p = [0.3 + 0.1 * X1**2, 0.2 * X1 * X2, 0.1 - 0.1 * X2**2]
        else:
            x = _trig_displacement(eps)
            p = [0.3 + 0.2 * sp.sin(X1), 0.2 * sp.cos(X2) * sp.sin(X1), 0.2 * sp.sin(X2 + X3)]
        prov = AnalyticProvider(x, nu=p)
        model = self._model(m, f["E"])
        psi = mf.sym_gl(mf.sym_linear_elastic(m["mu"], m["lam"]), b=m["b"], nu0=m["p0"], a=m["a"],
                        coupling=m["coupling"])
        b_mech, beta_mech = mf.equilibrium_sources(psi, prov)
        E = np.asarray(f["E"], dtype=float)
        rho = m["rho"]

        def b_em(X):  # uniform field: grad E = 0, so b_el = 0
            return b_mech(X)

        def beta_em(X):
            return beta_mech(X) - rho * E

        fs = FieldSet(prov, model.space, rho=rho)
        return fs, model, b_em, beta_em, beta_mech

    def residuals(self, params, h):
        fs, model, b_em, beta_em, _ = self.context(params)
        worst = np.zeros(2)
        for X in SAMPLE_POINTS:
            r74, r75 = ferroelectric_balances(model, fs, X, h, b_em, beta_em)
            worst = np.maximum(worst, [np.linalg.norm(r74), np.linalg.norm(r75)])
        return worst

    def run(self, params, report):
        fs, model, b_em, beta_em, beta_mech = self.context(params)
        outs = params["outputs"]
        h = params["residuals"]["h"]
        if "balances" in outs:
            r = self.residuals(params, h)
            tol = 1e-8 if params["field"]["kind"] == "polynomial" else 1e-4
            report.add(check_le("electro-mechanical standard balance residual", r[0], tol),
                       check_le("electro-mechanical micro balance residual", r[1], tol))
        if "zero_field" in outs:
            zero = self._model(params["model"], [0.0, 0.0, 0.0])
            gap = 0.0
            for X in SAMPLE_POINTS:
                r74, r75 = ferroelectric_balances(zero, fs, X, h, b_em, beta_mech)
                generic = bulk_residuals(fs, zero, X, h, b_em, beta_mech)
                gap = max(gap, float(np.max(np.abs(r74 - generic.linear_momentum))),
                          float(np.max(np.abs(r75 - generic.micro))))
            report.add(check_le("zero-field balances minus generic residuals", gap, 1e-12))
        if "electric_terms" in outs:
            rng = np.random.default_rng(params["seed"])
            worst = 0.0
            for _ in range(50):
                st = random_state(model.space, rng)
                n = rng.standard_normal(3)
                n /= np.linalg.norm(n)
                E, gE = model.field(st.x)
                got = electric_body_terms(model, st, n)
                want = electric_terms_oracle(st, E, gE, n)
                worst = max(worst, *(float(np.max(np.abs(g - w))) for g, w in
                                     zip((got.b_el, got.beta_el, got.t_el), want)))
                worst = max(worst, float(np.max(np.abs(got.tau_el))))
            report.add(check_le("electric source terms vs formula oracle", worst, 1e-10))
        if "j_qs" in outs:
            c = params["contours"]
            contour = make_contour(CrackGeometry.straight(), c["radius"], c["n_nodes"], cut_aware=False)
            a, b = ferroelectric_j_qs(fs, model, contour), j_qs(fs, model, contour)
            report.extrapolants["J_qs_ferroelectric"] = a
            report.add(check_le("ferroelectric J_qs minus generic J_qs", abs(a - b), 1e-12))
        if "ball_constraint" in outs:
            g = np.linspace(-1.0, 1.0, 9)
            XX = np.stack(np.meshgrid(g, g, g, indexing="ij"), axis=-1).reshape(-1, 3)
            pmax = float(np.max(np.linalg.norm(evaluate(fs, XX).nu, axis=-1)))
            report.add(check_le("max |p| - p_m", pmax - model.p_m, 1e-12))
        if "fd_check" in outs:
            rng = np.random.default_rng(params["seed"])
            worst = max(fd_check(model, random_state(model.space, rng)).max for _ in range(5))
            report.add(check_le("fd_check ferroelectric", worst, 1e-6))

    def probe(self, params, parameter, value):
        if parameter != "h":
            return super().probe(params, parameter, value)
        r = self.residuals(params, value)
        return {"standard": r[0], "micro": r[1]}

    def catalog_models(self, params):
        return [self.context(params)[1]]


# -- strain gradient ------------------------------------------------------------------------------


class StrainGradientQuadratic(Scenario):
    name = "strain_gradient_quadratic"
    description = "Strain-gradient body with energy quadratic in grad F; merged balance and J_qs"
    outputs = ("balance", "j_qs", "fd_check")
    probes = ("h",)
    defaults = {
        "seed": 42,
        "outputs": ["balance", "j_qs", "fd_check"],
        "model": {"mu": 1.0, "lam": 0.5, "length": 0.2},
        "field": {"eps": 0.05},
        "residuals": {"h": [0.1, 0.05, 0.025, 0.0125]},
        "contours": {"radius": 0.5, "n_nodes": 256},
    }

    def validate(self, params):
        _check_positive(params, "model.mu", "model.length")
        _check_steps("residuals.h", params["residuals"]["h"])
        if params["contours"]["n_nodes"] < 16:
            raise ConfigError("contours.n_nodes", "need at least 16 nodes")

    def build(self, params):
        m = params["model"]
        prov = AnalyticProvider(_trig_displacement(params["field"]["eps"]), nu_is_F=True)
        model = StrainGradientModel(LinearElastic(m["mu"], m["lam"]), m["length"], m["mu"])
        el = mf.sym_linear_elastic(m["mu"], m["lam"])
        k = m["length"] ** 2 * m["mu"]

        def psi(F, nu, G, X):
            return el(F) + sp.Rational(1, 2) * k * sum(g**2 for g in G)

        body = mf.strain_gradient_source(psi, prov)
        return FieldSet(prov, model.space), model, body

    def residual(self, params, h):
        fs, model, body = self.context(params)
        return max(float(np.linalg.norm(strain_gradient_balance(model, fs, X, h, body))) for X in SAMPLE_POINTS)

    def run(self, params, report):
        fs, model, body = self.context(params)
        outs = params["outputs"]
        if "balance" in outs:
            hs = params["residuals"]["h"]
            _slope_verdicts(report, "merged strain-gradient balance residual", hs,
                            [self.residual(params, h) for h in hs], minimum=1.8)
        if "j_qs" in outs:
            c = params["contours"]
            contour = make_contour(CrackGeometry.straight(), c["radius"], c["n_nodes"], cut_aware=False)
            a, b = strain_gradient_j_qs(fs, model, contour), j_qs(fs, model, contour)
            report.extrapolants["J_qs_strain_gradient"] = a
            report.add(check_le("strain-gradient J_qs minus generic J_qs", abs(a - b), 1e-12))
        if "fd_check" in outs:
            rng = np.random.default_rng(params["seed"])
            worst = max(fd_check(model, random_state(model.space, rng)).max for _ in range(3))
            report.add(check_le("fd_check strain_gradient", worst, 1e-6))

    def probe(self, params, parameter, value):
        if parameter != "h":
            return super().probe(params, parameter, value)
        return {"merged": self.residual(params, value)}

    def catalog_models(self, params):
        return [self.context(params)[1]]


# -- process zone ----------------------------------------------------------------------------------


def dissipation_oracle(fs, model, center, radius, t, n, m, velocity):
    """Direct energy bookkeeping on the zone boundary by adaptive quadrature in the angle:
    int [(rho kin - psi) u.n + Tn.(F u) + Sn.(grad nu u)] - int (Tn.xdot + Sn.nudot)."""

    def integrand(theta):
        nrm = np.cos(theta) * n + np.sin(theta) * m
        X = center + radius * nrm
        st = evaluate(fs, X)
        T, _, S = stresses(model, st)
        psi = float(energy_eval(model, st))
        k, _, _ = kinetic_densities(model, st.nu, st.nudot)
        kin = 0.5 * float(st.xdot @ st.xdot) + float(k)
        u = velocity(X)
        Tn, Sn = T @ nrm, S @ nrm
        flux = (st.rho * kin - psi) * (u @ nrm) + Tn @ (st.F @ u) + Sn @ (st.grad_nu @ u)
        return radius * (flux - Tn @ st.xdot - Sn @ st.nudot)

    val, _ = quad(integrand, -np.pi, np.pi, epsabs=1e-13, epsrel=1e-13, limit=200)
    return val


class ProcessZoneTranslation(Scenario):
    name = "process_zone_translation"
    description = "Dissipation rate in a finite process zone for translating and expanding zones"
    outputs = ("translation", "expansion", "rest")
    defaults = {
        "seed": 42,
        "outputs": ["translation", "expansion", "rest"],
        "model": {"mu": 1.0, "lam": 1.5, "b": 1.0, "a": 0.5, "coupling": 0.2, "micro_inertia": 0.3, "rho": 1.0},
        "zone": {"radius": 0.3, "n_nodes": 128},
        "motion": {"u_tr": [0.2, 0.1, 0.0], "alpha": 0.5},
    }

    def validate(self, params):
        _check_positive(params, "model.mu", "model.rho", "zone.radius")
        if params["zone"]["n_nodes"] < 16:
            raise ConfigError("zone.n_nodes", "need at least 16 nodes")
        if len(params["motion"]["u_tr"]) != 3:
            raise ConfigError("motion.u_tr", "expected three components")

    def build(self, params):
        m = params["model"]
        eps = 0.05
        x = _trig_displacement(eps)
        nu = [0.6 + 0.1 * sp.sin(X1), 0.2 * sp.cos(X2), 0.1 * X1 * X2]
        xdot = [0.1 * sp.cos(X2), 0.05 * sp.sin(X1), 0.02]
        nudot = [0.05 * X2, 0.1, -0.03 * X1]
        model = gl_vector_model(m["mu"], m["lam"], m["b"], m["a"], m["coupling"], m["rho"], m["micro_inertia"])
        moving = FieldSet(AnalyticProvider(x, nu=nu, xdot=xdot, nudot=nudot), model.space, rho=m["rho"])
        still = FieldSet(AnalyticProvider(x, nu=nu), model.space, rho=m["rho"])
        frame = CrackGeometry.straight()
        contour = make_contour(frame, params["zone"]["radius"], params["zone"]["n_nodes"], cut_aware=False)
        return model, moving, still, contour, frame

    def run(self, params, report):
        model, moving, still, contour, frame = self.context(params)
        outs = params["outputs"]
        args = (contour.center, contour.radius, frame.t, frame.n, frame.m)
        if "translation" in outs:
            motion = ZoneMotion(u_tr=np.asarray(params["motion"]["u_tr"]))
            pz = process_zone(moving, model, contour, motion, u_total=motion.velocity)
            ref = dissipation_oracle(moving, model, *args, motion.velocity)
            report.extrapolants.update({"Phi_translation": pz.Phi, "Phi_translation_oracle": ref})
            report.add(check_le("process zone Phi (translation) vs direct bookkeeping", abs(pz.Phi - ref), 1e-8))
        if "expansion" in outs:
            motion = ZoneMotion(alpha=params["motion"]["alpha"])
            pz = process_zone(moving, model, contour, motion, u_total=motion.velocity)
            ref = dissipation_oracle(moving, model, *args, motion.velocity)
            report.extrapolants.update({"Phi_expansion": pz.Phi, "Phi_expansion_oracle": ref, "M": pz.M})
            report.add(check_le("process zone Phi (expansion) vs direct bookkeeping", abs(pz.Phi - ref), 1e-8))
        if "rest" in outs:
            pz = process_zone(still, model, contour, ZoneMotion())
            report.add(check_le("process zone Phi at rest", abs(pz.Phi), 1e-14))

    def catalog_models(self, params):
        return [self.context(params)[0]]


CATALOG = {s.name: s for s in (
    AntiplaneMode3(), GLScalarManufactured(), GLVectorFrameIndifferent(), FerroelectricUniformE(),
    StrainGradientQuadratic(), ProcessZoneTranslation(),
)}
