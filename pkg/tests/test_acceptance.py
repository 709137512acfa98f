"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""
import time

import numpy as np
import pytest

from cracksub.configurational import eshelby_of
from cracksub.constitutive import (
    GLModel, LinearElastic, LinearProfile, NeoHookean, antiplane_elastic, energy_eval, fd_check, random_state,
    stresses, verify_model,
)
from cracksub.errors import InvalidModel, UndefinedKinetics
from cracksub.fields import X1, X2, X3, AnalyticProvider, FieldSet
from cracksub.geometry import CrackGeometry
from cracksub.harness import CATALOG, run_scenario, to_csv, to_json
from cracksub.harness.config import resolve
from cracksub.harness.export import tip_csv
from cracksub.manifolds import OrderParameterSpace, star_product
from cracksub.tip_integrals import TipState, path_independence_report, tip_kinetics

from conftest import MU, mode3_fieldset, mode3_w

SPACES = [
    OrderParameterSpace.scalar(),
    OrderParameterSpace.vector(),
    OrderParameterSpace.unit_vector(),
    OrderParameterSpace.ball(2.0),
    OrderParameterSpace.tensor(),
]


@pytest.fixture
def criterion(pytestconfig):
    reporter = pytestconfig.pluginmanager.get_plugin("terminalreporter")

    def record(number, title, passed, detail):
        line = f"{'PASS' if passed else 'FAIL'} criterion {number:2d} {title}: {detail}"
        if reporter is not None:
            reporter.write_line("")
            reporter.write_line(line)
        else:
            print(line)
        assert passed, line

    return record


def test_01_classical_limit(criterion):
    t0 = time.perf_counter()
    report = run_scenario({"scenario": "antiplane_mode3", "outputs": ["j_qs"], "contours": {"n_nodes": 512}})
    elapsed = time.perf_counter() - t0
    v = report.verdict("J_qs relative error vs K^2/(2 mu)")
    criterion(1, "classical-limit recovery", v.value <= 0.005 and elapsed < 2.0,
              f"relative error {v.value:.3e} (<= 5e-3), runtime {elapsed:.3f} s (< 2 s)")


def test_02_eshelby_reduction(criterion):
    rng = np.random.default_rng(42)
    models = [GLModel(OrderParameterSpace.scalar(), NeoHookean(1.0, 2.0)),
              GLModel(OrderParameterSpace.vector(), LinearElastic(1.0, 0.5), coupling=0.0)]
    worst = 0.0
    for k in range(1000):
        model = models[k % 2]
        st = random_state(model.space, rng)
        T = stresses(model, st)[0]
        psi = float(energy_eval(model, st))
        F = st.F
        ref = np.array([[psi * (A == B) - (F[0, A] * T[0, B] + F[1, A] * T[1, B] + F[2, A] * T[2, B])
                         for B in range(3)] for A in range(3)])
        worst = max(worst, float(np.abs(eshelby_of(model, st) - ref).max()))
    criterion(2, "Eshelby reduction without substructure", worst == 0.0,
              f"max |P - (psi I - F^T T)| = {worst:.3e} over 1000 states (== 0)")


def test_03_star_product_identity(criterion):
    rng = np.random.default_rng(42)
    worst = {}
    for space in SPACES:
        d = space.ambient_dim
        err = 0.0
        for _ in range(1000):
            G, S = rng.standard_normal((d, 3)), rng.standard_normal((d, 3))
            n, u = rng.standard_normal(3), rng.standard_normal(3)
            err = max(err, abs((star_product(G, S, space) @ n) @ u - (S @ n) @ (G @ u)))
        worst[space.kind.value] = err
    top = max(worst.values())
    criterion(3, "star-product pairing identity", top <= 1e-12,
              ", ".join(f"{k} {v:.1e}" for k, v in worst.items()) + " (<= 1e-12)")


class _Corrupted(GLModel):
    def d_F(self, X, F, nu, G):
        return 1.1 * super().d_F(X, F, nu, G)


def test_04_constitutive_consistency(criterion):
    rng = np.random.default_rng(42)
    worst, names = 0.0, []
    for name, sc in CATALOG.items():
        _, params = resolve({"scenario": name}, CATALOG)
        for model in sc.catalog_models(params):
            names.append(model.name)
            for _ in range(5):
                worst = max(worst, fd_check(model, random_state(model.space, rng)).max)
    bad = _Corrupted(OrderParameterSpace.vector(), NeoHookean(1.0, 1.5), a=0.5)
    detected = fd_check(bad, random_state(bad.space, rng)).T
    try:
        verify_model(bad)
        rejected = False
    except InvalidModel:
        rejected = True
    criterion(4, "constitutive consistency", worst <= 1e-6 and detected >= 0.05 and rejected,
              f"fd_check max {worst:.2e} (<= 1e-6) over {len(set(names))} models; "
              f"corrupted partial error {detected:.3f} (>= 0.05), rejected={rejected}")


def test_05_path_independence(criterion):
    radii = [0.05, 0.1, 0.2, 0.5]
    good = path_independence_report(mode3_fieldset(), antiplane_elastic(MU), radii)
    space = OrderParameterSpace.scalar()
    nu = 0.5 + 0.3 * X1 + 0.2 * X1**2
    fs = FieldSet(AnalyticProvider([X1, X2, X3 + mode3_w()], [nu]), space, crack=CrackGeometry.straight())
    probe = path_independence_report(fs, GLModel(space, LinearElastic(MU), a=LinearProfile(1.0, (0.8, 0.0, 0.0))),
                                     radii)
    ok = (good.relative_spread <= 1e-6 and good.hypotheses_met and probe.relative_spread >= 1e-3
          and probe.label == "hypotheses unmet")
    criterion(5, "path independence", ok,
              f"spread {good.relative_spread:.2e} (<= 1e-6) over radii x10; violation probe spread "
              f"{probe.relative_spread:.2e} (>= 1e-3) labelled '{probe.label}'")


def test_06_balance_convergence(criterion):
    gl = run_scenario("gl_scalar_manufactured")
    slopes = {k: gl.verdict(f"{k} balance residual h-slope").value for k in ("standard", "micro", "configurational")}
    sg = run_scenario("strain_gradient_quadratic").verdict("merged strain-gradient balance residual h-slope").value
    ok = all(abs(s - 2.0) <= 0.2 for s in slopes.values()) and sg >= 1.8
    criterion(6, "balance-residual convergence", ok,
              ", ".join(f"{k} {v:.3f}" for k, v in slopes.items()) + f" (2 +/- 0.2); strain-gradient {sg:.3f} (>= 1.8)")


def test_07_frame_indifference(criterion):
    r = run_scenario("gl_vector_frame_indifferent")
    inv = r.verdict("rotational balance residual (frame-indifferent model)").value
    probe = r.verdict("rotational balance residual (fixed-axis probe)").value
    criterion(7, "frame-indifference identity", inv <= 1e-8 and probe > 1e-2,
              f"residual {inv:.2e} (<= 1e-8); non-invariant probe {probe:.3e} (> 1e-2)")


def test_08_tip_kinetics(criterion):
    rng = np.random.default_rng(42)
    f = rng.normal(scale=10.0, size=1000)
    g = -rng.uniform(1e-6, 10.0, size=1000)
    fv = np.array([fi * tip_kinetics(fi, gi) for fi, gi in zip(f, g)])
    rejected = 0
    for build in (lambda: TipState(g_tip=0.5), lambda: tip_kinetics(1.0, 0.5), lambda: tip_kinetics(1.0, 0.0)):
        try:
            build()
        except (InvalidModel, UndefinedKinetics):
            rejected += 1
    criterion(8, "tip kinetics dissipation", bool(np.all(fv >= 0.0)) and rejected == 3,
              f"min fV {fv.min():.3e} (>= 0) over 1000 inputs; g_tip >= 0 rejected {rejected}/3")


def test_09_process_zone(criterion):
    r = run_scenario("process_zone_translation")
    tr = r.verdict("process zone Phi (translation) vs direct bookkeeping").value
    ex = r.verdict("process zone Phi (expansion) vs direct bookkeeping").value
    criterion(9, "process-zone identity", tr <= 1e-8 and ex <= 1e-8,
              f"translation {tr:.2e}, expansion {ex:.2e} (<= 1e-8)")


def test_10_specialization_code_paths(criterion):
    fe = run_scenario("ferroelectric_uniform_E")
    sg = run_scenario("strain_gradient_quadratic")
    j_fe = fe.verdict("ferroelectric J_qs minus generic J_qs").value
    j_sg = sg.verdict("strain-gradient J_qs minus generic J_qs").value
    el = fe.verdict("electric source terms vs formula oracle").value
    criterion(10, "specialization code paths", j_fe <= 1e-12 and j_sg <= 1e-12 and el <= 1e-10,
              f"ferroelectric J {j_fe:.1e}, strain-gradient J {j_sg:.1e} (<= 1e-12); electric terms {el:.1e} (<= 1e-10)")


def _catalog_bytes():
    out = {}
    for name in CATALOG:
        report = run_scenario(name)
        out[name] = (to_csv(report), to_json(report), tip_csv(report))
    return out


def test_11_determinism_and_runtime(criterion):
    t0 = time.perf_counter()
    first = _catalog_bytes()
    elapsed = time.perf_counter() - t0
    second = _catalog_bytes()
    identical = first == second
    criterion(11, "determinism and runtime", identical and elapsed < 60.0,
              f"{len(first)} scenarios byte-identical={identical}, catalog runtime {elapsed:.2f} s (< 60 s)")
