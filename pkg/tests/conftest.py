import numpy as np
import pytest
import sympy as sp

from cracksub.constitutive import antiplane_elastic
from cracksub.fields import X1, X2, X3, AnalyticProvider, FieldSet
from cracksub.geometry import CrackGeometry
from cracksub.manifolds import OrderParameterSpace

K_III = 1.0
MU = 1.0


def mode3_w(K=K_III, mu=MU):
    r = sp.sqrt(X1**2 + X2**2)
    return 2 * K / mu * sp.sqrt(r / (2 * sp.pi)) * sp.sin(sp.atan2(X2, X1) / 2)


def mode3_fieldset(K=K_III, mu=MU, V=0.0, rho=1.0):
    w = mode3_w(K, mu)
    prov = AnalyticProvider([X1, X2, X3 + w], xdot=[0, 0, -V * sp.diff(w, X1)])
    return FieldSet(prov, OrderParameterSpace.scalar(), rho=rho, crack=CrackGeometry.straight())


@pytest.fixture(scope="session")
def mode3():
    return mode3_fieldset(), antiplane_elastic(MU)


@pytest.fixture
def rng():
    return np.random.default_rng(42)
