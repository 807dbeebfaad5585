from fractions import Fraction

import pytest

from cyclicscm import Add, Disturbance, ExprEquation, OwnU, Scm, Var, Variable, fixture
from cyclicscm.scm import Const, Mul


def uniform(name, k=2):
    return Disturbance(name, tuple(Fraction(1, k) for _ in range(k)))


def expr_model(name, equations, k=2):
    """Model from a list of (var_name, expr); noises named U1.. own each slot."""
    variables = tuple(
        Variable(vn, uniform(f"U{i + 1}", k), ExprEquation(e))
        for i, (vn, e) in enumerate(equations)
    )
    return Scm(modulus=k, variables=variables, name=name)


@pytest.fixture
def fig1():
    return fixture("neal-fig1")


@pytest.fixture
def chain3():
    return fixture("chain3")


@pytest.fixture
def collider3():
    return fixture("collider3")


@pytest.fixture
def mirror_pair():
    # X1 = X2, X2 = X1: both constant states solve it, for every noise draw.
    return expr_model("mirror", [("X1", Var(1)), ("X2", Var(0))])


@pytest.fixture
def contradiction_pair():
    # X1 = X2+1, X2 = X1: substitution forces X1 = X1+1, so no solution.
    return expr_model("contradiction", [("X1", Add(Var(1), Const(1))), ("X2", Var(0))])


@pytest.fixture
def benign_cycle():
    # X2 reads X3 twice, so its value is constant 0 mod 2 despite the 2-cycle.
    return expr_model(
        "benign",
        [
            ("X1", OwnU()),
            ("X2", Add(Var(2), Var(2))),
            ("X3", Add(Var(1), OwnU())),
        ],
    )
