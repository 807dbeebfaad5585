"""Built-in teaching and regression models."""

from __future__ import annotations

from fractions import Fraction

from .scm import Add, Const, Disturbance, ExprEquation, Mul, OwnU, Scm, Var, Variable


def _uniform(name: str, k: int = 2) -> Disturbance:
    return Disturbance(name, tuple(Fraction(1, k) for _ in range(k)))


def _add(*terms):
    out = terms[0]
    for t in terms[1:]:
        out = Add(out, t)
    return out


def _neal_fig1() -> Scm:
    # Seven binary variables; X2<->X3 and X6<->X7 form feedback pairs, and
    # the X6/X7 block reads the parity of X2, X4, X5.
    s = _add(Var(1), Var(3), Var(4))
    return Scm(
        modulus=2,
        name="neal-fig1",
        variables=(
            Variable("X1", _uniform("U1"), ExprEquation(OwnU())),
            Variable("X2", _uniform("U2"), ExprEquation(_add(Var(0), Var(2)))),
            Variable("X3", _uniform("U3"), ExprEquation(_add(Var(0), Var(1)))),
            Variable("X4", _uniform("U4"), ExprEquation(OwnU())),
            Variable("X5", _uniform("U5"), ExprEquation(OwnU())),
            Variable("X6", _uniform("U6"), ExprEquation(Mul(s, Add(Var(6), Const(1))))),
            Variable("X7", _uniform("U7"), ExprEquation(Mul(s, Var(5)))),
        ),
    )


def _collider3() -> Scm:
    return Scm(
        modulus=2,
        name="collider3",
        variables=(
            Variable("X1", _uniform("U1"), ExprEquation(OwnU())),
            Variable("X2", _uniform("U2"), ExprEquation(OwnU())),
            Variable("X3", _uniform("U3"), ExprEquation(_add(Var(0), Var(1), OwnU()))),
        ),
    )


def _chain3() -> Scm:
    return Scm(
        modulus=2,
        name="chain3",
        variables=(
            Variable("X1", _uniform("U1"), ExprEquation(OwnU())),
            Variable("X2", _uniform("U2"), ExprEquation(Add(Var(0), OwnU()))),
            Variable("X3", _uniform("U3"), ExprEquation(Add(Var(1), OwnU()))),
        ),
    )


_FIXTURES = {
    "neal-fig1": _neal_fig1,
    "collider3": _collider3,
    "chain3": _chain3,
}


def fixture_names() -> tuple[str, ...]:
    return tuple(sorted(_FIXTURES))


def fixture(name: str) -> Scm:
    """Return a built-in model by name; unknown names list the options."""
    try:
        builder = _FIXTURES[name]
    except KeyError:
        available = ", ".join(fixture_names())
        raise ValueError(f"unknown fixture {name!r}; available: {available}") from None
    return builder()
