"""Discrete structural models with feedback.

Each observable variable carries one exogenous noise term with an exact
rational distribution and one structural equation over its own noise and
other variables.  Equations are either modular-arithmetic expression trees
or explicit lookup tables.  Solving is brute-force enumeration over the
full state space, which is the defining semantics; an agreeing
forward-substitution shortcut is used when the parent graph is acyclic.

Assignments are plain tuples indexed by variable id, used both for
observable states and noise draws.  All probability arithmetic uses
``fractions.Fraction``; no floats occur anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import product
from typing import Iterator, Union

from .graphs import DiGraph, is_acyclic, topological_order

DEFAULT_STATE_CAP = 1 << 20


class ModelTooLargeError(Exception):
    """State space exceeds the enumeration cap."""


class NonUniqueModelError(Exception):
    """Operation requires a model whose equations pin down a single state per noise draw."""

    def __init__(self, report: "UniquenessReport"):
        self.report = report
        w = report.witness_u
        super().__init__(
            f"model is not uniquely solvable: noise assignment {w} admits "
            f"{report.solution_count} solutions"
        )


# --- equation expression trees -------------------------------------------


@dataclass(frozen=True)
class Const:
    value: int


@dataclass(frozen=True)
class OwnU:
    """The owning variable's noise term."""


@dataclass(frozen=True)
class Var:
    target: int


@dataclass(frozen=True)
class Add:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Mul:
    left: "Expr"
    right: "Expr"


Expr = Union[Const, OwnU, Var, Add, Mul]


def expr_vars(expr: Expr) -> frozenset[int]:
    """Ids of all variables referenced in ``expr``."""
    if isinstance(expr, Var):
        return frozenset((expr.target,))
    if isinstance(expr, (Add, Mul)):
        return expr_vars(expr.left) | expr_vars(expr.right)
    return frozenset()


def expr_uses_own_u(expr: Expr) -> bool:
    if isinstance(expr, OwnU):
        return True
    if isinstance(expr, (Add, Mul)):
        return expr_uses_own_u(expr.left) or expr_uses_own_u(expr.right)
    return False


def eval_expr(expr: Expr, modulus: int, u_val: int, x) -> int:
    if isinstance(expr, Const):
        return expr.value % modulus
    if isinstance(expr, OwnU):
        return u_val
    if isinstance(expr, Var):
        return x[expr.target]
    if isinstance(expr, Add):
        return (eval_expr(expr.left, modulus, u_val, x) + eval_expr(expr.right, modulus, u_val, x)) % modulus
    if isinstance(expr, Mul):
        return (eval_expr(expr.left, modulus, u_val, x) * eval_expr(expr.right, modulus, u_val, x)) % modulus
    raise TypeError(f"not an expression node: {expr!r}")


# --- equations, noises, models -------------------------------------------


@dataclass(frozen=True)
class ExprEquation:
    expr: Expr

    @property
    def parents(self) -> tuple[int, ...]:
        return tuple(sorted(expr_vars(self.expr)))


@dataclass(frozen=True)
class TableEquation:
    """Explicit function table.

    ``values`` lists the output for every combination of own-noise value and
    parent values: the noise value varies slowest, then parents by ascending
    variable id, each coordinate running lexicographically through
    ``0 .. k-1``.
    """

    parents: tuple[int, ...]
    values: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "parents", tuple(int(p) for p in self.parents))
        object.__setattr__(self, "values", tuple(int(v) for v in self.values))


Equation = Union[ExprEquation, TableEquation]


@dataclass(frozen=True)
class Disturbance:
    """Exogenous noise term with an exact rational distribution over 0..k-1."""

    name: str
    probs: tuple[Fraction, ...]

    def __post_init__(self):
        probs = tuple(Fraction(p) for p in self.probs)
        if any(p < 0 for p in probs):
            raise ValueError(f"disturbance {self.name}: negative probability")
        if sum(probs) != 1:
            raise ValueError(f"disturbance {self.name}: probabilities sum to {sum(probs)}, not 1")
        object.__setattr__(self, "probs", probs)


@dataclass(frozen=True)
class Variable:
    name: str
    noise: Disturbance
    equation: Equation


@dataclass(frozen=True)
class Scm:
    """An immutable system of structural equations with feedback allowed.

    All variables share the modulus ``k`` and take values in ``0 .. k-1``.
    The parent graph is derived from the equations: expression equations
    contribute their variable references, table equations their declared
    parent lists.  Self-references are rejected.
    """

    modulus: int
    variables: tuple[Variable, ...]
    name: str = "model"

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        k, n = self.modulus, len(self.variables)
        if k < 2:
            raise ValueError("modulus must be at least 2")
        seen = set()
        for v in self.variables:
            for nm in (v.name, v.noise.name):
                if nm in seen:
                    raise ValueError(f"duplicate name {nm!r}")
                seen.add(nm)
        for i, v in enumerate(self.variables):
            if len(v.noise.probs) != k:
                raise ValueError(f"{v.name}: noise has {len(v.noise.probs)} probabilities, expected {k}")
            eq = v.equation
            if isinstance(eq, ExprEquation):
                self._check_expr(eq.expr, i)
            elif isinstance(eq, TableEquation):
                if list(eq.parents) != sorted(set(eq.parents)):
                    raise ValueError(f"{v.name}: table parents must be distinct and ascending")
                for p in eq.parents:
                    if not 0 <= p < n:
                        raise ValueError(f"{v.name}: parent id {p} out of range")
                    if p == i:
                        raise ValueError(f"{v.name}: equation references its own variable")
                want = k ** (1 + len(eq.parents))
                if len(eq.values) != want:
                    raise ValueError(f"{v.name}: table has {len(eq.values)} entries, expected {want}")
                if any(not 0 <= val < k for val in eq.values):
                    raise ValueError(f"{v.name}: table value out of range")
            else:
                raise TypeError(f"{v.name}: unknown equation kind {eq!r}")

    def _check_expr(self, expr: Expr, owner: int):
        if isinstance(expr, Const):
            if not 0 <= expr.value < self.modulus:
                raise ValueError(f"constant {expr.value} out of range 0..{self.modulus - 1}")
        elif isinstance(expr, Var):
            if not 0 <= expr.target < len(self.variables):
                raise ValueError(f"variable id {expr.target} out of range")
            if expr.target == owner:
                raise ValueError(f"{self.variables[owner].name}: equation references its own variable")
        elif isinstance(expr, (Add, Mul)):
            self._check_expr(expr.left, owner)
            self._check_expr(expr.right, owner)

    @property
    def n(self) -> int:
        return len(self.variables)

    @cached_property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    @cached_property
    def _name_to_id(self) -> dict:
        return {v.name: i for i, v in enumerate(self.variables)}

    def index(self, name: str) -> int:
        try:
            return self._name_to_id[name]
        except KeyError:
            raise ValueError(f"unknown variable {name!r}") from None

    @cached_property
    def graph(self) -> DiGraph:
        edges = set()
        for i, v in enumerate(self.variables):
            eq = v.equation
            parents = expr_vars(eq.expr) if isinstance(eq, ExprEquation) else eq.parents
            for p in parents:
                edges.add((p, i))
        return DiGraph(self.n, frozenset(edges))

    @cached_property
    def effective_noise_ids(self) -> tuple[int, ...]:
        """Ids whose own equation actually depends on its noise term.

        A table equation counts as noise-free when all its noise slices are
        identical; such noises provably cannot influence any observable.
        """
        out = []
        for i, v in enumerate(self.variables):
            eq = v.equation
            if isinstance(eq, ExprEquation):
                if expr_uses_own_u(eq.expr):
                    out.append(i)
            else:
                base = len(eq.values) // self.modulus
                first = eq.values[:base]
                if any(eq.values[u * base:(u + 1) * base] != first for u in range(1, self.modulus)):
                    out.append(i)
        return tuple(out)


@dataclass(frozen=True)
class UniquenessReport:
    """Outcome of checking that every noise draw admits exactly one solution.

    On failure, ``witness_u`` is the lexicographically first offending noise
    assignment, with its solution count and up to two of its solutions.
    """

    unique: bool
    witness_u: tuple[int, ...] | None = None
    solution_count: int | None = None
    solutions: tuple[tuple[int, ...], ...] = ()


# --- evaluation and solving ----------------------------------------------


def _check_value(scm: Scm, val: int, what: str):
    if not 0 <= val < scm.modulus:
        raise ValueError(f"{what} value {val} out of range 0..{scm.modulus - 1}")


def _check_assignment(scm: Scm, a, what: str) -> tuple[int, ...]:
    a = tuple(int(v) for v in a)
    if len(a) != scm.n:
        raise ValueError(f"{what} assignment has length {len(a)}, expected {scm.n}")
    for v in a:
        _check_value(scm, v, what)
    return a


def _check_state_cap(scm: Scm, cap: int):
    if scm.modulus ** scm.n > cap:
        raise ModelTooLargeError(
            f"state space {scm.modulus}^{scm.n} exceeds cap {cap}"
        )


def eval_equation(scm: Scm, var: int, u_val: int, x) -> int:
    """Output of ``var``'s equation given its noise value and a full state."""
    if not 0 <= var < scm.n:
        raise ValueError(f"variable id {var} out of range")
    _check_value(scm, u_val, "noise")
    eq = scm.variables[var].equation
    if isinstance(eq, ExprEquation):
        return eval_expr(eq.expr, scm.modulus, u_val, x)
    idx = u_val
    for p in eq.parents:
        idx = idx * scm.modulus + x[p]
    return eq.values[idx]


def satisfies(scm: Scm, x, u) -> bool:
    """True iff ``x`` solves every equation under noise draw ``u``."""
    return all(x[i] == eval_equation(scm, i, u[i], x) for i in range(scm.n))


def consistent_solutions(scm: Scm, u, cap: int = DEFAULT_STATE_CAP) -> list[tuple[int, ...]]:
    """All states satisfying every equation under ``u``, in lexicographic order.

    Enumerates the full ``k^n`` candidate space; this is the reference
    semantics that everything faster must agree with.
    """
    u = _check_assignment(scm, u, "noise")
    _check_state_cap(scm, cap)
    return [x for x in product(range(scm.modulus), repeat=scm.n) if satisfies(scm, x, u)]


def forward_solution(scm: Scm, u) -> tuple[int, ...]:
    """Solve an acyclic model by substitution in topological order."""
    u = _check_assignment(scm, u, "noise")
    order = topological_order(scm.graph)
    if order is None:
        raise ValueError("forward substitution requires an acyclic parent graph")
    x = [0] * scm.n
    for i in order:
        x[i] = eval_equation(scm, i, u[i], x)
    return tuple(x)


def iter_noise_assignments(scm: Scm) -> Iterator[tuple[int, ...]]:
    """Full noise assignments, zero at every id whose noise is provably inert.

    Enumeration is lexicographic over the effective ids in ascending
    position, which also yields the lexicographically smallest full
    representative of each equivalence class first.
    """
    eff = scm.effective_noise_ids
    base = [0] * scm.n
    for combo in product(range(scm.modulus), repeat=len(eff)):
        u = list(base)
        for pos, val in zip(eff, combo):
            u[pos] = val
        yield tuple(u)


def noise_weight(scm: Scm, u) -> Fraction:
    """Probability of the effective coordinates of ``u`` (inert ones marginalized)."""
    w = Fraction(1)
    for i in scm.effective_noise_ids:
        w *= scm.variables[i].noise.probs[u[i]]
    return w


@lru_cache(maxsize=64)
def check_uniqueness(scm: Scm, cap: int = DEFAULT_STATE_CAP) -> UniquenessReport:
    """Verify that every noise draw admits exactly one consistent state.

    Only effective noise coordinates are enumerated; inert ones cannot
    change the solution set.  The witness on failure is the
    lexicographically first failing full noise assignment.
    """
    _check_state_cap(scm, cap)
    for u in iter_noise_assignments(scm):
        sols = consistent_solutions(scm, u, cap)
        if len(sols) != 1:
            return UniquenessReport(
                unique=False,
                witness_u=u,
                solution_count=len(sols),
                solutions=tuple(sols[:2]),
            )
    return UniquenessReport(unique=True)


@lru_cache(maxsize=4096)
def unique_solution(scm: Scm, u: tuple[int, ...], cap: int = DEFAULT_STATE_CAP) -> tuple[int, ...]:
    """The single consistent state for ``u``; raises if there is not exactly one.

    Uses forward substitution when the parent graph is acyclic (always
    unique there, and property-tested to agree with enumeration).
    """
    if is_acyclic(scm.graph):
        return forward_solution(scm, u)
    sols = consistent_solutions(scm, u, cap)
    if len(sols) != 1:
        raise NonUniqueModelError(
            UniquenessReport(False, tuple(u), len(sols), tuple(sols[:2]))
        )
    return sols[0]


def induced_joint(scm: Scm, cap: int = DEFAULT_STATE_CAP):
    """Exact distribution over observables induced by the noise distributions.

    Each noise draw contributes its probability to the single state solving
    the equations, so the support holds only realized states and the masses
    sum to exactly 1.  Requires a uniquely solvable model; otherwise raises
    ``NonUniqueModelError`` carrying the uniqueness report.
    """
    from .dist import JointDist

    if not is_acyclic(scm.graph):
        report = check_uniqueness(scm, cap)
        if not report.unique:
            raise NonUniqueModelError(report)
    mass: dict[tuple[int, ...], Fraction] = {}
    for u in iter_noise_assignments(scm):
        x = unique_solution(scm, u, cap)
        mass[x] = mass.get(x, Fraction(0)) + noise_weight(scm, u)
    return JointDist(tuple(range(scm.n)), scm.modulus, mass)
