"""Exact rational joint distributions and the conditional-independence oracle.

Masses are ``fractions.Fraction`` values keyed by full assignment tuples;
only nonzero entries are stored and every comparison is exact.  The CI test
uses cross-multiplied equalities so no division (and no zero-denominator
case) ever occurs.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping

from .graphs import SepQuery

CiQuery = SepQuery


class UndefinedConditionalError(Exception):
    """Conditioning event has probability zero."""


@dataclass
class JointDist:
    """Exact probability mass over assignments to ``var_ids``.

    ``mass`` maps value tuples (aligned with ``var_ids``) to positive
    Fractions summing to exactly 1.  Treated as immutable.
    """

    var_ids: tuple[int, ...]
    modulus: int
    mass: Mapping[tuple[int, ...], Fraction]

    def __post_init__(self):
        self.var_ids = tuple(int(v) for v in self.var_ids)
        if len(set(self.var_ids)) != len(self.var_ids):
            raise ValueError("duplicate variable ids")
        self.mass = {tuple(k): Fraction(p) for k, p in self.mass.items()}
        for key, p in self.mass.items():
            if len(key) != len(self.var_ids):
                raise ValueError(f"assignment {key} does not cover {len(self.var_ids)} variables")
            if any(not 0 <= v < self.modulus for v in key):
                raise ValueError(f"assignment {key} out of domain")
            if p <= 0:
                raise ValueError(f"stored mass must be positive, got {p} at {key}")
        if sum(self.mass.values(), Fraction(0)) != 1:
            raise ValueError("masses must sum to exactly 1")

    def items_sorted(self):
        return sorted(self.mass.items())

    def support_size(self) -> int:
        return len(self.mass)


def _positions(jd: JointDist, ids: Iterable[int]) -> list[int]:
    where = {v: i for i, v in enumerate(jd.var_ids)}
    out = []
    for v in ids:
        if v not in where:
            raise ValueError(f"variable id {v} not in distribution over {jd.var_ids}")
        out.append(where[v])
    return out


def _project(jd: JointDist, ids: tuple[int, ...]) -> dict[tuple[int, ...], Fraction]:
    # Mass over `ids` in the given order; empty ids gives {(): 1}.
    pos = _positions(jd, ids)
    out = defaultdict(Fraction)
    for key, p in jd.mass.items():
        out[tuple(key[i] for i in pos)] += p
    return dict(out)


def marginal(jd: JointDist, vars: Iterable[int]) -> JointDist:
    """Exact marginal over a nonempty subset of the distribution's variables."""
    ids = tuple(sorted(set(int(v) for v in vars)))
    if not ids:
        raise ValueError("marginal requires at least one variable")
    return JointDist(ids, jd.modulus, _project(jd, ids))


def prob(jd: JointDist, event: Mapping[int, int], given: Mapping[int, int] | None = None) -> Fraction:
    """Exact conditional probability P(event | given).

    ``event`` and ``given`` are partial assignments over disjoint variable
    sets; either may be empty (P of an empty event is 1).  Conditioning on a
    zero-probability event raises ``UndefinedConditionalError`` rather than
    returning a value.
    """
    given = dict(given or {})
    event = dict(event)
    if set(event) & set(given):
        raise ValueError("event and conditioning variables overlap")
    for d in (event, given):
        _positions(jd, d.keys())
        for v, val in d.items():
            if not 0 <= val < jd.modulus:
                raise ValueError(f"value {val} for variable {v} out of domain")

    def total(constraint: dict) -> Fraction:
        want = {jd.var_ids.index(v): val for v, val in constraint.items()}
        acc = Fraction(0)
        for key, p in jd.mass.items():
            if all(key[i] == val for i, val in want.items()):
                acc += p
        return acc

    p_given = total(given)
    if p_given == 0:
        raise UndefinedConditionalError(f"conditioning event {given} has probability 0")
    p_both = total({**event, **given})
    return p_both / p_given


def ci_holds(jd: JointDist, q: CiQuery) -> bool:
    """Exact conditional independence of ``q.a`` and ``q.b`` given ``q.c``.

    Holds iff for every conditioning assignment with positive mass and every
    pair of a-/b-assignments, P(a,b,c)*P(c) == P(a,c)*P(b,c) as exact
    rationals.  Conditioning cells with zero mass are vacuously fine.
    """
    _positions(jd, q.a | q.b | q.c)
    a_t = tuple(sorted(q.a))
    b_t = tuple(sorted(q.b))
    c_t = tuple(sorted(q.c))
    k = jd.modulus
    p_c = _project(jd, c_t)
    p_ac = _project(jd, a_t + c_t)
    p_bc = _project(jd, b_t + c_t)
    p_abc = _project(jd, a_t + b_t + c_t)
    zero = Fraction(0)
    for cv in product(range(k), repeat=len(c_t)):
        pc = p_c.get(cv, zero)
        if pc == 0:
            continue
        for av in product(range(k), repeat=len(a_t)):
            pac = p_ac.get(av + cv, zero)
            for bv in product(range(k), repeat=len(b_t)):
                if p_abc.get(av + bv + cv, zero) * pc != pac * p_bc.get(bv + cv, zero):
                    return False
    return True
