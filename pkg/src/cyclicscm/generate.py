"""Seeded random model generation for audits and property tests.

Generation order is fixed (variables ascending, parent candidates
ascending, then table entries), so a given ``random.Random`` state always
produces the same model.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .scm import Disturbance, Scm, TableEquation, Variable


def random_scm(
    var_count: int,
    modulus: int,
    density: float,
    rng: random.Random,
    acyclic: bool = False,
    name: str = "random",
) -> Scm:
    """Random table-equation model with uniform noises.

    Each candidate parent is kept with probability ``density``.  With
    ``acyclic`` the candidates for variable i are 0..i-1, so variable ids
    are already a topological order; otherwise every other variable is a
    candidate and feedback cycles can occur.
    """
    if var_count < 2:
        raise ValueError("need at least two variables")
    if not 0 <= density <= 1:
        raise ValueError("density must lie in [0, 1]")
    uniform = tuple(Fraction(1, modulus) for _ in range(modulus))
    variables = []
    for i in range(var_count):
        candidates = range(i) if acyclic else (j for j in range(var_count) if j != i)
        parents = tuple(j for j in candidates if rng.random() < density)
        values = tuple(
            rng.randrange(modulus) for _ in range(modulus ** (1 + len(parents)))
        )
        variables.append(
            Variable(
                name=f"X{i + 1}",
                noise=Disturbance(f"U{i + 1}", uniform),
                equation=TableEquation(parents, values),
            )
        )
    return Scm(modulus=modulus, variables=tuple(variables), name=name)
