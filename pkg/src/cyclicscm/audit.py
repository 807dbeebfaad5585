"""Soundness auditing: does graphical separation imply exact independence?

The audit enumerates separation queries over a model, decides each one
graphically and against the exact induced distribution, and flags every
query where the graph promises an independence the distribution does not
deliver.  A seeded miner generates random feedback models and keeps the
ones exhibiting at least one such violation.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations

from .dist import ci_holds
from .generate import random_scm
from .graphs import SepQuery, d_separated
from .scm import Scm, check_uniqueness, induced_joint


@dataclass(frozen=True)
class AuditRecord:
    """One audited query with both verdicts."""

    query: SepQuery
    dsep: bool
    ci: bool

    @property
    def violation(self) -> bool:
        return self.dsep and not self.ci


@dataclass(frozen=True)
class MinerConfig:
    """Knobs for the counterexample miner; results are deterministic per seed."""

    var_count: int
    modulus: int
    density: float
    count: int
    seed: int
    max_cond: int = 2

    def __post_init__(self):
        if self.var_count < 2:
            raise ValueError("var_count must be at least 2")
        if self.count < 0:
            raise ValueError("count must be non-negative")
        if not 0 <= self.density <= 1:
            raise ValueError("density must lie in [0, 1]")


@dataclass(frozen=True)
class MineFinding:
    model: Scm
    violations: tuple[AuditRecord, ...]


def _subsets(ids, max_size):
    for size in range(1, max_size + 1):
        yield from combinations(ids, size)


def enumerate_queries(scm: Scm, max_cond: int, max_set: int = 1) -> list[SepQuery]:
    """All canonical queries with bounded set sizes, in a fixed order.

    Defaults to singleton a/b pairs (a's id below b's); conditioning sets
    range over subsets of the remaining ids up to ``max_cond``, smaller
    first, lexicographic within each size.  ``max_set`` raises the a/b set
    size; pairs are canonicalized by min(a) < min(b).
    """
    if max_cond < 0:
        raise ValueError("max_cond must be non-negative")
    if max_set < 1:
        raise ValueError("max_set must be at least 1")
    ids = range(scm.n)
    queries = []
    for a in _subsets(ids, max_set):
        rest_a = [v for v in ids if v not in a]
        for b in _subsets(rest_a, max_set):
            if min(a) > min(b):
                continue
            rest = [v for v in rest_a if v not in b]
            for size in range(0, max_cond + 1):
                for c in combinations(rest, size):
                    queries.append(SepQuery(frozenset(a), frozenset(b), frozenset(c)))
    return queries


def audit_soundness(scm: Scm, max_cond: int, max_set: int = 1) -> list[AuditRecord]:
    """Audit every enumerated query; requires a uniquely solvable model.

    Records come back in enumeration order.  Only one direction is under
    test: separation without independence is a violation, the reverse is
    not (the graphical test is not claimed complete).
    """
    jd = induced_joint(scm)
    g = scm.graph
    return [
        AuditRecord(query=q, dsep=d_separated(g, q), ci=ci_holds(jd, q))
        for q in enumerate_queries(scm, max_cond, max_set)
    ]


def violations(records) -> list[AuditRecord]:
    return [r for r in records if r.violation]


def mine(cfg: MinerConfig) -> list[MineFinding]:
    """Generate seeded random models and keep those with audit violations.

    Models failing the uniqueness requirement are discarded.  Output order
    follows generation order and is reproducible for a fixed config.
    """
    rng = random.Random(cfg.seed)
    findings = []
    for idx in range(cfg.count):
        model = random_scm(
            cfg.var_count,
            cfg.modulus,
            cfg.density,
            rng,
            acyclic=False,
            name=f"mined-s{cfg.seed}-{idx}",
        )
        if not check_uniqueness(model).unique:
            continue
        bad = violations(audit_soundness(model, cfg.max_cond))
        if bad:
            findings.append(MineFinding(model=model, violations=tuple(bad)))
    return findings
