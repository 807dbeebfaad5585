"""Iterative update dynamics over structural models.

A schedule is either simultaneous (every variable recomputed from the
pre-sweep state) or a fixed sequential order repeated across sweeps, with
each sequential update immediately visible to later updates in the same
sweep.  A schedule is valid for a model when, for every noise draw and
every initial state, repeated sweeps reach the model's unique solution.

Convergence checks enumerate the whole state space, so they pack states
into base-k integers and precompute per-variable value tables; the public
``sweep`` function stays a direct, table-free reference implementation
that witnesses are replayed against.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations, product

from .scm import (
    ModelTooLargeError,
    NonUniqueModelError,
    Scm,
    check_uniqueness,
    eval_equation,
    iter_noise_assignments,
    unique_solution,
)

DYNAMICS_STATE_CAP = 1 << 16
EXHAUSTIVE_ORDER_CAP = 8


@dataclass(frozen=True)
class Schedule:
    """Simultaneous (``order is None``) or one fixed sequential update order."""

    order: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.order is not None:
            order = tuple(int(i) for i in self.order)
            if len(set(order)) != len(order):
                raise ValueError("sequential order must not repeat variables")
            object.__setattr__(self, "order", order)

    @classmethod
    def simultaneous(cls) -> "Schedule":
        return cls(None)

    @classmethod
    def sequential(cls, order) -> "Schedule":
        return cls(tuple(order))

    @property
    def is_simultaneous(self) -> bool:
        return self.order is None

    def describe(self, names=None) -> str:
        if self.order is None:
            return "simultaneous"
        if names is None:
            return ",".join(str(i) for i in self.order)
        return ",".join(names[i] for i in self.order)


@dataclass(frozen=True)
class ConvergenceReport:
    """Verdict of a whole-state-space convergence check.

    On failure, ``witness_u``/``witness_x0`` identify the lexicographically
    first noise draw and initial state whose trajectory never reaches the
    solution, and ``cycle`` is the state loop it falls into.
    """

    converges: bool
    witness_u: tuple[int, ...] | None = None
    witness_x0: tuple[int, ...] | None = None
    cycle: tuple[tuple[int, ...], ...] = ()


def _check_schedule(scm: Scm, s: Schedule):
    if s.order is not None and sorted(s.order) != list(range(scm.n)):
        raise ValueError(
            f"sequential order must be a permutation of all {scm.n} variable ids"
        )


def sweep(scm: Scm, x, u, s: Schedule) -> tuple[int, ...]:
    """One full application of the schedule: every variable updated once."""
    _check_schedule(scm, s)
    x = tuple(int(v) for v in x)
    u = tuple(int(v) for v in u)
    if s.order is None:
        return tuple(eval_equation(scm, i, u[i], x) for i in range(scm.n))
    cur = list(x)
    for i in s.order:
        cur[i] = eval_equation(scm, i, u[i], cur)
    return tuple(cur)


# --- packed engine --------------------------------------------------------


@lru_cache(maxsize=32)
def _packed_tables(scm: Scm):
    """Per-variable value tables over packed states, plus digit weights.

    States pack as sum(x[i] * k^(n-1-i)), so packed integer order equals
    lexicographic tuple order.
    """
    k, n = scm.modulus, scm.n
    if k ** n > DYNAMICS_STATE_CAP:
        raise ModelTooLargeError(
            f"dynamics checks need the full state space; {k}^{n} exceeds {DYNAMICS_STATE_CAP}"
        )
    states = list(product(range(k), repeat=n))
    tables = tuple(
        tuple(tuple(eval_equation(scm, i, uv, x) for x in states) for uv in range(k))
        for i in range(n)
    )
    weights = tuple(k ** (n - 1 - i) for i in range(n))
    return tables, weights


def _pack(x, weights) -> int:
    return sum(v * w for v, w in zip(x, weights))


def _unpack(s: int, k: int, n: int) -> tuple[int, ...]:
    out = [0] * n
    for i in range(n - 1, -1, -1):
        out[i] = s % k
        s //= k
    return tuple(out)


def _sweep_map(scm: Scm, tables, weights, u, order) -> list[int]:
    """next-state for every packed state under one schedule and noise draw."""
    k, n = scm.modulus, scm.n
    size = k ** n
    rows = [tables[i][u[i]] for i in range(n)]
    nxt = [0] * size
    if order is None:
        for s in range(size):
            t = 0
            for i in range(n):
                t += rows[i][s] * weights[i]
            nxt[s] = t
    else:
        for s in range(size):
            cur = s
            for i in order:
                w = weights[i]
                d = (cur // w) % k
                cur += (rows[i][cur] - d) * w
            nxt[s] = cur
    return nxt


def _reaches_solution(nxt: list[int], sol: int) -> bytearray:
    """Flag, per packed state, whether iterating ``nxt`` ends at ``sol``."""
    size = len(nxt)
    preds = [[] for _ in range(size)]
    for s, t in enumerate(nxt):
        preds[t].append(s)
    seen = bytearray(size)
    seen[sol] = 1
    stack = [sol]
    while stack:
        t = stack.pop()
        for s in preds[t]:
            if not seen[s]:
                seen[s] = 1
                stack.append(s)
    return seen


def _extract_cycle(nxt: list[int], start: int) -> tuple[list[int], int]:
    """Walk from ``start`` until a state repeats; return (cycle states, entry step)."""
    visited: dict[int, int] = {}
    path = []
    s = start
    while s not in visited:
        visited[s] = len(path)
        path.append(s)
        s = nxt[s]
    return path[visited[s]:], visited[s]


def _require_unique(scm: Scm):
    report = check_uniqueness(scm)
    if not report.unique:
        raise NonUniqueModelError(report)


def _converges(scm: Scm, tables, weights, u, order, want_witness: bool):
    """Check one (schedule, noise draw); returns None or a failure witness."""
    sol = _pack(unique_solution(scm, u), weights)
    nxt = _sweep_map(scm, tables, weights, u, order)
    assert nxt[sol] == sol, "solution must be a fixed point of every sweep"
    seen = _reaches_solution(nxt, sol)
    size = len(nxt)
    if len(seen) == sum(seen):
        return None
    x0 = seen.index(0)
    if not want_witness:
        return (u, x0, ())
    cycle, _ = _extract_cycle(nxt, x0)
    k, n = scm.modulus, scm.n
    return (u, x0, tuple(_unpack(s, k, n) for s in cycle))


def schedule_converges(scm: Scm, s: Schedule) -> ConvergenceReport:
    """Decide whether a schedule reaches the solution from every start.

    For every effective noise draw (inert noises pinned to 0) the check
    iterates sweeps from every initial state.  Sweeps are deterministic on a
    finite state space, so each trajectory either reaches the solution fixed
    point or falls into some other loop; the first failing draw and start,
    in lexicographic order, are reported with their loop.

    The model must be uniquely solvable; ``NonUniqueModelError`` carries the
    offending report otherwise.
    """
    _check_schedule(scm, s)
    _require_unique(scm)
    tables, weights = _packed_tables(scm)
    for u in iter_noise_assignments(scm):
        hit = _converges(scm, tables, weights, u, s.order, want_witness=True)
        if hit is not None:
            u_w, x0, cycle = hit
            return ConvergenceReport(
                converges=False,
                witness_u=u_w,
                witness_x0=_unpack(x0, scm.modulus, scm.n),
                cycle=cycle,
            )
    return ConvergenceReport(converges=True)


def _candidate_orders(scm: Scm, sample_count: int | None, seed: int):
    n = scm.n
    if n <= EXHAUSTIVE_ORDER_CAP and sample_count is None:
        yield from permutations(range(n))
        return
    if sample_count is None:
        raise ModelTooLargeError(
            f"{n}! sequential orders exceed the exhaustive cap of "
            f"{EXHAUSTIVE_ORDER_CAP}!; pass sample_count to search a random subset"
        )
    rng = random.Random(seed)
    for _ in range(sample_count):
        order = list(range(n))
        rng.shuffle(order)
        yield tuple(order)


def find_valid_schedule(
    scm: Scm,
    sample_count: int | None = None,
    seed: int = 0,
) -> Schedule | None:
    """Search for a schedule that converges from every noise draw and start.

    Sequential orders are tried in lexicographic order, then the
    simultaneous schedule; the first success is returned, or None when the
    space is exhausted.  Above the exhaustive cap a seeded random sample of
    orders is searched instead (when requested), where None only means the
    sample was inconclusive.
    """
    _require_unique(scm)
    tables, weights = _packed_tables(scm)
    draws = list(iter_noise_assignments(scm))

    def valid(order) -> bool:
        return all(
            _converges(scm, tables, weights, u, order, want_witness=False) is None
            for u in draws
        )

    for order in _candidate_orders(scm, sample_count, seed):
        if valid(order):
            return Schedule.sequential(order)
    if valid(None):
        return Schedule.simultaneous()
    return None
