"""Directed graphs (cycles allowed) and the graphical separation test.

Separation between variable sets is decided by restricting the graph to
the query's ancestor set, marrying co-parents, dropping edge directions,
and checking undirected connectivity.  All functions here are pure and
all graph objects immutable, so shared graphs are safe to query from
multiple threads.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Iterable


@dataclass(frozen=True)
class DiGraph:
    """Directed graph on nodes ``0 .. node_count-1``.

    Edges are (parent, child) pairs.  Directed cycles, including 2-cycles,
    are permitted; self-loops and out-of-range endpoints are rejected.
    Parallel edges collapse because the edge set is a set.
    """

    node_count: int
    edges: frozenset = frozenset()

    def __post_init__(self):
        if self.node_count < 0:
            raise ValueError("node_count must be non-negative")
        edges = frozenset((int(p), int(c)) for p, c in self.edges)
        for p, c in edges:
            if p == c:
                raise ValueError(f"self-loop on node {p}")
            if not (0 <= p < self.node_count and 0 <= c < self.node_count):
                raise ValueError(f"edge ({p}, {c}) out of range for {self.node_count} nodes")
        object.__setattr__(self, "edges", edges)

    @cached_property
    def parent_sets(self) -> tuple[frozenset[int], ...]:
        parents = [set() for _ in range(self.node_count)]
        for p, c in self.edges:
            parents[c].add(p)
        return tuple(frozenset(s) for s in parents)

    @cached_property
    def child_sets(self) -> tuple[frozenset[int], ...]:
        children = [set() for _ in range(self.node_count)]
        for p, c in self.edges:
            children[p].add(c)
        return tuple(frozenset(s) for s in children)


@dataclass(frozen=True)
class UGraph:
    """Undirected graph on nodes ``0 .. node_count-1``; no self-loops."""

    node_count: int
    edges: frozenset = frozenset()

    def __post_init__(self):
        if self.node_count < 0:
            raise ValueError("node_count must be non-negative")
        norm = set()
        for i, j in self.edges:
            i, j = int(i), int(j)
            if i == j:
                raise ValueError(f"self-loop on node {i}")
            if not (0 <= i < self.node_count and 0 <= j < self.node_count):
                raise ValueError(f"edge ({i}, {j}) out of range for {self.node_count} nodes")
            norm.add((min(i, j), max(i, j)))
        object.__setattr__(self, "edges", frozenset(norm))

    @cached_property
    def adjacency(self) -> tuple[frozenset[int], ...]:
        adj = [set() for _ in range(self.node_count)]
        for i, j in self.edges:
            adj[i].add(j)
            adj[j].add(i)
        return tuple(frozenset(s) for s in adj)


@dataclass(frozen=True)
class SepQuery:
    """A separation (or conditional-independence) query over disjoint node sets.

    ``a`` and ``b`` must be nonempty; ``c`` may be empty.  Overlapping sets
    are rejected outright rather than given an ad-hoc meaning.
    """

    a: frozenset
    b: frozenset
    c: frozenset = frozenset()

    def __post_init__(self):
        a = frozenset(int(v) for v in self.a)
        b = frozenset(int(v) for v in self.b)
        c = frozenset(int(v) for v in self.c)
        if not a or not b:
            raise ValueError("query sets a and b must be nonempty")
        if a & b or a & c or b & c:
            raise ValueError("query sets a, b, c must be pairwise disjoint")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)

    def swapped(self) -> "SepQuery":
        return SepQuery(self.b, self.a, self.c)


def _check_nodes(g: DiGraph | UGraph, ids: Iterable[int]) -> frozenset[int]:
    ids = frozenset(int(v) for v in ids)
    for v in ids:
        if not (0 <= v < g.node_count):
            raise ValueError(f"node {v} out of range for {g.node_count} nodes")
    return ids


def ancestors(g: DiGraph, seed: Iterable[int]) -> frozenset[int]:
    """Reflexive transitive closure of the parent relation over ``seed``.

    Every seed node counts as its own ancestor; in cyclic graphs a node may
    be reached back through a cycle.
    """
    seed = _check_nodes(g, seed)
    seen = set(seed)
    frontier = deque(seed)
    parent_sets = g.parent_sets
    while frontier:
        node = frontier.popleft()
        for p in parent_sets[node]:
            if p not in seen:
                seen.add(p)
                frontier.append(p)
    return frozenset(seen)


def ancestral_restriction(g: DiGraph, seed: Iterable[int]) -> DiGraph:
    """Induced subgraph on ``ancestors(g, seed)``; node identities preserved.

    Nodes outside the ancestor set lose all incident edges and become
    isolated, which leaves them irrelevant to any later connectivity test.
    """
    keep = ancestors(g, seed)
    kept_edges = frozenset((p, c) for p, c in g.edges if p in keep and c in keep)
    return DiGraph(g.node_count, kept_edges)


def moralize(g: DiGraph) -> UGraph:
    """Drop edge orientations and connect every pair of nodes sharing a child.

    Each direction of a 2-cycle is treated independently; duplicate
    undirected edges collapse.
    """
    und = set((min(p, c), max(p, c)) for p, c in g.edges)
    for child in range(g.node_count):
        for i, j in combinations(sorted(g.parent_sets[child]), 2):
            und.add((i, j))
    return UGraph(g.node_count, frozenset(und))


def separated(ug: UGraph, q: SepQuery) -> bool:
    """True iff removing ``q.c`` disconnects every node of ``q.a`` from ``q.b``.

    With empty ``c`` this is plain connectivity between the two sets.
    """
    _check_nodes(ug, q.a | q.b | q.c)
    blocked = q.c
    adjacency = ug.adjacency
    seen = set(q.a)
    frontier = deque(q.a)
    while frontier:
        node = frontier.popleft()
        for nb in adjacency[node]:
            if nb in blocked or nb in seen:
                continue
            if nb in q.b:
                return False
            seen.add(nb)
            frontier.append(nb)
    return True


def d_separated(g: DiGraph, q: SepQuery) -> bool:
    """Decide whether ``q.c`` separates ``q.a`` from ``q.b`` in ``g``.

    The test performs three graph manipulations and one connectivity check:

    1. restrict ``g`` to the query sets and their ancestors,
    2. connect every pair of nodes sharing a common child in the
       restricted graph,
    3. drop all edge orientations,

    then report whether every undirected path from ``a`` to ``b`` passes
    through ``c``.  Works unchanged on graphs with directed cycles.

    Parameters
    ----------
    g : DiGraph
        Directed graph; cycles allowed.
    q : SepQuery
        Disjoint node sets ``a``, ``b``, ``c``.

    Returns
    -------
    bool
        True iff ``a`` and ``b`` are separated by ``c``.
    """
    _check_nodes(g, q.a | q.b | q.c)
    core = ancestral_restriction(g, q.a | q.b | q.c)
    return separated(moralize(core), q)


def is_acyclic(g: DiGraph) -> bool:
    return topological_order(g) is not None


def topological_order(g: DiGraph) -> tuple[int, ...] | None:
    """Kahn's algorithm; returns None when ``g`` has a directed cycle.

    Deterministic: among ready nodes the smallest id is emitted first.
    """
    indeg = [len(g.parent_sets[v]) for v in range(g.node_count)]
    ready = sorted(v for v in range(g.node_count) if indeg[v] == 0)
    order = []
    heapq.heapify(ready)
    while ready:
        v = heapq.heappop(ready)
        order.append(v)
        for c in g.child_sets[v]:
            indeg[c] -= 1
            if indeg[c] == 0:
                heapq.heappush(ready, c)
    if len(order) != g.node_count:
        return None
    return tuple(order)
