import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cyclicscm import (
    DiGraph,
    SepQuery,
    UGraph,
    ancestors,
    ancestral_restriction,
    d_separated,
    is_acyclic,
    moralize,
    separated,
    topological_order,
)

# neal-fig1 parent structure, by id (X1..X7 -> 0..6)
FIG1_EDGES = frozenset(
    [(0, 1), (2, 1), (0, 2), (1, 2),
     (1, 5), (3, 5), (4, 5), (6, 5),
     (1, 6), (3, 6), (4, 6), (5, 6)]
)
FIG1 = DiGraph(7, FIG1_EDGES)


def q(a, b, c=()):
    return SepQuery(frozenset(a), frozenset(b), frozenset(c))


class TestConstruction:
    def test_rejects_self_loop(self):
        with pytest.raises(ValueError):
            DiGraph(2, frozenset([(0, 0)]))
        with pytest.raises(ValueError):
            UGraph(2, frozenset([(1, 1)]))

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            DiGraph(2, frozenset([(0, 5)]))

    def test_parallel_edges_collapse(self):
        g = UGraph(3, frozenset([(0, 1), (1, 0)]))
        assert g.edges == frozenset([(0, 1)])

    def test_query_rejects_overlap(self):
        with pytest.raises(ValueError):
            q({0}, {0})
        with pytest.raises(ValueError):
            q({0}, {1}, {0})
        with pytest.raises(ValueError):
            q(set(), {1})


class TestAncestors:
    def test_fig1_x2_closure(self):
        assert ancestors(FIG1, {1}) == frozenset({0, 1, 2})

    def test_chain(self):
        g = DiGraph(3, frozenset([(0, 1), (1, 2)]))
        assert ancestors(g, {2}) == frozenset({0, 1, 2})

    def test_empty_seed(self):
        assert ancestors(FIG1, set()) == frozenset()

    def test_invalid_id(self):
        with pytest.raises(ValueError):
            ancestors(FIG1, {9})


class TestAncestralRestriction:
    def test_fig1_drops_sinks(self):
        restricted = ancestral_restriction(FIG1, {3, 4, 1})
        assert ancestors(FIG1, {3, 4, 1}) == frozenset({0, 1, 2, 3, 4})
        # every edge touching X6 or X7 is gone, the X1/X2/X3 block remains
        assert restricted.edges == frozenset([(0, 1), (2, 1), (0, 2), (1, 2)])

    def test_full_seed_is_identity(self):
        assert ancestral_restriction(FIG1, range(7)) == FIG1

    def test_fig1_x6_keeps_everything(self):
        assert ancestral_restriction(FIG1, {5}) == FIG1


class TestMoralize:
    def test_collider_marries_parents(self):
        g = DiGraph(3, frozenset([(0, 2), (1, 2)]))
        assert moralize(g).edges == frozenset([(0, 2), (1, 2), (0, 1)])

    def test_chain_adds_nothing(self):
        g = DiGraph(3, frozenset([(0, 2), (2, 1)]))
        assert moralize(g).edges == frozenset([(0, 2), (1, 2)])

    def test_fig1_ancestral_core(self):
        restricted = ancestral_restriction(FIG1, {3, 4, 1})
        ug = moralize(restricted)
        assert ug.edges == frozenset([(0, 1), (0, 2), (1, 2)])
        assert not ug.adjacency[3] and not ug.adjacency[4]


class TestSeparated:
    def test_triangle_direct_edge_survives(self):
        ug = UGraph(3, frozenset([(0, 1), (1, 2), (0, 2)]))
        assert not separated(ug, q({0}, {1}, {2}))

    def test_path_blocked_by_middle(self):
        ug = UGraph(3, frozenset([(0, 2), (2, 1)]))
        assert separated(ug, q({0}, {1}, {2}))

    def test_fig1_moral_core(self):
        ug = moralize(ancestral_restriction(FIG1, {3, 4, 1}))
        assert separated(ug, q({3}, {4}, {1}))


class TestDSeparated:
    def test_fig1_x4_x5_given_x2(self):
        assert d_separated(FIG1, q({3}, {4}, {1}))

    def test_fig1_x4_x5_given_x6(self):
        assert not d_separated(FIG1, q({3}, {4}, {5}))

    def test_collider_conditioning_opens_path(self):
        g = DiGraph(3, frozenset([(0, 2), (1, 2)]))
        assert not d_separated(g, q({0}, {1}, {2}))
        assert d_separated(g, q({0}, {1}))


class TestTopology:
    def test_acyclic_detection(self):
        assert is_acyclic(DiGraph(3, frozenset([(0, 1), (1, 2)])))
        assert not is_acyclic(FIG1)
        assert topological_order(FIG1) is None

    def test_order_is_topological(self):
        g = DiGraph(4, frozenset([(2, 0), (0, 3), (2, 3), (1, 3)]))
        order = topological_order(g)
        pos = {v: i for i, v in enumerate(order)}
        assert all(pos[p] < pos[c] for p, c in g.edges)


# --- randomized invariants -------------------------------------------------


@st.composite
def digraphs(draw, min_n=2, max_n=6):
    n = draw(st.integers(min_n, max_n))
    pairs = st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)).filter(
        lambda e: e[0] != e[1]
    )
    edges = draw(st.frozensets(pairs, max_size=n * (n - 1)))
    return DiGraph(n, edges)


@st.composite
def graph_and_query(draw):
    g = draw(digraphs(min_n=3))
    ids = list(range(g.node_count))
    a = draw(st.sampled_from(ids))
    b = draw(st.sampled_from([v for v in ids if v != a]))
    c = draw(st.frozensets(st.sampled_from([v for v in ids if v not in (a, b)])))
    return g, SepQuery(frozenset([a]), frozenset([b]), c)


@given(graph_and_query())
@settings(max_examples=200, deadline=None)
def test_dsep_symmetric(gq):
    g, query = gq
    assert d_separated(g, query) == d_separated(g, query.swapped())


@given(digraphs(), st.data())
@settings(max_examples=200, deadline=None)
def test_ancestral_restriction_idempotent(g, data):
    seed = data.draw(st.frozensets(st.integers(0, g.node_count - 1)))
    once = ancestral_restriction(g, seed)
    assert ancestral_restriction(once, seed) == once


@given(digraphs())
@settings(max_examples=200, deadline=None)
def test_moralization_keeps_every_edge(g):
    ug = moralize(g)
    assert all((min(p, c), max(p, c)) in ug.edges for p, c in g.edges)


@given(graph_and_query(), st.data())
@settings(max_examples=200, deadline=None)
def test_nodes_outside_ancestral_set_are_irrelevant(gq, data):
    # Append a fresh sink with arbitrary incoming edges: it is nobody's
    # ancestor, so the verdict must not move.
    g, query = gq
    new = g.node_count
    incoming = data.draw(st.frozensets(st.integers(0, g.node_count - 1)))
    bigger = DiGraph(new + 1, g.edges | frozenset((p, new) for p in incoming))
    assert d_separated(g, query) == d_separated(bigger, query)
