from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cyclicscm import (
    Add,
    Const,
    Disturbance,
    ExprEquation,
    ModelTooLargeError,
    NonUniqueModelError,
    OwnU,
    Scm,
    TableEquation,
    Var,
    Variable,
    check_uniqueness,
    consistent_solutions,
    eval_equation,
    forward_solution,
    induced_joint,
    iter_noise_assignments,
    satisfies,
    unique_solution,
)
from cyclicscm.generate import random_scm
from cyclicscm.scm import noise_weight

from conftest import expr_model, uniform


def fig1_closed_form(u):
    u1, u4, u5 = u[0], u[3], u[4]
    return (u1, (u4 + u5) % 2, (u4 + u5 + u1) % 2, u4, u5, 0, 0)


class TestValidation:
    def test_rejects_self_reference(self):
        with pytest.raises(ValueError):
            expr_model("bad", [("X1", Add(Var(0), OwnU())), ("X2", OwnU())])

    def test_rejects_wrong_table_length(self):
        with pytest.raises(ValueError):
            Scm(2, (Variable("X1", uniform("U1"), TableEquation((), (0, 1, 0))),))

    def test_rejects_bad_probs(self):
        with pytest.raises(ValueError):
            Disturbance("U1", (Fraction(1, 2), Fraction(1, 3)))
        with pytest.raises(ValueError):
            Disturbance("U1", (Fraction(3, 2), Fraction(-1, 2)))

    def test_rejects_duplicate_names(self):
        with pytest.raises(ValueError):
            expr_model("bad", [("X1", OwnU()), ("X1", OwnU())])

    def test_rejects_constant_out_of_range(self):
        with pytest.raises(ValueError):
            expr_model("bad", [("X1", Const(2)), ("X2", OwnU())])

    def test_parent_graph_matches_references(self, fig1):
        assert fig1.graph.parent_sets[1] == frozenset({0, 2})
        assert fig1.graph.parent_sets[5] == frozenset({1, 3, 4, 6})
        assert fig1.graph.parent_sets[0] == frozenset()


class TestEvalEquation:
    def test_fig1_x6(self, fig1):
        x = (0, 1, 0, 0, 0, 0, 0)  # X2=1, X4=X5=X7=0
        assert eval_equation(fig1, 5, 0, x) == 1
        assert eval_equation(fig1, 5, 1, x) == 1  # noise plays no role

    def test_constant_equation(self):
        m = expr_model("c", [("X1", Const(0)), ("X2", OwnU())])
        for u_val in (0, 1):
            for x in product(range(2), repeat=2):
                assert eval_equation(m, 0, u_val, x) == 0

    def test_fig1_x1_is_own_noise(self, fig1):
        assert eval_equation(fig1, 0, 1, (0,) * 7) == 1
        assert eval_equation(fig1, 0, 0, (1,) * 7) == 0

    def test_table_tuple_order(self):
        # Own-noise value slowest, then the single parent: index = u*2 + x_parent.
        eq = TableEquation((0,), (0, 1, 1, 0))
        m = Scm(
            2,
            (
                Variable("X1", uniform("U1"), ExprEquation(OwnU())),
                Variable("X2", uniform("U2"), eq),
            ),
        )
        assert eval_equation(m, 1, 0, (0, 0)) == 0
        assert eval_equation(m, 1, 0, (1, 0)) == 1
        assert eval_equation(m, 1, 1, (0, 0)) == 1
        assert eval_equation(m, 1, 1, (1, 0)) == 0


class TestConsistentSolutions:
    def test_fig1_single_solution_matches_closed_form(self, fig1):
        u = (0, 0, 0, 1, 0, 0, 0)  # U1=0, U4=1, U5=0
        assert consistent_solutions(fig1, u) == [(0, 1, 1, 1, 0, 0, 0)]

    def test_contradiction_has_no_solution(self, contradiction_pair):
        for u in product(range(2), repeat=2):
            assert consistent_solutions(contradiction_pair, u) == []

    def test_mirror_has_two_solutions(self, mirror_pair):
        for u in product(range(2), repeat=2):
            assert consistent_solutions(mirror_pair, u) == [(0, 0), (1, 1)]

    def test_solutions_recheck(self, fig1):
        for u in iter_noise_assignments(fig1):
            for x in consistent_solutions(fig1, u):
                assert satisfies(fig1, x, u)

    def test_state_cap(self):
        vars_ = tuple(
            Variable(f"X{i}", uniform(f"U{i}"), TableEquation((), (0, 1)))
            for i in range(21)
        )
        big = Scm(2, vars_)
        with pytest.raises(ModelTooLargeError):
            consistent_solutions(big, (0,) * 21)


class TestUniqueness:
    def test_fig1_unique(self, fig1):
        assert check_uniqueness(fig1).unique

    def test_contradiction_witness(self, contradiction_pair):
        report = check_uniqueness(contradiction_pair)
        assert not report.unique
        assert report.solution_count == 0
        assert report.witness_u == (0, 0)

    def test_mirror_witness(self, mirror_pair):
        report = check_uniqueness(mirror_pair)
        assert not report.unique
        assert report.solution_count == 2
        assert report.witness_u == (0, 0)
        for x in report.solutions:
            assert satisfies(mirror_pair, x, report.witness_u)

    def test_deterministic(self, mirror_pair):
        a = check_uniqueness(mirror_pair)
        b = check_uniqueness(expr_model("mirror", [("X1", Var(1)), ("X2", Var(0))]))
        assert a == b


class TestInducedJoint:
    def test_fig1_sink_block_is_constant(self, fig1):
        jd = induced_joint(fig1)
        assert all(x[5] == 0 and x[6] == 0 for x in jd.mass)

    def test_fig1_x2_is_fair(self, fig1):
        jd = induced_joint(fig1)
        p0 = sum((p for x, p in jd.mass.items() if x[1] == 0), Fraction(0))
        assert p0 == Fraction(1, 2)

    def test_mass_sums_to_one(self, fig1, chain3, collider3, benign_cycle):
        for m in (fig1, chain3, collider3, benign_cycle):
            assert sum(induced_joint(m).mass.values(), Fraction(0)) == 1

    def test_non_unique_raises_with_report(self, mirror_pair):
        with pytest.raises(NonUniqueModelError) as exc:
            induced_joint(mirror_pair)
        assert exc.value.report.solution_count == 2

    def test_inert_noises_do_not_matter(self, fig1):
        # Oracle: enumerate all 2^7 full noise draws with full product weights.
        jd = induced_joint(fig1)
        mass = {}
        for u in product(range(2), repeat=7):
            sols = consistent_solutions(fig1, u)
            assert len(sols) == 1
            w = Fraction(1)
            for i in range(7):
                w *= fig1.variables[i].noise.probs[u[i]]
            mass[sols[0]] = mass.get(sols[0], Fraction(0)) + w
        assert mass == dict(jd.mass)

    def test_effective_ids(self, fig1, benign_cycle):
        assert fig1.effective_noise_ids == (0, 3, 4)
        assert benign_cycle.effective_noise_ids == (0, 2)


class TestFig1Constraints:
    def test_parity_constraint_holds_in_every_solution(self, fig1):
        for u in iter_noise_assignments(fig1):
            (x,) = consistent_solutions(fig1, u)
            assert (x[1] + x[3] + x[4]) % 2 == 0

    def test_odd_parity_states_never_solve(self, fig1):
        for u in iter_noise_assignments(fig1):
            for x in product(range(2), repeat=7):
                if (x[1] + x[3] + x[4]) % 2 == 1:
                    assert not satisfies(fig1, x, u)

    def test_odd_parity_forces_flip_flop_equations(self, fig1):
        for x in product(range(2), repeat=7):
            if (x[1] + x[3] + x[4]) % 2 == 1:
                assert eval_equation(fig1, 5, 0, x) == (x[6] + 1) % 2
                assert eval_equation(fig1, 6, 0, x) == x[5]

    def test_first_block_alone_has_two_solutions_per_u1(self, fig1):
        # Equations for X1..X3 only: for each U1 value, two (X1,X2,X3) blocks fit.
        for u1 in (0, 1):
            u = (u1, 0, 0, 0, 0, 0, 0)
            fits = [
                blk
                for blk in product(range(2), repeat=3)
                if all(
                    blk[i] == eval_equation(fig1, i, u[i], blk + (0, 0, 0, 0))
                    for i in range(3)
                )
            ]
            assert len(fits) == 2

    def test_closed_form_everywhere(self, fig1):
        for u in iter_noise_assignments(fig1):
            assert consistent_solutions(fig1, u) == [fig1_closed_form(u)]


# --- randomized invariants -------------------------------------------------


@given(st.integers(0, 10_000), st.integers(2, 5))
@settings(max_examples=80, deadline=None)
def test_forward_substitution_agrees_with_enumeration(seed, n):
    import random

    m = random_scm(n, 2, 0.5, random.Random(seed), acyclic=True)
    for u in iter_noise_assignments(m):
        assert consistent_solutions(m, u) == [forward_solution(m, u)]


@given(st.integers(0, 10_000))
@settings(max_examples=60, deadline=None)
def test_unique_solution_matches_brute_force_when_unique(seed):
    import random

    m = random_scm(3, 2, 0.6, random.Random(seed))
    report = check_uniqueness(m)
    for u in iter_noise_assignments(m):
        sols = consistent_solutions(m, u)
        if report.unique:
            assert sols == [unique_solution(m, u)]
        assert all(satisfies(m, x, u) for x in sols)


@given(st.integers(0, 10_000), st.integers(2, 4))
@settings(max_examples=60, deadline=None)
def test_joint_mass_sums_to_one_when_unique(seed, n):
    import random

    m = random_scm(n, 2, 0.5, random.Random(seed))
    if check_uniqueness(m).unique:
        jd = induced_joint(m)
        assert sum(jd.mass.values(), Fraction(0)) == 1
        assert all(p > 0 for p in jd.mass.values())
