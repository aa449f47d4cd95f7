"""Tests for the tableau reasoner.

Two layers of evidence: a battery of hand-checked entailments and
non-entailments over small knowledge bases, and a randomized agreement
check against the brute-force model enumerator, which decides
consistency by trying every interpretation over a fixed universe.
"""

from __future__ import annotations

import random

import pytest

from qshape.axioms import build_axioms
from qshape.model import (
    And,
    Atom,
    Bottom,
    ConceptAssert,
    ConceptIncl,
    Exists,
    Forall,
    KnowledgeBase,
    Kind,
    Marking,
    Name,
    Nominal,
    Not,
    Or,
    RoleAssert,
    RoleIncl,
    Top,
    concept,
    individual,
    mark,
    nnf,
    role,
)
from qshape.oracle import bounded_model_consistent
from qshape.reasoner import BudgetExhausted, Reasoner, entails, is_consistent
from qshape.syntax import parse_query_file, parse_shape_file

from conftest import anchored_kb

A, B, C = Atom(concept("A")), Atom(concept("B")), Atom(concept("C"))
r, s = role("r"), role("s")
a, b = individual("a"), individual("b")


def kb(*tbox, abox=()) -> KnowledgeBase:
    return KnowledgeBase(tuple(tbox), tuple(abox))


# --- consistency of hand-built knowledge bases ----------------------------


def test_empty_kb_consistent() -> None:
    assert is_consistent(kb())


def test_inconsistent_assertions() -> None:
    assert not is_consistent(kb(abox=[ConceptAssert(a, A), ConceptAssert(a, Not(A))]))


def test_top_under_bottom_has_no_model() -> None:
    # Interpretations have nonempty domains, so this fails even without
    # any individual mentioned.
    assert not is_consistent(kb(ConceptIncl(Top(), Bottom())))


def test_unsatisfiable_concept_is_fine_if_unpopulated() -> None:
    assert is_consistent(kb(ConceptIncl(A, Bottom())))
    assert not is_consistent(kb(ConceptIncl(A, Bottom()), abox=[ConceptAssert(a, A)]))


def test_infinite_chain_is_blocked() -> None:
    # Every node needs an r-successor in A; a finite tableau must reuse
    # nodes rather than build the chain forever.
    assert is_consistent(kb(ConceptIncl(Top(), Exists(r, A)), abox=[ConceptAssert(a, A)]))


def test_forall_clash_over_edge() -> None:
    base = [
        ConceptAssert(a, Forall(r, B)),
        RoleAssert(a, b, r),
        ConceptAssert(b, Not(B)),
    ]
    assert not is_consistent(kb(abox=base))
    # Dropping the edge removes the conflict.
    assert is_consistent(kb(abox=[base[0], base[2]]))


def test_inverse_role_propagation() -> None:
    assert not is_consistent(
        kb(
            abox=[
                ConceptAssert(a, Forall(r.inverse(), B)),
                RoleAssert(b, a, r),
                ConceptAssert(b, Not(B)),
            ]
        )
    )


def test_role_hierarchy_feeds_forall() -> None:
    base = kb(
        RoleIncl(s, r),
        abox=[ConceptAssert(a, Forall(r, B)), RoleAssert(a, b, s), ConceptAssert(b, Not(B))],
    )
    assert not is_consistent(base)
    # With the inclusion the other way round the s-edge escapes the
    # restriction on r.
    flipped = kb(
        RoleIncl(r, s),
        abox=[ConceptAssert(a, Forall(r, B)), RoleAssert(a, b, s), ConceptAssert(b, Not(B))],
    )
    assert is_consistent(flipped)


def test_nominal_merging_detects_clash() -> None:
    # b must be the same element as a; their labels then conflict.
    assert not is_consistent(
        kb(
            ConceptIncl(A, Nominal(b)),
            abox=[ConceptAssert(a, A), ConceptAssert(a, B), ConceptAssert(b, Not(B))],
        )
    )


def test_nominal_merging_consistent_when_labels_agree() -> None:
    assert is_consistent(
        kb(
            ConceptIncl(A, Nominal(b)),
            abox=[ConceptAssert(a, A), ConceptAssert(b, B)],
        )
    )


def test_disjunction_explores_both_branches() -> None:
    assert is_consistent(
        kb(
            ConceptIncl(Top(), Or((A, B))),
            ConceptIncl(A, Bottom()),
            abox=[ConceptAssert(a, Top())],
        )
    )
    assert not is_consistent(
        kb(
            ConceptIncl(Top(), Or((A, B))),
            ConceptIncl(A, Bottom()),
            ConceptIncl(B, Bottom()),
            abox=[ConceptAssert(a, Top())],
        )
    )


# --- entailment -----------------------------------------------------------


def test_subsumption_chain() -> None:
    axs = [ConceptIncl(A, B), ConceptIncl(B, C)]
    assert entails(axs, ConceptIncl(A, C))
    assert not entails(axs, ConceptIncl(C, A))


def test_entailment_under_existential() -> None:
    axs = [ConceptIncl(A, Exists(r, B)), ConceptIncl(B, C)]
    assert entails(axs, ConceptIncl(A, Exists(r, C)))
    assert not entails(axs, ConceptIncl(A, Exists(s, C)))


def test_existential_implies_superrole() -> None:
    axs = [RoleIncl(r, s)]
    assert entails(axs, ConceptIncl(Exists(r, A), Exists(s, A)))
    assert not entails(axs, ConceptIncl(Exists(s, A), Exists(r, A)))


def test_exists_inverse_round_trip() -> None:
    assert entails([], ConceptIncl(A, Forall(r, Exists(r.inverse(), A))))


def test_nominal_entailment() -> None:
    axs = [ConceptIncl(Nominal(a), A), ConceptIncl(Top(), Exists(r, Nominal(a)))]
    assert entails(axs, ConceptIncl(Top(), Exists(r, A)))


def test_unsatisfiable_lhs_entails_anything() -> None:
    axs = [ConceptIncl(A, And((B, Not(B))))]
    assert entails(axs, ConceptIncl(A, C))


def test_tautologies_hold_without_axioms() -> None:
    assert entails([], ConceptIncl(And((A, B)), A))
    assert entails([], ConceptIncl(A, Or((A, B))))
    assert entails([], ConceptIncl(A, Top()))
    assert entails([], ConceptIncl(Bottom(), A))
    assert not entails([], ConceptIncl(A, B))


def test_reasoner_reuse_across_queries() -> None:
    reasoner = Reasoner([ConceptIncl(A, B), ConceptIncl(B, C)])
    assert reasoner.entails(ConceptIncl(A, C))
    assert reasoner.entails(ConceptIncl(A, B))
    assert not reasoner.entails(ConceptIncl(B, A))
    # Repeating a query gives the same answer; state does not leak.
    assert reasoner.entails(ConceptIncl(A, C))


def test_entailment_over_chain_query_axioms() -> None:
    # Semantic anchors for the end-to-end pipeline: with the chain query
    # and its input shapes, every produced :E node is also a produced :B
    # node, but not conversely.
    q = parse_query_file("tests/data/q1.sparql")
    shapes = parse_shape_file("tests/data/s1.shacl")
    axs = build_axioms(shapes, q).all_axioms()
    med = Marking.OUT
    e_out = Atom(mark(concept("E"), med))
    b_out = Atom(mark(concept("B"), med))
    reasoner = Reasoner(axs)
    assert reasoner.entails(ConceptIncl(e_out, b_out))
    assert not reasoner.entails(ConceptIncl(b_out, e_out))


# --- normal form ----------------------------------------------------------


def test_nnf_pushes_negation_inward() -> None:
    assert nnf(Not(And((A, B)))) == Or((Not(A), Not(B)))
    assert nnf(Not(Or((A, B)))) == And((Not(A), Not(B)))
    assert nnf(Not(Exists(r, A))) == Forall(r, Not(A))
    assert nnf(Not(Forall(r, A))) == Exists(r, Not(A))
    assert nnf(Not(Not(A))) == A
    assert nnf(Not(Top())) == Bottom()
    assert nnf(Not(Bottom())) == Top()


def test_nnf_fixed_point() -> None:
    c = Not(And((Exists(r, Not(Or((A, B)))), Forall(s, Not(C)))))
    once = nnf(c)
    assert nnf(once) == once


# --- budgets --------------------------------------------------------------


def test_node_budget_exhaustion() -> None:
    # Force a long chain of distinct labels so blocking cannot kick in
    # before the budget does.
    chain = [ConceptIncl(Top(), Exists(r, Top()))]
    with pytest.raises(BudgetExhausted):
        is_consistent(
            kb(*chain, abox=[ConceptAssert(a, Top())]),
            node_budget=1,
            rule_budget=10,
        )


def test_generous_budget_succeeds() -> None:
    assert is_consistent(
        kb(ConceptIncl(Top(), Exists(r, Top())), abox=[ConceptAssert(a, Top())]),
        node_budget=1000,
    )


# --- agreement with the brute-force oracle --------------------------------


def test_matches_bounded_enumeration() -> None:
    rng = random.Random(5821)
    for _ in range(120):
        base, inds = anchored_kb(rng)
        expect = bounded_model_consistent(base, inds)
        assert is_consistent(base) == expect


def test_branch_order_does_not_change_answers() -> None:
    rng = random.Random(2710)
    for _ in range(80):
        base, _ = anchored_kb(rng)
        assert is_consistent(base) == is_consistent(base, branch_reverse=True)
