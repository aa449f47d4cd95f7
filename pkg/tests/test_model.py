"""Core vocabulary and formula types: construction rules, normal forms,
marking, and the deterministic orderings everything downstream leans on."""

import random

import pytest

from qshape.model import (
    And,
    Atom,
    BOTTOM,
    Bottom,
    ConceptAssert,
    ConceptAtom,
    ConceptIncl,
    Exists,
    Forall,
    Graph,
    Marking,
    Nominal,
    Not,
    Or,
    Query,
    Role,
    RoleAssert,
    RoleAtom,
    RoleIncl,
    Shape,
    TOP,
    Top,
    and_of,
    axiom_key,
    concept,
    concept_key,
    individual,
    is_simple_shape,
    mark,
    name_key,
    or_of,
    pattern_variables,
    role,
    role_name,
    unmark,
    var_concept,
    variable,
    vocabulary,
)

# --------------------------------------------------------------------------
# names, roles, and their invariants


def test_name_kinds_are_enforced():
    with pytest.raises(ValueError):
        Atom(role_name("p"))
    with pytest.raises(ValueError):
        Nominal(concept("A"))
    with pytest.raises(ValueError):
        Role(concept("A"))


def test_only_concepts_and_roles_can_carry_markings():
    from qshape.model import Kind, Name

    with pytest.raises(ValueError):
        Name(Kind.INDIVIDUAL, "a", Marking.MED)
    with pytest.raises(ValueError):
        Name(Kind.VARIABLE, "x", Marking.OUT)


def test_role_inverse_is_an_involution():
    r = role("p")
    assert r.inverse().inverse() == r
    assert r.inverse() != r


def test_equal_values_share_a_hash():
    assert hash(concept("A")) == hash(concept("A"))
    assert hash(role("p", True)) == hash(role("p", True))
    e = Exists(role("p"), Atom(concept("A")))
    assert hash(e) == hash(Exists(role("p"), Atom(concept("A"))))
    assert e == Exists(role("p"), Atom(concept("A")))


def test_markings_keep_names_distinct():
    plain = concept("B")
    med = concept("B", Marking.MED)
    out = concept("B", Marking.OUT)
    assert len({plain, med, out}) == 3
    assert len({hash(plain), hash(med), hash(out)}) == 3


# --------------------------------------------------------------------------
# connective normalisation


def test_and_of_flattens_sorts_and_deduplicates():
    a, b = Atom(concept("A")), Atom(concept("B"))
    assert and_of([b, a, b]) == and_of([a, b])
    assert and_of([a, and_of([b, a])]) == and_of([a, b])
    assert and_of([a]) == a
    assert and_of([]) == TOP
    assert and_of([a, TOP]) == a
    assert and_of([a, BOTTOM]) == BOTTOM


def test_or_of_flattens_sorts_and_deduplicates():
    a, b = Atom(concept("A")), Atom(concept("B"))
    assert or_of([b, a, b]) == or_of([a, b])
    assert or_of([]) == BOTTOM
    assert or_of([a, BOTTOM]) == a
    assert or_of([a, TOP]) == TOP


def test_concept_key_is_a_total_order_over_random_formulas():
    rng = random.Random(5)
    names = [concept("A"), concept("B")]
    roles = [role("r"), role("r", True)]

    def build(depth):
        if depth == 0:
            return rng.choice([Atom(rng.choice(names)), TOP, BOTTOM, Nominal(individual("a"))])
        k = rng.randrange(5)
        if k == 0:
            return Not(build(depth - 1))
        if k == 1:
            return and_of([build(depth - 1), build(depth - 1)])
        if k == 2:
            return or_of([build(depth - 1), build(depth - 1)])
        if k == 3:
            return Exists(rng.choice(roles), build(depth - 1))
        return Forall(rng.choice(roles), build(depth - 1))

    formulas = [build(rng.randrange(0, 3)) for _ in range(120)]
    ordered = sorted(formulas, key=concept_key)
    assert sorted(ordered, key=concept_key) == ordered
    for c in formulas:  # keys are injective up to equality
        for d in formulas:
            if concept_key(c) == concept_key(d):
                assert c == d


# --------------------------------------------------------------------------
# marking


def test_mark_renames_every_plain_name():
    ax = ConceptIncl(Atom(concept("A")), Exists(role("p"), Atom(concept("B"))))
    med = mark(ax, Marking.MED)
    assert med.lhs == Atom(concept("A", Marking.MED))
    assert med.rhs == Exists(role("p", marking=Marking.MED), Atom(concept("B", Marking.MED)))
    assert unmark(med) == ax


def test_mark_leaves_individuals_and_variable_concepts_alone():
    c = and_of([Nominal(individual("a")), Atom(var_concept("x"))])
    assert mark(c, Marking.OUT) == c


def test_marking_an_already_marked_name_is_rejected():
    with pytest.raises(ValueError):
        mark(Atom(concept("A", Marking.MED)), Marking.OUT)


# --------------------------------------------------------------------------
# graphs, queries, shapes


def test_graph_rejects_compound_memberships_and_inverted_edges():
    with pytest.raises(ValueError):
        Graph(frozenset([ConceptAssert(individual("a"), Not(Atom(concept("A"))))]))
    with pytest.raises(ValueError):
        Graph(frozenset([RoleAssert(individual("a"), individual("b"), role("p", True))]))


def test_query_drops_duplicate_atoms():
    x = variable("x")
    atom = ConceptAtom(x, concept("A"))
    q = Query((atom, atom), (atom, atom, RoleAtom(x, x, role_name("p"))))
    assert len(q.template) == 1
    assert len(q.pattern) == 2


def test_query_template_variables_must_come_from_the_pattern():
    x, y = variable("x"), variable("y")
    with pytest.raises(ValueError):
        Query((ConceptAtom(y, concept("A")),), (ConceptAtom(x, concept("A")),))


def test_query_vocabulary_is_the_template_vocabulary():
    x, y = variable("x"), variable("y")
    q = Query(
        (ConceptAtom(x, concept("E")), RoleAtom(x, y, role_name("p"))),
        (ConceptAtom(x, concept("B")), RoleAtom(y, x, role_name("q")), ConceptAtom(y, concept("E"))),
    )
    assert vocabulary(q) == frozenset({concept("E"), role_name("p")})


def test_pattern_variables_ignore_individuals():
    atoms = (RoleAtom(variable("x"), individual("a"), role_name("p")),)
    assert pattern_variables(atoms) == frozenset({variable("x")})


def test_simple_shape_recognition():
    a, b = Atom(concept("A")), Atom(concept("B"))
    r = role("r")
    assert is_simple_shape(ConceptIncl(a, b))
    assert is_simple_shape(ConceptIncl(Exists(r, TOP), Forall(r.inverse(), b)))
    assert is_simple_shape(ConceptIncl(a, Exists(r, b)))
    assert not is_simple_shape(ConceptIncl(Exists(r, a), b))  # qualified target
    assert not is_simple_shape(ConceptIncl(a, Not(b)))
    assert not is_simple_shape(RoleIncl(r, r.inverse()))


def test_shape_round_trips_through_axiom():
    s = Shape(Exists(role("r"), TOP), Forall(role("r"), Atom(concept("B"))))
    assert Shape.from_axiom(s.as_axiom()) == s


def test_axiom_key_orders_mixed_axiom_lists_deterministically():
    axs = [
        RoleIncl(role("p"), role("q")),
        ConceptIncl(Atom(concept("A")), Atom(concept("B"))),
        ConceptIncl(TOP, Atom(concept("A"))),
    ]
    once = sorted(axs, key=axiom_key)
    assert sorted(reversed(once), key=axiom_key) == once


def test_name_key_groups_by_kind_then_marking():
    names = [concept("B", Marking.OUT), role_name("p"), concept("A"), variable("x")]
    ordered = sorted(names, key=name_key)
    assert ordered[0] == concept("A")
    assert ordered[-1] == variable("x")
