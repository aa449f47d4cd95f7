"""Text round-trips for shapes, queries, and graphs, plus error reporting
with stable line/column positions."""

import random

import pytest

from qshape.model import (
    Atom,
    ConceptAssert,
    ConceptAtom,
    ConceptIncl,
    Exists,
    Forall,
    Graph,
    Marking,
    Query,
    RoleAssert,
    RoleAtom,
    TOP,
    concept,
    individual,
    mark,
    role,
    role_name,
    variable,
)
from qshape.syntax import (
    SourceError,
    parse_query,
    parse_shapes,
    render,
    render_axiom,
    render_concept,
    render_graph,
    render_query,
)

# --------------------------------------------------------------------------
# shape files


def test_shape_file_basics():
    axioms = parse_shapes(
        """
        # input constraints
        :A <: exists :p . :B
        exists :r . Top <: :B
        :B <: :E
        """
    )
    assert axioms == [
        ConceptIncl(Atom(concept("A")), Exists(role("p"), Atom(concept("B")))),
        ConceptIncl(Exists(role("r"), TOP), Atom(concept("B"))),
        ConceptIncl(Atom(concept("B")), Atom(concept("E"))),
    ]


def test_shape_right_hand_side_accepts_the_full_concept_grammar():
    (ax,) = parse_shapes(":A <: (:B and not :C) or exists :p- . {:a}")
    assert parse_shapes(render_axiom(ax)) == [ax]


def test_shape_targets_are_restricted():
    with pytest.raises(SourceError):
        parse_shapes("not :A <: :B")
    with pytest.raises(SourceError):
        parse_shapes("exists :p . :A <: :B")  # qualified target


def test_shape_parse_errors_carry_positions():
    with pytest.raises(SourceError) as exc:
        parse_shapes(":A <: <:")
    assert exc.value.line == 1
    assert exc.value.column == 7

    with pytest.raises(SourceError) as exc:
        parse_shapes(":A <: :B\n:B <:")
    assert exc.value.line == 2


def test_inverse_roles_and_constants_round_trip():
    text = "exists :p- . Top <: forall :q . Bottom"
    (ax,) = parse_shapes(text)
    assert render_axiom(ax) == text


# --------------------------------------------------------------------------
# query files


def test_query_parse_shapes_of_q1():
    q = parse_query(
        "PREFIX : <http://example.org/>\n"
        "CONSTRUCT { ?y a :E . ?y :p ?z . ?z a :B }\n"
        "WHERE { ?w :p ?y . ?y a :B . ?x :p ?z . ?z a :E }"
    )
    assert len(q.template) == 3
    assert len(q.pattern) == 4
    assert variable("w") in q.variables()
    assert q.individuals() == frozenset()


def test_query_individuals_are_colon_terms():
    q = parse_query("CONSTRUCT { ?x a :A } WHERE { ?x :p :b . :b a :B }")
    assert q.individuals() == frozenset({individual("b")})


def test_query_round_trip():
    q = parse_query("CONSTRUCT { ?x a :A . ?x :p ?y } WHERE { ?y :p ?x . ?y a :B }")
    assert parse_query(render_query(q)) == q


def test_unsupported_sparql_features_are_named_in_the_error():
    with pytest.raises(SourceError) as exc:
        parse_query("CONSTRUCT { ?x a :A } WHERE { OPTIONAL { ?x a :B } }")
    assert "OPTIONAL" in str(exc.value)


def test_unbound_template_variable_is_a_parse_error():
    with pytest.raises(SourceError) as exc:
        parse_query("CONSTRUCT { ?x a :A } WHERE { ?y a :A }")
    assert "?x" in str(exc.value)


def test_variables_cannot_appear_in_predicate_or_class_position():
    with pytest.raises(SourceError):
        parse_query("CONSTRUCT { ?x ?p ?y } WHERE { ?x a :A . ?y a :A }")
    with pytest.raises(SourceError):
        parse_query("CONSTRUCT { ?x a ?c } WHERE { ?x a :A }")


# --------------------------------------------------------------------------
# rendering


def test_render_dispatches_over_every_subject_kind():
    g = Graph(
        frozenset(
            [
                ConceptAssert(individual("a"), Atom(concept("A"))),
                RoleAssert(individual("a"), individual("b"), role("p")),
            ]
        )
    )
    assert ":a" in render(g)
    q = Query((ConceptAtom(variable("x"), concept("A")),), (ConceptAtom(variable("x"), concept("A")),))
    assert render(q).startswith("CONSTRUCT")
    assert render(ConceptIncl(Atom(concept("B")), Atom(concept("E")))) == ":B <: :E"
    assert render(Atom(concept("B"))) == ":B"


def test_marked_names_render_with_visible_suffixes():
    assert render_concept(Atom(concept("B", Marking.MED))) == ":B'"
    assert render_concept(Atom(concept("B", Marking.OUT))) == ":B''"
    ax = mark(ConceptIncl(Atom(concept("A")), Exists(role("p"), TOP)), Marking.MED)
    assert render_axiom(ax) == ":A' <: exists :p' . Top"


def test_graph_rendering_is_sorted_and_stable():
    g = Graph(
        frozenset(
            [
                RoleAssert(individual("b"), individual("a"), role("p")),
                ConceptAssert(individual("b"), Atom(concept("B"))),
                ConceptAssert(individual("a"), Atom(concept("A"))),
            ]
        )
    )
    assert render_graph(g) == render_graph(Graph(frozenset(g.assertions)))


def test_random_shape_round_trips():
    """parse(render(ax)) == [ax] over a mixed bag of generated axioms."""
    rng = random.Random(13)
    concepts = [concept("A"), concept("B"), concept("C")]
    roles = [role("p"), role("p", True), role("q")]

    def rand_constraint(depth):
        if depth == 0:
            return Atom(rng.choice(concepts))
        k = rng.randrange(4)
        if k == 0:
            return Exists(rng.choice(roles), rand_constraint(depth - 1))
        if k == 1:
            return Forall(rng.choice(roles), rand_constraint(depth - 1))
        from qshape.model import and_of, or_of

        build = and_of if k == 2 else or_of
        return build([rand_constraint(depth - 1), rand_constraint(depth - 1)])

    for _ in range(150):
        target = Atom(rng.choice(concepts)) if rng.random() < 0.5 else Exists(rng.choice(roles), TOP)
        ax = ConceptIncl(target, rand_constraint(rng.randrange(0, 3)))
        assert parse_shapes(render_axiom(ax)) == [ax]
