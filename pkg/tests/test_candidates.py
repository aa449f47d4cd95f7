"""Candidate enumeration: the closed-form count, canonical ordering, and the
proxy family standing in for universal constraints over outside names."""

import itertools

from qshape.model import (
    Atom,
    ConceptAtom,
    Exists,
    Forall,
    Kind,
    Query,
    RoleAtom,
    TOP,
    concept,
    role_name,
    variable,
    vocabulary,
)
from qshape.candidates import (
    CandidateSet,
    candidate_count,
    generate_candidates,
    is_proxy_shape,
    public_axiom,
)
from qshape.syntax import parse_query, parse_shapes, render_axiom


def _query_with_vocab(n: int, m: int) -> Query:
    """A query whose template mentions exactly n concepts and m roles."""
    x = variable("x")
    template = [ConceptAtom(x, concept(f"A{i}")) for i in range(n)]
    template += [RoleAtom(x, x, role_name(f"r{j}")) for j in range(m)]
    if not template:
        template = [ConceptAtom(x, concept("A0"))]
        q = Query(tuple(template), tuple(template))
        # n = m = 0 has no legal query; callers special-case it
        return q
    return Query(tuple(template), tuple(template))


# --------------------------------------------------------------------------
# the closed-form count


def test_candidate_count_matches_enumeration_for_small_vocabularies():
    for n, m in itertools.product(range(4), repeat=2):
        if n == 0 and m == 0:
            assert candidate_count(0, 0) == 0
            continue
        q = _query_with_vocab(n, m)
        cs = generate_candidates(q)
        got_n = sum(1 for c in vocabulary(q) if c.kind is Kind.CONCEPT)
        got_m = sum(1 for c in vocabulary(q) if c.kind is Kind.ROLE)
        assert (got_n, got_m) == (n, m) or (n == 0 and got_n == 1)
        assert len(cs) == candidate_count(got_n, got_m)


def test_candidate_count_for_the_running_example_vocabulary():
    # two concepts and one role in the template
    q = parse_query(
        "CONSTRUCT { ?y a :E . ?y :p ?z . ?z a :B } "
        "WHERE { ?w :p ?y . ?y a :B . ?x :p ?z . ?z a :E }"
    )
    assert candidate_count(2, 1) == 46
    assert len(generate_candidates(q)) == 46


# --------------------------------------------------------------------------
# structure of the enumeration


def test_candidates_are_unique_and_sorted():
    q = _query_with_vocab(2, 2)
    cs = generate_candidates(q)
    assert len(set(cs.shapes)) == len(cs.shapes)
    assert CandidateSet(cs.shapes, cs.proxy_name) == generate_candidates(q)


def test_targets_and_constraints_stay_in_the_simple_fragment():
    q = _query_with_vocab(2, 1)
    for s in generate_candidates(q):
        assert isinstance(s.target, (Atom, Exists))
        if isinstance(s.target, Exists):
            assert s.target.filler == TOP
        assert isinstance(s.constraint, (Atom, Exists, Forall))


def test_no_candidate_repeats_its_own_target_as_constraint():
    q = _query_with_vocab(3, 1)
    for s in generate_candidates(q):
        assert s.target != s.constraint


def test_vocabulary_is_template_only():
    # pattern names E/q must not appear in any candidate
    q = parse_query("CONSTRUCT { ?x a :A } WHERE { ?x a :E . ?x :q ?x }")
    rendered = [render_axiom(public_axiom(s, generate_candidates(q).proxy_name)) for s in generate_candidates(q)]
    assert rendered == [] or all(":E" not in t and ":q" not in t for t in rendered)
    assert len(generate_candidates(q)) == candidate_count(1, 0)


# --------------------------------------------------------------------------
# the proxy family


def test_proxy_shapes_render_as_universal_bottom():
    q = _query_with_vocab(1, 1)
    cs = generate_candidates(q)
    proxies = [s for s in cs if is_proxy_shape(s, cs.proxy_name)]
    # one forall per role direction per target, and the proxy never leaks
    assert proxies
    for s in proxies:
        text = render_axiom(public_axiom(s, cs.proxy_name))
        assert "Bottom" in text
        assert "Aux" not in text


def test_proxy_name_avoids_the_query_vocabulary():
    q = parse_query("CONSTRUCT { ?x a :Aux0 . ?x :r ?x } WHERE { ?x a :Aux0 }")
    cs = generate_candidates(q)
    assert cs.proxy_name.text != "Aux0"


def test_candidates_round_trip_through_the_shape_grammar():
    q = _query_with_vocab(2, 1)
    cs = generate_candidates(q)
    for s in cs:
        ax = public_axiom(s, cs.proxy_name)
        assert parse_shapes(render_axiom(ax)) == [ax]
