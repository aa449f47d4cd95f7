"""Candidate shape enumeration over a query's result vocabulary.

The analyzer works by generate-and-filter: this module generates every
shape that could conceivably constrain a result graph, and the axioms +
reasoner modules decide which of them are in fact guaranteed.  A result
graph can only contain the concept and role names of the query *template*,
so candidates are built over exactly that vocabulary.

For n concept names and m role names the candidate set pairs every target

    A          for each concept name
    exists :p . Top      and      exists :p- . Top    for each role name

with every constraint

    A
    exists :p . A    exists :p- . A    forall :p . A    forall :p- . A
    forall :p . F    forall :p- . F

where F is one fresh concept name shared by the whole set.  F never occurs
in the query, so nothing forces any result individual into it; a target can
therefore only satisfy ``forall :p . F`` by having no p-successor at all.
Surviving proxy shapes are presented as ``forall :p . Bottom``, which is
what they mean on result graphs.  Tautologies ``A <: A`` are dropped; the
remaining count is (n+2m)·(n+4nm+2m) − n.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import (
    Atom,
    BOTTOM,
    Concept,
    ConceptIncl,
    Exists,
    Forall,
    Kind,
    Name,
    Query,
    Role,
    Shape,
    TOP,
    concept,
    name_key,
    shape_key,
    vocabulary,
)


def candidate_count(n: int, m: int) -> int:
    """Number of candidates for n concept and m role names."""
    return (n + 2 * m) * (n + 4 * n * m + 2 * m) - n


@dataclass(frozen=True)
class CandidateSet:
    """All candidate shapes for one query, in canonical order."""

    shapes: tuple[Shape, ...]
    proxy_name: Name

    def __len__(self) -> int:
        return len(self.shapes)

    def __iter__(self):
        return iter(self.shapes)


def _fresh_proxy(q: Query) -> Name:
    taken = {n.text for n in vocabulary(q) | vocabulary(q.pattern)}
    taken |= {t.text for t in q.individuals()} | {v.text for v in q.variables()}
    k = 0
    while f"Aux{k}" in taken:
        k += 1
    return concept(f"Aux{k}")


def generate_candidates(q: Query) -> CandidateSet:
    """Enumerate every possible result shape of ``q``, unfiltered."""
    names = vocabulary(q)
    concepts = sorted((n for n in names if n.kind is Kind.CONCEPT), key=name_key)
    role_names = sorted((n for n in names if n.kind is Kind.ROLE), key=name_key)
    proxy = _fresh_proxy(q)

    targets: list[Concept] = [Atom(a) for a in concepts]
    for p in role_names:
        targets.append(Exists(Role(p), TOP))
        targets.append(Exists(Role(p, inverted=True), TOP))

    constraints: list[Concept] = [Atom(a) for a in concepts]
    for p in role_names:
        for a in concepts:
            for inverted in (False, True):
                r = Role(p, inverted)
                constraints.append(Exists(r, Atom(a)))
                constraints.append(Forall(r, Atom(a)))
        constraints.append(Forall(Role(p), Atom(proxy)))
        constraints.append(Forall(Role(p, inverted=True), Atom(proxy)))

    shapes = [
        Shape(t, c) for t in targets for c in constraints if t != c
    ]
    shapes.sort(key=shape_key)
    return CandidateSet(tuple(shapes), proxy)


def is_proxy_shape(s: Shape, proxy: Name) -> bool:
    return isinstance(s.constraint, Forall) and s.constraint.filler == Atom(proxy)


def public_axiom(s: Shape, proxy: Name) -> ConceptIncl:
    """The shape as presented to users: the proxy filler reads as Bottom."""
    if is_proxy_shape(s, proxy):
        return ConceptIncl(s.target, Forall(s.constraint.role, BOTTOM))
    return s.as_axiom()
