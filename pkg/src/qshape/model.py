"""Core vocabulary: description-logic terms, graphs, queries, and markings.

Everything else in the package is built on the types in this module.  The
logic is a small ALCHOI-style description logic: atomic concepts, nominals
``{a}``, boolean connectives, and qualified quantifiers over roles and
inverse roles, with concept- and role-inclusion axioms.  Graphs are plain
RDF-style edge/membership sets; queries are CONSTRUCT-style, a conjunctive
template over a conjunctive pattern.

The one unusual ingredient is the *marking* scheme.  The analyzer reasons
simultaneously about three copies of every concept and role name:

* the plain copy — the name as it occurs in an input graph,
* the MED copy — the name as instantiated by a pattern match (the
  "mediating" slice of an extended graph),
* the OUT copy — the name as produced by the query template.

Variables of a query additionally get *variable concepts*: for a query
variable ``x``, the concept whose extension is the set of individuals that
``x`` can bind to.  Markings never touch individuals, query variables, or
variable concepts; they rename only ordinary concept and role names.

All model values are immutable and hashable, so they can be shared freely
between threads and used as dictionary keys throughout the tableau and the
oracle.  Conjunctions and disjunctions are kept flat, deduplicated, and
canonically sorted by the ``and_of`` / ``or_of`` helpers; generators and the
parsers all build through those helpers, which makes structural equality of
independently constructed formulas coincide with intent.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Union


# --------------------------------------------------------------------------
# names


class Kind(Enum):
    CONCEPT = "concept"
    ROLE = "role"
    INDIVIDUAL = "individual"
    VARIABLE = "variable"


class Marking(Enum):
    """Which copy of a concept/role name is meant.

    PLAIN names speak about input graphs, MED names about the instantiated
    pattern of a query, OUT names about the produced template instances.
    """

    PLAIN = ""
    MED = "'"
    OUT = "''"


_KIND_ORDER = {Kind.CONCEPT: 0, Kind.ROLE: 1, Kind.INDIVIDUAL: 2, Kind.VARIABLE: 3}
_MARKING_ORDER = {Marking.PLAIN: 0, Marking.MED: 1, Marking.OUT: 2}


@dataclass(frozen=True, slots=True)
class Name:
    """An interned identifier.

    ``text`` is the bare identifier as written.  For a variable concept,
    ``text`` is the *variable's* name and ``is_var_concept`` is set; such
    names are always concepts and never carry a marking.
    """

    kind: Kind
    text: str
    marking: Marking = Marking.PLAIN
    is_var_concept: bool = False
    _hash: int = field(default=-1, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.marking is not Marking.PLAIN and self.kind not in (Kind.CONCEPT, Kind.ROLE):
            raise ValueError(f"only concept/role names can be marked: {self!r}")
        if self.is_var_concept:
            if self.kind is not Kind.CONCEPT:
                raise ValueError(f"variable concepts are concepts: {self!r}")
            if self.marking is not Marking.PLAIN:
                raise ValueError(f"variable concepts are never marked: {self!r}")

    # Names and concept expressions serve as dict keys in every hot loop of
    # the reasoner, so each object memoises its structural hash.
    def __hash__(self) -> int:
        h = self._hash
        if h == -1:
            h = hash((Name, self.kind, self.text, self.marking, self.is_var_concept))
            object.__setattr__(self, "_hash", h)
        return h


def concept(text: str, marking: Marking = Marking.PLAIN) -> Name:
    return Name(Kind.CONCEPT, text, marking)


def role_name(text: str, marking: Marking = Marking.PLAIN) -> Name:
    return Name(Kind.ROLE, text, marking)


def individual(text: str) -> Name:
    return Name(Kind.INDIVIDUAL, text)


def variable(text: str) -> Name:
    return Name(Kind.VARIABLE, text)


def var_concept(text: str) -> Name:
    """The concept collecting every binding of query variable ``text``."""
    return Name(Kind.CONCEPT, text, is_var_concept=True)


def name_key(n: Name) -> tuple:
    return (_KIND_ORDER[n.kind], _MARKING_ORDER[n.marking], n.is_var_concept, n.text)


# --------------------------------------------------------------------------
# roles and concept expressions


@dataclass(frozen=True, slots=True)
class Role:
    name: Name
    inverted: bool = False
    _hash: int = field(default=-1, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.name.kind is not Kind.ROLE:
            raise ValueError(f"role built from non-role name: {self.name!r}")

    def inverse(self) -> "Role":
        return Role(self.name, not self.inverted)

    def __hash__(self) -> int:
        h = self._hash
        if h == -1:
            h = hash((Role, self.name, self.inverted))
            object.__setattr__(self, "_hash", h)
        return h


def role(text: str, inverted: bool = False, marking: Marking = Marking.PLAIN) -> Role:
    return Role(role_name(text, marking), inverted)


def role_key(r: Role) -> tuple:
    return (name_key(r.name), r.inverted)


class Concept:
    """Base class for concept expressions."""

    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Top(Concept):
    pass


@dataclass(frozen=True, slots=True)
class Bottom(Concept):
    pass


@dataclass(frozen=True, slots=True)
class Atom(Concept):
    name: Name
    _hash: int = field(default=-1, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.name.kind is not Kind.CONCEPT:
            raise ValueError(f"atom built from non-concept name: {self.name!r}")

    def __hash__(self) -> int:
        h = self._hash
        if h == -1:
            h = hash((Atom, self.name))
            object.__setattr__(self, "_hash", h)
        return h


@dataclass(frozen=True, slots=True)
class Nominal(Concept):
    individual: Name
    _hash: int = field(default=-1, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.individual.kind is not Kind.INDIVIDUAL:
            raise ValueError(f"nominal built from non-individual: {self.individual!r}")

    def __hash__(self) -> int:
        h = self._hash
        if h == -1:
            h = hash((Nominal, self.individual))
            object.__setattr__(self, "_hash", h)
        return h


@dataclass(frozen=True, slots=True)
class Not(Concept):
    sub: Concept
    _hash: int = field(default=-1, init=False, repr=False, compare=False)

    def __hash__(self) -> int:
        h = self._hash
        if h == -1:
            h = hash((Not, self.sub))
            object.__setattr__(self, "_hash", h)
        return h


@dataclass(frozen=True, slots=True)
class And(Concept):
    parts: tuple[Concept, ...]
    _hash: int = field(default=-1, init=False, repr=False, compare=False)

    def __hash__(self) -> int:
        h = self._hash
        if h == -1:
            h = hash((And, self.parts))
            object.__setattr__(self, "_hash", h)
        return h


@dataclass(frozen=True, slots=True)
class Or(Concept):
    parts: tuple[Concept, ...]
    _hash: int = field(default=-1, init=False, repr=False, compare=False)

    def __hash__(self) -> int:
        h = self._hash
        if h == -1:
            h = hash((Or, self.parts))
            object.__setattr__(self, "_hash", h)
        return h


@dataclass(frozen=True, slots=True)
class Exists(Concept):
    role: Role
    filler: Concept
    _hash: int = field(default=-1, init=False, repr=False, compare=False)

    def __hash__(self) -> int:
        h = self._hash
        if h == -1:
            h = hash((Exists, self.role, self.filler))
            object.__setattr__(self, "_hash", h)
        return h


@dataclass(frozen=True, slots=True)
class Forall(Concept):
    role: Role
    filler: Concept
    _hash: int = field(default=-1, init=False, repr=False, compare=False)

    def __hash__(self) -> int:
        h = self._hash
        if h == -1:
            h = hash((Forall, self.role, self.filler))
            object.__setattr__(self, "_hash", h)
        return h


TOP = Top()
BOTTOM = Bottom()

_EXPR_RANK = {Top: 0, Bottom: 1, Atom: 2, Nominal: 3, Exists: 4, Forall: 5, Not: 6, And: 7, Or: 8}


def concept_key(c: Concept) -> tuple:
    """A total, deterministic ordering key over concept expressions."""
    rank = _EXPR_RANK[type(c)]
    if isinstance(c, (Top, Bottom)):
        return (rank,)
    if isinstance(c, Atom):
        return (rank, name_key(c.name))
    if isinstance(c, Nominal):
        return (rank, name_key(c.individual))
    if isinstance(c, (Exists, Forall)):
        return (rank, role_key(c.role), concept_key(c.filler))
    if isinstance(c, Not):
        return (rank, concept_key(c.sub))
    # And / Or
    return (rank, len(c.parts), tuple(concept_key(p) for p in c.parts))


def and_of(parts: Iterable[Concept]) -> Concept:
    """Flat, sorted, deduplicated conjunction; absorbs Top and Bottom."""
    seen = set()
    flat: list[Concept] = []
    for p in parts:
        for q in (p.parts if isinstance(p, And) else (p,)):
            if isinstance(q, Top):
                continue
            if isinstance(q, Bottom):
                return BOTTOM
            if q not in seen:
                seen.add(q)
                flat.append(q)
    if not flat:
        return TOP
    if len(flat) == 1:
        return flat[0]
    return And(tuple(sorted(flat, key=concept_key)))


def or_of(parts: Iterable[Concept]) -> Concept:
    """Flat, sorted, deduplicated disjunction; absorbs Bottom and Top."""
    seen = set()
    flat: list[Concept] = []
    for p in parts:
        for q in (p.parts if isinstance(p, Or) else (p,)):
            if isinstance(q, Bottom):
                continue
            if isinstance(q, Top):
                return TOP
            if q not in seen:
                seen.add(q)
                flat.append(q)
    if not flat:
        return BOTTOM
    if len(flat) == 1:
        return flat[0]
    return Or(tuple(sorted(flat, key=concept_key)))


# --------------------------------------------------------------------------
# axioms and shapes


class Axiom:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class ConceptIncl(Axiom):
    lhs: Concept
    rhs: Concept


@dataclass(frozen=True, slots=True)
class RoleIncl(Axiom):
    lhs: Role
    rhs: Role


def axiom_key(a: Axiom) -> tuple:
    if isinstance(a, ConceptIncl):
        return (0, concept_key(a.lhs), concept_key(a.rhs))
    return (1, role_key(a.lhs), role_key(a.rhs))


def _is_simple_target(c: Concept) -> bool:
    if isinstance(c, Atom):
        return True
    return isinstance(c, Exists) and isinstance(c.filler, Top)


def _is_simple_constraint(c: Concept) -> bool:
    if isinstance(c, Atom):
        return True
    return isinstance(c, (Exists, Forall)) and isinstance(c.filler, Atom)


@dataclass(frozen=True, slots=True)
class Shape:
    """A target/constraint pair in the restricted shape fragment.

    Targets are atomic concepts or ``exists r . Top``; constraints are
    atomic concepts or a single qualified quantifier over an atomic filler.
    Arbitrary concept inclusions are accepted elsewhere as *input* axioms;
    this type is for the shapes the analyzer itself proposes and emits.
    """

    target: Concept
    constraint: Concept

    def __post_init__(self) -> None:
        if not _is_simple_target(self.target):
            raise ValueError(f"not a shape target: {self.target!r}")
        if not _is_simple_constraint(self.constraint):
            raise ValueError(f"not a shape constraint: {self.constraint!r}")

    def as_axiom(self) -> ConceptIncl:
        return ConceptIncl(self.target, self.constraint)

    @staticmethod
    def from_axiom(ax: Axiom) -> "Shape":
        if not isinstance(ax, ConceptIncl):
            raise ValueError(f"not a shape axiom: {ax!r}")
        return Shape(ax.lhs, ax.rhs)


def is_simple_shape(ax: Axiom) -> bool:
    """Whether ``ax`` falls in the restricted fragment of ``Shape``."""
    return (
        isinstance(ax, ConceptIncl)
        and _is_simple_target(ax.lhs)
        and _is_simple_constraint(ax.rhs)
    )


def shape_key(s: Shape) -> tuple:
    return (concept_key(s.target), concept_key(s.constraint))


# --------------------------------------------------------------------------
# assertions, graphs, knowledge bases


class Assertion:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class ConceptAssert(Assertion):
    subject: Name
    concept: Concept

    def __post_init__(self) -> None:
        if self.subject.kind is not Kind.INDIVIDUAL:
            raise ValueError(f"assertion about non-individual: {self.subject!r}")


@dataclass(frozen=True, slots=True)
class RoleAssert(Assertion):
    subject: Name
    object: Name
    role: Role

    def __post_init__(self) -> None:
        if self.subject.kind is not Kind.INDIVIDUAL or self.object.kind is not Kind.INDIVIDUAL:
            raise ValueError(f"edge between non-individuals: {self!r}")


def assertion_key(a: Assertion) -> tuple:
    if isinstance(a, ConceptAssert):
        return (0, name_key(a.subject), concept_key(a.concept))
    return (1, role_key(a.role), name_key(a.subject), name_key(a.object))


@dataclass(frozen=True, slots=True)
class Graph:
    """A finite RDF-style graph: atomic memberships and forward role edges.

    Membership assertions must use bare atomic concepts and edges must use
    non-inverted roles — a graph is data, not a formula.
    """

    assertions: frozenset[Assertion] = frozenset()

    def __post_init__(self) -> None:
        for a in self.assertions:
            if isinstance(a, ConceptAssert) and not isinstance(a.concept, Atom):
                raise ValueError(f"graph membership must be atomic: {a!r}")
            if isinstance(a, RoleAssert) and a.role.inverted:
                raise ValueError(f"graph edge must use a forward role: {a!r}")

    @staticmethod
    def of(assertions: Iterable[Assertion]) -> "Graph":
        return Graph(frozenset(assertions))

    def union(self, other: "Graph") -> "Graph":
        return Graph(self.assertions | other.assertions)

    def individuals(self) -> frozenset[Name]:
        out = set()
        for a in self.assertions:
            if isinstance(a, ConceptAssert):
                out.add(a.subject)
            else:
                out.add(a.subject)
                out.add(a.object)
        return frozenset(out)

    def __iter__(self) -> Iterator[Assertion]:
        return iter(sorted(self.assertions, key=assertion_key))

    def __len__(self) -> int:
        return len(self.assertions)

    def __contains__(self, a: Assertion) -> bool:
        return a in self.assertions


EMPTY_GRAPH = Graph()


@dataclass(frozen=True, slots=True)
class KnowledgeBase:
    tbox: tuple[Axiom, ...]
    abox: tuple[Assertion, ...]


# --------------------------------------------------------------------------
# queries


@dataclass(frozen=True, slots=True)
class ConceptAtom:
    """Pattern atom ``t : A`` — term t (variable or individual) in concept A."""

    term: Name
    concept: Name

    def __post_init__(self) -> None:
        if self.term.kind not in (Kind.VARIABLE, Kind.INDIVIDUAL):
            raise ValueError(f"pattern term must be variable or individual: {self.term!r}")
        if self.concept.kind is not Kind.CONCEPT or self.concept.is_var_concept:
            raise ValueError(f"pattern concept must be a plain concept name: {self.concept!r}")
        if self.concept.marking is not Marking.PLAIN:
            raise ValueError(f"pattern names are unmarked: {self.concept!r}")


@dataclass(frozen=True, slots=True)
class RoleAtom:
    """Pattern atom ``(s, o) : p`` — a forward edge between two terms."""

    subject: Name
    object: Name
    role: Name

    def __post_init__(self) -> None:
        for t in (self.subject, self.object):
            if t.kind not in (Kind.VARIABLE, Kind.INDIVIDUAL):
                raise ValueError(f"pattern term must be variable or individual: {t!r}")
        if self.role.kind is not Kind.ROLE or self.role.marking is not Marking.PLAIN:
            raise ValueError(f"pattern role must be a plain role name: {self.role!r}")


PatternAtom = Union[ConceptAtom, RoleAtom]


def atom_key(a: PatternAtom) -> tuple:
    if isinstance(a, ConceptAtom):
        return (0, name_key(a.concept), name_key(a.term))
    return (1, name_key(a.role), name_key(a.subject), name_key(a.object))


def atom_terms(a: PatternAtom) -> tuple[Name, ...]:
    if isinstance(a, ConceptAtom):
        return (a.term,)
    return (a.subject, a.object)


def pattern_variables(atoms: Iterable[PatternAtom]) -> frozenset[Name]:
    return frozenset(t for a in atoms for t in atom_terms(a) if t.kind is Kind.VARIABLE)


def pattern_terms(atoms: Iterable[PatternAtom]) -> frozenset[Name]:
    return frozenset(t for a in atoms for t in atom_terms(a))


def _dedup(atoms: Iterable[PatternAtom]) -> tuple[PatternAtom, ...]:
    seen = set()
    out = []
    for a in atoms:
        if a not in seen:
            seen.add(a)
            out.append(a)
    return tuple(out)


@dataclass(frozen=True, slots=True)
class Query:
    """A CONSTRUCT query: instantiate ``template`` once per ``pattern`` match.

    Every template variable must occur in the pattern, otherwise the result
    would be underdetermined.  Duplicate atoms are dropped on construction.
    """

    template: tuple[PatternAtom, ...]
    pattern: tuple[PatternAtom, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "template", _dedup(self.template))
        object.__setattr__(self, "pattern", _dedup(self.pattern))
        unbound = pattern_variables(self.template) - pattern_variables(self.pattern)
        if unbound:
            names = ", ".join(sorted(v.text for v in unbound))
            raise ValueError(f"template variable(s) not bound by the pattern: {names}")

    def variables(self) -> frozenset[Name]:
        return pattern_variables(self.pattern)

    def individuals(self) -> frozenset[Name]:
        terms = pattern_terms(self.pattern) | pattern_terms(self.template)
        return frozenset(t for t in terms if t.kind is Kind.INDIVIDUAL)


# --------------------------------------------------------------------------
# vocabulary


Subject = Union[Concept, Role, Axiom, Shape, Graph, Query, Assertion, Iterable]


def vocabulary(subject: Subject) -> frozenset[Name]:
    """All concept and role names occurring in ``subject``.

    For a query this is the *template* vocabulary: the names a result graph
    can possibly contain, which is what output shapes may talk about.
    Variable concepts count as concept names; individuals and variables are
    not vocabulary.
    """
    out: set[Name] = set()
    _collect_vocab(subject, out)
    return frozenset(out)


def _collect_vocab(subject, out: set) -> None:
    if isinstance(subject, Query):
        for a in subject.template:
            _collect_vocab(a, out)
    elif isinstance(subject, Graph):
        for a in subject.assertions:
            _collect_vocab(a, out)
    elif isinstance(subject, (ConceptAtom,)):
        out.add(subject.concept)
    elif isinstance(subject, RoleAtom):
        out.add(subject.role)
    elif isinstance(subject, ConceptAssert):
        _collect_vocab(subject.concept, out)
    elif isinstance(subject, RoleAssert):
        out.add(subject.role.name)
    elif isinstance(subject, Shape):
        _collect_vocab(subject.target, out)
        _collect_vocab(subject.constraint, out)
    elif isinstance(subject, ConceptIncl):
        _collect_vocab(subject.lhs, out)
        _collect_vocab(subject.rhs, out)
    elif isinstance(subject, RoleIncl):
        out.add(subject.lhs.name)
        out.add(subject.rhs.name)
    elif isinstance(subject, Atom):
        out.add(subject.name)
    elif isinstance(subject, (Top, Bottom, Nominal)):
        pass
    elif isinstance(subject, Not):
        _collect_vocab(subject.sub, out)
    elif isinstance(subject, (And, Or)):
        for p in subject.parts:
            _collect_vocab(p, out)
    elif isinstance(subject, (Exists, Forall)):
        out.add(subject.role.name)
        _collect_vocab(subject.filler, out)
    elif isinstance(subject, Role):
        out.add(subject.name)
    elif isinstance(subject, Iterable):
        for x in subject:
            _collect_vocab(x, out)
    else:
        raise TypeError(f"no vocabulary for {type(subject).__name__}")


# --------------------------------------------------------------------------
# marking


def mark(subject, marking: Marking):
    """Rename every plain concept/role name in ``subject`` to its copy.

    The subject must be plainly marked to begin with; individuals, query
    variables and variable concepts pass through unchanged.  Marking is
    injective on vocabulary, so ``unmark`` undoes it.
    """
    if marking is Marking.PLAIN:
        return subject
    return _remark(subject, marking, strict=True)


def unmark(subject):
    """Strip all markings, returning the plain copy."""
    return _remark(subject, Marking.PLAIN, strict=False)


def _remark(s, m: Marking, strict: bool):
    if isinstance(s, Name):
        if s.kind not in (Kind.CONCEPT, Kind.ROLE) or s.is_var_concept:
            return s
        if strict and s.marking is not Marking.PLAIN:
            raise ValueError(f"already marked: {s!r}")
        return Name(s.kind, s.text, m, False)
    if isinstance(s, Role):
        return Role(_remark(s.name, m, strict), s.inverted)
    if isinstance(s, (Top, Bottom, Nominal)):
        return s
    if isinstance(s, Atom):
        return Atom(_remark(s.name, m, strict))
    if isinstance(s, Not):
        return Not(_remark(s.sub, m, strict))
    if isinstance(s, And):
        return And(tuple(_remark(p, m, strict) for p in s.parts))
    if isinstance(s, Or):
        return Or(tuple(_remark(p, m, strict) for p in s.parts))
    if isinstance(s, Exists):
        return Exists(_remark(s.role, m, strict), _remark(s.filler, m, strict))
    if isinstance(s, Forall):
        return Forall(_remark(s.role, m, strict), _remark(s.filler, m, strict))
    if isinstance(s, ConceptIncl):
        return ConceptIncl(_remark(s.lhs, m, strict), _remark(s.rhs, m, strict))
    if isinstance(s, RoleIncl):
        return RoleIncl(_remark(s.lhs, m, strict), _remark(s.rhs, m, strict))
    if isinstance(s, Shape):
        return Shape(_remark(s.target, m, strict), _remark(s.constraint, m, strict))
    if isinstance(s, ConceptAssert):
        return ConceptAssert(s.subject, _remark(s.concept, m, strict))
    if isinstance(s, RoleAssert):
        return RoleAssert(s.subject, s.object, _remark(s.role, m, strict))
    if isinstance(s, Graph):
        return Graph(frozenset(_remark(a, m, strict) for a in s.assertions))
    raise TypeError(f"cannot mark {type(s).__name__}")


def concept_for(term: Name) -> Concept:
    """The concept naming the possible values of a pattern term.

    Individuals denote themselves, so they map to their nominal; a variable
    maps to its variable concept.
    """
    if term.kind is Kind.INDIVIDUAL:
        return Nominal(term)
    if term.kind is Kind.VARIABLE:
        return Atom(var_concept(term.text))
    raise ValueError(f"not a pattern term: {term!r}")


# --------------------------------------------------------------------------
# negation normal form


def nnf(c: Concept) -> Concept:
    """Push negation down to atoms and nominals."""
    if isinstance(c, (Top, Bottom, Atom, Nominal)):
        return c
    if isinstance(c, And):
        return and_of(nnf(p) for p in c.parts)
    if isinstance(c, Or):
        return or_of(nnf(p) for p in c.parts)
    if isinstance(c, Exists):
        return Exists(c.role, nnf(c.filler))
    if isinstance(c, Forall):
        return Forall(c.role, nnf(c.filler))
    sub = c.sub
    if isinstance(sub, Top):
        return BOTTOM
    if isinstance(sub, Bottom):
        return TOP
    if isinstance(sub, (Atom, Nominal)):
        return c
    if isinstance(sub, Not):
        return nnf(sub.sub)
    if isinstance(sub, And):
        return or_of(nnf(Not(p)) for p in sub.parts)
    if isinstance(sub, Or):
        return and_of(nnf(Not(p)) for p in sub.parts)
    if isinstance(sub, Exists):
        return Forall(sub.role, nnf(Not(sub.filler)))
    if isinstance(sub, Forall):
        return Exists(sub.role, nnf(Not(sub.filler)))
    raise TypeError(f"not a concept: {sub!r}")
