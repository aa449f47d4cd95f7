"""Brute-force ground truth for queries, shapes, and the reasoner.

Everything here is deliberately dumb: direct set evaluation over explicit
finite universes, exhaustive enumeration of graphs and interpretations.
The analyzer proper never calls into this module — it exists so that the
clever parts (axiom generation, the tableau) can be checked against
machinery too simple to be wrong in the same way twice.

Two representations are used.  The public functions work on ``Graph``
values and are written for clarity.  The soundness sweep and the bounded
consistency check additionally use a dense encoding (``_Dense``) of graphs
over a fixed tiny vocabulary as integer bitmasks, because they enumerate
tens of thousands of graphs per problem; a property test in the suite
pins the dense route to the plain one on random instances.

The canonical reading of a graph is the obvious one: concept names denote
their asserted members, roles their asserted edges, every individual
denotes itself.  The universe may be wider than the individuals that
happen to occur in the graph; pass ``universe`` to make that explicit.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator, Sequence

from .model import (
    And,
    Atom,
    Axiom,
    Bottom,
    Concept,
    ConceptAssert,
    ConceptAtom,
    ConceptIncl,
    Exists,
    Forall,
    Graph,
    Kind,
    KnowledgeBase,
    Marking,
    Name,
    Nominal,
    Not,
    Or,
    PatternAtom,
    Query,
    Role,
    RoleAssert,
    RoleAtom,
    RoleIncl,
    Shape,
    Top,
    atom_terms,
    individual,
    mark,
    name_key,
    var_concept,
    vocabulary,
)

# --------------------------------------------------------------------------
# canonical interpretation of a graph


class Interpretation:
    """Extensions of concepts and roles over a graph, memoized."""

    def __init__(self, graph: Graph, universe: Iterable[Name] = ()):
        self.universe = frozenset(graph.individuals()) | frozenset(universe)
        self.members: dict[Name, set[Name]] = {}
        self.succ: dict[tuple[Name, Name], set[Name]] = {}
        self.pred: dict[tuple[Name, Name], set[Name]] = {}
        self.edges: dict[Name, set[tuple[Name, Name]]] = {}
        for a in graph.assertions:
            if isinstance(a, ConceptAssert):
                self.members.setdefault(a.concept.name, set()).add(a.subject)
            else:
                r = a.role.name
                self.edges.setdefault(r, set()).add((a.subject, a.object))
                self.succ.setdefault((r, a.subject), set()).add(a.object)
                self.pred.setdefault((r, a.object), set()).add(a.subject)
        self._memo: dict[Concept, frozenset[Name]] = {}

    def successors(self, node: Name, role: Role) -> set[Name]:
        table = self.pred if role.inverted else self.succ
        return table.get((role.name, node), set())

    def pairs(self, role: Role) -> set[tuple[Name, Name]]:
        fwd = self.edges.get(role.name, set())
        return {(o, s) for s, o in fwd} if role.inverted else fwd

    def extension(self, c: Concept) -> frozenset[Name]:
        got = self._memo.get(c)
        if got is None:
            got = frozenset(self._eval(c))
            self._memo[c] = got
        return got

    def _eval(self, c: Concept) -> set[Name]:
        if isinstance(c, Top):
            return set(self.universe)
        if isinstance(c, Bottom):
            return set()
        if isinstance(c, Atom):
            return set(self.members.get(c.name, ()))
        if isinstance(c, Nominal):
            return {c.individual} if c.individual in self.universe else set()
        if isinstance(c, Not):
            return set(self.universe) - self.extension(c.sub)
        if isinstance(c, And):
            out = set(self.universe)
            for p in c.parts:
                out &= self.extension(p)
            return out
        if isinstance(c, Or):
            out: set[Name] = set()
            for p in c.parts:
                out |= self.extension(p)
            return out
        if isinstance(c, Exists):
            filler = self.extension(c.filler)
            return {d for d in self.universe if self.successors(d, c.role) & filler}
        if isinstance(c, Forall):
            filler = self.extension(c.filler)
            return {d for d in self.universe if self.successors(d, c.role) <= filler}
        raise TypeError(f"not a concept: {c!r}")


def extension_of(c: Concept, graph: Graph, universe: Iterable[Name] = ()) -> frozenset[Name]:
    """The set of individuals satisfying ``c`` under the canonical reading."""
    return Interpretation(graph, universe).extension(c)


def holds(graph: Graph, ax: Axiom | Shape, universe: Iterable[Name] = ()) -> bool:
    """Model-check one axiom (or shape) on a graph."""
    interp = Interpretation(graph, universe)
    if isinstance(ax, Shape):
        ax = ax.as_axiom()
    if isinstance(ax, ConceptIncl):
        return interp.extension(ax.lhs) <= interp.extension(ax.rhs)
    if isinstance(ax, RoleIncl):
        return interp.pairs(ax.lhs) <= interp.pairs(ax.rhs)
    raise TypeError(f"not an axiom: {ax!r}")


def valid(graph: Graph, axioms: Iterable[Axiom], universe: Iterable[Name] = ()) -> bool:
    interp = Interpretation(graph, universe)
    for ax in axioms:
        if isinstance(ax, ConceptIncl):
            if not interp.extension(ax.lhs) <= interp.extension(ax.rhs):
                return False
        elif not interp.pairs(ax.lhs) <= interp.pairs(ax.rhs):
            return False
    return True


# --------------------------------------------------------------------------
# query evaluation


def valuations(pattern: Sequence[PatternAtom], graph: Graph) -> list[dict[Name, Name]]:
    """Every total assignment of the pattern's variables matching the graph.

    Individuals occurring in the pattern stand for themselves.  The empty
    pattern has exactly one (empty) valuation.
    """
    interp = Interpretation(graph)
    # match the most constrained atoms first: ground terms before variables
    atoms = sorted(pattern, key=lambda a: sum(t.kind is Kind.VARIABLE for t in atom_terms(a)))
    results: list[dict[Name, Name]] = []

    def value(binding: dict[Name, Name], term: Name) -> Name | None:
        if term.kind is Kind.INDIVIDUAL:
            return term
        return binding.get(term)

    def extend(binding: dict[Name, Name], term: Name, node: Name) -> dict[Name, Name] | None:
        bound = value(binding, term)
        if bound is not None:
            return binding if bound == node else None
        new = dict(binding)
        new[term] = node
        return new

    def step(i: int, binding: dict[Name, Name]) -> None:
        if i == len(atoms):
            results.append(binding)
            return
        atom = atoms[i]
        if isinstance(atom, ConceptAtom):
            for node in sorted(interp.members.get(atom.concept, ()), key=name_key):
                new = extend(binding, atom.term, node)
                if new is not None:
                    step(i + 1, new)
        else:
            for s, o in sorted(interp.edges.get(atom.role, ()), key=lambda e: (name_key(e[0]), name_key(e[1]))):
                first = extend(binding, atom.subject, s)
                if first is None:
                    continue
                new = extend(first, atom.object, o)
                if new is not None:
                    step(i + 1, new)

    step(0, {})
    return results


def _instantiate(atoms: Sequence[PatternAtom], mu: dict[Name, Name]) -> set:
    out = set()
    for a in atoms:
        if isinstance(a, ConceptAtom):
            t = mu.get(a.term, a.term)
            out.add(ConceptAssert(t, Atom(a.concept)))
        else:
            s = mu.get(a.subject, a.subject)
            o = mu.get(a.object, a.object)
            out.add(RoleAssert(s, o, Role(a.role)))
    return out


def eval_query(q: Query, graph: Graph) -> Graph:
    """Instantiate the template once per pattern match and union the results."""
    out: set = set()
    for mu in valuations(q.pattern, graph):
        out |= _instantiate(q.template, mu)
    return Graph(frozenset(out))


def extended_graph(q: Query, gin: Graph) -> Graph:
    """The input graph with its matched, binding, and produced layers.

    The result holds four slices at once: the input graph untouched; every
    pattern instantiation under the MED marking; one membership ``a : $x``
    per binding of variable x to a; and the query result under the OUT
    marking.  Axioms produced by the analyzer are statements about this
    graph.
    """
    med: set = set()
    bindings: set = set()
    for mu in valuations(q.pattern, gin):
        med |= _instantiate(q.pattern, mu)
        for var, node in mu.items():
            bindings.add(ConceptAssert(node, Atom(var_concept(var.text))))
    out = eval_query(q, gin)
    return Graph(
        gin.assertions
        | frozenset(mark(Graph(frozenset(med)), Marking.MED).assertions)
        | frozenset(bindings)
        | frozenset(mark(out, Marking.OUT).assertions)
    )


# --------------------------------------------------------------------------
# graph enumeration


def assertion_universe(
    concepts: Iterable[Name], roles: Iterable[Name], individuals: Iterable[Name]
) -> list:
    inds = sorted(individuals, key=name_key)
    out: list = []
    for c in sorted(concepts, key=name_key):
        for i in inds:
            out.append(ConceptAssert(i, Atom(c)))
    for r in sorted(roles, key=name_key):
        for i in inds:
            for j in inds:
                out.append(RoleAssert(i, j, Role(r)))
    return out


def enumerate_graphs(
    concepts: Iterable[Name],
    roles: Iterable[Name],
    individuals: Iterable[Name],
    max_assertions: int | None = None,
) -> Iterator[Graph]:
    """All graphs over the vocabulary, each exactly once, smallest first."""
    slots = assertion_universe(concepts, roles, individuals)
    top = len(slots) if max_assertions is None else min(max_assertions, len(slots))
    for size in range(top + 1):
        for chosen in combinations(slots, size):
            yield Graph(frozenset(chosen))


# --------------------------------------------------------------------------
# dense fast path


class _Dense:
    """Graphs over a fixed vocabulary as bitmasks (universe size k ≤ ~4).

    A graph is a pair (cvec, rvec): cvec[ci] is the k-bit membership mask
    of the ci-th concept name, rvec[ri][i] the successor mask of node i
    under the ri-th role name.
    """

    def __init__(self, concepts: Iterable[Name], roles: Iterable[Name], individuals: Iterable[Name]):
        self.concepts = sorted(set(concepts), key=name_key)
        self.roles = sorted(set(roles), key=name_key)
        self.individuals = sorted(set(individuals), key=name_key)
        self.k = len(self.individuals)
        self.cindex = {c: i for i, c in enumerate(self.concepts)}
        self.rindex = {r: i for i, r in enumerate(self.roles)}
        self.nindex = {n: i for i, n in enumerate(self.individuals)}
        self.full = (1 << self.k) - 1

    # ---- evaluation

    def ext(self, c: Concept, cvec, rvec) -> int:
        if isinstance(c, Top):
            return self.full
        if isinstance(c, Bottom):
            return 0
        if isinstance(c, Atom):
            ci = self.cindex.get(c.name)
            return 0 if ci is None else cvec[ci]
        if isinstance(c, Nominal):
            ni = self.nindex.get(c.individual)
            if ni is None:
                raise ValueError(f"individual outside the universe: {c.individual!r}")
            return 1 << ni
        if isinstance(c, Not):
            return self.full & ~self.ext(c.sub, cvec, rvec)
        if isinstance(c, And):
            out = self.full
            for p in c.parts:
                out &= self.ext(p, cvec, rvec)
            return out
        if isinstance(c, Or):
            out = 0
            for p in c.parts:
                out |= self.ext(p, cvec, rvec)
            return out
        filler = self.ext(c.filler, cvec, rvec)
        ri = self.rindex.get(c.role.name)
        succ = rvec[ri] if ri is not None else [0] * self.k
        if isinstance(c, Exists):
            if not c.role.inverted:
                return sum(1 << i for i in range(self.k) if succ[i] & filler)
            out = 0
            for i in range(self.k):
                if filler >> i & 1:
                    out |= succ[i]
            return out
        # Forall
        if not c.role.inverted:
            bad = self.full & ~filler
            return sum(1 << i for i in range(self.k) if not succ[i] & bad)
        out = 0
        for i in range(self.k):
            if (self.full & ~filler) >> i & 1:
                out |= succ[i]
        return self.full & ~out

    def rel(self, r: Role, rvec) -> set[tuple[int, int]]:
        ri = self.rindex.get(r.name)
        if ri is None:
            return set()
        pairs = {
            (i, j) for i in range(self.k) for j in range(self.k) if rvec[ri][i] >> j & 1
        }
        return {(j, i) for i, j in pairs} if r.inverted else pairs

    def axiom_holds(self, ax: Axiom, cvec, rvec) -> bool:
        if isinstance(ax, ConceptIncl):
            return not self.ext(ax.lhs, cvec, rvec) & ~self.ext(ax.rhs, cvec, rvec)
        return self.rel(ax.lhs, rvec) <= self.rel(ax.rhs, rvec)

    # ---- enumeration

    def all_graphs(self) -> Iterator[tuple[tuple[int, ...], tuple[tuple[int, ...], ...]]]:
        n, m, k = len(self.concepts), len(self.roles), self.k
        masks = 1 << k
        cvecs = [()]
        for _ in range(n):
            cvecs = [v + (b,) for v in cvecs for b in range(masks)]
        rrows = [()]
        for _ in range(k):
            rrows = [v + (b,) for v in rrows for b in range(masks)]
        rvecs = [()]
        for _ in range(m):
            rvecs = [v + (row,) for v in rvecs for row in rrows]
        for cvec in cvecs:
            for rvec in rvecs:
                yield cvec, rvec

    # ---- conversion

    def to_graph(self, cvec, rvec) -> Graph:
        assertions: set = set()
        for c, maskbits in zip(self.concepts, cvec):
            for i in range(self.k):
                if maskbits >> i & 1:
                    assertions.add(ConceptAssert(self.individuals[i], Atom(c)))
        for r, rows in zip(self.roles, rvec):
            for i in range(self.k):
                for j in range(self.k):
                    if rows[i] >> j & 1:
                        assertions.add(RoleAssert(self.individuals[i], self.individuals[j], Role(r)))
        return Graph(frozenset(assertions))

    # ---- query evaluation

    def dense_valuations(self, pattern: Sequence[PatternAtom], cvec, rvec) -> list[dict[Name, int]]:
        atoms = sorted(pattern, key=lambda a: sum(t.kind is Kind.VARIABLE for t in atom_terms(a)))
        results: list[dict[Name, int]] = []
        k = self.k

        def node_of(binding, term: Name):
            if term.kind is Kind.INDIVIDUAL:
                ni = self.nindex.get(term)
                if ni is None:
                    raise ValueError(f"individual outside the universe: {term!r}")
                return ni
            return binding.get(term)

        def step(i: int, binding: dict[Name, int]) -> None:
            if i == len(atoms):
                results.append(binding)
                return
            atom = atoms[i]
            if isinstance(atom, ConceptAtom):
                ci = self.cindex.get(atom.concept)
                members = cvec[ci] if ci is not None else 0
                want = node_of(binding, atom.term)
                for node in range(k):
                    if not members >> node & 1:
                        continue
                    if want is not None:
                        if want == node:
                            step(i + 1, binding)
                        continue
                    new = dict(binding)
                    new[atom.term] = node
                    step(i + 1, new)
            else:
                ri = self.rindex.get(atom.role)
                rows = rvec[ri] if ri is not None else [0] * k
                want_s = node_of(binding, atom.subject)
                want_o = node_of(binding, atom.object)
                for s in range(k) if want_s is None else (want_s,):
                    row = rows[s]
                    for o in range(k) if want_o is None else (want_o,):
                        if not row >> o & 1:
                            continue
                        new = binding
                        if want_s is None or want_o is None:
                            new = dict(binding)
                            if want_s is None:
                                new[atom.subject] = s
                            if want_o is None:
                                if atom.object in new and new[atom.object] != o:
                                    continue
                                new[atom.object] = o
                        step(i + 1, new)

        step(0, {})
        return results

    def dense_result(self, q: Query, cvec, rvec, out_dense: "_Dense"):
        """Evaluate the query; the result is encoded over ``out_dense``."""
        out_c = [0] * len(out_dense.concepts)
        out_r = [[0] * self.k for _ in out_dense.roles]
        nonempty = False
        for mu in self.dense_valuations(q.pattern, cvec, rvec):
            nonempty = True
            for a in q.template:
                if isinstance(a, ConceptAtom):
                    node = mu[a.term] if a.term.kind is Kind.VARIABLE else self.nindex[a.term]
                    out_c[out_dense.cindex[a.concept]] |= 1 << node
                else:
                    s = mu[a.subject] if a.subject.kind is Kind.VARIABLE else self.nindex[a.subject]
                    o = mu[a.object] if a.object.kind is Kind.VARIABLE else self.nindex[a.object]
                    out_r[out_dense.rindex[a.role]][s] |= 1 << o
        return nonempty and bool(q.template), tuple(out_c), tuple(tuple(row) for row in out_r)


# --------------------------------------------------------------------------
# soundness sweep


@dataclass(frozen=True)
class Violation:
    """A counterexample: on this valid input, the result breaks the shape."""

    shape: Axiom
    input_graph: Graph
    result_graph: Graph


def padded_individuals(present: Iterable[Name], total: int) -> list[Name]:
    """The given individuals, topped up with fresh ones to ``total``."""
    inds = sorted(set(present), key=name_key)
    taken = {i.text for i in inds}
    k = 1
    while len(inds) < total:
        cand = f"i{k}"
        k += 1
        if cand not in taken:
            inds.append(individual(cand))
    return inds


def check_soundness(
    input_axioms: Sequence[Axiom],
    q: Query,
    output_shapes: Sequence[Shape | Axiom],
    bound: int = 3,
    max_assertions: int | None = None,
    stop_after: int | None = None,
) -> list[Violation]:
    """Exhaustively hunt for a valid input whose result violates an output.

    Every graph over the problem's vocabulary with ``bound`` individuals
    (query/shape individuals first, fresh ones after) is generated; for the
    valid ones the query result is model-checked against every output
    shape.  An empty list certifies soundness at this scale.
    """
    out_axioms = [s.as_axiom() if isinstance(s, Shape) else s for s in output_shapes]
    concepts = set()
    roles = set()
    for source in (q.template, q.pattern, input_axioms):
        for n in vocabulary(source):
            (concepts if n.kind is Kind.CONCEPT else roles).add(n)
    inds = padded_individuals(q.individuals(), bound)

    dense = _Dense(concepts, roles, inds)
    out_concepts = {a.concept for a in q.template if isinstance(a, ConceptAtom)}
    out_roles = {a.role for a in q.template if isinstance(a, RoleAtom)}
    out_dense = _Dense(out_concepts, out_roles, inds)

    if max_assertions is not None:
        return _check_soundness_slow(
            input_axioms, q, out_axioms, concepts, roles, inds, max_assertions, stop_after
        )

    violations: list[Violation] = []
    for cvec, rvec in dense.all_graphs():
        ok = True
        for ax in input_axioms:
            if not dense.axiom_holds(ax, cvec, rvec):
                ok = False
                break
        if not ok:
            continue
        produced, out_c, out_r = dense.dense_result(q, cvec, rvec, out_dense)
        if not produced:
            # empty results satisfy every candidate: targets are atoms or
            # exists-role, both empty on the empty graph
            continue
        for ax in out_axioms:
            if not out_dense.axiom_holds(ax, out_c, out_r):
                violations.append(
                    Violation(ax, dense.to_graph(cvec, rvec), out_dense.to_graph(out_c, out_r))
                )
                if stop_after is not None and len(violations) >= stop_after:
                    return violations
    return violations


def _check_soundness_slow(
    input_axioms, q, out_axioms, concepts, roles, inds, max_assertions, stop_after
) -> list[Violation]:
    violations: list[Violation] = []
    for g in enumerate_graphs(concepts, roles, inds, max_assertions):
        if not valid(g, input_axioms, inds):
            continue
        result = eval_query(q, g)
        if not len(result):
            continue
        for ax in out_axioms:
            if not holds(result, ax, inds):
                violations.append(Violation(ax, g, result))
                if stop_after is not None and len(violations) >= stop_after:
                    return violations
    return violations


# --------------------------------------------------------------------------
# bounded model finding


def bounded_model_consistent(kb: KnowledgeBase, individuals: Iterable[Name]) -> bool:
    """Satisfiability over interpretations with exactly this domain.

    Every individual denotes itself, so this only agrees with unrestricted
    consistency when the TBox itself closes the domain (a covering nominal
    disjunction) and separates the individuals.  The reasoner test
    generator includes those axioms for that reason.
    """
    concepts = set()
    roles = set()
    mentioned: set[Name] = set()
    for ax in kb.tbox:
        _collect_kb_names(ax, concepts, roles, mentioned)
    for a in kb.abox:
        if isinstance(a, ConceptAssert):
            mentioned.add(a.subject)
            _collect_kb_names(a.concept, concepts, roles, mentioned)
        else:
            mentioned.update((a.subject, a.object))
            roles.add(a.role.name)
    universe = sorted(set(individuals), key=name_key)
    missing = mentioned - set(universe)
    if missing:
        raise ValueError(f"KB mentions individuals outside the domain: {sorted(n.text for n in missing)}")

    dense = _Dense(concepts, roles, universe)
    tbox = tuple(kb.tbox)
    for cvec, rvec in dense.all_graphs():
        if all(dense.axiom_holds(ax, cvec, rvec) for ax in tbox) and _abox_holds(
            kb.abox, dense, cvec, rvec
        ):
            return True
    return False


def _abox_holds(abox, dense: _Dense, cvec, rvec) -> bool:
    for a in abox:
        if isinstance(a, ConceptAssert):
            if not dense.ext(a.concept, cvec, rvec) >> dense.nindex[a.subject] & 1:
                return False
        else:
            s, o = dense.nindex[a.subject], dense.nindex[a.object]
            if a.role.inverted:
                s, o = o, s
            ri = dense.rindex[a.role.name]
            if not rvec[ri][s] >> o & 1:
                return False
    return True


def _collect_kb_names(x, concepts: set, roles: set, mentioned: set) -> None:
    if isinstance(x, ConceptIncl):
        _collect_kb_names(x.lhs, concepts, roles, mentioned)
        _collect_kb_names(x.rhs, concepts, roles, mentioned)
    elif isinstance(x, RoleIncl):
        roles.add(x.lhs.name)
        roles.add(x.rhs.name)
    elif isinstance(x, Atom):
        concepts.add(x.name)
    elif isinstance(x, Nominal):
        mentioned.add(x.individual)
    elif isinstance(x, Not):
        _collect_kb_names(x.sub, concepts, roles, mentioned)
    elif isinstance(x, (And, Or)):
        for p in x.parts:
            _collect_kb_names(p, concepts, roles, mentioned)
    elif isinstance(x, (Exists, Forall)):
        roles.add(x.role.name)
        _collect_kb_names(x.filler, concepts, roles, mentioned)
