"""Turning a query plus input shapes into one description-logic theory.

The analyzer decides "does every result graph satisfy shape s?" by
entailment from a single axiom set built here.  The set speaks about an
imaginary extended graph holding four layers at once (see
``oracle.extended_graph``): the input graph, the matched pattern copy
(MED marking), the per-variable binding concepts ``$x``, and the produced
result copy (OUT marking).  It has four sections:

* ``from_input`` — the user's shapes, verbatim, constraining the input layer;
* ``from_closure`` — what it means to be matched: distinctness of the
  query's individuals, and closure axioms tying each marked name to the
  binding concepts of the pattern/template atoms that can produce it;
* ``from_maps`` — subsumptions between binding concepts discovered by
  embedding one pattern component into another (extended by what the input
  shapes force to exist);
* ``from_roles`` — inclusions between the role copies.

Soundness discipline.  Every axiom emitted must hold on the extended graph
of *every* valid input, with one sanctioned exception: closure axioms may
fail when the query mentions individuals and the result is empty (nothing
forces a match to exist, but the individuals' nominals are nonempty
anyway); callers checking soundness skip exactly that case.  Several
closure directions that would be natural to emit are unsound without
side conditions, so they are gated:

* The lower bound on a binding concept ($x ⊒ its conjuncts) needs x's
  component to be tree-shaped — counted with multiplicity, so two atoms
  sharing two variables, or an atom repeating a variable, already form a
  cycle — and needs a witness that the rest of the pattern matches: either
  a binding-concept conjunct or the component being the whole pattern.
* A med edge closure (∃p'.C_v ⊑ C_u) needs the edge's origin pinned: a
  single p-atom, a common subject term, or a subject variable occurring
  nowhere else (whose atom any p-edge can then re-instantiate).  Result
  edges are not backed by input edges, so the out copies only get the
  first two routes.
* p ⊑ p' (every input edge is matched) holds only when the pattern is a
  disjoint union of single-use p-edges, i.e. every atom is a p-atom whose
  two variables are distinct and occur nowhere else.

Each gate exists because the unrestricted axiom has a concrete finite
counterexample; the test suite pins both the counterexamples and the
reference outputs that the gated set still derives.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from .model import (
    Atom,
    Axiom,
    BOTTOM,
    Concept,
    ConceptAtom,
    ConceptIncl,
    Exists,
    Forall,
    Kind,
    Marking,
    Name,
    Nominal,
    PatternAtom,
    Query,
    Role,
    RoleAtom,
    RoleIncl,
    TOP,
    and_of,
    atom_terms,
    axiom_key,
    concept_for,
    is_simple_shape,
    mark,
    name_key,
    or_of,
    pattern_terms,
    pattern_variables,
    var_concept,
    variable,
)

Pattern = tuple[PatternAtom, ...]


# --------------------------------------------------------------------------
# the variable-connection view of a pattern


@dataclass(frozen=True)
class Vcg:
    """Atoms as nodes, an edge wherever two atoms share a variable."""

    nodes: tuple[PatternAtom, ...]
    edges: frozenset[tuple[int, int]]


def _shared_variables(a: PatternAtom, b: PatternAtom) -> int:
    va = {t for t in atom_terms(a) if t.kind is Kind.VARIABLE}
    vb = {t for t in atom_terms(b) if t.kind is Kind.VARIABLE}
    return len(va & vb)


def vcg(atoms: Sequence[PatternAtom]) -> Vcg:
    nodes = tuple(atoms)
    edges = frozenset(
        (i, j)
        for i, j in combinations(range(len(nodes)), 2)
        if _shared_variables(nodes[i], nodes[j])
    )
    return Vcg(nodes, edges)


def components(atoms: Sequence[PatternAtom]) -> list[Pattern]:
    """Maximal connected sub-patterns; ground atoms stand alone."""
    nodes = list(atoms)
    graph = vcg(nodes)
    adj: dict[int, set[int]] = {i: set() for i in range(len(nodes))}
    for i, j in graph.edges:
        adj[i].add(j)
        adj[j].add(i)
    seen: set[int] = set()
    out: list[Pattern] = []
    for start in range(len(nodes)):
        if start in seen:
            continue
        stack = [start]
        block = []
        while stack:
            i = stack.pop()
            if i in seen:
                continue
            seen.add(i)
            block.append(i)
            stack.extend(adj[i] - seen)
        out.append(tuple(nodes[i] for i in sorted(block)))
    return out


def component_acyclic(atoms: Sequence[PatternAtom]) -> bool:
    """Tree-shapedness of one component, counting shared variables with
    multiplicity: a pair of atoms sharing two variables is a double edge
    and an atom repeating a variable is a self-loop, both cycles."""
    for a in atoms:
        if isinstance(a, RoleAtom) and a.subject == a.object and a.subject.kind is Kind.VARIABLE:
            return False
    edge_count = sum(_shared_variables(a, b) for a, b in combinations(atoms, 2))
    return edge_count <= len(atoms) - 1


def _max_degree(atoms: Sequence[PatternAtom]) -> int:
    graph = vcg(atoms)
    degree = [0] * len(graph.nodes)
    for i, j in graph.edges:
        degree[i] += 1
        degree[j] += 1
    return max(degree, default=0)


def _component_diameter(atoms: Sequence[PatternAtom]) -> int:
    """Longest shortest path between atoms of one connected component."""
    graph = vcg(atoms)
    n = len(graph.nodes)
    adj: dict[int, set[int]] = {i: set() for i in range(n)}
    for i, j in graph.edges:
        adj[i].add(j)
        adj[j].add(i)
    best = 0
    for start in range(n):
        dist = {start: 0}
        frontier = [start]
        while frontier:
            nxt = []
            for i in frontier:
                for j in adj[i]:
                    if j not in dist:
                        dist[j] = dist[i] + 1
                        nxt.append(j)
            frontier = nxt
        best = max(best, max(dist.values(), default=0))
    return best


def _max_component_diameter(atoms: Sequence[PatternAtom]) -> int:
    return max((_component_diameter(c) for c in components(atoms)), default=0)


# --------------------------------------------------------------------------
# distinctness of the query's individuals


def una_axioms(q: Query) -> list[Axiom]:
    """Distinct individual names denote distinct nodes."""
    out: list[Axiom] = []
    for a, b in combinations(sorted(q.individuals(), key=name_key), 2):
        both = and_of([Nominal(a), Nominal(b)])
        out.append(ConceptIncl(both, BOTTOM))
        out.append(ConceptIncl(BOTTOM, both))
    return out


# --------------------------------------------------------------------------
# closure of the marked copies (what it means to be matched / produced)


def _binding_conjuncts(x: Name, atoms: Sequence[PatternAtom]) -> list[Concept]:
    out: list[Concept] = []
    for a in atoms:
        if isinstance(a, ConceptAtom):
            if a.term == x:
                out.append(Atom(a.concept))
        else:
            if a.subject == x:
                out.append(Exists(Role(a.role), concept_for(a.object)))
            if a.object == x:
                out.append(Exists(Role(a.role, inverted=True), concept_for(a.subject)))
    return out


def _has_var_conjunct(x: Name, atoms: Sequence[PatternAtom]) -> bool:
    for a in atoms:
        if isinstance(a, RoleAtom):
            if a.subject == x and a.object.kind is Kind.VARIABLE and a.object != x:
                return True
            if a.object == x and a.subject.kind is Kind.VARIABLE and a.subject != x:
                return True
    return False


def _role_copy_axioms(
    atoms: Sequence[RoleAtom], marking: Marking, whole_pattern: Sequence[PatternAtom] | None
) -> list[Axiom]:
    """Closure for one role name's marked copy, built from its atoms.

    ``whole_pattern`` is given for the med copy only and enables the
    unique-subject/object override route (see module docstring).
    """
    out: list[Axiom] = []
    role_out: dict[bool, list[Concept]] = {False: [], True: []}
    single = len(atoms) == 1
    common_subject = len({a.subject for a in atoms}) == 1
    common_object = len({a.object for a in atoms}) == 1

    def occurs_once(t: Name) -> bool:
        if whole_pattern is None or t.kind is not Kind.VARIABLE:
            return False
        return sum(t in atom_terms(a) for a in whole_pattern) == 1

    for a in atoms:
        fwd = Role(mark(a.role, marking))
        bwd = fwd.inverse()
        cu, cv = concept_for(a.subject), concept_for(a.object)
        out.append(ConceptIncl(cu, Exists(fwd, cv)))
        out.append(ConceptIncl(cv, Exists(bwd, cu)))
        if single or common_subject or (a.subject != a.object and occurs_once(a.subject)):
            out.append(ConceptIncl(Exists(fwd, cv), cu))
        if single or common_object or (a.subject != a.object and occurs_once(a.object)):
            out.append(ConceptIncl(Exists(bwd, cu), cv))
        role_out[False].append(and_of([cu, Exists(fwd, cv)]))
        role_out[True].append(and_of([cv, Exists(bwd, cu)]))

    marked = Role(mark(atoms[0].role, marking))
    for inverted, disjuncts in role_out.items():
        anything = Exists(marked.inverse() if inverted else marked, TOP)
        union = or_of(disjuncts)
        out.append(ConceptIncl(anything, union))
        out.append(ConceptIncl(union, anything))
    return out


def cwa_axioms(q: Query) -> list[Axiom]:
    """Closed-world closure of the med, out, and binding vocabulary.

    Each marked concept is equated with the binding concepts of the atoms
    that can produce it; each binding concept is bounded above by its
    variable's conjuncts (and below, when the gates allow); each marked
    role copy is tied to the binding concepts at its atoms' endpoints.
    """
    P, H = q.pattern, q.template
    out: list[Axiom] = []

    # marked concept names: A' over the pattern, A'' over the template
    for atoms, marking in ((P, Marking.MED), (H, Marking.OUT)):
        per_concept: dict[Name, list[Concept]] = {}
        for a in atoms:
            if isinstance(a, ConceptAtom):
                per_concept.setdefault(a.concept, []).append(concept_for(a.term))
        for cname in sorted(per_concept, key=name_key):
            marked = Atom(mark(cname, marking))
            producers = or_of(per_concept[cname])
            rhs = and_of([Atom(cname), producers]) if marking is Marking.MED else producers
            out.append(ConceptIncl(marked, rhs))
            out.append(ConceptIncl(rhs, marked))

    # binding concepts
    comps = components(P)
    comp_of: dict[Name, Pattern] = {}
    for comp in comps:
        for v in pattern_variables(comp):
            comp_of[v] = comp
    pattern_set = set(P)
    for x in sorted(pattern_variables(P), key=name_key):
        constraint = and_of(_binding_conjuncts(x, P))
        vx = Atom(var_concept(x.text))
        out.append(ConceptIncl(vx, constraint))
        comp = comp_of[x]
        if component_acyclic(comp) and (_has_var_conjunct(x, P) or set(comp) == pattern_set):
            out.append(ConceptIncl(constraint, vx))

    # marked role names
    for atoms, marking in ((P, Marking.MED), (H, Marking.OUT)):
        per_role: dict[Name, list[RoleAtom]] = {}
        for a in atoms:
            if isinstance(a, RoleAtom):
                per_role.setdefault(a.role, []).append(a)
        for rname in sorted(per_role, key=name_key):
            out.extend(
                _role_copy_axioms(
                    per_role[rname], marking, P if marking is Marking.MED else None
                )
            )

    return _dedup_axioms(out)


# --------------------------------------------------------------------------
# component maps


def component_maps(p1: Sequence[PatternAtom], p2: Sequence[PatternAtom]) -> list[dict[Name, Name]]:
    """Every map of P1's variables into P2's terms embedding P1 into P2."""
    maps: list[dict[Name, Name]] = []
    seen: set[tuple] = set()
    for h in _embeddings(tuple(p1), tuple(p2), {}):
        key = tuple(sorted(((k, v) for k, v in h.items()), key=lambda kv: name_key(kv[0])))
        if key not in seen:
            seen.add(key)
            maps.append(h)
    maps.sort(key=lambda h: tuple(sorted((name_key(k), name_key(v)) for k, v in h.items())))
    return maps


def _embeddings(p1: Pattern, p2: Pattern, binding: dict[Name, Name]):
    if not p1:
        yield dict(binding)
        return
    head, rest = p1[0], p1[1:]
    for cand in p2:
        trial = _match_atom(head, cand, binding)
        if trial is not None:
            yield from _embeddings(rest, p2, trial)


def _match_atom(a: PatternAtom, b: PatternAtom, binding: dict[Name, Name]) -> dict[Name, Name] | None:
    if isinstance(a, ConceptAtom):
        if not isinstance(b, ConceptAtom) or a.concept != b.concept:
            return None
        return _bind(binding, ((a.term, b.term),))
    if not isinstance(b, RoleAtom) or a.role != b.role:
        return None
    return _bind(binding, ((a.subject, b.subject), (a.object, b.object)))


def _bind(binding: dict[Name, Name], pairs) -> dict[Name, Name] | None:
    new = binding
    for src, dst in pairs:
        if src.kind is Kind.INDIVIDUAL:
            if src != dst:
                return None
            continue
        bound = new.get(src)
        if bound is not None:
            if bound != dst:
                return None
            continue
        if new is binding:
            new = dict(binding)
        new[src] = dst
    return new if new is not binding else dict(binding)


# --------------------------------------------------------------------------
# shape-driven pattern extension


class _FreshVars:
    """Deterministic x0, x1, … avoiding a given set of names."""

    def __init__(self, taken: Iterable[str]):
        self.taken = set(taken)
        self.counter = 0

    def next(self) -> Name:
        while True:
            cand = f"x{self.counter}"
            self.counter += 1
            if cand not in self.taken:
                self.taken.add(cand)
                return variable(cand)


def extension_atoms(
    x: Name, constraint: Concept, current: Sequence[PatternAtom], fresh: _FreshVars | None = None
) -> set[PatternAtom]:
    """The atoms forced at ``x`` by one shape constraint.

    Existential constraints introduce one fresh variable for the witness;
    universal ones close over the role edges already present.
    """
    if fresh is None:
        fresh = _FreshVars(t.text for t in pattern_terms(current))
    if isinstance(constraint, Atom):
        return {ConceptAtom(x, constraint.name)}
    if isinstance(constraint, Exists):
        witness = fresh.next()
        filler = constraint.filler
        edge = (
            RoleAtom(witness, x, constraint.role.name)
            if constraint.role.inverted
            else RoleAtom(x, witness, constraint.role.name)
        )
        return {edge, ConceptAtom(witness, filler.name)}
    if isinstance(constraint, Forall):
        filler = constraint.filler
        out: set[PatternAtom] = set()
        for a in current:
            if isinstance(a, RoleAtom) and a.role == constraint.role.name:
                if constraint.role.inverted:
                    if a.object == x:
                        out.add(ConceptAtom(a.subject, filler.name))
                elif a.subject == x:
                    out.add(ConceptAtom(a.object, filler.name))
        return out
    raise ValueError(f"not a simple constraint: {constraint!r}")


def _targets_of(shape: ConceptIncl, atoms: Sequence[PatternAtom]) -> list[Name]:
    """Variables of ``atoms`` that visibly satisfy the shape's target."""
    found: set[Name] = set()
    t = shape.lhs
    for a in atoms:
        if isinstance(t, Atom):
            if isinstance(a, ConceptAtom) and a.concept == t.name:
                found.add(a.term)
        else:  # Exists(role, Top)
            if isinstance(a, RoleAtom) and a.role == t.role.name:
                found.add(a.object if t.role.inverted else a.subject)
    return sorted((v for v in found if v.kind is Kind.VARIABLE), key=name_key)


def max_extension(
    component: Sequence[PatternAtom],
    pattern: Sequence[PatternAtom],
    shapes: Sequence[ConceptIncl],
    fresh: _FreshVars | None = None,
) -> Pattern:
    """Saturate a component with everything the input shapes force.

    Extensions at the component's own variables are always admitted:
    whatever the shapes force at a matched node exists in every valid
    graph.  Extensions that chain further (at fresh witness variables) are
    admitted only while the added atoms stay within the shape of the
    original pattern — its maximum connection-graph degree and component
    diameter — which keeps the saturation finite and the maps it feeds
    bounded.  Existential extensions fire once per (variable, shape).
    """
    if fresh is None:
        fresh = _FreshVars(t.text for t in pattern_terms(pattern))
    max_deg = _max_degree(pattern)
    max_diam = _max_component_diameter(pattern)
    original_vars = pattern_variables(component)
    current: list[PatternAtom] = list(component)
    current_set: set[PatternAtom] = set(component)
    added: list[PatternAtom] = []
    fired: set[tuple[Name, ConceptIncl]] = set()
    ordered = sorted(shapes, key=axiom_key)

    def admits(extra: Iterable[PatternAtom]) -> bool:
        trial = added + [a for a in extra if a not in current_set]
        if _max_degree(trial) > max_deg:
            return False
        return all(_component_diameter(c) <= max_diam for c in components(trial))

    changed = True
    while changed:
        changed = False
        for shape in ordered:
            existential = not isinstance(shape.rhs, Forall)
            for u in _targets_of(shape, current):
                if existential:
                    if (u, shape) in fired:
                        continue
                    fired.add((u, shape))
                    new_atoms = extension_atoms(u, shape.rhs, current, fresh)
                    fresh_extension = [a for a in new_atoms if a not in current_set]
                    if not fresh_extension:
                        continue
                    if u in original_vars or admits(fresh_extension):
                        for a in fresh_extension:
                            current.append(a)
                            current_set.add(a)
                            added.append(a)
                        changed = True
                else:
                    for a in extension_atoms(u, shape.rhs, current, fresh):
                        if a in current_set:
                            continue
                        subject = a.term
                        if subject in original_vars or admits([a]):
                            current.append(a)
                            current_set.add(a)
                            added.append(a)
                            changed = True
    return tuple(current)


def map_axioms(pattern: Sequence[PatternAtom], input_shapes: Sequence[Axiom]) -> list[Axiom]:
    """Subsumptions between binding concepts via component embedding.

    If component P1 embeds into (the shape-extension of) component P2 by
    h, then any match of P2 yields a match of P1 along h, so whatever
    binds h(x) also binds x: conceptFor(h(x)) ⊑ $x.  Values that are
    individuals are deliberately skipped: with an empty result set the
    nominal is still inhabited but the binding concept is not, and unlike
    the closure section this section enjoys no sanctioned skip.
    """
    simple = [ax for ax in input_shapes if is_simple_shape(ax)]
    comps = components(pattern)
    extended: list[Pattern] = []
    fresh = _FreshVars(t.text for t in pattern_terms(pattern))
    for comp in comps:
        extended.append(max_extension(comp, pattern, simple, fresh))

    out: set[Axiom] = set()
    for p1 in comps:
        p1_vars = pattern_variables(p1)
        for p2, p2ext in zip(comps, extended):
            p2_terms = pattern_terms(p2)
            for x, u in _embedding_pairs(tuple(p1), p2ext, p1_vars):
                if u.kind is Kind.INDIVIDUAL or u not in p2_terms:
                    continue
                lhs = concept_for(u)
                rhs = Atom(var_concept(x.text))
                if lhs != rhs:
                    out.add(ConceptIncl(lhs, rhs))
    return sorted(out, key=axiom_key)


def _embedding_pairs(p1: Pattern, p2: Pattern, p1_vars: frozenset[Name]) -> set[tuple[Name, Name]]:
    """All (x, h(x)) over embeddings h of p1 into p2.

    Small components are enumerated outright; larger ones are probed one
    (variable, value) pair at a time so a combinatorial number of
    embeddings cannot pile up.
    """
    if len(p1_vars) <= 6:
        pairs: set[tuple[Name, Name]] = set()
        for h in _embeddings(p1, p2, {}):
            pairs.update(h.items())
        return pairs
    pairs = set()
    for x in p1_vars:
        for u in pattern_terms(p2):
            if (x, u) in pairs:
                continue
            for _ in _embeddings(p1, p2, {x: u}):
                pairs.add((x, u))
                break
    return pairs


# --------------------------------------------------------------------------
# role copies


def _single_use_edges(pattern: Sequence[PatternAtom], p: Name) -> bool:
    """Is the pattern a disjoint union of one-shot p-edges?  Then any
    plain p-edge at all can be matched, so every such edge has a med copy."""
    occurrences: dict[Name, int] = {}
    for a in pattern:
        if not (isinstance(a, RoleAtom) and a.role == p):
            return False
        if a.subject == a.object:
            return False
        if a.subject.kind is not Kind.VARIABLE or a.object.kind is not Kind.VARIABLE:
            return False
        for v in (a.subject, a.object):
            occurrences[v] = occurrences.get(v, 0) + 1
    return bool(occurrences) and all(c == 1 for c in occurrences.values())


def role_axioms(q: Query) -> list[Axiom]:
    """Inclusions between the plain, med, and out copies of each role."""
    P, H = q.pattern, q.template
    out: list[Axiom] = []

    p_roles = sorted({a.role for a in P if isinstance(a, RoleAtom)}, key=name_key)
    for p in p_roles:
        out.append(RoleIncl(Role(mark(p, Marking.MED)), Role(p)))

    # every plain edge is matched — only when the pattern is a disjoint
    # union of single-use edges of this very role
    for p in p_roles:
        if _single_use_edges(P, p):
            out.append(RoleIncl(Role(p), Role(mark(p, Marking.MED))))

    # med/out transfer along atoms instantiated by the same valuation
    p_count: dict[Name, int] = {}
    for a in P:
        if isinstance(a, RoleAtom):
            p_count[a.role] = p_count.get(a.role, 0) + 1
    h_count: dict[Name, int] = {}
    for a in H:
        if isinstance(a, RoleAtom):
            h_count[a.role] = h_count.get(a.role, 0) + 1
    for pa in P:
        if not isinstance(pa, RoleAtom):
            continue
        med = Role(mark(pa.role, Marking.MED))
        for ha in H:
            if not isinstance(ha, RoleAtom):
                continue
            out_role = Role(mark(ha.role, Marking.OUT))
            if (ha.subject, ha.object) == (pa.subject, pa.object):
                aligned = out_role
            elif (ha.subject, ha.object) == (pa.object, pa.subject):
                aligned = out_role.inverse()
            else:
                continue
            if p_count[pa.role] == 1:
                out.append(RoleIncl(med, aligned))
            if h_count[ha.role] == 1:
                out.append(RoleIncl(aligned, med))
    return _dedup_axioms(out)


# --------------------------------------------------------------------------
# assembly


@dataclass(frozen=True)
class AxiomBundle:
    """The four sections of the analyzer's theory, each canonically sorted."""

    from_input: tuple[Axiom, ...]
    from_closure: tuple[Axiom, ...]
    from_maps: tuple[Axiom, ...]
    from_roles: tuple[Axiom, ...]

    def all_axioms(self) -> tuple[Axiom, ...]:
        return self.from_input + self.from_closure + self.from_maps + self.from_roles

    def sections(self) -> list[tuple[str, tuple[Axiom, ...]]]:
        return [
            ("Σ_in", self.from_input),
            ("Σ_vkb", self.from_closure),
            ("Σ_map", self.from_maps),
            ("Σ_prop", self.from_roles),
        ]


def _dedup_axioms(axs: Iterable[Axiom]) -> list[Axiom]:
    return sorted(set(axs), key=axiom_key)


def build_axioms(input_axioms: Sequence[Axiom], q: Query) -> AxiomBundle:
    """The full theory for one analysis run."""
    return AxiomBundle(
        tuple(_dedup_axioms(input_axioms)),
        tuple(_dedup_axioms(una_axioms(q) + cwa_axioms(q))),
        tuple(map_axioms(q.pattern, list(input_axioms))),
        tuple(role_axioms(q)),
    )
