"""Shared generators for the randomized test batteries.

Two families of inputs are produced here.  `small_problem` builds a query
plus input shapes over a deliberately tiny vocabulary (two concepts, one
role, at most one individual) so the brute-force oracle can exhaustively
enumerate every input graph with three individuals in reasonable time.
`anchored_kb` builds a knowledge base whose TBox closes its own domain over
the named individuals, which is exactly the situation where the bounded
model search used as a reasoner oracle is complete.
"""

import random

from qshape.model import (
    And,
    Atom,
    Bottom,
    ConceptAssert,
    ConceptAtom,
    ConceptIncl,
    Exists,
    Forall,
    KnowledgeBase,
    Nominal,
    Not,
    Or,
    Query,
    RoleAssert,
    RoleAtom,
    Top,
    concept,
    individual,
    role,
    variable,
)

# --------------------------------------------------------------------------
# analyzer problems


def small_problem(rng: random.Random):
    """A query and input shapes small enough for exhaustive checking.

    Pattern: up to three atoms over concepts A/B, role r, variables x/y/z
    and at most the single individual a.  Template: one or two atoms over
    the pattern's variables.  Shapes: up to two, drawn from the simple
    target/constraint forms the analyzer accepts.
    """
    concepts = [concept("A"), concept("B")][: rng.randint(1, 2)]
    r = role("r")
    var_pool = [variable("x"), variable("y"), variable("z")]

    def term():
        if rng.random() < 0.25:
            return individual("a")
        return rng.choice(var_pool)

    pattern = []
    for _ in range(rng.randint(1, 3)):
        if rng.random() < 0.3:
            pattern.append(RoleAtom(term(), term(), r.name))
        else:
            pattern.append(ConceptAtom(term(), rng.choice(concepts)))
    pvars = sorted(
        {
            t.text
            for a in pattern
            for t in ((a.term,) if isinstance(a, ConceptAtom) else (a.subject, a.object))
            if t.kind.name == "VARIABLE"
        }
    )
    if not pvars:
        pattern.append(ConceptAtom(variable("x"), concepts[0]))
        pvars = ["x"]
    tvars = [variable(v) for v in pvars]

    template = []
    for _ in range(rng.randint(1, 2)):
        if rng.random() < 0.3:
            template.append(RoleAtom(rng.choice(tvars), rng.choice(tvars), r.name))
        else:
            template.append(ConceptAtom(rng.choice(tvars), rng.choice(concepts)))

    def some_role():
        return r if rng.random() < 0.7 else r.inverse()

    shapes = []
    for _ in range(rng.randint(0, 2)):
        target = Atom(rng.choice(concepts)) if rng.random() < 0.5 else Exists(some_role(), Top())
        kind = rng.randrange(3)
        if kind == 0:
            constraint = Atom(rng.choice(concepts))
        elif kind == 1:
            constraint = Exists(some_role(), Atom(rng.choice(concepts)))
        else:
            constraint = Forall(some_role(), Atom(rng.choice(concepts)))
        ax = ConceptIncl(target, constraint)
        if ax not in shapes:
            shapes.append(ax)

    q = Query(tuple(dict.fromkeys(template)), tuple(dict.fromkeys(pattern)))
    return q, shapes


# --------------------------------------------------------------------------
# knowledge bases for the reasoner-vs-oracle battery


def _random_concept(rng: random.Random, names, roles, inds, depth: int):
    if depth == 0:
        kind = rng.choice(["atom", "top", "nom"] if inds else ["atom", "top"])
        if kind == "atom":
            return Atom(rng.choice(names))
        if kind == "top":
            return Top()
        return Nominal(rng.choice(inds))
    k = rng.randrange(6)
    if k == 0:
        return Not(_random_concept(rng, names, roles, inds, depth - 1))
    if k == 1:
        return And(
            (
                _random_concept(rng, names, roles, inds, depth - 1),
                _random_concept(rng, names, roles, inds, depth - 1),
            )
        )
    if k == 2:
        return Or(
            (
                _random_concept(rng, names, roles, inds, depth - 1),
                _random_concept(rng, names, roles, inds, depth - 1),
            )
        )
    if k == 3:
        return Exists(rng.choice(roles), _random_concept(rng, names, roles, inds, depth - 1))
    if k == 4:
        return Forall(rng.choice(roles), _random_concept(rng, names, roles, inds, depth - 1))
    return _random_concept(rng, names, roles, inds, 0)


def anchored_kb(rng: random.Random):
    """A knowledge base whose models all have the named finite domain.

    The TBox gets a covering nominal disjunction and pairwise nominal
    disjointness, so "has a model" and "has a model over exactly these
    individuals" coincide and the bounded search is a fair oracle.
    """
    n_ind = rng.randrange(1, 4)
    inds = [individual(f"a{i}") for i in range(n_ind)]
    names = [concept("C0"), concept("C1")][: rng.randrange(1, 3)]
    roles = [role("r0"), role("r0", True)]

    axioms = []
    for _ in range(rng.randrange(1, 4)):
        axioms.append(
            ConceptIncl(
                _random_concept(rng, names, roles, inds, rng.randrange(0, 3)),
                _random_concept(rng, names, roles, inds, rng.randrange(0, 3)),
            )
        )
    assertions = []
    for _ in range(rng.randrange(0, 4)):
        if rng.random() < 0.5:
            assertions.append(
                ConceptAssert(rng.choice(inds), _random_concept(rng, names, roles, inds, 1))
            )
        else:
            assertions.append(RoleAssert(rng.choice(inds), rng.choice(inds), role("r0")))

    cover = Or(tuple(Nominal(a) for a in inds)) if n_ind > 1 else Nominal(inds[0])
    axioms.append(ConceptIncl(Top(), cover))
    for i in range(n_ind):
        for j in range(i + 1, n_ind):
            axioms.append(ConceptIncl(And((Nominal(inds[i]), Nominal(inds[j]))), Bottom()))

    return KnowledgeBase(tuple(axioms), tuple(assertions)), inds
