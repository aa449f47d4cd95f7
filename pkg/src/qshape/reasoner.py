"""A tableau decision procedure for the description logic the analyzer emits.

The logic has atomic concepts, nominals, full boolean structure, existential
and universal role restrictions, inverse roles, and role-inclusion axioms.
Consistency of a knowledge base is decided by building a completion graph:
nodes carry concept labels in negation normal form, edges carry role names,
and rules fire until either every constraint is satisfied (consistent) or
every way of resolving the disjunctions leads to a contradiction.

The implementation keeps the standard ingredients of a practical tableau:

* absorption — an axiom whose left side is a conjunction of atoms,
  nominals, and existentials with atomic fillers becomes a guarded rule:
  the right side is added exactly when every guard is visibly satisfied
  (the atom in the label, an edge of the role to a suitably labelled
  neighbour).  Such axioms never open a branch.  Whatever cannot be
  guarded falls back to a single-trigger form or, last, to a residual
  disjunction added to every node.
* chronological backtracking over a trail — every state mutation is
  recorded and undone exactly, so disjunction branches are explored
  depth-first without copying the graph.
* unit propagation — a disjunction with all but one disjunct already
  contradicted commits to the remainder without a branch point, and one
  with a disjunct already satisfied piece-wise is skipped outright.
* anywhere pairwise blocking — an existential is not expanded at a node
  whose label, parent label, and connecting edge labels (in both
  directions) duplicate those of an older node; with inverse roles the
  single-label test would be unsound.
* nominal merging — two nodes claiming the same nominal are collapsed
  with a union-find; labels and edges move to the survivor.

Rule order is deterministic: propagation first, then disjunctions, and
existentials only when no disjunction is open.  Node and rule budgets cap
the search; exceeding one raises :class:`BudgetExhausted` rather than
returning a wrong answer, and callers treat that as "no verdict".

Entailment is consistency in disguise: ``Σ ⊨ C ⊑ D`` holds exactly when
``Σ`` plus a fresh individual asserted to be in ``C ⊓ ¬D`` cannot have a
model.  :class:`Reasoner` compiles ``Σ`` once and answers many such
questions against it.
"""

from __future__ import annotations

from collections import deque
from typing import Iterable, Iterator

from .model import (
    And,
    Assertion,
    Atom,
    Axiom,
    BOTTOM,
    Concept,
    ConceptAssert,
    ConceptIncl,
    Exists,
    Forall,
    KnowledgeBase,
    Name,
    Nominal,
    Not,
    Or,
    Role,
    RoleAssert,
    RoleIncl,
    TOP,
    and_of,
    individual,
    name_key,
    nnf,
    or_of,
)

DEFAULT_NODE_BUDGET = 100_000
DEFAULT_RULE_BUDGET = 1_000_000


class BudgetExhausted(RuntimeError):
    """The search hit its node or rule cap before reaching a verdict."""


class _Clash(Exception):
    """Internal: the current branch is contradictory."""


# --------------------------------------------------------------------------
# role hierarchy


class RoleHierarchy:
    """The reflexive-transitive role-inclusion preorder, closed under inverse.

    Declaring p ⊑ q also makes p⁻ ⊑ q⁻; an edge labelled p then counts as
    a q-edge wherever a rule asks for one.
    """

    def __init__(self, axioms: Iterable[Axiom]):
        self._up: dict[Role, set[Role]] = {}
        for ax in axioms:
            if isinstance(ax, RoleIncl):
                for sub, sup in ((ax.lhs, ax.rhs), (ax.lhs.inverse(), ax.rhs.inverse())):
                    self._up.setdefault(sub, set()).add(sup)
        self._memo: dict[Role, frozenset[Role]] = {}
        self._pair_memo: dict[tuple[Role, Role], bool] = {}

    def superroles(self, r: Role) -> frozenset[Role]:
        """Every role subsuming r, r itself included."""
        cached = self._memo.get(r)
        if cached is not None:
            return cached
        seen = {r}
        frontier = [r]
        while frontier:
            cur = frontier.pop()
            for sup in self._up.get(cur, ()):
                if sup not in seen:
                    seen.add(sup)
                    frontier.append(sup)
        result = frozenset(seen)
        self._memo[r] = result
        return result

    def subsumes(self, sub: Role, sup: Role) -> bool:
        key = (sub, sup)
        known = self._pair_memo.get(key)
        if known is None:
            known = sup in self.superroles(sub)
            self._pair_memo[key] = known
        return known


# --------------------------------------------------------------------------
# axiom compilation


class _Rule:
    """A guarded implication: fire ``rhs`` when every guard holds.

    Guards are membership of atoms and nominals in the node's label plus
    edge requirements (ρ, A): some ρ-neighbour labelled A, or any
    ρ-neighbour at all when A is None.
    """

    __slots__ = ("atoms", "nominals", "edges", "rhs")

    def __init__(
        self,
        atoms: tuple[Atom, ...],
        nominals: tuple[Nominal, ...],
        edges: tuple[tuple[Role, Name | None], ...],
        rhs: Concept,
    ):
        self.atoms = atoms
        self.nominals = nominals
        self.edges = edges
        self.rhs = rhs


class _Compiled:
    """A knowledge base reshaped for the tableau.

    ``residuals`` go onto every node.  Guarded rules are indexed by every
    one of their guards so any event completing the last guard re-checks
    them; the single-trigger maps handle what guarding cannot express.
    """

    __slots__ = (
        "hierarchy",
        "residuals",
        "nominals",
        "atom_triggers",
        "nominal_triggers",
        "domain_triggers",
        "rules_by_atom",
        "rules_by_nominal",
        "rules_by_role",
        "rules_by_filler",
    )

    def __init__(self, axioms: Iterable[Axiom]):
        axioms = list(axioms)
        self.hierarchy = RoleHierarchy(axioms)
        residuals: list[Concept] = []
        self.atom_triggers: dict[Name, list[Concept]] = {}
        self.nominal_triggers: dict[Name, list[Concept]] = {}
        self.domain_triggers: dict[Role, list[Concept]] = {}
        self.rules_by_atom: dict[Name, list[_Rule]] = {}
        self.rules_by_nominal: dict[Name, list[_Rule]] = {}
        self.rules_by_role: dict[Role, list[_Rule]] = {}
        self.rules_by_filler: dict[Name, list[tuple[Role, _Rule]]] = {}
        work = [
            (nnf(ax.lhs), nnf(ax.rhs))
            for ax in axioms
            if isinstance(ax, ConceptIncl)
        ]
        while work:
            lhs, rhs = work.pop()
            if isinstance(rhs, And):
                work.extend((lhs, part) for part in rhs.parts)
                continue
            if isinstance(lhs, Or):
                work.extend((part, rhs) for part in lhs.parts)
                continue
            if lhs == BOTTOM or rhs == TOP:
                continue
            if lhs == TOP:
                residuals.append(rhs)
                continue
            conjuncts = list(lhs.parts) if isinstance(lhs, And) else [lhs]
            if not self._add_rule(conjuncts, rhs):
                self._add_triggered(conjuncts, rhs, residuals)
        self.residuals: tuple[Concept, ...] = tuple(dict.fromkeys(residuals))
        # every individual the axioms mention must denote something, so the
        # tableau seeds a node for each even when the assertions are silent
        mentioned: dict[Name, None] = {}
        for ax in axioms:
            if isinstance(ax, ConceptIncl):
                _collect_nominals(ax.lhs, mentioned)
                _collect_nominals(ax.rhs, mentioned)
        self.nominals: tuple[Name, ...] = tuple(sorted(mentioned, key=name_key))

    def _add_rule(self, conjuncts: list[Concept], rhs: Concept) -> bool:
        """Try to compile the implication as a guarded rule."""
        atoms: list[Atom] = []
        nominals: list[Nominal] = []
        edges: list[tuple[Role, Name | None]] = []
        for c in conjuncts:
            if isinstance(c, Atom):
                atoms.append(c)
            elif isinstance(c, Nominal):
                nominals.append(c)
            elif isinstance(c, Exists) and c.filler == TOP:
                edges.append((c.role, None))
            elif isinstance(c, Exists) and isinstance(c.filler, Atom):
                edges.append((c.role, c.filler.name))
            else:
                return False
        rule = _Rule(tuple(atoms), tuple(nominals), tuple(edges), rhs)
        for a in atoms:
            self.rules_by_atom.setdefault(a.name, []).append(rule)
        for n in nominals:
            self.rules_by_nominal.setdefault(n.individual, []).append(rule)
        for rho, filler in edges:
            self.rules_by_role.setdefault(rho, []).append(rule)
            if filler is not None:
                self.rules_by_filler.setdefault(filler, []).append((rho, rule))
        return True

    def _add_triggered(
        self, conjuncts: list[Concept], rhs: Concept, residuals: list[Concept]
    ) -> None:
        """Fall back to one trigger plus a residual disjunction."""
        trigger = None
        for cls in (Atom, Nominal, Exists):
            for c in conjuncts:
                if isinstance(c, cls):
                    trigger = c
                    break
            if trigger is not None:
                break
        if trigger is None:
            residuals.append(_implied(conjuncts, rhs))
        elif isinstance(trigger, Atom):
            rest = [c for c in conjuncts if c != trigger]
            self.atom_triggers.setdefault(trigger.name, []).append(_implied(rest, rhs))
        elif isinstance(trigger, Nominal):
            rest = [c for c in conjuncts if c != trigger]
            self.nominal_triggers.setdefault(trigger.individual, []).append(_implied(rest, rhs))
        else:  # Exists: the edge is the trigger; a compound filler still
            # has to be re-checked, so the whole premise stays in the residual
            rest = [c for c in conjuncts if c != trigger] if trigger.filler == TOP else conjuncts
            self.domain_triggers.setdefault(trigger.role, []).append(_implied(rest, rhs))


def _implied(premises: list[Concept], conclusion: Concept) -> Concept:
    """The residual of an absorbed axiom: ¬premises ⊔ conclusion, in NNF."""
    return or_of([nnf(Not(p)) for p in premises] + [conclusion])


def _collect_nominals(c: Concept, out: dict[Name, None]) -> None:
    if isinstance(c, Nominal):
        out[c.individual] = None
    elif isinstance(c, Not):
        _collect_nominals(c.sub, out)
    elif isinstance(c, (And, Or)):
        for part in c.parts:
            _collect_nominals(part, out)
    elif isinstance(c, (Exists, Forall)):
        _collect_nominals(c.filler, out)


# --------------------------------------------------------------------------
# the completion graph


class TableauState:
    """One consistency search over a compiled knowledge base.

    Lives for a single :meth:`run`.  Labels and edge maps use insertion-
    ordered dicts rather than sets so behaviour does not depend on hash
    seeding.
    """

    def __init__(
        self,
        compiled: _Compiled,
        *,
        node_budget: int = DEFAULT_NODE_BUDGET,
        rule_budget: int = DEFAULT_RULE_BUDGET,
        branch_reverse: bool = False,
    ):
        self.kb = compiled
        self.h = compiled.hierarchy
        self.node_budget = node_budget
        self.rule_budget = rule_budget
        self.branch_reverse = branch_reverse

        self.labels: list[dict[Concept, None]] = []
        self.succs: list[dict[Name, dict[int, None]]] = []
        self.preds: list[dict[Name, dict[int, None]]] = []
        self.parent: list[int | None] = []
        self.uf: list[int] = []
        self.nominal: list[bool] = []

        self.nominal_node: dict[Name, int] = {}
        self.trail: list[tuple] = []
        self.choices: list[tuple[int, int, tuple[Concept, ...], int]] = []
        self.pending: deque[tuple[int, Concept]] = deque()
        self.or_pool: list[tuple[int, Or]] = []
        self.exists_pool: list[tuple[int, Exists]] = []
        # Pool entries proven satisfied since the last backtrack.  Between
        # choice points the graph only grows, so a satisfied entry stays
        # satisfied and need not be rescanned; every undo clears both sets.
        self.exists_done: set[int] = set()
        self.or_done: set[int] = set()
        self.created = 0
        self.steps = 0

    # -- bookkeeping ------------------------------------------------------

    def _find(self, x: int) -> int:
        while self.uf[x] != x:
            x = self.uf[x]
        return x

    def _step(self) -> None:
        self.steps += 1
        if self.steps > self.rule_budget:
            raise BudgetExhausted(f"rule budget of {self.rule_budget} exhausted")

    def _new_node(self, parent: int | None, nominal: bool) -> int:
        self.created += 1
        if self.created > self.node_budget:
            raise BudgetExhausted(f"node budget of {self.node_budget} exhausted")
        x = len(self.labels)
        self.labels.append({})
        self.succs.append({})
        self.preds.append({})
        self.parent.append(parent)
        self.uf.append(x)
        self.nominal.append(nominal)
        self.trail.append(("node",))
        for r in self.kb.residuals:
            self._add_label(x, r)
        return x

    def _undo_to(self, mark: int) -> None:
        self.exists_done.clear()
        self.or_done.clear()
        while len(self.trail) > mark:
            entry = self.trail.pop()
            tag = entry[0]
            if tag == "label":
                del self.labels[entry[1]][entry[2]]
            elif tag == "succ":
                targets = self.succs[entry[1]][entry[2]]
                del targets[entry[3]]
                if not targets:
                    del self.succs[entry[1]][entry[2]]
            elif tag == "pred":
                sources = self.preds[entry[1]][entry[2]]
                del sources[entry[3]]
                if not sources:
                    del self.preds[entry[1]][entry[2]]
            elif tag == "node":
                self.labels.pop()
                self.succs.pop()
                self.preds.pop()
                self.parent.pop()
                self.uf.pop()
                self.nominal.pop()
            elif tag == "uf":
                self.uf[entry[1]] = entry[1]
            elif tag == "nom":
                del self.nominal_node[entry[1]]
            elif tag == "nomflag":
                self.nominal[entry[1]] = False
            elif tag == "orpool":
                self.or_pool.pop()
            else:  # expool
                self.exists_pool.pop()

    # -- rule applications ------------------------------------------------

    def _add_label(self, x: int, c: Concept) -> None:
        x = self._find(x)
        if c == TOP:
            return
        label = self.labels[x]
        if c in label:
            return
        if c == BOTTOM or _contradicts(label, c):
            raise _Clash
        # Requirements already met by existing structure are not recorded:
        # an existential with a live witness edge or a disjunction with a
        # true disjunct would only bloat the label and defeat blocking.
        # The witness predates this addition, so backtracking can never
        # remove it while leaving a suppressed obligation behind.
        if isinstance(c, Exists) and self._exists_satisfied(x, c):
            return
        if isinstance(c, Or) and self._part_satisfied(x, c):
            return
        label[c] = None
        self.trail.append(("label", x, c))
        self.pending.append((x, c))

    def _add_edge(self, x: int, rho: Role, y: int) -> None:
        """Insert an edge, normalised to the forward direction."""
        if rho.inverted:
            x, y = y, x
        r = rho.name
        x, y = self._find(x), self._find(y)
        targets = self.succs[x].setdefault(r, {})
        if y in targets:
            return
        targets[y] = None
        self.trail.append(("succ", x, r, y))
        self.preds[y].setdefault(r, {})[x] = None
        self.trail.append(("pred", y, r, x))
        self._edge_consequences(x, r, y)

    def _edge_consequences(self, x: int, r: Name, y: int) -> None:
        """Propagation, triggers, and rule re-checks for one new x —r→ y."""
        fwd, bwd = Role(r), Role(r, True)
        for c in list(self.labels[x]):
            if isinstance(c, Forall) and self.h.subsumes(fwd, c.role):
                self._add_label(y, c.filler)
        for c in list(self.labels[y]):
            if isinstance(c, Forall) and self.h.subsumes(bwd, c.role):
                self._add_label(x, c.filler)
        self._edge_events(x, fwd)
        self._edge_events(y, bwd)

    def _edge_events(self, x: int, as_role: Role) -> None:
        """x has gained an ``as_role`` edge: fire everything keyed on it."""
        for sup in self.h.superroles(as_role):
            for resid in self.kb.domain_triggers.get(sup, ()):
                self._add_label(x, resid)
            for rule in self.kb.rules_by_role.get(sup, ()):
                self._check_rule(x, rule)

    def _check_rule(self, x: int, rule: _Rule) -> None:
        x = self._find(x)
        label = self.labels[x]
        for a in rule.atoms:
            if a not in label:
                return
        for n in rule.nominals:
            if n not in label:
                return
        for rho, filler in rule.edges:
            if not self._has_neighbour(x, rho, filler):
                return
        self._add_label(x, rule.rhs)

    def _has_neighbour(self, x: int, rho: Role, filler: Name | None) -> bool:
        for r, targets in self.succs[x].items():
            if self.h.subsumes(Role(r), rho):
                for t in targets:
                    if filler is None or Atom(filler) in self.labels[self._find(t)]:
                        return True
        for r, sources in self.preds[x].items():
            if self.h.subsumes(Role(r, True), rho):
                for s in sources:
                    if filler is None or Atom(filler) in self.labels[self._find(s)]:
                        return True
        # A pending existential promises the neighbour even before the
        # witness node exists; counting it is safe because the witness is
        # guaranteed to satisfy the filler once created.
        for e in self.labels[x]:
            if isinstance(e, Exists) and self.h.subsumes(e.role, rho):
                if filler is None or e.filler == Atom(filler):
                    return True
        return False

    def _process(self, x: int, c: Concept) -> None:
        x = self._find(x)
        if c not in self.labels[x]:  # stale event after an undo
            return
        if isinstance(c, And):
            for part in c.parts:
                self._add_label(x, part)
        elif isinstance(c, Or):
            self.or_pool.append((x, c))
            self.trail.append(("orpool",))
        elif isinstance(c, Exists):
            self.exists_pool.append((x, c))
            self.trail.append(("expool",))
            # The label alone already guarantees a future c.role neighbour,
            # so consequences keyed on such an edge can be drawn right away.
            # Firing them before the witness is materialised keeps labels
            # from trickling in after a node has been expanded, which lets
            # blocking compare finished labels instead of a moving target.
            self._edge_events(x, c.role)
        elif isinstance(c, Forall):
            self._propagate_forall(x, c)
        elif isinstance(c, Atom):
            for resid in self.kb.atom_triggers.get(c.name, ()):
                self._add_label(x, resid)
            for rule in self.kb.rules_by_atom.get(c.name, ()):
                self._check_rule(x, rule)
            self._filler_events(x, c.name)
        elif isinstance(c, Nominal):
            self._claim_nominal(x, c.individual)
            for resid in self.kb.nominal_triggers.get(c.individual, ()):
                self._add_label(self._find(x), resid)
            for rule in self.kb.rules_by_nominal.get(c.individual, ()):
                self._check_rule(x, rule)
        # Not(...) needs no rule: clashes are caught at insertion

    def _filler_events(self, y: int, a: Name) -> None:
        """Atom a appeared at y: re-check edge-guarded rules at neighbours."""
        pairs = self.kb.rules_by_filler.get(a)
        if not pairs:
            return
        for rho, rule in pairs:
            # a node z counts when z —ρ→ y, seen from either edge direction
            for r, sources in self.preds[y].items():
                if self.h.subsumes(Role(r), rho):
                    for z in list(sources):
                        self._check_rule(z, rule)
            for r, targets in self.succs[y].items():
                if self.h.subsumes(Role(r, True), rho):
                    for z in list(targets):
                        self._check_rule(z, rule)

    def _propagate_forall(self, x: int, c: Forall) -> None:
        for r, targets in list(self.succs[x].items()):
            if self.h.subsumes(Role(r), c.role):
                for t in list(targets):
                    self._add_label(t, c.filler)
        for r, sources in list(self.preds[x].items()):
            if self.h.subsumes(Role(r, True), c.role):
                for s in list(sources):
                    self._add_label(s, c.filler)

    def _claim_nominal(self, x: int, a: Name) -> None:
        owner = self.nominal_node.get(a)
        if owner is None:
            self.nominal_node[a] = x
            self.trail.append(("nom", a))
            if not self.nominal[x]:
                self.nominal[x] = True
                self.trail.append(("nomflag", x))
            return
        self._merge(x, self._find(owner))

    def _merge(self, x: int, y: int) -> None:
        x, y = self._find(x), self._find(y)
        if x == y:
            return
        rep, gone = (x, y) if x < y else (y, x)
        self.uf[gone] = rep
        self.trail.append(("uf", gone))
        if self.nominal[gone] and not self.nominal[rep]:
            self.nominal[rep] = True
            self.trail.append(("nomflag", rep))
        # adopt the merged node's edges, then its labels
        for r, targets in list(self.succs[gone].items()):
            for t in list(targets):
                mine = self.succs[rep].setdefault(r, {})
                if t not in mine:
                    mine[t] = None
                    self.trail.append(("succ", rep, r, t))
        for r, sources in list(self.preds[gone].items()):
            for s in list(sources):
                mine = self.preds[rep].setdefault(r, {})
                if s not in mine:
                    mine[s] = None
                    self.trail.append(("pred", rep, r, s))
        for c in list(self.labels[gone]):
            self._add_label(rep, c)
        # the survivor's labels meet a wider neighbourhood now: re-run them
        # and everything keyed on the adopted edges
        for c in list(self.labels[rep]):
            self.pending.append((rep, c))
        for r in list(self.succs[rep]):
            self._edge_events(rep, Role(r))
        for r in list(self.preds[rep]):
            self._edge_events(rep, Role(r, True))

    # -- existentials and blocking ----------------------------------------

    def _exists_satisfied(self, x: int, c: Exists) -> bool:
        """Does an edge already provide the witness this existential needs?

        The filler test goes through :meth:`_part_satisfied` because a
        compound filler may itself have been suppressed at the neighbour
        (merging into a nominal does this routinely); recursion terminates
        since fillers strictly shrink.
        """
        need = c.filler
        for r, targets in self.succs[x].items():
            if self.h.subsumes(Role(r), c.role):
                for t in targets:
                    if need == TOP or self._part_satisfied(self._find(t), need):
                        return True
        for r, sources in self.preds[x].items():
            if self.h.subsumes(Role(r, True), c.role):
                for s in sources:
                    if need == TOP or self._part_satisfied(self._find(s), need):
                        return True
        return False

    def _edge_labels(self, a: int, b: int) -> frozenset[Name]:
        return frozenset(
            r for r, targets in self.succs[a].items() if any(self._find(t) == b for t in targets)
        )

    def _signature(self, x: int, px: int):
        return (
            frozenset(self.labels[x]),
            frozenset(self.labels[px]),
            self._edge_labels(px, x),
            self._edge_labels(x, px),
        )

    def _blocked(self, x: int, memo: dict[int, bool], sigs: dict[int, tuple]) -> bool:
        known = memo.get(x)
        if known is not None:
            return known
        memo[x] = False  # break cycles conservatively: assume unblocked
        if self.nominal[x] or self.parent[x] is None:
            return False
        sig = self._cached_signature(x, sigs)
        for y in range(x):
            if self.uf[y] != y or self.nominal[y] or self.parent[y] is None:
                continue
            if sig == self._cached_signature(y, sigs) and not self._blocked(y, memo, sigs):
                memo[x] = True
                return True
        return False

    def _cached_signature(self, x: int, sigs: dict[int, tuple]) -> tuple:
        sig = sigs.get(x)
        if sig is None:
            sig = self._signature(x, self._find(self.parent[x]))
            sigs[x] = sig
        return sig

    def _expand_exists(self, x: int, c: Exists) -> None:
        child = self._new_node(x, False)
        self._add_edge(x, c.role, child)
        self._add_label(child, c.filler)

    # -- search -----------------------------------------------------------

    def _drain(self) -> None:
        while self.pending:
            self._step()
            x, c = self.pending.popleft()
            self._process(x, c)

    def _part_satisfied(self, x: int, c: Concept) -> bool:
        """Shallow truth test that also credits edge-satisfied existentials.

        Labels alone are not enough here: a suppressed ∃ never appears in
        the label, so a disjunction whose witness is an edge would look
        forever unresolved and be branched again and again.
        """
        label = self.labels[x]
        if c in label or c == TOP:
            return True
        if isinstance(c, And):
            return all(self._part_satisfied(x, p) for p in c.parts)
        if isinstance(c, Or):
            return any(self._part_satisfied(x, p) for p in c.parts)
        if isinstance(c, Exists):
            return self._exists_satisfied(x, c)
        return False

    def _branch(self) -> bool:
        """Resolve one open disjunction; True if anything happened.

        A disjunct with a satisfied piece needs no branch, and one with a
        directly contradicted piece is not worth trying — both checks look
        through nested and/or structure but not through quantifiers.
        """
        for i, (x, c) in enumerate(self.or_pool):
            if i in self.or_done:
                continue
            rx = self._find(x)
            label = self.labels[rx]
            parts = tuple(reversed(c.parts)) if self.branch_reverse else c.parts
            if any(self._part_satisfied(rx, p) for p in parts):
                self.or_done.add(i)
                continue
            viable = tuple(p for p in parts if not _contradicts_shallow(label, p))
            if not viable:
                raise _Clash
            if len(viable) == 1:
                self._add_label(rx, viable[0])
                self.or_done.add(i)
                return True
            self.choices.append((len(self.trail), rx, viable, 0))
            self._add_label(rx, viable[0])
            return True
        return False

    def _expand(self) -> bool:
        """Expand one unblocked, unshadowed existential; True on progress.

        An entry is shadowed when another unsatisfied entry at the same
        node uses a strictly more specific role and would satisfy it for
        free: ∃p.C waits while ∃p'.C with p' ⊑ p is open, and ∃p.⊤ waits
        for any open p-or-below entry with a real filler.  Expanding the
        specific one first keeps siblings from multiplying.
        """
        live: list[tuple[int, Exists]] = []
        indices: list[int] = []
        seen: set[tuple[int, Exists]] = set()
        for i, (x, c) in enumerate(self.exists_pool):
            if i in self.exists_done:
                continue
            rx = self._find(x)
            if c not in self.labels[rx]:
                continue
            if (rx, c) in seen:
                # a twin entry already carries this obligation
                self.exists_done.add(i)
                continue
            seen.add((rx, c))
            if self._exists_satisfied(rx, c):
                self.exists_done.add(i)
                continue
            live.append((rx, c))
            indices.append(i)
        memo: dict[int, bool] = {}
        sigs: dict[int, tuple] = {}
        for (rx, c), i in zip(live, indices):
            if self._shadowed(rx, c, live):
                continue
            if self._blocked(rx, memo, sigs):
                continue
            self._expand_exists(rx, c)
            self.exists_done.add(i)
            return True
        return False

    def _shadowed(self, x: int, c: Exists, live: list[tuple[int, Exists]]) -> bool:
        for x2, c2 in live:
            if x2 != x or c2 == c or not self.h.subsumes(c2.role, c.role):
                continue
            if c2.filler == c.filler and not self.h.subsumes(c.role, c2.role):
                return True
            if c.filler == TOP and c2.filler != TOP:
                return True
        return False

    def _backtrack(self) -> bool:
        while self.choices:
            mark, x, parts, idx = self.choices.pop()
            self._undo_to(mark)
            self.pending.clear()
            nxt = idx + 1
            if nxt >= len(parts):
                continue
            self.choices.append((mark, x, parts, nxt))
            try:
                self._add_label(self._find(x), parts[nxt])
                return True
            except _Clash:
                continue
        return False

    def init_abox(self, abox: Iterable[Assertion]) -> None:
        """Create the named part of the graph before the search starts."""
        assertions = list(abox)
        names: set[Name] = set(self.kb.nominals)
        for a in assertions:
            names.add(a.subject)
            if isinstance(a, RoleAssert):
                names.add(a.object)
        for n in sorted(names, key=name_key):
            node = self._new_node(None, True)
            self.nominal_node[n] = node
            self.trail.append(("nom", n))
            self._add_label(node, Nominal(n))
        for a in assertions:
            if isinstance(a, ConceptAssert):
                self._add_label(self._find(self.nominal_node[a.subject]), nnf(a.concept))
            else:
                self._add_edge(
                    self._find(self.nominal_node[a.subject]),
                    a.role,
                    self._find(self.nominal_node[a.object]),
                )

    def run(self, abox: Iterable[Assertion]) -> bool:
        """Search for a model; True means one exists."""
        try:
            self.init_abox(abox)
            if not self.labels:
                # interpretations have nonempty domains, so even an empty
                # assertion set must support one unnamed element
                self._new_node(None, False)
        except _Clash:
            if not self._backtrack():
                return False
        while True:
            try:
                self._drain()
                self._step()
                if self._branch():
                    continue
                if self._expand():
                    continue
                return True
            except _Clash:
                if not self._backtrack():
                    return False


def _contradicts(label: dict[Concept, None], c: Concept) -> bool:
    if isinstance(c, Not):
        return c.sub in label
    if isinstance(c, (Atom, Nominal)):
        return Not(c) in label
    if c == BOTTOM:
        return True
    return False


def _holds_shallow(label: dict[Concept, None], c: Concept) -> bool:
    if c in label or c == TOP:
        return True
    if isinstance(c, And):
        return all(_holds_shallow(label, p) for p in c.parts)
    if isinstance(c, Or):
        return any(_holds_shallow(label, p) for p in c.parts)
    return False


def _contradicts_shallow(label: dict[Concept, None], c: Concept) -> bool:
    if isinstance(c, And):
        return any(_contradicts_shallow(label, p) for p in c.parts)
    if isinstance(c, Or):
        return all(_contradicts_shallow(label, p) for p in c.parts)
    return _contradicts(label, c)


# --------------------------------------------------------------------------
# public face


def is_consistent(
    kb: KnowledgeBase,
    *,
    node_budget: int = DEFAULT_NODE_BUDGET,
    rule_budget: int = DEFAULT_RULE_BUDGET,
    branch_reverse: bool = False,
) -> bool:
    """Does the knowledge base have a model?

    Raises :class:`BudgetExhausted` when the search is cut off first.
    """
    compiled = _Compiled(kb.tbox)
    state = TableauState(
        compiled,
        node_budget=node_budget,
        rule_budget=rule_budget,
        branch_reverse=branch_reverse,
    )
    return state.run(kb.abox)


class Reasoner:
    """Entailment checking against one fixed axiom set.

    The axioms are compiled once; every query then runs a fresh tableau
    seeded with an individual that would witness the query's failure.
    """

    def __init__(
        self,
        axioms: Iterable[Axiom],
        *,
        node_budget: int = DEFAULT_NODE_BUDGET,
        rule_budget: int = DEFAULT_RULE_BUDGET,
        branch_reverse: bool = False,
    ):
        self.axioms = tuple(axioms)
        self.node_budget = node_budget
        self.rule_budget = rule_budget
        self.branch_reverse = branch_reverse
        self._compiled = _Compiled(self.axioms)
        self._witness = _fresh_individual(self.axioms)

    def entails(self, goal: ConceptIncl) -> bool:
        """Σ ⊨ lhs ⊑ rhs?  Raises :class:`BudgetExhausted` on cut-off."""
        counter = and_of([goal.lhs, Not(goal.rhs)])
        state = TableauState(
            self._compiled,
            node_budget=self.node_budget,
            rule_budget=self.rule_budget,
            branch_reverse=self.branch_reverse,
        )
        return not state.run((ConceptAssert(self._witness, counter),))


def entails(
    axioms: Iterable[Axiom],
    goal: ConceptIncl,
    *,
    node_budget: int = DEFAULT_NODE_BUDGET,
    rule_budget: int = DEFAULT_RULE_BUDGET,
    branch_reverse: bool = False,
) -> bool:
    """One-shot entailment; see :class:`Reasoner` for repeated queries."""
    return Reasoner(
        axioms,
        node_budget=node_budget,
        rule_budget=rule_budget,
        branch_reverse=branch_reverse,
    ).entails(goal)


def _fresh_individual(axioms: Iterable[Axiom]) -> Name:
    taken = {n.text for n in _individuals_in(axioms)}
    i = 0
    while f"o{i}" in taken:
        i += 1
    return individual(f"o{i}")


def _individuals_in(axioms: Iterable[Axiom]) -> Iterator[Name]:
    def walk(c: Concept) -> Iterator[Name]:
        if isinstance(c, Nominal):
            yield c.individual
        elif isinstance(c, Not):
            yield from walk(c.sub)
        elif isinstance(c, (And, Or)):
            for p in c.parts:
                yield from walk(p)
        elif isinstance(c, (Exists, Forall)):
            yield from walk(c.filler)

    for ax in axioms:
        if isinstance(ax, ConceptIncl):
            yield from walk(ax.lhs)
            yield from walk(ax.rhs)
