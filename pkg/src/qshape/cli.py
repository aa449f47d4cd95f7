"""Command-line front end tying the pipeline together.

Three subcommands share the same core: ``analyze`` parses a query and its
input shapes, enumerates candidate output shapes, builds the axiom set once,
and keeps the candidates the reasoner can prove; ``check`` follows up with
the brute-force oracle, hunting small valid inputs whose query results break
an emitted shape; ``profile`` times ``analyze`` over randomly generated
problems of a chosen size class.

Results go to stdout, diagnostics to stderr.  Exit codes: 0 for success, 1
for unusable input (or an oracle violation in ``check``), 2 when reasoner
budgets cut off at least one candidate — those candidates are dropped from
the output, which stays sound, and are listed on stderr.
"""

from __future__ import annotations

import argparse
import random
import statistics
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .axioms import AxiomBundle, build_axioms
from .candidates import generate_candidates, public_axiom
from .model import (
    Axiom,
    ConceptAtom,
    Exists,
    Marking,
    Name,
    PatternAtom,
    Query,
    Role,
    RoleAtom,
    Shape,
    TOP,
    Atom,
    Forall,
    concept,
    mark,
    pattern_variables,
    role_name,
    variable,
)
from .oracle import check_soundness
from .reasoner import (
    DEFAULT_NODE_BUDGET,
    DEFAULT_RULE_BUDGET,
    BudgetExhausted,
    Reasoner,
)
from .syntax import (
    SourceError,
    parse_query_file,
    parse_shape_file,
    render_axiom,
    render_graph,
)


@dataclass(frozen=True)
class RunConfig:
    """Everything one invocation needs, normalised from argv."""

    query_path: str | None = None
    shapes_path: str | None = None
    debug: bool = False
    format: str = "text"
    node_budget: int = DEFAULT_NODE_BUDGET
    rule_budget: int = DEFAULT_RULE_BUDGET
    parallel: bool = False
    oracle_bound: int = 3
    seed: int = 0
    size_class: str = "SMALL"
    samples: int = 0
    timeout: float = 60.0

    def __post_init__(self):
        if self.node_budget <= 0 or self.rule_budget <= 0:
            raise ValueError("budgets must be positive")


# --------------------------------------------------------------------------
# the pipeline


def filter_candidates(
    q: Query,
    input_axioms: list[Axiom],
    *,
    node_budget: int = DEFAULT_NODE_BUDGET,
    rule_budget: int = DEFAULT_RULE_BUDGET,
    parallel: bool = False,
    deadline: float | None = None,
) -> tuple[list[Shape], list[Shape], AxiomBundle, Name]:
    """Run the derivation: keep every candidate entailed over the axioms.

    Returns the surviving shapes, the candidates the reasoner gave up on,
    the axiom bundle (for debug dumps), and the proxy concept name.  With
    ``deadline`` (a ``time.monotonic`` instant) the scan stops between
    candidates and the remainder is reported as undecided.
    """
    bundle = build_axioms(input_axioms, q)
    reasoner = Reasoner(
        bundle.all_axioms(), node_budget=node_budget, rule_budget=rule_budget
    )
    cands = generate_candidates(q)

    def decide(shape: Shape) -> bool | None:
        try:
            return reasoner.entails(mark(shape.as_axiom(), Marking.OUT))
        except BudgetExhausted:
            return None

    survivors: list[Shape] = []
    undecided: list[Shape] = []
    if parallel:
        with ThreadPoolExecutor() as pool:
            verdicts = list(pool.map(decide, cands.shapes))
        for shape, verdict in zip(cands.shapes, verdicts):
            if verdict:
                survivors.append(shape)
            elif verdict is None:
                undecided.append(shape)
    else:
        for shape in cands.shapes:
            if deadline is not None and time.monotonic() > deadline:
                raise TimeoutError
            verdict = decide(shape)
            if verdict:
                survivors.append(shape)
            elif verdict is None:
                undecided.append(shape)
    return survivors, undecided, bundle, cands.proxy_name


def output_lines(survivors: list[Shape], proxy_name: Name) -> list[str]:
    """Render surviving shapes in enumeration order, proxies made concrete."""
    return [render_axiom(public_axiom(s, proxy_name)) for s in survivors]


def debug_lines(bundle: AxiomBundle) -> list[str]:
    """The four axiom sections, each under its own header."""
    lines: list[str] = []
    for title, axioms in bundle.sections():
        lines.append(f"# {title}")
        lines.extend(render_axiom(ax) for ax in axioms)
        lines.append("")
    return lines


def _load_problem(cfg: RunConfig) -> tuple[Query, list[Axiom]]:
    q = parse_query_file(cfg.query_path)
    shapes = parse_shape_file(cfg.shapes_path) if cfg.shapes_path else []
    return q, shapes


def run_analyze(cfg: RunConfig, out=sys.stdout, err=sys.stderr) -> int:
    try:
        q, input_axioms = _load_problem(cfg)
    except (SourceError, OSError) as exc:
        print(f"error: {exc}", file=err)
        return 1
    survivors, undecided, bundle, proxy = filter_candidates(
        q,
        input_axioms,
        node_budget=cfg.node_budget,
        rule_budget=cfg.rule_budget,
        parallel=cfg.parallel,
    )
    if cfg.debug:
        for line in debug_lines(bundle):
            print(line, file=out)
    if cfg.format == "text":
        print(f"# output shapes ({len(survivors)})", file=out)
    for line in output_lines(survivors, proxy):
        print(line, file=out)
    if undecided:
        print(
            f"warning: reasoner budget exhausted on {len(undecided)} candidate(s), omitted:",
            file=err,
        )
        for s in undecided:
            print(f"  {render_axiom(s.as_axiom())}", file=err)
        return 2
    return 0


def run_check(cfg: RunConfig, out=sys.stdout, err=sys.stderr, extra_shapes=()) -> int:
    """Analyze, then look for counterexamples with the brute-force oracle.

    ``extra_shapes`` lets the test suite inject a deliberately wrong shape
    and watch the oracle catch it.
    """
    try:
        q, input_axioms = _load_problem(cfg)
    except (SourceError, OSError) as exc:
        print(f"error: {exc}", file=err)
        return 1
    survivors, undecided, _, proxy = filter_candidates(
        q,
        input_axioms,
        node_budget=cfg.node_budget,
        rule_budget=cfg.rule_budget,
        parallel=cfg.parallel,
    )
    checked = [public_axiom(s, proxy) for s in survivors] + list(extra_shapes)
    violations = check_soundness(input_axioms, q, checked, bound=cfg.oracle_bound)
    print(
        f"checked {len(checked)} shape(s) against all valid inputs "
        f"with {cfg.oracle_bound} individuals: {len(violations)} violation(s)",
        file=out,
    )
    for v in violations:
        print(f"violated: {render_axiom(v.shape)}", file=out)
        print(f"  input:  {render_graph(v.input_graph)}", file=out)
        print(f"  result: {render_graph(v.result_graph)}", file=out)
    if violations:
        return 1
    if undecided:
        for s in undecided:
            print(f"undecided: {render_axiom(s.as_axiom())}", file=err)
        return 2
    return 0


# --------------------------------------------------------------------------
# random problems for profiling

SIZE_CLASSES: dict[str, tuple[int, int]] = {
    "SMALL": (1, 2),
    "MEDIUM": (5, 7),
    "LARGE": (11, 13),
}

FRESH_VARIABLE_PROB = 0.5
FRESH_NAME_PROB = 0.8
ROLE_ATOM_RATIO = 0.3


class _NamePool:
    """Growing pool of names; a draw is fresh with fixed probability."""

    def __init__(self, rng: random.Random, make, fresh_prob: float):
        self.rng = rng
        self.make = make
        self.fresh_prob = fresh_prob
        self.pool: list[Name] = []

    def draw(self) -> Name:
        if not self.pool or self.rng.random() < self.fresh_prob:
            n = self.make(len(self.pool))
            self.pool.append(n)
            return n
        return self.rng.choice(self.pool)


def random_problem(
    rng: random.Random, lo: int, hi: int
) -> tuple[Query, list[Axiom]]:
    """A random query plus input shapes in the given size band.

    Template, pattern, and shape counts are each drawn from [lo, hi]; atom
    terms reuse earlier variables half the time, names are fresh 80% of the
    time, and roughly 30% of atoms are role atoms.
    """
    concepts = _NamePool(rng, lambda k: concept(f"C{k}"), FRESH_NAME_PROB)
    roles = _NamePool(rng, lambda k: role_name(f"r{k}"), FRESH_NAME_PROB)
    variables = _NamePool(rng, lambda k: variable(f"x{k}"), FRESH_VARIABLE_PROB)

    def atoms(count: int, terms) -> list[PatternAtom]:
        out = []
        for _ in range(count):
            if rng.random() < ROLE_ATOM_RATIO:
                out.append(RoleAtom(terms(), terms(), roles.draw()))
            else:
                out.append(ConceptAtom(terms(), concepts.draw()))
        return out

    pattern = atoms(rng.randint(lo, hi), variables.draw)
    bound = sorted(pattern_variables(pattern), key=lambda n: n.text)
    template = atoms(rng.randint(lo, hi), lambda: rng.choice(bound))
    query = Query(tuple(dict.fromkeys(template)), tuple(dict.fromkeys(pattern)))

    shapes: list[Axiom] = []
    for _ in range(rng.randint(lo, hi)):
        rho = Role(roles.draw(), rng.random() < 0.3)
        target = Atom(concepts.draw()) if rng.random() < 0.5 else Exists(rho, TOP)
        rho2 = Role(roles.draw(), rng.random() < 0.3)
        filler = Atom(concepts.draw())
        constraint = rng.choice((filler, Exists(rho2, filler), Forall(rho2, filler)))
        shape = Shape(target, constraint)
        shapes.append(shape.as_axiom())
    return query, shapes


def run_profile(cfg: RunConfig, out=sys.stdout) -> int:
    lo, hi = SIZE_CLASSES[cfg.size_class]
    rng = random.Random(cfg.seed)
    times_ms: list[float] = []
    timeouts = 0
    for _ in range(cfg.samples):
        q, shapes = random_problem(rng, lo, hi)
        start = time.monotonic()
        try:
            filter_candidates(
                q,
                shapes,
                node_budget=cfg.node_budget,
                rule_budget=cfg.rule_budget,
                deadline=start + cfg.timeout,
            )
        except TimeoutError:
            timeouts += 1
            continue
        times_ms.append((time.monotonic() - start) * 1000.0)
    if times_ms:
        avg = statistics.fmean(times_ms)
        med = statistics.median(times_ms)
        print(
            f"{cfg.size_class} samples={cfg.samples} seed={cfg.seed}: "
            f"completed={len(times_ms)} timeouts={timeouts} "
            f"avg={avg:.1f}ms median={med:.1f}ms",
            file=out,
        )
    else:
        print(
            f"{cfg.size_class} samples={cfg.samples} seed={cfg.seed}: "
            f"completed=0 timeouts={timeouts}",
            file=out,
        )
    return 0


# --------------------------------------------------------------------------
# argument handling


def _parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="qshape",
        description="Derive SHACL shapes that hold on every result of a CONSTRUCT query.",
    )
    sub = top.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--query", required=True, help="query file (.sparql)")
        p.add_argument("--shapes", help="input shape file (.shacl)")
        p.add_argument("--node-budget", type=int, default=DEFAULT_NODE_BUDGET)
        p.add_argument("--rule-budget", type=int, default=DEFAULT_RULE_BUDGET)
        p.add_argument("--parallel", action="store_true")

    pa = sub.add_parser("analyze", help="derive output shapes")
    common(pa)
    pa.add_argument("--debug", action="store_true", help="dump the axiom sections first")
    pa.add_argument("--format", choices=("text", "lines"), default="text")

    pc = sub.add_parser("check", help="derive, then search for counterexamples")
    common(pc)
    pc.add_argument("--bound", type=int, default=3, help="individuals in the oracle search")

    pp = sub.add_parser("profile", help="time the pipeline on random problems")
    pp.add_argument("--class", dest="size_class", choices=sorted(SIZE_CLASSES), required=True)
    pp.add_argument("--samples", type=int, required=True)
    pp.add_argument("--seed", type=int, default=0)
    pp.add_argument("--timeout", type=float, default=60.0, help="per-sample seconds")
    pp.add_argument("--node-budget", type=int, default=DEFAULT_NODE_BUDGET)
    pp.add_argument("--rule-budget", type=int, default=DEFAULT_RULE_BUDGET)
    return top


def main(argv: list[str] | None = None) -> int:
    ns = _parser().parse_args(argv)
    if ns.command == "analyze":
        cfg = RunConfig(
            query_path=ns.query,
            shapes_path=ns.shapes,
            debug=ns.debug,
            format=ns.format,
            node_budget=ns.node_budget,
            rule_budget=ns.rule_budget,
            parallel=ns.parallel,
        )
        return run_analyze(cfg)
    if ns.command == "check":
        cfg = RunConfig(
            query_path=ns.query,
            shapes_path=ns.shapes,
            node_budget=ns.node_budget,
            rule_budget=ns.rule_budget,
            parallel=ns.parallel,
            oracle_bound=ns.bound,
        )
        return run_check(cfg)
    cfg = RunConfig(
        size_class=ns.size_class,
        samples=ns.samples,
        seed=ns.seed,
        timeout=ns.timeout,
        node_budget=ns.node_budget,
        rule_budget=ns.rule_budget,
    )
    return run_profile(cfg)


if __name__ == "__main__":
    sys.exit(main())
