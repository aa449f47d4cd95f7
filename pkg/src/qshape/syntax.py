"""Concrete syntax: shape files, query files, and deterministic rendering.

Two tiny surface languages are supported.

Shape files hold one axiom per line in a DL-ish notation::

    # input constraints
    :A <: exists :p . :B
    exists :r . Top <: :B
    :A <: (:B and not :C) or exists :p- . {:a}

``<:`` (or the Unicode subsumption arrow) separates the two sides.  The
left-hand side of an input shape must be a *target*: an atomic concept or
``exists`` over a role (possibly inverted, ``:p-``) with filler ``Top``.
The right-hand side is an arbitrary concept.  A quantifier's filler binds
tightest, so it must be an atom, nominal, ``Top``/``Bottom``, or a
parenthesised expression.  ``#`` starts a comment.

Query files hold a single CONSTRUCT query over the empty prefix::

    PREFIX : <http://example.org/ns#>
    CONSTRUCT { ?y a :E . ?y :p ?z } WHERE { ?x :p ?y . ?y a :B }

Only the conjunctive fragment is accepted: triple patterns with ``a`` or a
role name in predicate position, joined by ``.``.  Anything beyond it —
OPTIONAL, FILTER, UNION, property paths, literals, blank nodes, predicate
variables, variables in class position — is rejected with a dedicated
error rather than silently misread.

Rendering is the exact inverse on plain inputs: ``parse`` after ``render``
is the identity for every value the parsers or generators can produce.
Marked names render with a prime suffix (``:B'`` for the pattern copy,
``:B''`` for the template copy) and variable concepts as ``$x``; these
occur only in diagnostic output and are deliberately not parseable.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import (
    And,
    Atom,
    Axiom,
    Bottom,
    BOTTOM,
    Concept,
    ConceptAssert,
    ConceptAtom,
    ConceptIncl,
    Exists,
    Forall,
    Graph,
    Kind,
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
    TOP,
    and_of,
    concept,
    individual,
    or_of,
    role_name,
    variable,
)

SUBSUMES = "<:"
_UNICODE_SUBSUMES = "⊑"  # accepted on input as an alias for <:


class SourceError(Exception):
    """A parse problem at a known position (1-based line and column)."""

    def __init__(self, line: int, column: int, message: str, snippet: str = ""):
        self.line = line
        self.column = column
        self.message = message
        self.snippet = snippet
        super().__init__(str(self))

    def __str__(self) -> str:
        text = f"line {self.line}, column {self.column}: {self.message}"
        if self.snippet:
            text += f"\n    {self.snippet}\n    " + " " * (self.column - 1) + "^"
        return text


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    line: int
    col: int


def _source_line(text: str, line: int) -> str:
    lines = text.splitlines()
    return lines[line - 1] if 1 <= line <= len(lines) else ""


def _is_ident_char(ch: str) -> bool:
    return ch.isalnum() or ch == "_"


# --------------------------------------------------------------------------
# shape files


def _tokenize_shape_line(line_text: str, line_no: int) -> list[_Token]:
    toks: list[_Token] = []
    i = 0
    n = len(line_text)
    while i < n:
        ch = line_text[i]
        if ch in " \t\r":
            i += 1
            continue
        if ch == "#":
            break
        col = i + 1
        if ch == ":":
            j = i + 1
            while j < n and _is_ident_char(line_text[j]):
                j += 1
            if j == i + 1:
                raise SourceError(line_no, col, "expected a name after ':'", line_text)
            inverted = j < n and line_text[j] == "-"
            name = line_text[i + 1 : j]
            toks.append(_Token("iname" if inverted else "name", name, line_no, col))
            i = j + 1 if inverted else j
            continue
        if ch == "(" or ch == ")" or ch == "{" or ch == "}" or ch == ".":
            toks.append(_Token(ch, ch, line_no, col))
            i += 1
            continue
        if line_text.startswith(SUBSUMES, i):
            toks.append(_Token("sub", SUBSUMES, line_no, col))
            i += 2
            continue
        if ch == _UNICODE_SUBSUMES:
            toks.append(_Token("sub", SUBSUMES, line_no, col))
            i += 1
            continue
        if ch.isalpha():
            j = i
            while j < n and _is_ident_char(line_text[j]):
                j += 1
            word = line_text[i:j]
            if word in ("and", "or", "not", "exists", "forall", "Top", "Bottom"):
                toks.append(_Token(word, word, line_no, col))
                i = j
                continue
            raise SourceError(
                line_no, col, f"unexpected word '{word}' (names are written ':{word}')", line_text
            )
        raise SourceError(line_no, col, f"unexpected character {ch!r}", line_text)
    return toks


class _ShapeParser:
    """Recursive-descent parser for a single axiom line."""

    def __init__(self, tokens: list[_Token], line_no: int, line_text: str):
        self.tokens = tokens
        self.pos = 0
        self.line_no = line_no
        self.line_text = line_text

    def error(self, message: str) -> SourceError:
        col = self.tokens[self.pos].col if self.pos < len(self.tokens) else len(self.line_text) + 1
        return SourceError(self.line_no, col, message, self.line_text)

    def peek(self) -> str:
        return self.tokens[self.pos].kind if self.pos < len(self.tokens) else "eof"

    def take(self, kind: str, what: str) -> _Token:
        if self.peek() != kind:
            raise self.error(f"expected {what}")
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def axiom(self) -> ConceptIncl:
        lhs_col = self.tokens[0].col if self.tokens else 1
        lhs = self.expr()
        self.take("sub", f"'{SUBSUMES}'")
        rhs = self.expr()
        if self.peek() != "eof":
            raise self.error("one axiom per line; unexpected trailing input")
        if not _target_ok(lhs):
            raise SourceError(
                self.line_no,
                lhs_col,
                "the left-hand side must be an atomic concept or"
                " 'exists <role> . Top' (with ':p-' for an inverted role)",
                self.line_text,
            )
        return ConceptIncl(lhs, rhs)

    def expr(self) -> Concept:
        parts = [self.and_expr()]
        while self.peek() == "or":
            self.pos += 1
            parts.append(self.and_expr())
        return or_of(parts) if len(parts) > 1 else parts[0]

    def and_expr(self) -> Concept:
        parts = [self.unary()]
        while self.peek() == "and":
            self.pos += 1
            parts.append(self.unary())
        return and_of(parts) if len(parts) > 1 else parts[0]

    def unary(self) -> Concept:
        kind = self.peek()
        if kind == "not":
            self.pos += 1
            return Not(self.unary())
        if kind in ("exists", "forall"):
            ctor = Exists if kind == "exists" else Forall
            self.pos += 1
            r = self.role_ref()
            self.take(".", "'.' between the role and its filler")
            return ctor(r, self.primary())
        return self.primary()

    def role_ref(self) -> Role:
        kind = self.peek()
        if kind == "name":
            return Role(role_name(self.take("name", "a role name").text))
        if kind == "iname":
            return Role(role_name(self.take("iname", "a role name").text), inverted=True)
        raise self.error("expected a role name")

    def primary(self) -> Concept:
        kind = self.peek()
        if kind == "name":
            return Atom(concept(self.take("name", "a name").text))
        if kind == "iname":
            raise self.error("an inverted role cannot stand as a concept")
        if kind == "Top":
            self.pos += 1
            return TOP
        if kind == "Bottom":
            self.pos += 1
            return BOTTOM
        if kind == "{":
            self.pos += 1
            tok = self.take("name", "an individual name")
            self.take("}", "'}'")
            return Nominal(individual(tok.text))
        if kind == "(":
            self.pos += 1
            inner = self.expr()
            self.take(")", "')'")
            return inner
        raise self.error("expected a concept")


def _target_ok(c: Concept) -> bool:
    if isinstance(c, Atom):
        return True
    return isinstance(c, Exists) and isinstance(c.filler, Top)


def parse_shapes(text: str) -> list[Axiom]:
    """Parse a shape file: one axiom per line, comments and blanks skipped."""
    axioms: list[Axiom] = []
    for line_no, line_text in enumerate(text.splitlines(), start=1):
        tokens = _tokenize_shape_line(line_text, line_no)
        if not tokens:
            continue
        axioms.append(_ShapeParser(tokens, line_no, line_text).axiom())
    return axioms


def parse_shape_file(path: str) -> list[Axiom]:
    with open(path, encoding="utf-8") as fh:
        return parse_shapes(fh.read())


# --------------------------------------------------------------------------
# query files

_SPARQL_UNSUPPORTED = {
    "optional", "filter", "union", "minus", "graph", "service", "bind",
    "values", "select", "ask", "describe", "limit", "offset", "order",
    "group", "having", "distinct", "reduced", "from", "exists",
}


def _tokenize_sparql(text: str) -> list[_Token]:
    toks: list[_Token] = []
    line, col = 1, 1
    i = 0
    n = len(text)

    def err(message: str, at_line: int, at_col: int) -> SourceError:
        return SourceError(at_line, at_col, message, _source_line(text, at_line))

    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_line, start_col = line, col
        if ch == ":" or ch == "?" or ch == "$":
            j = i + 1
            while j < n and _is_ident_char(text[j]):
                j += 1
            word = text[i + 1 : j]
            if not word:
                if ch == ":":
                    toks.append(_Token(":", ":", start_line, start_col))
                    i += 1
                    col += 1
                    continue
                raise err("expected a variable name after '?'", start_line, start_col)
            toks.append(_Token("name" if ch == ":" else "var", word, start_line, start_col))
            col += j - i
            i = j
            continue
        if ch == "<":
            j = text.find(">", i + 1)
            if j == -1 or "\n" in text[i:j]:
                raise err("unterminated IRI reference", start_line, start_col)
            toks.append(_Token("iri", text[i + 1 : j], start_line, start_col))
            col += j + 1 - i
            i = j + 1
            continue
        if ch == "{" or ch == "}" or ch == ".":
            toks.append(_Token(ch, ch, start_line, start_col))
            i += 1
            col += 1
            continue
        if ch == ";" or ch == ",":
            raise err(
                f"predicate/object lists ({ch!r}) are not supported; write one"
                " full triple per '.'-separated entry",
                start_line, start_col,
            )
        if ch in "/|^*+":
            raise err("property paths are not supported", start_line, start_col)
        if ch == '"' or ch == "'":
            raise err("literals are not supported", start_line, start_col)
        if ch == "_":
            raise err("blank nodes are not supported", start_line, start_col)
        if ch.isalpha():
            j = i
            while j < n and _is_ident_char(text[j]):
                j += 1
            word = text[i:j]
            lower = word.lower()
            if word == "a":
                toks.append(_Token("a", word, start_line, start_col))
            elif lower in ("construct", "where", "prefix"):
                toks.append(_Token(lower, word, start_line, start_col))
            elif lower in _SPARQL_UNSUPPORTED:
                raise err(f"{word.upper()} is not supported in this fragment", start_line, start_col)
            else:
                raise err(
                    f"unexpected word '{word}' (did you mean ':{word}' or '?{word}'?)",
                    start_line, start_col,
                )
            col += j - i
            i = j
            continue
        raise err(f"unexpected character {ch!r}", start_line, start_col)
    return toks


class _QueryParser:
    def __init__(self, text: str, tokens: list[_Token]):
        self.text = text
        self.tokens = tokens
        self.pos = 0

    def error(self, message: str, tok: _Token | None = None) -> SourceError:
        if tok is None:
            tok = self.tokens[self.pos] if self.pos < len(self.tokens) else None
        if tok is None:
            last = self.tokens[-1] if self.tokens else None
            line = last.line if last else 1
            col = last.col + len(last.text) if last else 1
            return SourceError(line, col, message, _source_line(self.text, line))
        return SourceError(tok.line, tok.col, message, _source_line(self.text, tok.line))

    def peek(self) -> str:
        return self.tokens[self.pos].kind if self.pos < len(self.tokens) else "eof"

    def take(self, kind: str, what: str) -> _Token:
        if self.peek() != kind:
            raise self.error(f"expected {what}")
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def query(self) -> Query:
        while self.peek() == "prefix":
            self.pos += 1
            if self.peek() == ":":
                self.pos += 1
            else:
                raise self.error("only the empty prefix ':' is supported")
            self.take("iri", "an IRI in angle brackets")
        self.take("construct", "CONSTRUCT")
        template = self.block()
        self.take("where", "WHERE")
        pattern = self.block()
        if self.peek() != "eof":
            raise self.error("unexpected input after the WHERE block")
        self._check_bound(template, pattern)
        return Query(tuple(a for a, _ in template), tuple(a for a, _ in pattern))

    def block(self) -> list[tuple[PatternAtom, _Token]]:
        self.take("{", "'{'")
        atoms: list[tuple[PatternAtom, _Token]] = []
        while self.peek() != "}":
            if self.peek() == "eof":
                raise self.error("unterminated block; expected '}'")
            atoms.append(self.triple())
            if self.peek() == ".":
                self.pos += 1
            elif self.peek() != "}":
                raise self.error("expected '.' or '}' after a triple")
        self.pos += 1
        return atoms

    def triple(self) -> tuple[PatternAtom, _Token]:
        subj_tok = self.term_token()
        pred = self.peek()
        if pred == "a":
            self.pos += 1
            if self.peek() == "var":
                raise self.error("variables are not allowed in class position")
            obj = self.take("name", "a concept name after 'a'")
            return ConceptAtom(self.as_term(subj_tok), concept(obj.text)), subj_tok
        if pred == "name":
            role_tok = self.tokens[self.pos]
            self.pos += 1
            obj_tok = self.term_token()
            return (
                RoleAtom(self.as_term(subj_tok), self.as_term(obj_tok), role_name(role_tok.text)),
                subj_tok,
            )
        if pred == "var":
            raise self.error("variables are not allowed in predicate position")
        raise self.error("expected 'a' or a role name in predicate position")

    def term_token(self) -> _Token:
        kind = self.peek()
        if kind in ("var", "name"):
            tok = self.tokens[self.pos]
            self.pos += 1
            return tok
        if kind == "a":
            # 'a' would be a bare word in term position: make the hint precise
            raise self.error("expected a variable or a name ('a' is only a predicate)")
        raise self.error("expected a variable ('?x') or a name (':n')")

    @staticmethod
    def as_term(tok: _Token) -> Name:
        return variable(tok.text) if tok.kind == "var" else individual(tok.text)

    def _check_bound(self, template, pattern) -> None:
        bound = set()
        for atom, _ in pattern:
            for t in (atom.term,) if isinstance(atom, ConceptAtom) else (atom.subject, atom.object):
                if t.kind is Kind.VARIABLE:
                    bound.add(t)
        for atom, tok in template:
            terms = (atom.term,) if isinstance(atom, ConceptAtom) else (atom.subject, atom.object)
            for t in terms:
                if t.kind is Kind.VARIABLE and t not in bound:
                    raise self.error(
                        f"template variable ?{t.text} is not bound in the WHERE pattern", tok
                    )


def parse_query(text: str) -> Query:
    """Parse a single CONSTRUCT query in the conjunctive fragment."""
    return _QueryParser(text, _tokenize_sparql(text)).query()


def parse_query_file(path: str) -> Query:
    with open(path, encoding="utf-8") as fh:
        return parse_query(fh.read())


# --------------------------------------------------------------------------
# rendering


def render_name(n: Name) -> str:
    if n.kind is Kind.VARIABLE:
        return f"?{n.text}"
    if n.is_var_concept:
        return f"${n.text}"
    return f":{n.text}{n.marking.value}"


def render_role(r: Role) -> str:
    return render_name(r.name) + ("-" if r.inverted else "")


def _render_primary(c: Concept) -> str:
    if isinstance(c, (Atom, Nominal, Top, Bottom)):
        return render_concept(c)
    return f"({render_concept(c)})"


def render_concept(c: Concept) -> str:
    if isinstance(c, Top):
        return "Top"
    if isinstance(c, Bottom):
        return "Bottom"
    if isinstance(c, Atom):
        return render_name(c.name)
    if isinstance(c, Nominal):
        return "{" + render_name(c.individual) + "}"
    if isinstance(c, Not):
        return f"not {_render_primary(c.sub)}"
    if isinstance(c, And):
        return " and ".join(
            f"({render_concept(p)})" if isinstance(p, Or) else render_concept(p) for p in c.parts
        )
    if isinstance(c, Or):
        return " or ".join(render_concept(p) for p in c.parts)
    if isinstance(c, Exists):
        return f"exists {render_role(c.role)} . {_render_primary(c.filler)}"
    if isinstance(c, Forall):
        return f"forall {render_role(c.role)} . {_render_primary(c.filler)}"
    raise TypeError(f"not a concept: {c!r}")


def render_axiom(ax: Axiom) -> str:
    if isinstance(ax, ConceptIncl):
        return f"{render_concept(ax.lhs)} {SUBSUMES} {render_concept(ax.rhs)}"
    if isinstance(ax, RoleIncl):
        return f"{render_role(ax.lhs)} {SUBSUMES} {render_role(ax.rhs)}"
    raise TypeError(f"not an axiom: {ax!r}")


def _render_triple(a: PatternAtom) -> str:
    if isinstance(a, ConceptAtom):
        return f"{render_name(a.term)} a {render_name(a.concept)}"
    return f"{render_name(a.subject)} {render_name(a.role)} {render_name(a.object)}"


def render_query(q: Query) -> str:
    template = " . ".join(_render_triple(a) for a in q.template)
    pattern = " . ".join(_render_triple(a) for a in q.pattern)
    return f"CONSTRUCT {{ {template} }} WHERE {{ {pattern} }}".replace("{  }", "{ }")


def _render_assertion(a) -> str:
    if isinstance(a, ConceptAssert):
        return f"{render_name(a.subject)} a {render_concept(a.concept)}"
    return f"{render_name(a.subject)} {render_role(a.role)} {render_name(a.object)}"


def render_graph(g: Graph) -> str:
    if not len(g):
        return "{ }"
    return "{ " + " . ".join(_render_assertion(a) for a in g) + " }"


def render(subject) -> str:
    """Render any model value back to its concrete syntax."""
    if isinstance(subject, Shape):
        return render_axiom(subject.as_axiom())
    if isinstance(subject, Axiom):
        return render_axiom(subject)
    if isinstance(subject, Concept):
        return render_concept(subject)
    if isinstance(subject, Query):
        return render_query(subject)
    if isinstance(subject, Graph):
        return render_graph(subject)
    if isinstance(subject, Role):
        return render_role(subject)
    if isinstance(subject, Name):
        return render_name(subject)
    if isinstance(subject, (ConceptAssert, RoleAssert)):
        return _render_assertion(subject)
    raise TypeError(f"cannot render {type(subject).__name__}")
