"""Recursive-descent parser for the supported SPARQL subset."""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..rdf import RDF_TYPE, XSD_DECIMAL, XSD_DOUBLE, XSD_INTEGER, Iri, Literal, Term
from .ast import (
    Arithmetic,
    BindNode,
    Comparison,
    Expr,
    FilterNode,
    FunctionCall,
    GraphBlock,
    InExpr,
    LogicalExpr,
    NegExpr,
    NotExpr,
    OptionalBlock,
    PatternNode,
    ProjectionItem,
    SelectQuery,
    TermExpr,
    TriplePattern,
    Var,
    assignable_vars,
)


class SparqlParseError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset


_BUILTINS = {
    "COALESCE": None,  # variadic, >= 1
    "IF": 3,
    "STRLEN": 1,
    "REPLACE": 3,
    "STRBEFORE": 2,
    "BOUND": 1,
}

_KEYWORDS = {
    "PREFIX", "SELECT", "DISTINCT", "WHERE", "GRAPH", "OPTIONAL", "BIND",
    "FILTER", "ORDER", "BY", "AS", "IN", "NOT", "TRUE", "FALSE", "A",
} | set(_BUILTINS)

_TOKEN_RE = re.compile(
    r"""
      (?P<WS>\s+|\#[^\n]*)
    | (?P<IRIREF><[^<>"{}|^`\\\x00-\x20]*>)
    | (?P<VAR>[?$][A-Za-z_][A-Za-z_0-9]*)
    | (?P<NUMBER>(?:[0-9]+\.[0-9]*|\.[0-9]+|[0-9]+)(?:[eE][+-]?[0-9]+)?)
    | (?P<STRING>"(?:[^"\\\n]|\\.)*")
    | (?P<PNAME>[A-Za-z_][A-Za-z_0-9-]*:(?:[A-Za-z_0-9](?:[A-Za-z_0-9.-]*[A-Za-z_0-9-])?)?)
    | (?P<NAME>[A-Za-z_][A-Za-z_0-9]*)
    | (?P<OP>&&|\|\||!=|<=|>=|\^\^|[=<>!+\-*/(){}.,;])
    """,
    re.VERBOSE,
)

_UNESCAPES = {
    "t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f",
    '"': '"', "'": "'", "\\": "\\",
}


@dataclass(frozen=True, slots=True)
class _Token:
    kind: str
    text: str
    offset: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise SparqlParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup or "WS"
        if kind != "WS":
            tokens.append(_Token(kind, m.group(0), pos))
        pos = m.end()
    tokens.append(_Token("EOF", "", len(text)))
    return tokens


def _unquote(raw: str, offset: int) -> str:
    body = raw[1:-1]
    out = []
    i = 0
    while i < len(body):
        ch = body[i]
        if ch == "\\":
            esc = body[i + 1]
            if esc in _UNESCAPES:
                out.append(_UNESCAPES[esc])
                i += 2
            elif esc == "u":
                out.append(chr(int(body[i + 2:i + 6], 16)))
                i += 6
            else:
                raise SparqlParseError(f"unknown escape \\{esc}", offset)
        else:
            out.append(ch)
            i += 1
    return "".join(out)


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.prefixes: dict[str, str] = {}

    # --- token plumbing ---------------------------------------------------

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def error(self, message: str) -> SparqlParseError:
        return SparqlParseError(message, self.peek().offset)

    def at_keyword(self, word: str) -> bool:
        tok = self.peek()
        return tok.kind == "NAME" and tok.text.upper() == word

    def take_keyword(self, word: str) -> bool:
        if self.at_keyword(word):
            self.advance()
            return True
        return False

    def expect_keyword(self, word: str) -> None:
        if not self.take_keyword(word):
            raise self.error(f"expected {word}")

    def take_op(self, op: str) -> bool:
        tok = self.peek()
        if tok.kind == "OP" and tok.text == op:
            self.advance()
            return True
        return False

    def expect_op(self, op: str) -> None:
        if not self.take_op(op):
            raise self.error(f"expected {op!r}")

    # --- terms --------------------------------------------------------------

    def _expand_pname(self, tok: _Token) -> Iri:
        label, _, local = tok.text.partition(":")
        if label not in self.prefixes:
            raise SparqlParseError(f"unknown prefix {label!r}", tok.offset)
        return Iri(self.prefixes[label] + local)

    def parse_iri(self) -> Iri:
        tok = self.peek()
        if tok.kind == "IRIREF":
            self.advance()
            return Iri(tok.text[1:-1])
        if tok.kind == "PNAME":
            self.advance()
            return self._expand_pname(tok)
        raise self.error("expected IRI")

    def parse_literal(self) -> Literal:
        tok = self.advance()
        lexical = _unquote(tok.text, tok.offset)
        if self.take_op("^^"):
            return Literal(lexical, datatype=self.parse_iri().value)
        return Literal(lexical)

    def parse_number(self, tok: _Token) -> Literal:
        if "e" in tok.text or "E" in tok.text:
            return Literal(tok.text, datatype=XSD_DOUBLE)
        if "." in tok.text:
            return Literal(tok.text, datatype=XSD_DECIMAL)
        return Literal(tok.text, datatype=XSD_INTEGER)

    def parse_term_pattern(self, *, predicate: bool = False):
        tok = self.peek()
        if tok.kind == "VAR":
            self.advance()
            return Var(tok.text[1:])
        if tok.kind in ("IRIREF", "PNAME"):
            return self.parse_iri()
        if predicate and self.take_keyword("A"):
            return Iri(RDF_TYPE)
        if not predicate:
            if tok.kind == "STRING":
                return self.parse_literal()
            if tok.kind == "NUMBER":
                self.advance()
                return self.parse_number(tok)
            if self.at_keyword("TRUE") or self.at_keyword("FALSE"):
                word = self.advance().text.lower()
                return Literal(word, datatype="http://www.w3.org/2001/XMLSchema#boolean")
        raise self.error("expected variable or term")

    # --- expressions ----------------------------------------------------------

    def parse_expr(self) -> Expr:
        return self.parse_or()

    def parse_or(self) -> Expr:
        expr = self.parse_and()
        while self.take_op("||"):
            expr = LogicalExpr("||", expr, self.parse_and())
        return expr

    def parse_and(self) -> Expr:
        expr = self.parse_relational()
        while self.take_op("&&"):
            expr = LogicalExpr("&&", expr, self.parse_relational())
        return expr

    def parse_relational(self) -> Expr:
        expr = self.parse_additive()
        tok = self.peek()
        if tok.kind == "OP" and tok.text in ("=", "!=", "<", ">", "<=", ">="):
            self.advance()
            return Comparison(tok.text, expr, self.parse_additive())
        if self.at_keyword("IN"):
            self.advance()
            return InExpr(expr, self._parse_expr_list())
        if self.at_keyword("NOT"):
            self.advance()
            self.expect_keyword("IN")
            return InExpr(expr, self._parse_expr_list(), negated=True)
        return expr

    def _parse_expr_list(self) -> tuple[Expr, ...]:
        self.expect_op("(")
        options = [self.parse_expr()]
        while self.take_op(","):
            options.append(self.parse_expr())
        self.expect_op(")")
        return tuple(options)

    def parse_additive(self) -> Expr:
        expr = self.parse_multiplicative()
        while True:
            if self.take_op("+"):
                expr = Arithmetic("+", expr, self.parse_multiplicative())
            elif self.take_op("-"):
                expr = Arithmetic("-", expr, self.parse_multiplicative())
            else:
                return expr

    def parse_multiplicative(self) -> Expr:
        expr = self.parse_unary()
        while True:
            if self.take_op("*"):
                expr = Arithmetic("*", expr, self.parse_unary())
            elif self.take_op("/"):
                expr = Arithmetic("/", expr, self.parse_unary())
            else:
                return expr

    def parse_unary(self) -> Expr:
        if self.take_op("!"):
            return NotExpr(self.parse_unary())
        if self.take_op("-"):
            return NegExpr(self.parse_unary())
        if self.take_op("+"):
            return self.parse_unary()
        return self.parse_primary()

    def parse_primary(self) -> Expr:
        tok = self.peek()
        if tok.kind == "OP" and tok.text == "(":
            self.advance()
            expr = self.parse_expr()
            self.expect_op(")")
            return expr
        if tok.kind == "VAR":
            self.advance()
            return Var(tok.text[1:])
        if tok.kind == "NAME" and tok.text.upper() in _BUILTINS:
            return self.parse_builtin()
        if tok.kind == "NAME" and tok.text.upper() in ("TRUE", "FALSE"):
            self.advance()
            return TermExpr(Literal(tok.text.lower(), datatype="http://www.w3.org/2001/XMLSchema#boolean"))
        if tok.kind == "STRING":
            return TermExpr(self.parse_literal())
        if tok.kind == "NUMBER":
            self.advance()
            return TermExpr(self.parse_number(tok))
        if tok.kind in ("IRIREF", "PNAME"):
            return TermExpr(self.parse_iri())
        raise self.error(f"unsupported expression construct {tok.text!r}")

    def parse_builtin(self) -> Expr:
        tok = self.advance()
        name = tok.text.upper()
        self.expect_op("(")
        args = [self.parse_expr()]
        while self.take_op(","):
            args.append(self.parse_expr())
        self.expect_op(")")
        arity = _BUILTINS[name]
        if arity is not None and len(args) != arity:
            raise SparqlParseError(
                f"{name} takes {arity} arguments, got {len(args)}", tok.offset
            )
        if name == "BOUND" and not isinstance(args[0], Var):
            raise SparqlParseError("BOUND requires a variable", tok.offset)
        return FunctionCall(name, tuple(args))

    # --- patterns ----------------------------------------------------------

    def parse_group(self) -> tuple[PatternNode, ...]:
        self.expect_op("{")
        nodes: list[PatternNode] = []
        while not self.take_op("}"):
            tok = self.peek()
            if self.take_keyword("GRAPH"):
                graph = self.parse_term_pattern()
                if not isinstance(graph, (Var, Iri)):
                    raise SparqlParseError("GRAPH needs a variable or IRI", tok.offset)
                nodes.append(GraphBlock(graph, self.parse_group()))
            elif self.take_keyword("OPTIONAL"):
                nodes.append(OptionalBlock(self.parse_group()))
            elif self.take_keyword("BIND"):
                self.expect_op("(")
                expr = self.parse_expr()
                self.expect_keyword("AS")
                var = self.parse_term_pattern()
                if not isinstance(var, Var):
                    raise self.error("BIND target must be a variable")
                self.expect_op(")")
                self.take_op(".")
                nodes.append(BindNode(expr, var))
            elif self.take_keyword("FILTER"):
                self.expect_op("(")
                expr = self.parse_expr()
                self.expect_op(")")
                self.take_op(".")
                nodes.append(FilterNode(expr))
            elif tok.kind == "NAME":
                raise SparqlParseError(
                    f"unsupported construct {tok.text!r}", tok.offset
                )
            else:
                subject = self.parse_term_pattern()
                predicate = self.parse_term_pattern(predicate=True)
                obj = self.parse_term_pattern()
                if isinstance(subject, Literal):
                    raise SparqlParseError("literal subject", tok.offset)
                nodes.append(TriplePattern(subject, predicate, obj))
                if not self.take_op("."):
                    if not (self.peek().kind == "OP" and self.peek().text == "}"):
                        raise self.error("expected '.' after triple pattern")
        return tuple(nodes)

    # --- query --------------------------------------------------------------

    def parse_query(self) -> SelectQuery:
        while self.take_keyword("PREFIX"):
            tok = self.peek()
            if tok.kind != "PNAME" or not tok.text.endswith(":"):
                raise self.error("expected prefix label ending in ':'")
            self.advance()
            iri_tok = self.peek()
            if iri_tok.kind != "IRIREF":
                raise self.error("expected namespace IRI")
            self.advance()
            self.prefixes[tok.text[:-1]] = iri_tok.text[1:-1]

        self.expect_keyword("SELECT")
        distinct = self.take_keyword("DISTINCT")
        projection: list[ProjectionItem] = []
        while True:
            tok = self.peek()
            if tok.kind == "VAR":
                self.advance()
                projection.append(ProjectionItem(Var(tok.text[1:])))
            elif tok.kind == "OP" and tok.text == "(":
                self.advance()
                expr = self.parse_expr()
                self.expect_keyword("AS")
                var_tok = self.peek()
                if var_tok.kind != "VAR":
                    raise self.error("expected variable after AS")
                self.advance()
                self.expect_op(")")
                projection.append(ProjectionItem(Var(var_tok.text[1:]), expr))
            else:
                break
        if not projection:
            raise self.error("empty SELECT projection")

        self.expect_keyword("WHERE")
        where = self.parse_group()

        order_by: list[Var] = []
        if self.take_keyword("ORDER"):
            self.expect_keyword("BY")
            while self.peek().kind == "VAR":
                order_by.append(Var(self.advance().text[1:]))
            if not order_by:
                raise self.error("ORDER BY requires at least one variable")

        if self.peek().kind != "EOF":
            raise self.error(f"unsupported construct {self.peek().text!r}")

        query = SelectQuery(
            projection=tuple(projection),
            where=where,
            distinct=distinct,
            order_by=tuple(order_by),
            prefixes=dict(self.prefixes),
        )
        _check_projection(query)
        return query


def _check_projection(query: SelectQuery) -> None:
    available = assignable_vars(query.where)
    expression_targets = {item.var.name for item in query.projection if item.expr is not None}
    for item in query.projection:
        if item.expr is None and item.var.name not in available | expression_targets:
            raise SparqlParseError(
                f"projected variable ?{item.var.name} is never bound in WHERE", 0
            )


def parse_query(text: str) -> SelectQuery:
    """Parse a query; raises SparqlParseError naming the offending construct
    and byte offset."""
    return _Parser(text).parse_query()


# --- pretty printer ---------------------------------------------------------


def _term_text(term: Term) -> str:
    from ..rdf import term_token

    return term_token(term)


def _pattern_text(part) -> str:
    if isinstance(part, Var):
        return f"?{part.name}"
    return _term_text(part)


def _expr_text(expr: Expr) -> str:
    if isinstance(expr, Var):
        return f"?{expr.name}"
    if isinstance(expr, TermExpr):
        return _term_text(expr.term)
    if isinstance(expr, FunctionCall):
        return f"{expr.name}({', '.join(_expr_text(a) for a in expr.args)})"
    if isinstance(expr, Comparison):
        return f"({_expr_text(expr.lhs)} {expr.op} {_expr_text(expr.rhs)})"
    if isinstance(expr, Arithmetic):
        return f"({_expr_text(expr.lhs)} {expr.op} {_expr_text(expr.rhs)})"
    if isinstance(expr, LogicalExpr):
        return f"({_expr_text(expr.lhs)} {expr.op} {_expr_text(expr.rhs)})"
    if isinstance(expr, NotExpr):
        return f"(! {_expr_text(expr.operand)})"
    if isinstance(expr, NegExpr):
        return f"(- {_expr_text(expr.operand)})"
    if isinstance(expr, InExpr):
        middle = "NOT IN" if expr.negated else "IN"
        return f"({_expr_text(expr.operand)} {middle} ({', '.join(_expr_text(o) for o in expr.options)}))"
    raise TypeError(f"unknown expression node {expr!r}")


def _nodes_text(nodes, indent: int) -> str:
    pad = "  " * indent
    out = []
    for node in nodes:
        if isinstance(node, TriplePattern):
            out.append(
                f"{pad}{_pattern_text(node.subject)} {_pattern_text(node.predicate)} "
                f"{_pattern_text(node.object)} ."
            )
        elif isinstance(node, GraphBlock):
            out.append(f"{pad}GRAPH {_pattern_text(node.graph)} {{")
            out.append(_nodes_text(node.body, indent + 1))
            out.append(f"{pad}}}")
        elif isinstance(node, OptionalBlock):
            out.append(f"{pad}OPTIONAL {{")
            out.append(_nodes_text(node.body, indent + 1))
            out.append(f"{pad}}}")
        elif isinstance(node, BindNode):
            out.append(f"{pad}BIND ({_expr_text(node.expr)} AS ?{node.var.name})")
        elif isinstance(node, FilterNode):
            out.append(f"{pad}FILTER ({_expr_text(node.expr)})")
    return "\n".join(part for part in out if part)


def query_to_text(query: SelectQuery) -> str:
    """Canonical text for an AST (absolute IRIs; reparses to an equal AST)."""
    items = []
    for item in query.projection:
        if item.expr is None:
            items.append(f"?{item.var.name}")
        else:
            items.append(f"({_expr_text(item.expr)} AS ?{item.var.name})")
    head = "SELECT " + ("DISTINCT " if query.distinct else "") + " ".join(items)
    body = _nodes_text(query.where, 1)
    text = f"{head}\nWHERE {{\n{body}\n}}"
    if query.order_by:
        text += "\nORDER BY " + " ".join(f"?{v.name}" for v in query.order_by)
    return text + "\n"
