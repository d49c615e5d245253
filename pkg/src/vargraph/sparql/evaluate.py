"""Query evaluation over a QuadStore.

Pattern groups are evaluated sequentially, each element folding the current
row set forward (OPTIONAL is a per-row left join, FILTER drops rows at its
listed position).  Basic graph patterns outside a GRAPH block match the union
of all graphs, mirroring the union-default-graph stores this tool replaces;
inside GRAPH ?g only the named graph under iteration is visible.

Expression errors follow SPARQL convention: they bubble as unbound (BIND) or
as filter-false (FILTER); BIND onto an already-bound variable keeps the row
only when both values agree, so queries that re-bind a variable behave as a
compatibility join.
"""

from __future__ import annotations

from ..rdf import (
    NUMERIC_DATATYPES,
    XSD_BOOLEAN,
    XSD_DOUBLE,
    XSD_INTEGER,
    XSD_STRING,
    BlankNode,
    Iri,
    Literal,
    Term,
)
from ..store import QuadStore
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
    SelectQuery,
    TermExpr,
    TriplePattern,
    Var,
)
from .table import ResultTable

Row = dict[str, Term]


class QueryEvaluationError(RuntimeError):
    pass


class ExpressionError(Exception):
    """SPARQL expression error: unbound variable or bad operand types."""


TRUE = Literal("true", datatype=XSD_BOOLEAN)
FALSE = Literal("false", datatype=XSD_BOOLEAN)


def _is_numeric(term: Term) -> bool:
    return isinstance(term, Literal) and term.datatype in NUMERIC_DATATYPES


def _numeric_value(term: Term) -> float:
    if not _is_numeric(term):
        raise ExpressionError("not a numeric literal")
    try:
        return float(term.lexical)
    except ValueError as exc:
        raise ExpressionError("malformed numeric lexical") from exc


def _is_plain_string(term: Term) -> bool:
    return (
        isinstance(term, Literal)
        and term.datatype == XSD_STRING
        and term.language is None
    )


def _string_value(term: Term) -> str:
    if not isinstance(term, Literal) or term.datatype != XSD_STRING:
        raise ExpressionError("not a string literal")
    return term.lexical


def _boolean(value: bool) -> Literal:
    return TRUE if value else FALSE


def effective_boolean(term: Term) -> bool:
    if isinstance(term, Literal):
        if term.datatype == XSD_BOOLEAN:
            return term.lexical == "true"
        if term.datatype in NUMERIC_DATATYPES:
            return _numeric_value(term) != 0.0
        if term.datatype == XSD_STRING:
            return len(term.lexical) > 0
    raise ExpressionError("no effective boolean value")


def _compare(op: str, left: Term, right: Term) -> bool:
    if op in ("=", "!="):
        equal = _term_equal(left, right)
        return equal if op == "=" else not equal
    if _is_numeric(left) and _is_numeric(right):
        a, b = _numeric_value(left), _numeric_value(right)
    elif _is_plain_string(left) and _is_plain_string(right):
        a, b = left.lexical, right.lexical
    elif (
        isinstance(left, Literal) and isinstance(right, Literal)
        and left.datatype == right.datatype == XSD_BOOLEAN
    ):
        a, b = left.lexical == "true", right.lexical == "true"
    else:
        raise ExpressionError(f"cannot order operands with {op}")
    if op == "<":
        return a < b
    if op == ">":
        return a > b
    if op == "<=":
        return a <= b
    return a >= b


def _term_equal(left: Term, right: Term) -> bool:
    if left == right:
        return True
    if isinstance(left, Literal) and isinstance(right, Literal):
        if _is_numeric(left) and _is_numeric(right):
            return _numeric_value(left) == _numeric_value(right)
        if left.datatype == right.datatype:
            return False  # same datatype, different lexical or language
        raise ExpressionError("incomparable literals")
    return False  # different term kinds, or distinct IRIs / blank nodes


def eval_expression(expr: Expr, row: Row) -> Term:
    """Evaluate to an RDF term; raises ExpressionError on SPARQL errors."""
    if isinstance(expr, Var):
        value = row.get(expr.name)
        if value is None:
            raise ExpressionError(f"unbound variable ?{expr.name}")
        return value
    if isinstance(expr, TermExpr):
        return expr.term
    if isinstance(expr, LogicalExpr):
        return _eval_logical(expr, row)
    if isinstance(expr, NotExpr):
        return _boolean(not effective_boolean(eval_expression(expr.operand, row)))
    if isinstance(expr, NegExpr):
        operand = eval_expression(expr.operand, row)
        if isinstance(operand, Literal) and operand.datatype == XSD_INTEGER:
            return _integer_term(-_int_value(operand))
        return _double_term(-_numeric_value(operand))
    if isinstance(expr, Comparison):
        return _boolean(_compare(
            expr.op, eval_expression(expr.lhs, row), eval_expression(expr.rhs, row)
        ))
    if isinstance(expr, Arithmetic):
        return _eval_arithmetic(expr, row)
    if isinstance(expr, InExpr):
        return _eval_in(expr, row)
    if isinstance(expr, FunctionCall):
        return _eval_function(expr, row)
    raise TypeError(f"unknown expression node {expr!r}")


def _integer_term(value: int) -> Literal:
    return Literal(str(value), datatype=XSD_INTEGER)


def _double_term(value: float) -> Literal:
    return Literal(repr(float(value)), datatype=XSD_DOUBLE)


def _eval_logical(expr: LogicalExpr, row: Row) -> Literal:
    # SPARQL logical ops tolerate one errored side if the other decides
    def side(sub: Expr) -> bool | None:
        try:
            return effective_boolean(eval_expression(sub, row))
        except ExpressionError:
            return None

    left, right = side(expr.lhs), side(expr.rhs)
    if expr.op == "&&":
        if left is False or right is False:
            return FALSE
        if left is True and right is True:
            return TRUE
    else:
        if left is True or right is True:
            return TRUE
        if left is False and right is False:
            return FALSE
    raise ExpressionError("logical expression error")


def _int_value(term: Term) -> int:
    if not (isinstance(term, Literal) and term.datatype == XSD_INTEGER):
        raise ExpressionError("not an integer literal")
    try:
        return int(term.lexical)
    except ValueError as exc:
        raise ExpressionError("malformed integer lexical") from exc


def _eval_arithmetic(expr: Arithmetic, row: Row) -> Literal:
    """+,-,* on two xsd:integer operands stay integer; everything else
    (including all division) produces xsd:double."""
    left = eval_expression(expr.lhs, row)
    right = eval_expression(expr.rhs, row)
    both_int = (
        isinstance(left, Literal) and left.datatype == XSD_INTEGER
        and isinstance(right, Literal) and right.datatype == XSD_INTEGER
    )
    if both_int and expr.op != "/":
        a, b = _int_value(left), _int_value(right)
        if expr.op == "+":
            return _integer_term(a + b)
        if expr.op == "-":
            return _integer_term(a - b)
        return _integer_term(a * b)
    a, b = _numeric_value(left), _numeric_value(right)
    if expr.op == "+":
        return _double_term(a + b)
    if expr.op == "-":
        return _double_term(a - b)
    if expr.op == "*":
        return _double_term(a * b)
    if b == 0:
        raise ExpressionError("division by zero")
    return _double_term(a / b)


def _eval_in(expr: InExpr, row: Row) -> Literal:
    operand = eval_expression(expr.operand, row)
    saw_error = False
    found = False
    for option in expr.options:
        try:
            if _term_equal(operand, eval_expression(option, row)):
                found = True
                break
        except ExpressionError:
            saw_error = True
    if not found and saw_error:
        raise ExpressionError("IN comparison error")
    return _boolean(found != expr.negated)


def _eval_function(expr: FunctionCall, row: Row) -> Term:
    name = expr.name
    if name == "COALESCE":
        for arg in expr.args:
            try:
                return eval_expression(arg, row)
            except ExpressionError:
                continue
        raise ExpressionError("COALESCE: all arguments errored")
    if name == "BOUND":
        assert isinstance(expr.args[0], Var)
        return _boolean(expr.args[0].name in row)
    if name == "IF":
        condition = effective_boolean(eval_expression(expr.args[0], row))
        return eval_expression(expr.args[1] if condition else expr.args[2], row)
    if name == "STRLEN":
        return Literal(str(len(_string_value(eval_expression(expr.args[0], row)))),
                       datatype=XSD_INTEGER)
    if name == "REPLACE":
        # pattern is treated as a literal string, the only form used here
        text = _string_value(eval_expression(expr.args[0], row))
        pattern = _string_value(eval_expression(expr.args[1], row))
        replacement = _string_value(eval_expression(expr.args[2], row))
        if not pattern:
            raise ExpressionError("REPLACE with empty pattern")
        return Literal(text.replace(pattern, replacement))
    if name == "STRBEFORE":
        text = _string_value(eval_expression(expr.args[0], row))
        sep = _string_value(eval_expression(expr.args[1], row))
        index = text.find(sep) if sep else -1
        return Literal(text[:index] if index >= 0 else "")
    raise ExpressionError(f"unknown function {name}")


# --- pattern evaluation ------------------------------------------------------


def _resolve(part, row: Row) -> Term | None:
    if isinstance(part, Var):
        return row.get(part.name)
    return part


def _match_triple(tp: TriplePattern, row: Row, store: QuadStore,
                  graph: Iri | None) -> list[Row]:
    s = _resolve(tp.subject, row)
    p = _resolve(tp.predicate, row)
    o = _resolve(tp.object, row)
    if graph is None:
        triples = store.match_triples(s, p, o)
    else:
        triples = [q.triple() for q in store.match(s, p, o, graph)]
    out = []
    for triple in triples:
        new_row = dict(row)
        ok = True
        for part, value in zip((tp.subject, tp.predicate, tp.object), triple):
            if isinstance(part, Var):
                bound = new_row.get(part.name)
                if bound is None:
                    new_row[part.name] = value
                elif bound != value:
                    ok = False
                    break
        if ok:
            out.append(new_row)
    return out


def _eval_node(node: PatternNode, rows: list[Row], store: QuadStore,
               graph: Iri | None) -> list[Row]:
    if isinstance(node, TriplePattern):
        out: list[Row] = []
        for row in rows:
            out.extend(_match_triple(node, row, store, graph))
        return out
    if isinstance(node, GraphBlock):
        out = []
        for row in rows:
            if isinstance(node.graph, Iri):
                graphs = [node.graph]
            else:
                bound = row.get(node.graph.name)
                if bound is not None:
                    graphs = [bound] if isinstance(bound, Iri) else []
                else:
                    graphs = store.list_graphs()
            for gi in graphs:
                seed = dict(row)
                if isinstance(node.graph, Var):
                    seed[node.graph.name] = gi
                out.extend(_eval_group(node.body, [seed], store, gi))
        return out
    if isinstance(node, OptionalBlock):
        out = []
        for row in rows:
            extended = _eval_group(node.body, [row], store, graph)
            out.extend(extended if extended else [row])
        return out
    if isinstance(node, BindNode):
        out = []
        for row in rows:
            try:
                value = eval_expression(node.expr, row)
            except ExpressionError:
                out.append(row)  # error leaves the variable unbound
                continue
            bound = row.get(node.var.name)
            if bound is None:
                new_row = dict(row)
                new_row[node.var.name] = value
                out.append(new_row)
            elif bound == value:
                out.append(row)  # compatibility join on re-binding
        return out
    if isinstance(node, FilterNode):
        out = []
        for row in rows:
            try:
                keep = effective_boolean(eval_expression(node.expr, row))
            except ExpressionError:
                keep = False
            if keep:
                out.append(row)
        return out
    raise TypeError(f"unknown pattern node {node!r}")


def _eval_group(nodes: tuple[PatternNode, ...], rows: list[Row],
                store: QuadStore, graph: Iri | None) -> list[Row]:
    for node in nodes:
        rows = _eval_node(node, rows, store, graph)
        if not rows:
            return rows
    return rows


def term_order_key(term: Term | None):
    """Deterministic total order: unbound, blank nodes, IRIs, then literals
    (numeric before other literals)."""
    if term is None:
        return (0,)
    if isinstance(term, BlankNode):
        return (1, term.label)
    if isinstance(term, Iri):
        return (2, term.value)
    if _is_numeric(term):
        try:
            return (3, 0, float(term.lexical), term.lexical)
        except ValueError:
            pass
    return (3, 1, term.datatype, term.lexical, term.language or "")


def evaluate(query: SelectQuery, store: QuadStore) -> ResultTable:
    """Run a parsed query; unbound projection cells come back as None."""
    rows = _eval_group(query.where, [{}], store, None)

    # extend rows with SELECT expressions (overwrites are projections, not joins)
    for item in query.projection:
        if item.expr is None:
            continue
        for row in rows:
            try:
                row[item.var.name] = eval_expression(item.expr, row)
            except ExpressionError:
                row.pop(item.var.name, None)

    if query.order_by:
        rows.sort(key=lambda row: tuple(
            term_order_key(row.get(v.name)) for v in query.order_by
        ))

    columns = [item.var.name for item in query.projection]
    out_rows = [tuple(row.get(name) for name in columns) for row in rows]
    if query.distinct:
        seen = set()
        deduped = []
        for row in out_rows:
            if row not in seen:
                seen.add(row)
                deduped.append(row)
        out_rows = deduped
    return ResultTable(columns=columns, rows=out_rows)
