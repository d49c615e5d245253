"""Query AST node types (prefix names are expanded during parsing)."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from ..rdf import Iri, Literal, Term


@dataclass(frozen=True, slots=True)
class Var:
    name: str


TermPattern = Union[Var, Term]


# --- expressions -----------------------------------------------------------

@dataclass(frozen=True, slots=True)
class TermExpr:
    term: Term


@dataclass(frozen=True, slots=True)
class FunctionCall:
    name: str  # upper-cased builtin name
    args: tuple["Expr", ...]


@dataclass(frozen=True, slots=True)
class Comparison:
    op: str  # = != < > <= >=
    lhs: "Expr"
    rhs: "Expr"


@dataclass(frozen=True, slots=True)
class Arithmetic:
    op: str  # + - * /
    lhs: "Expr"
    rhs: "Expr"


@dataclass(frozen=True, slots=True)
class LogicalExpr:
    op: str  # && ||
    lhs: "Expr"
    rhs: "Expr"


@dataclass(frozen=True, slots=True)
class NotExpr:
    operand: "Expr"


@dataclass(frozen=True, slots=True)
class NegExpr:
    operand: "Expr"


@dataclass(frozen=True, slots=True)
class InExpr:
    operand: "Expr"
    options: tuple["Expr", ...]
    negated: bool = False


Expr = Union[
    Var, TermExpr, FunctionCall, Comparison, Arithmetic, LogicalExpr,
    NotExpr, NegExpr, InExpr,
]


# --- graph patterns ---------------------------------------------------------

@dataclass(frozen=True, slots=True)
class TriplePattern:
    subject: TermPattern
    predicate: TermPattern
    object: TermPattern


@dataclass(frozen=True, slots=True)
class GraphBlock:
    graph: Var | Iri
    body: tuple["PatternNode", ...]


@dataclass(frozen=True, slots=True)
class OptionalBlock:
    body: tuple["PatternNode", ...]


@dataclass(frozen=True, slots=True)
class BindNode:
    expr: Expr
    var: Var


@dataclass(frozen=True, slots=True)
class FilterNode:
    expr: Expr


PatternNode = Union[TriplePattern, GraphBlock, OptionalBlock, BindNode, FilterNode]


@dataclass(frozen=True, slots=True)
class ProjectionItem:
    var: Var
    expr: Expr | None = None  # None for a plain ?var projection


@dataclass(frozen=True)
class SelectQuery:
    projection: tuple[ProjectionItem, ...]
    where: tuple[PatternNode, ...]
    distinct: bool = False
    order_by: tuple[Var, ...] = ()
    prefixes: dict[str, str] = field(default_factory=dict, compare=False)


def assignable_vars(nodes: tuple[PatternNode, ...]) -> set[str]:
    """Variables a WHERE clause can bind (including inside OPTIONALs)."""
    out: set[str] = set()
    for node in nodes:
        if isinstance(node, TriplePattern):
            for part in (node.subject, node.predicate, node.object):
                if isinstance(part, Var):
                    out.add(part.name)
        elif isinstance(node, GraphBlock):
            if isinstance(node.graph, Var):
                out.add(node.graph.name)
            out |= assignable_vars(node.body)
        elif isinstance(node, OptionalBlock):
            out |= assignable_vars(node.body)
        elif isinstance(node, BindNode):
            out.add(node.var.name)
    return out
