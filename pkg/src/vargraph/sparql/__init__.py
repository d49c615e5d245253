"""SPARQL-subset parser and evaluator.

Covers the feature-extraction query shape: SELECT DISTINCT with expression
projections, GRAPH with a variable, OPTIONAL, BIND, FILTER (comparisons and
IN lists), COALESCE/IF/STRLEN/REPLACE/STRBEFORE/BOUND, and ORDER BY.
"""

from .ast import (
    BindNode,
    Comparison,
    FilterNode,
    FunctionCall,
    GraphBlock,
    InExpr,
    LogicalExpr,
    OptionalBlock,
    SelectQuery,
    TriplePattern,
    Var,
)
from .evaluate import QueryEvaluationError, evaluate
from .parser import SparqlParseError, parse_query, query_to_text
from .table import ResultTable

__all__ = [
    "BindNode", "Comparison", "FilterNode", "FunctionCall", "GraphBlock",
    "InExpr", "LogicalExpr", "OptionalBlock", "SelectQuery", "TriplePattern",
    "Var", "parse_query", "query_to_text", "SparqlParseError", "evaluate",
    "QueryEvaluationError", "ResultTable",
]
