"""Access-list analysis with binary decision diagrams."""

from ._aclbdd import (
    BddError,
    BinOp,
    CompileError,
    ConditionError,
    Manager,
    NodeRef,
    ParseError,
    RowBudgetExceeded,
    Workspace,
    normalize_rule,
    parse_rule,
    render_text,
)

__all__ = [
    "BddError",
    "BinOp",
    "CompileError",
    "ConditionError",
    "Manager",
    "NodeRef",
    "ParseError",
    "RowBudgetExceeded",
    "Workspace",
    "normalize_rule",
    "parse_rule",
    "render_text",
]
