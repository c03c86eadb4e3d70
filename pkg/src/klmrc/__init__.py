"""Defeasible entailment over literal implications: BaseRank and Rational Closure."""

__version__ = "0.1.0"

from .kb import (  # noqa: E402
    TOP,
    Conditional,
    Interpretation,
    ImplicationSet,
    KBError,
    KBSyntaxError,
    Kind,
    KnowledgeBase,
    Literal,
    Query,
    QueryError,
    classical,
    defeasible,
    emit_kb,
    materialise,
    negate,
    parse_kb,
    parse_query,
)
from .entailment import (  # noqa: E402
    ImplicationGraph,
    InconsistentPremises,
    closure,
    entails,
    is_consistent,
    is_exceptional,
)
from .baserank import InconsistentKB, RankedKnowledgeBase, base_rank  # noqa: E402
from .rc import RationalClosure, RcAnswer, rc_entails  # noqa: E402

__all__ = [
    "TOP", "Conditional", "Interpretation", "ImplicationSet", "KBError", "KBSyntaxError",
    "Kind", "KnowledgeBase", "Literal", "Query", "QueryError", "classical", "defeasible",
    "emit_kb", "materialise", "negate", "parse_kb", "parse_query",
    "ImplicationGraph", "InconsistentPremises", "closure", "entails", "is_consistent",
    "is_exceptional", "InconsistentKB", "RankedKnowledgeBase", "base_rank",
    "RationalClosure", "RcAnswer", "rc_entails",
]
