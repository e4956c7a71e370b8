"""Boolean Fault tree Logic: query static fault trees with BDD-based model checking."""

__version__ = "0.1.0"

from .analysis import (
    AnalysisError,
    Analyzer,
    Counterexample,
    ResultSet,
    Verdict,
    counterexample,
    enumerate_satisfying,
    evaluate,
)
from .bdd import BDD, BddError, BddRef
from .compiler import Compiler, CompileError, ScopeMode, TreeVerdict, VectorPredicate
from .fault_tree import (
    Element,
    FaultTree,
    FaultTreeError,
    FaultTreeSyntaxError,
    GateType,
    StatusVector,
    basic_event_order,
    eval_structure,
    load_fault_tree,
    parse_fault_tree,
    serialize,
    validate,
)
from .formula import Formula, FormulaError, FormulaSyntaxError, Layer, desugar, layer_of, parse_formula
from .oracle import oracle_evaluate

__all__ = [
    "AnalysisError", "Analyzer", "Counterexample", "ResultSet", "Verdict",
    "counterexample", "enumerate_satisfying", "evaluate",
    "BDD", "BddError", "BddRef",
    "Compiler", "CompileError", "ScopeMode", "TreeVerdict", "VectorPredicate",
    "Element", "FaultTree", "FaultTreeError", "FaultTreeSyntaxError", "GateType", "StatusVector",
    "basic_event_order", "eval_structure", "load_fault_tree", "parse_fault_tree", "serialize", "validate",
    "Formula", "FormulaError", "FormulaSyntaxError", "Layer", "desugar", "layer_of", "parse_formula",
    "oracle_evaluate", "bundled_tree",
]


def bundled_tree(name: str) -> FaultTree:
    """Load one of the trees shipped with the package (``covid.ft``, ``reservoir.ft``, ...)."""
    from importlib import resources

    return parse_fault_tree((resources.files(__name__) / "trees" / name).read_text(encoding="utf-8"))
