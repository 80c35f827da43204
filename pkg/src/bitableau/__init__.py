"""Satisfiability and validity for six bimodal logics of weak density and transitivity.

Quick start::

    from bitableau import decide, parse, logic_by_name

    res = decide(parse("<a>p & [a][b]~p"), logic_by_name("kde"))
    print(res.satisfiable)
"""

from .engine import (
    BudgetExceededError,
    Context,
    ContextStack,
    EngineError,
    SatResult,
    Stats,
    Trace,
    decide,
    sat_kab,
    sat_kde,
    sat_window,
    valid,
)
from .formula import (
    FALSUM,
    Formula,
    FormulaSet,
    FormulaSyntaxError,
    atom,
    box_a,
    box_b,
    conj,
    csf,
    degree,
    dia_a,
    dia_b,
    disj,
    implies,
    neg,
    parse,
    print_formula,
    sf,
    size,
)
from .kripke import (
    KripkeModel,
    build_countermodel,
    certify,
    frame_satisfies_logic,
    is_transitive,
    is_weakly_dense,
    model_check,
    transitive_closure,
)
from .oracle import (
    OracleBudgetExceededError,
    SearchBudget,
    bounded_sat,
    enumerate_corpus,
)
from .saturation import (
    ALL_LOGICS,
    KAB,
    KAB4A,
    KAB4A4B,
    KDE,
    KDE4A,
    KDE4A4B,
    LogicId,
    box_minus,
    enumerate_ccs,
    is_ccs,
    logic_by_name,
)
from .windows import (
    Window,
    find_continuation,
    find_window,
    is_window,
    window_sequence_loops,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
