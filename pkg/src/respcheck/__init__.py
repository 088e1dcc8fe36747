"""respcheck: responsibility-aware model checking for multi-agent systems.

The library evaluates bounded temporal properties over finite histories of
multi-agent stochastic transition systems, checks which agents bear active,
passive, or contributive responsibility for an outcome under a joint plan,
and quantifies that responsibility by counting, probability, and
finite-horizon entropy measures.  An automata layer computes the asymptotic
entropy of monitor-constrained behaviour.
"""

from .automata import (
    BoundedRecurrence,
    ExplicitDfa,
    Invariance,
    LabeledMultigraph,
    asymptotic_entropy,
    build_product,
    load_dfa,
    path_count,
    spectral_radius,
    trim,
)
from .errors import (
    BudgetExceededError,
    ConvergenceError,
    DegreeError,
    EvaluationError,
    FormulaSyntaxError,
    MissingTransitionError,
    ModelFormatError,
    OutcomeUnavoidableError,
    OutcomeUnsatisfiableError,
    RespcheckError,
    SemanticError,
)
from .formulas import (
    AndHist,
    AndState,
    Atom,
    Car,
    Ccr,
    Coalition,
    Cpr,
    FalseFormula,
    HistoryFormula,
    Next,
    NotHist,
    NotState,
    ProbBound,
    StateFormula,
    TrueFormula,
    Until,
    finally_,
    format_history,
    format_state,
    globally,
    hist_or,
    horizon,
    horizon_state,
    state_or,
)
from .measures import (
    CoalitionShare,
    DegreeReport,
    MeasuredLanguage,
    degree_car,
    degree_ccr,
    degree_cpr,
    entropy_fh,
    language_stats,
    measure,
)
from .model import (
    GameStructure,
    History,
    JointAction,
    PlanPattern,
    Trace,
    compatible,
    enumerate_histories,
    history_probability,
    plan_class,
    successors,
    trace_of,
)
from .modelfile import load_model, parse_model
from .parser import parse_history_formula, parse_plan, parse_state_formula
from .responsibility import (
    ResponsibilityLanguages,
    car_languages,
    ccr_languages,
    ccr_witness,
    check_car,
    check_ccr,
    check_cpr,
    cpr_languages,
)
from .semantics import (
    check_coalition,
    check_prob_bound,
    eval_history,
    eval_state,
    satisfying_language,
)

__version__ = "0.1.0"
