"""Model checking ATL and ATL* under memoryless, bounded-memory, finite-memory
and perfect-recall strategies, with complete or incomplete information."""
from .model import (
    GameModel, ModelError, ObservationClass, build_model, observation_class, parse_model,
    serialize_model, successors, validate,
)
from .logic import (
    Coalition, Const, Formula, FormulaSyntaxError, Fragment, Next, Not, Or, Prop, Until,
    classify, parse_formula, to_text,
)
from .strategy import (
    Dfst, StrategyError, apply_strategy, canonicalize, enumerate_profiles,
    enumerate_strategies, format_dfst, parse_dfst,
)
from .product import ProductSystem, build_product, outcome_correspondence_check
from .temporal import (
    Objective, check_universal_ltl, check_universal_objective, exists_lasso, ltl_to_buchi,
    objective_for,
)
from .checker import (
    FAILS, HOLDS, UNKNOWN, CheckError, SemanticsSpec, UnsupportedSemantics, Verdict,
    check_atl_fixpoint_complete, check_finite_memory_deepening, check_quantified, evaluate,
)
from .fixtures import fig1_model, fig2_model, fig3_family, separation_formula
from .turing import Configuration, TuringMachine, tm_parse, tm_step, tm_to_icgm

__version__ = "0.1.0"
