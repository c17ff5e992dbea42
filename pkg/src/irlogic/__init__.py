"""Reasoning kernel for infinitary Riesz Lukasiewicz logic over rational scalars.

Submodules: ``formula`` and ``syntax`` (formula-core), ``semantics``
(standard [0,1] evaluation), ``polytope`` and ``pwl`` (piecewise-linear
compilation and decisions), ``axioms``, ``proof`` and ``lemmas`` (the proof
kernel), ``analysis`` (approximation and limit procedures) and ``cli``.
"""
from .formula import (
    And,
    Bot,
    Delta,
    DyadicComplement,
    DyadicLevels,
    DyadicRampBelow,
    ExplicitEventuallyConstant,
    FiniteList,
    Iff,
    Imp,
    InfFam,
    Nabla,
    Neg,
    Odot,
    Oplus,
    Or,
    Schema,
    SupFam,
    Top,
    Var,
    expand_derived,
    family_nth,
    subst,
)
from .syntax import ParseError, format_formula, parse
from .semantics import BoundsResult, eval, eval_sup, check_axiom_soundness
from .pwl import (
    PWLFunc,
    are_equivalent,
    compile,
    is_tautology,
    pwl_eval,
    pwl_min,
    semantic_consequence,
    sup_distance,
)
from .axioms import match_axiom
from .proof import ProofObject, check_inf_rule, check_proof
from .analysis import (
    char_interval_family,
    dyadic_simple_approx,
    good_sequence,
    good_sequence_sup_check,
    order_limit_check,
    pointwise_limit_eval,
    uniform_limit_witness,
)

__version__ = "0.1.0"
