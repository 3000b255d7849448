"""Validity checking for first-order formulas over finite domains.

Two decision mechanisms share one AST: a lazy evaluator with support for
nondeterministic choice and contract functions, and a translator to
bit-vector SMT-LIB discharged by external solvers (a small reference
solver ships as the fdl-refsolve script).
"""

from .core import (FdlError, FiniteType, FuncDecl, Model, TypeError_,
                   nat, typecheck_formula, typecheck_model)
from .evaluator import EvalTimeout, Verdict, check_validity
from .oracle import oracle_check
from .parser import ParseError, parse_formula, parse_model, print_formula
from .solvers import decide, load_solver_configs, run_solver
from .translate import SmtOptions, TranslateError, emit_smtlib, translate

__version__ = '0.1.0'

__all__ = [
    'FdlError', 'FiniteType', 'FuncDecl', 'Model', 'TypeError_', 'nat',
    'typecheck_formula', 'typecheck_model',
    'EvalTimeout', 'Verdict', 'check_validity',
    'oracle_check',
    'ParseError', 'parse_formula', 'parse_model', 'print_formula',
    'decide', 'load_solver_configs', 'run_solver',
    'SmtOptions', 'TranslateError', 'emit_smtlib', 'translate',
    '__version__',
]
