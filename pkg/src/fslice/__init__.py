"""Demand-driven slicing for a first-order functional language.

The package computes backward static slices of programs in a small
list-processing language. A slicing criterion is a regular, prefix-closed
set of access paths into the value of ``main``; the slicer erases every
piece of the program that cannot influence the selected parts of the
result, replacing it with a hole.

Two modes are provided. The direct mode solves a demand-flow grammar per
criterion. The incremental mode precomputes one small automaton per program
point; after that, slicing under any criterion is a per-point regular
intersection, which is what makes repeated slicing cheap.
"""

from .lang import (
    Program, FunDef, Expr, App, Occ,
    Let, If, Return, Const, Nil, Cons, Car, Cdr, NullQ, Prim, Call, Hole,
    parse_program, validate, print_program, assign_labels,
    FsliceError, ParseError, ValidateError,
)

__version__ = "0.1.0"

__all__ = [
    "Program", "FunDef", "Expr", "App", "Occ",
    "Let", "If", "Return", "Const", "Nil", "Cons", "Car", "Cdr", "NullQ",
    "Prim", "Call", "Hole",
    "parse_program", "validate", "print_program", "assign_labels",
    "FsliceError", "ParseError", "ValidateError",
    "__version__",
]
