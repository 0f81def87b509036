"""Exact quadratic-form decisions over henselian valued field towers."""
from .fieldtower import (
    Element,
    FieldDesc,
    FieldError,
    FiniteField,
    Level,
    PadicBottom,
    QuadClosed,
    RealClosed,
    SquareClass,
    ValuationError,
    is_square,
    residue,
    square_class,
    unit_part,
    valuation,
)
from .dsl import DslError, parse_element, parse_field, parse_form, render_element
from .qform import (
    DiagForm,
    GramForm,
    Verdict,
    coset_decompose,
    diagonalize,
    is_hyperbolic,
    is_isotropic,
    is_torsion,
    represents,
    signature,
    witt_decompose,
    witt_equivalent,
)

__version__ = "0.1.0"

__all__ = [
    "DslError",
    "parse_element",
    "parse_field",
    "parse_form",
    "render_element",
    "Element",
    "FieldDesc",
    "FieldError",
    "FiniteField",
    "Level",
    "PadicBottom",
    "QuadClosed",
    "RealClosed",
    "SquareClass",
    "ValuationError",
    "is_square",
    "residue",
    "square_class",
    "unit_part",
    "valuation",
    "DiagForm",
    "GramForm",
    "Verdict",
    "coset_decompose",
    "diagonalize",
    "is_hyperbolic",
    "is_isotropic",
    "is_torsion",
    "represents",
    "signature",
    "witt_decompose",
    "witt_equivalent",
]
