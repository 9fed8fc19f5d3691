"""Symbolic engine for Lagrangian multiforms of 1+1-dimensional integrable hierarchies."""

from .core import (
    CheckReport,
    HamiltonianMultiform,
    Hierarchy,
    SymplecticMultiform,
    check_multiform,
    hamiltonian_multiform,
    multiform_hamilton_equations,
    spatial_constraints,
    symplectic_multiform,
)
from .errors import (
    AlgebraError,
    MultiformError,
    NonDecomposable,
    NonOrientable,
    NonPolynomialSolution,
    NotHamiltonian,
    NotHamiltonianAt,
)
from .forms import (
    Form,
    MultiVectorField,
    VerticalShift,
    horizontal_d,
    interior,
    vertical_delta,
    wedge,
)
from .jet import Algebra, Expr, multi_derivative, partial, total_derivative
from .parser import ParseError, SourceSpan, parse, parse_expr, parse_form, parse_hierarchy
from .poisson import (
    AnsatzSpec,
    conservation_search,
    covariant_bracket,
    decomposition_check,
    hamiltonian_vector_field,
    is_hamiltonian,
    multitime_bracket,
    single_time_bracket,
)
from .render import render, to_json
from .rewrite import Equation, RewriteSystem, normal_form, orient
from .scalar import I, scalar
from .variational import LagrangianMultiform, euler_lagrange, euler_lagrange_system, source_decompose

__version__ = "0.1.0"

__all__ = [
    "Algebra",
    "AlgebraError",
    "AnsatzSpec",
    "CheckReport",
    "Equation",
    "Expr",
    "Form",
    "HamiltonianMultiform",
    "Hierarchy",
    "I",
    "LagrangianMultiform",
    "MultiVectorField",
    "MultiformError",
    "NonDecomposable",
    "NonOrientable",
    "NonPolynomialSolution",
    "NotHamiltonian",
    "NotHamiltonianAt",
    "ParseError",
    "RewriteSystem",
    "SourceSpan",
    "SymplecticMultiform",
    "VerticalShift",
    "check_multiform",
    "conservation_search",
    "covariant_bracket",
    "decomposition_check",
    "euler_lagrange",
    "euler_lagrange_system",
    "hamiltonian_multiform",
    "hamiltonian_vector_field",
    "horizontal_d",
    "interior",
    "is_hamiltonian",
    "multi_derivative",
    "multiform_hamilton_equations",
    "multitime_bracket",
    "normal_form",
    "orient",
    "parse",
    "parse_expr",
    "parse_form",
    "parse_hierarchy",
    "partial",
    "render",
    "scalar",
    "single_time_bracket",
    "source_decompose",
    "spatial_constraints",
    "symplectic_multiform",
    "to_json",
    "total_derivative",
    "vertical_delta",
    "wedge",
]
