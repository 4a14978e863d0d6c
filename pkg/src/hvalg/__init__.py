"""Exact computer algebra for the twisted Heisenberg-Virasoro algebra at level zero.

Everything is computed over the rationals with no rounding anywhere:
brackets, Jacobi sweeps, derivation decompositions and the two-local
reduction pipeline all return exact values or exact counterexamples.
"""

from .algebra import (
    QQ,
    BasisSymbol,
    Element,
    Sign,
    L,
    I,
    C_L,
    C_LI,
    C_I,
    single,
    bracket,
    bracket_basis,
    jacobi_check,
    center_project,
    window_symbols,
    sweep_symbols,
)
from .linalg import LinSystem, SolutionSpace, SolveStatus, solve
from .derivations import (
    Outer,
    DerivationParams,
    DerivationTable,
    apply_outer,
    apply_derivation,
    ad,
    realize,
    leibniz_check,
    constraint_system,
    decompose,
    sign_audit,
    param_unknowns,
    params_from_assignment,
    NotADerivation,
    InconsistentTable,
    DomainTooSmall,
)
from .two_local import (
    TwoLocalAssignment,
    HiddenDerivation,
    Scaled,
    NonAdditive,
    MissingKey,
    NoWitnessAtWindow,
    WitnessCertificate,
    ReductionCertificate,
    SamplePolicy,
    synthesize_assignment,
    assignment_from_table,
    sample_elements,
    find_witness,
    homogeneity_check,
    reduce_two_local,
    kernel_suite,
)
from .expr import parse, ParseError

__version__ = "0.1.0"
