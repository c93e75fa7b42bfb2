"""Higher order finite elements on graded meshes for turning point problems."""

from ._core import (
    ConvergenceRow,
    TpfemError,
    bracket,
    build_mesh,
    compare_reference,
    format_csv,
    grading_exponent,
    kappa,
    phi,
    run_case,
    solve,
    sweep,
    verify,
)

__all__ = [
    "ConvergenceRow",
    "TpfemError",
    "bracket",
    "build_mesh",
    "compare_reference",
    "format_csv",
    "grading_exponent",
    "kappa",
    "phi",
    "run_case",
    "solve",
    "sweep",
    "verify",
]
