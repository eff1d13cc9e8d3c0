"""Controllability analysis for bilinear control systems x' = M x."""

from ._core import (
    Error,
    InvalidInput,
    LieBasis,
    NumericalFailure,
    SystemSpec,
    __version__,
    approx_reach,
    bilinear_system,
    bracket,
    builtin,
    builtin_names,
    coverage,
    decide,
    first_return,
    foliation_examples,
    larc_at,
    lie_closure,
    matrix_exponential,
    numerical_rank,
    parse_system,
    phi_constancy,
    project_sphere,
    random_system,
    sample_attainable,
    simulate,
    transversality_at,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
