"""Singular points and non-Markovianity of open-system dynamical maps.

Thin package wrapper around the compiled extension; everything of substance
lives in ``dmsing._dmsing``.
"""

from ._dmsing import (  # noqa: F401
    AffineMap,
    BallMaxResult,
    DecompositionResult,
    MapFamily,
    MeasureResult,
    NonMarkovianityResult,
    NotAStateError,
    NumericalFailure,
    PoleError,
    SchemaError,
    SingularPoint,
    __version__,
    choi_matrix,
    classify_interval,
    decompose_interval,
    default_measure_horizon,
    dephasing_coherence,
    dephasing_family,
    deviation_affine,
    family_from_kraus,
    find_singular_points,
    is_completely_positive,
    is_positive_map,
    jc_amplitude,
    jc_family,
    load_tabulated_family,
    max_norm_affine_over_ball,
    non_markovianity,
    restart_trajectory,
    scan_report_json,
    singularity_measure,
    solve_decomposition,
)

__all__ = [
    "AffineMap",
    "BallMaxResult",
    "DecompositionResult",
    "MapFamily",
    "MeasureResult",
    "NonMarkovianityResult",
    "NotAStateError",
    "NumericalFailure",
    "PoleError",
    "SchemaError",
    "SingularPoint",
    "__version__",
    "choi_matrix",
    "classify_interval",
    "decompose_interval",
    "default_measure_horizon",
    "dephasing_coherence",
    "dephasing_family",
    "deviation_affine",
    "family_from_kraus",
    "find_singular_points",
    "is_completely_positive",
    "is_positive_map",
    "jc_amplitude",
    "jc_family",
    "load_tabulated_family",
    "max_norm_affine_over_ball",
    "non_markovianity",
    "restart_trajectory",
    "scan_report_json",
    "singularity_measure",
    "solve_decomposition",
]
