"""Numerical checks of curvature bounds for submanifolds of quaternionic space forms."""

from ._qcurv import (
    AmbientSpaceForm,
    QcurvError,
    QuaternionStructure,
    SubmanifoldPoint,
    approach_equality,
    bound_names,
    chen_equality_sff,
    diagnose,
    evaluate,
    falsify,
    hineva_eigenvalues,
    load_point,
    null_space,
    parse_point,
    run_campaign,
    verify_relations,
)

__all__ = [
    "AmbientSpaceForm",
    "QcurvError",
    "QuaternionStructure",
    "SubmanifoldPoint",
    "approach_equality",
    "bound_names",
    "chen_equality_sff",
    "diagnose",
    "evaluate",
    "falsify",
    "hineva_eigenvalues",
    "load_point",
    "null_space",
    "parse_point",
    "run_campaign",
    "verify_relations",
]
