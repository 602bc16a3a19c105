"""Rank-1 background estimation for videos with moving objects.

Videos are float arrays of shape (frames, rows, cols). Data matrices are
m x n with column k holding frame k stacked column by column. Masks are
boolean (pixels, frames) arrays where True marks foreground.
"""

from ._core import (
    InputError,
    SolverDiverged,
    background_connected,
    background_connected_exhaustive,
    certify,
    certify_a_priori,
    check_identifiability,
    condition_number_bound,
    data_matrix,
    degree_stats,
    generate_scene,
    max_relative_object_size,
    multi_restart,
    objective,
    pf_constant_trajectory,
    preprocess,
    residual_mask,
    shift_pixels,
    solve,
    subgradient,
)

__all__ = [
    "InputError",
    "SolverDiverged",
    "background_connected",
    "background_connected_exhaustive",
    "certify",
    "certify_a_priori",
    "check_identifiability",
    "condition_number_bound",
    "data_matrix",
    "degree_stats",
    "generate_scene",
    "max_relative_object_size",
    "multi_restart",
    "objective",
    "pf_constant_trajectory",
    "preprocess",
    "residual_mask",
    "shift_pixels",
    "solve",
    "subgradient",
]
