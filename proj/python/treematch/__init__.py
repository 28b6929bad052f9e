"""Minimum matchings on finite metric spaces, their tree-like dual metrics,
calibration functionals on metric graphs and matching-dimension scaling.

All matrices are plain nested lists; graphs are (vertices, edges, terminals)
triples with edges given as (u, v, length).
"""

from ._treematch import (
    Error,
    build_certificate,
    comb_tree,
    cube_experiment,
    exact_check_dual,
    fill_z2,
    fit_dimension,
    from_points,
    is_tree_like,
    lev_z,
    lev_z2,
    m_eps,
    m_k,
    min_matching,
    minimize_dual,
    oriented_min_connection,
    realize_tree,
    validate,
)

__all__ = [
    "Error",
    "build_certificate",
    "comb_tree",
    "cube_experiment",
    "exact_check_dual",
    "fill_z2",
    "fit_dimension",
    "from_points",
    "is_tree_like",
    "lev_z",
    "lev_z2",
    "m_eps",
    "m_k",
    "min_matching",
    "minimize_dual",
    "oriented_min_connection",
    "realize_tree",
    "validate",
]

__version__ = "0.1.0"
