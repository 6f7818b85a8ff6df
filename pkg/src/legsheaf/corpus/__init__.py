"""Bundled example fronts and sheaves.

Fronts are constructed in code and also shipped as JSON under data/;
set LEGSHEAF_CORPUS to override the data directory used by the CLI.
"""

from .builders import (
    CORPUS_BUILDERS,
    corpus_names,
    build,
    point_pair,
    halfopen_sheaf,
    unknot,
    eye_sheaf,
    trefoil,
    trefoil_sheaf,
    link2,
    link2_sheaf,
    noncompact_front,
    noncompact_sheaf,
    zigzag,
    cusp_family_front,
    cusp_family_sheaf,
    swap_family_fronts,
    swap_family_sheaf,
)
