"""Cellular local cohomology: an independent check of truncated microsupports."""
from .complex import CellComplex, build_complex, relative_ranks
from .local import (
    CohomologyRanks,
    clear_cache,
    germ_key,
    germ_ranks,
    local_cohomology,
    pair_cohomology,
    polygon_window,
)
from .ssk import DIRECTIONS16, Stencil, probe_grid, ssk_definition_test
from .svg import conic_svg, membership_svg

__all__ = [
    "CellComplex",
    "CohomologyRanks",
    "DIRECTIONS16",
    "Stencil",
    "build_complex",
    "clear_cache",
    "germ_key",
    "germ_ranks",
    "local_cohomology",
    "conic_svg",
    "membership_svg",
    "pair_cohomology",
    "polygon_window",
    "probe_grid",
    "relative_ranks",
    "ssk_definition_test",
]
