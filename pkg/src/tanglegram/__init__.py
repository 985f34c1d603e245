"""Tangle crossing numbers: exact solver, clade lower bound, extremal families."""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    BinaryTree,
    CladeRef,
    MatchingEdge,
    ParseError,
    Tanglegram,
    TanglegramError,
    build_tree,
    canonical_form,
    caterpillar,
    caterpillar_tanglegram,
    extend_family,
    grid_family,
    induce_subtanglegram,
    isomorphic,
    parse,
    remove_edge,
    serialize,
)
from .layout import (  # noqa: E402
    SizeCapError,
    TanglegramLayout,
    brute_force_crt,
    crossing_count,
    leaf_order,
    mirror_right,
)
from .solver import CrossingReport, exact_crt, is_planar, one_sided_optimum  # noqa: E402
from .bound import clade_matrix, clade_partition, crossing_lower_bound  # noqa: E402
from .sampler import SampleConfig, random_tanglegram, random_tree  # noqa: E402
