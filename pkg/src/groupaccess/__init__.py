"""Accessible maps of finite groups of quantum channels and stochastic matrices.

The package builds finite groups from exact generator descriptions, realizes
them as superoperators or permutation matrices, follows Lindblad semigroups
``expm(t sum_mu q_mu (R_mu - 1))`` inside the group polytope, decides whether
a given mixture is reachable by such a semigroup, and estimates the volume of
the reachable set by Monte Carlo.
"""
__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .groups import (  # noqa: F401
    GeneratorSpec,
    GroupTable,
    Subgroup,
    SubgroupSet,
    close_group,
    cyclic_subgroup,
    direct_product,
    element_order,
    enumerate_subgroups,
    regular_representation,
)
from .channels import (  # noqa: F401
    AffineBlocks,
    Representation,
    StochasticMatrix,
    affine_dimension,
    gell_mann_affine,
    hs_distance,
    kolmogorov_check,
    mixture,
    mixture_spectrum,
    realize,
    super_decoherence,
    tn_commutes,
    unitary_superoperator,
)
from .dynamics import (  # noqa: F401
    RateSchedule,
    cyclic_product_weights,
    cyclic_weights,
    expm,
    generator,
    limit_projector,
    trajectory,
    weights,
)
from .accessibility import (  # noqa: F401
    AccessClassifier,
    AccessVerdict,
    BoundaryCurve,
    accessible_ranks,
    boundary_curves,
    cone_fit,
    is_accessible_map,
    is_accessible_weights,
    odd_subspace_spectrum,
    principal_log,
    star_segment,
)
from .geometry import (  # noqa: F401
    EmbeddedPolytope,
    VolumeEstimate,
    b3_cross_sections,
    b3_projections,
    embed,
    mc_accessible_fraction,
    noncyclic4_ratio,
    polygon_ratio,
    pulling_triangulation,
    r_star,
    uniform_sample,
    z2n_ratio,
    z4_cyclic_ratio,
)
from .builtins import builtin_representation, builtin_table  # noqa: F401
