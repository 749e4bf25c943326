"""Minimal surfaces in the first Heisenberg group: horizontal geometry,
strict intrinsic graphical strips and their second variation."""

from .errors import H1Error
from .exprlang import DualNumber, Expression, eval_dual, evaluate, parse
from .h1core import (
    FrameCoefficients,
    HeisenbergPoint,
    cartesian_to_frame,
    dilate,
    frame_to_cartesian,
    group_inv,
    group_mul,
)
from .strips import (
    AngleSeed,
    ExpressionSeed,
    StripData,
    StripPatch,
    catenoid_strip,
    embed,
    invert_s,
    normalize_orientation,
    psi_jacobian,
    psi_map,
    seed_quantities,
    seed_to_strip,
    strict_condition,
    strip_phi,
)
from .surfaces import (
    ImplicitSurface,
    IntrinsicGraph,
    Rect,
    TGraph,
    burger,
    horizontal_data_implicit,
    horizontal_data_tgraph,
    mean_curvature,
    minimality_residual,
    perimeter,
)
from .variation import (
    BumpSpec,
    TestFunctionPsiK,
    VariationReport,
    generic_instability_search,
    instability_limit,
    instability_search,
    kernel_integral,
    second_variation_intrinsic,
    second_variation_strip,
)

__version__ = "0.1.0"
