"""pidlab: bivariate partial information decompositions with certificates.

Exact finite joint distributions, the catalogue of decomposition measures
(min, mmi, red, broja, dep, ig, cap_wedge, and the UI construction), the
convex-optimization engines behind them, and executable continuity /
additivity checks.
"""

from .dist import (
    Alphabet,
    Channel,
    JointDist,
    combine_variables,
    conditional,
    conditional_mutual_information,
    entropy,
    full_support,
    kl_divergence,
    l1_distance,
    marginal,
    mutual_information,
    tensor_product,
    validate,
)
from .errors import PidLabError
from .families import FAMILY_NAMES, FamilySpec, generate
from .measures import (
    MEASURE_IDS,
    PidResult,
    SpecificInfo,
    compute_measure,
    decomp_ig,
    gacs_korner_common,
    si_cap_wedge,
    si_min,
    si_mmi,
    si_red,
    specific_information,
    ui_broja,
    ui_construction,
    ui_dep,
)
from .optim import (
    DeltaPolytope,
    SolveReport,
    fw_kl_mixture,
    ipf_fit,
    minimize_cmi_over_delta,
    minimize_scalar_convex,
    transportation_vertices,
)

__all__ = [
    "Alphabet",
    "Channel",
    "JointDist",
    "combine_variables",
    "conditional",
    "conditional_mutual_information",
    "entropy",
    "full_support",
    "kl_divergence",
    "l1_distance",
    "marginal",
    "mutual_information",
    "tensor_product",
    "validate",
    "PidLabError",
    "FAMILY_NAMES",
    "FamilySpec",
    "generate",
    "MEASURE_IDS",
    "PidResult",
    "SpecificInfo",
    "compute_measure",
    "decomp_ig",
    "gacs_korner_common",
    "si_cap_wedge",
    "si_min",
    "si_mmi",
    "si_red",
    "specific_information",
    "ui_broja",
    "ui_construction",
    "ui_dep",
    "DeltaPolytope",
    "SolveReport",
    "fw_kl_mixture",
    "ipf_fit",
    "minimize_cmi_over_delta",
    "minimize_scalar_convex",
    "transportation_vertices",
]
