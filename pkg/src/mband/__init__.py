"""m-band and time-share depths for vector-valued functions on finite grids.

Curves are ranked by how often their value concatenations at m-tuples of time
points fall inside the convex hull of the concatenations of j sample curves.
The hot hull-membership kernel runs from a compiled extension when available,
with a pure-Python fallback selected at import time.
"""

from ._backend import active_name, available_backends, use_backend
from .bands import (
    apply_transform,
    band1_envelope_contains,
    concatenate,
    enumerate_check_tuples,
    m_band_contains,
    time_share_measure,
    time_share_set,
)
from .core import (
    AllCombinations,
    BandMembership,
    BandSpec,
    Curve,
    ExplicitTuples,
    FunctionalSample,
    LagSet,
    Linear,
    Phase,
    TimeGrid,
    TimeShareResult,
    Translate,
)
from .dataio import load_sample, write_report, write_sample
from .depth import (
    DepthConfig,
    DepthEntry,
    DepthReport,
    Exhaustive,
    Sampled,
    band_depth_sum_over_j,
    depth_all,
    empirical_band_depth,
    empirical_time_share_depth,
    monte_carlo_distinct_tuple_share,
    monte_carlo_population_depth,
    rank_and_flag,
    subset_enumerator,
)
from .errors import ConfigError, DataError, InputError, MbandError
from .hull import MembershipCertificate, exact_membership_oracle, point_in_convex_hull
from .reference import (
    Gaussian,
    IidGaussianPaths,
    QuantileTable,
    TranslationScalar,
    TranslationVector,
    Uniform,
    simulate,
    surjection_count,
    td_center_value,
    two_sided_band_depth,
    wendel_probability,
)

__version__ = "0.1.0"
