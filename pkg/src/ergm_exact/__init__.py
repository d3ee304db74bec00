"""Exact analysis of exponential random graph models on small vertex counts."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    CacheError,
    CapacityExceeded,
    CertificateError,
    ConfigError,
    ErgmError,
    InvalidInput,
    NoMLE,
    NonConvergence,
    NotSeparable,
    ViolatedBound,
)
from .graphspace import (  # noqa: E402
    K_MAX,
    KINDS,
    EdgeMask,
    RealizableSet,
    StatisticSpec,
    edge_index,
    enumerate_graphs,
    realizable_set,
    statistic_value,
    statistic_vector,
)
from .geometry import AffineGeometry, RintCertificate, Verdict, affine_geometry, hull_vertices, rint_membership  # noqa: E402
from .lp import LPResult, lp_solve  # noqa: E402
from .likelihood import (  # noqa: E402
    FitConfig,
    FitResult,
    concavity_probe,
    fit_mle,
    gradient,
    hessian,
    log_likelihood,
    log_normalizer,
    mean_statistic,
    perp_invariance_check,
)
from .degeneracy import (  # noqa: E402
    DegeneracyReport,
    argmax_face,
    boundary_witness,
    degeneracy_trajectory,
    separating_direction,
)
