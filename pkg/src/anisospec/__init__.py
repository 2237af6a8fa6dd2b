"""Anisotropic Dirichlet eigenvalues, torsional rigidity, and shape
functionals over seminorm classes on planar domains."""

from .closed_forms import (
    ClosedFormResult,
    closed_form,
    kj_sequence_value,
    lambda_euclid_ball,
    lambda_quadratic_ball_bound,
    lambda_rank1_ellipsoid,
    m_tilde_q_ellipsoid,
    q_threshold_ellipsoid,
    rank1_box,
    t_max_ellipsoid,
    torsion_euclid_ellipsoid,
    torsion_quadratic_ball,
    torsion_rank1_ellipsoid,
)
from .errors import (
    AnisoSpecError,
    DegenerateSeminormError,
    InputError,
    InvalidDomainError,
    InvalidSeminormError,
    MeshError,
    SingularMapError,
    SolverError,
    UnsupportedError,
)
from .fem import (
    SolverConfig,
    SpectralResult,
    TriMesh,
    lambda_euclid_fem,
    mesh_polygon,
    solve_quadratic,
    torsion_euclid_fem,
)
from .functional import (
    BoundCheck,
    BoundsReport,
    FunctionalValue,
    OptimizationReport,
    QSweep,
    eval_F,
    optimize_quadratic,
    optimize_rank1,
    q_sweep,
    verify_bounds,
)
from .geometry import (
    BoxD,
    Direction,
    EllipsoidD,
    Polygon2D,
    SlabDecomposition,
    SliceSet,
    directional_width,
    domain_from_json,
    domain_to_json,
    ellipse_polygon,
    is_centrally_symmetric,
    linear_image,
    measure,
    regular_polygon,
    rotation_to_vertical,
    slab_breakpoints,
    slab_decomposition,
    slice_polygon,
    unit_ball_volume,
)
from .seminorms import (
    QuadraticSeminorm,
    Rank1Seminorm,
    SeminormMeta,
    seminorm_from_json,
    seminorm_meta,
    seminorm_to_json,
)
from .slicing import (
    SlicingResult,
    lambda_rank1_polygon,
    solve_rank1,
    torsion_rank1_polygon,
)

__version__ = "0.1.0"

__all__ = [
    "AnisoSpecError",
    "BoundCheck",
    "BoundsReport",
    "BoxD",
    "ClosedFormResult",
    "DegenerateSeminormError",
    "Direction",
    "EllipsoidD",
    "FunctionalValue",
    "InputError",
    "InvalidDomainError",
    "InvalidSeminormError",
    "MeshError",
    "OptimizationReport",
    "Polygon2D",
    "QSweep",
    "QuadraticSeminorm",
    "Rank1Seminorm",
    "SeminormMeta",
    "SingularMapError",
    "SlabDecomposition",
    "SliceSet",
    "SlicingResult",
    "SolverConfig",
    "SolverError",
    "SpectralResult",
    "TriMesh",
    "UnsupportedError",
    "closed_form",
    "directional_width",
    "domain_from_json",
    "domain_to_json",
    "ellipse_polygon",
    "eval_F",
    "is_centrally_symmetric",
    "kj_sequence_value",
    "lambda_euclid_ball",
    "lambda_euclid_fem",
    "lambda_quadratic_ball_bound",
    "lambda_rank1_ellipsoid",
    "lambda_rank1_polygon",
    "linear_image",
    "m_tilde_q_ellipsoid",
    "measure",
    "mesh_polygon",
    "optimize_quadratic",
    "optimize_rank1",
    "q_sweep",
    "q_threshold_ellipsoid",
    "rank1_box",
    "regular_polygon",
    "rotation_to_vertical",
    "seminorm_from_json",
    "seminorm_meta",
    "seminorm_to_json",
    "slab_breakpoints",
    "slab_decomposition",
    "slice_polygon",
    "solve_quadratic",
    "solve_rank1",
    "t_max_ellipsoid",
    "torsion_euclid_ellipsoid",
    "torsion_euclid_fem",
    "torsion_quadratic_ball",
    "torsion_rank1_ellipsoid",
    "unit_ball_volume",
    "verify_bounds",
]
