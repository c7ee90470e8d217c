"""Certified lower bounds for global polynomial minimization.

The pipeline: exact polynomial arithmetic (``poly``) feeds constraint-set
construction (``tentacle``), which feeds Gram-matrix SDP assembly
(``sos_sdp``); the interior-point engine (``solver``) computes the bounds,
``hierarchy`` sequences them, ``certify`` extracts and checks explicit
certificates, and ``oracle`` provides brute-force ground truth.
"""

from .poly import (
    DimensionMismatchError,
    ParseError,
    Polynomial,
    grad_norm_sq,
    norm_sq_x,
    parse_polynomial,
)
from .tentacle import (
    ConstraintSet,
    TentacleSpec,
    auto_radius,
    ball_constraint,
    contains,
    gradient_variety_constraints,
    higher_constraint,
    principal_constraint,
)
from .sos_sdp import (
    MonomialBasis,
    SdpProblem,
    SosProgram,
    assemble_sdp,
    build_gradvar_program,
    build_sos_program,
    monomial_basis,
)
from .solver import (
    BudgetExceededError,
    SdpSolution,
    SolverSettings,
    UnknownBackendError,
    available_backends,
    register_backend,
    solve,
    solve_with_backend,
)
from .hierarchy import (
    HierarchyReport,
    RelaxationResult,
    check_level_inequality,
    compute_ball,
    compute_fsos,
    compute_gradvar,
    compute_higher,
    compute_principal,
    run_hierarchy,
)
from .certify import (
    Certificate,
    CertificateRejectedError,
    extract_certificate,
    round_certificate,
    sample_soundness,
    univariate_proof_identity,
    verify_hn_identity,
)
from .oracle import (
    Box,
    OracleResult,
    curve_limit_check,
    grid_min,
    multistart_descent,
    tentacle_grid_min,
)

__version__ = "0.1.0"
