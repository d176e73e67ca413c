"""Convergence acceleration and fixed-point numerics around rational iteration."""

from .accel import (
    DEGENERATE_TOL,
    AccelerationReport,
    AitkenResult,
    RealSequence,
    SequenceTooShortError,
    acceleration_report,
    aitken_delta2,
    forward_difference,
    iterated_aitken,
)
from .fixpoint import (
    FixedPointProblem,
    SolveReport,
    compatibility_determinant,
    picard_iterate,
    rational_iteration_step,
    steffensen_solve,
    vector_steffensen_solve,
)
from .polyroots import (
    Polynomial,
    RecurrentSeries,
    RootEstimate,
    all_roots,
    bernoulli_sequence,
    dominant_root,
    hankel_det,
    root_products,
    smallest_root_bernoulli,
)

__version__ = "0.1.0"
