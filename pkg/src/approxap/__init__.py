"""Approximate arithmetic progressions in integer sets.

Find and certify near-progressions, measure upper logarithmic density and
check the finite counting inequalities behind the covering, dyadic and
smooth-number arguments.
"""

__version__ = "0.1.0"
SCHEMA_VERSION = "1"

from .errors import (
    DomainError,
    EmptySetError,
    InvalidArgument,
    OracleTooLarge,
    OrderError,
    OverflowError_,
    ParseError,
    ResourceError,
    ToolkitError,
)
from .sets import IntegerSet, gen_powers, gen_squares, load_set, sieve_primes, window_count, write_set
from .progressions import (
    ApproxReport,
    Progression,
    ap_points,
    best_ap_exact,
    best_ap_search,
    chebyshev_fit,
    eval_error,
)
from .density import DensityProfile, ReciprocalLedger, density_profile, max_window_count, reciprocal_ledger
from .covering import (
    Bound,
    CoveringCertificate,
    CoveringParams,
    Interval,
    Witness,
    admissible_eps,
    cover_recurse,
    cover_step,
    find_witness,
    lemma3_exponent,
)
from .euler_erdos import SmoothCountRecord, contradiction_scan, smooth_count, squarefree_decompose
