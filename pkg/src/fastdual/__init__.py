"""fastdual: rate-1/2 binary codes whose duals are equally fast and equally good.

Encoder chains compose five linear-time bit operators (repeat, permute,
prefix-sum, discrete derivative, and the transposes); a sampled code and its
exact dual share one permutation list.  The analysis half of the package
computes exact weight-transition probabilities, expected low-weight codeword
counts with Markov failure bounds, and the spectral-shape tables behind the
distance/rounds tradeoff.
"""

from .bitvec import BitVector, Permutation
from .codes import (
    CodeSpec,
    DenseMatrixF2,
    DualPair,
    EncoderChain,
    build_chain,
    dual_product_check,
    encode,
    materialize,
    rank,
    sample_pair,
    systematic_form,
)
from .distance import (
    DistanceReport,
    FailureEstimate,
    empirical_failure_rate,
    exact_min_distance,
    weight_spectrum,
)
from .kernels import (
    Accumulate,
    AccumulateT,
    Derivative,
    DerivativeT,
    Permute,
    Repeat,
    apply,
    apply_chain,
)
from .spectral import (
    DeltaEstimate,
    SpectralTable,
    critical_point_chain,
    delta_from_grid,
    delta_m_solver,
    entropy,
    entropy_inverse,
    f_A,
    f_AD,
    f_D,
    f_DA,
    g_envelope,
    gv_delta,
    spectral_recursion,
)
from .transitions import (
    IowefResult,
    TransitionKernel,
    argmax_middle_weight,
    brute_force_transition,
    half_binomial,
    half_factorial,
    iowef_expected_count,
    markov_failure_bound,
    p_A_exact,
    p_A_prime,
    p_D_exact,
    p_D_prime,
    weight_tail_expectation,
)

__version__ = "0.1.0"
