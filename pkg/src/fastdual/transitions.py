"""Weight-transition probabilities of the accumulate/derivative operators and
the expected-count machinery built on them.

Two numeric stacks on purpose: exact rationals (Fraction) act as the
correctness oracle up to n = 64; log2-space float64 carries the production
dynamic program, whose quantities span hundreds of orders of magnitude.
Out-of-domain probabilities are exact zero (log2 = -inf), never an error,
which keeps the DP loops branch-free.

p_A(a, b): probability that a uniformly random vector of absolute weight a
maps to absolute weight b under the prefix-sum operator; p_D likewise for the
discrete derivative.  The primed variants drop floors/ceilings using
half-integer binomials, gaining the symmetries p_A'(a,b) = p_A'(a,n-b) and
p_D'(a,b) = p_D'(n-a,b).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb, lgamma, log2, inf
from typing import Literal, Optional

import numpy as np
from scipy.special import gammaln

from .bitvec import BitVector
from .codes import CodeSpec
from . import kernels

LN2 = float(np.log(2.0))

ExactProb = Fraction  # gcd-reduced by construction

BRUTE_FORCE_MAX_N = 14
IOWEF_MAX_N = 4096
EXACT_KERNEL_MAX_N = 64


def p_A_exact(n: int, a: int, b: int) -> Fraction:
    """Exact accumulate transition probability; 0 outside ceil(a/2) <= b <= n - floor(a/2)."""
    if not (1 <= a <= n and 1 <= b <= n):
        return Fraction(0)
    if b < (a + 1) // 2 or b > n - a // 2:
        return Fraction(0)
    return Fraction(comb(n - b, a // 2) * comb(b - 1, (a + 1) // 2 - 1), comb(n, a))


def p_D_exact(n: int, a: int, b: int) -> Fraction:
    """Exact derivative transition probability; numerator swaps the roles of a and b."""
    if not (1 <= a <= n and 1 <= b <= n):
        return Fraction(0)
    if a < (b + 1) // 2 or a > n - b // 2:
        return Fraction(0)
    return Fraction(comb(n - a, b // 2) * comb(a - 1, (b + 1) // 2 - 1), comb(n, a))


def half_factorial(x: float) -> float:
    """x! extended to half-integers: (n - 1/2)! = Gamma(n + 1/2) = (2n)! sqrt(pi) / (4^n n!)."""
    if x < -0.75:
        raise ValueError("half_factorial defined for x >= -1/2")
    if float(x).is_integer():
        import math

        return float(math.factorial(int(x)))
    return float(np.exp(lgamma(x + 1.0)))


def log2_half_binomial(top: float, bottom: float) -> float:
    """log2 C(top, bottom) via log-Gamma; -inf when bottom < 0 or bottom > top.

    Exact at integer arguments (delegates to comb there).
    """
    if bottom < 0 or bottom > top:
        return -inf
    if float(top).is_integer() and float(bottom).is_integer():
        return log2(comb(int(top), int(bottom))) if top >= 0 else -inf
    return (lgamma(top + 1.0) - lgamma(bottom + 1.0) - lgamma(top - bottom + 1.0)) / LN2


def half_binomial(top: float, bottom: float) -> float:
    """C(top, bottom) with half-integer support; 0 outside the domain."""
    if bottom < 0 or bottom > top:
        return 0.0
    if float(top).is_integer() and float(bottom).is_integer():
        return float(comb(int(top), int(bottom)))
    return float(2.0 ** log2_half_binomial(top, bottom))


def log2_p_A_prime(n: int, a: int, b: int) -> float:
    """log2 p_A'(a,b) = log2 [ C(n-b, a/2) C(b, a/2) / C(n, a) ]; -inf outside a/2 <= b <= n - a/2."""
    if a < 1 or b < a / 2 or b > n - a / 2:
        return -inf
    return (
        log2_half_binomial(n - b, a / 2)
        + log2_half_binomial(b, a / 2)
        - log2_half_binomial(n, a)
    )


def log2_p_D_prime(n: int, a: int, b: int) -> float:
    """log2 p_D'(a,b) = log2 [ C(n-a, b/2) C(a, b/2) / C(n, a) ]; -inf outside b/2 <= a <= n - b/2."""
    if b < 1 or a < b / 2 or a > n - b / 2:
        return -inf
    return (
        log2_half_binomial(n - a, b / 2)
        + log2_half_binomial(a, b / 2)
        - log2_half_binomial(n, a)
    )


def p_A_prime(n: int, a: int, b: int) -> float:
    return float(2.0 ** log2_p_A_prime(n, a, b))


def p_D_prime(n: int, a: int, b: int) -> float:
    return float(2.0 ** log2_p_D_prime(n, a, b))


def brute_force_transition(
    n: int, a: int, op: Literal["A", "D"], max_n: int = BRUTE_FORCE_MAX_N
) -> dict[int, Fraction]:
    """Exact output-weight distribution by enumerating all C(n, a) weight-a inputs.

    This is the independent oracle for p_A_exact / p_D_exact; it runs the real
    kernel implementation, not the formulas.
    """
    if n > max_n:
        raise ValueError(f"brute force capped at n <= {max_n}")
    if not 1 <= a <= n:
        raise ValueError("need 1 <= a <= n")
    kernel = kernels.Accumulate() if op == "A" else kernels.Derivative()
    counts: dict[int, int] = {}
    for pos in itertools.combinations(range(n), a):
        bits = [0] * n
        for p in pos:
            bits[p] = 1
        w = kernels.apply(kernel, BitVector.from_bits(bits)).weight()
        counts[w] = counts.get(w, 0) + 1
    total = comb(n, a)
    return {b: Fraction(c, total) for b, c in sorted(counts.items())}


def _log2_comb_table(n: int) -> np.ndarray:
    """lg[i] = ln(i!) for i in [0, n]."""
    return gammaln(np.arange(n + 1, dtype=np.float64) + 1.0)


def _kernel_log2(n: int, op: str) -> np.ndarray:
    """(n+1) x (n+1) array of log2 p_op(a, b); row 0 is the point mass at 0."""
    lg = _log2_comb_table(n)

    def logc(x: np.ndarray, k: np.ndarray) -> np.ndarray:
        ok = (k >= 0) & (k <= x) & (x >= 0)
        xs, ks = np.where(ok, x, 0), np.where(ok, k, 0)
        val = (lg[xs] - lg[ks] - lg[xs - ks]) / LN2
        return np.where(ok, val, -np.inf)

    a = np.arange(n + 1)[:, None]
    b = np.arange(n + 1)[None, :]
    if op == "A":
        num = logc(n - b, a // 2) + logc(b - 1, (a + 1) // 2 - 1)
        dom = (b >= (a + 1) // 2) & (b <= n - a // 2)
    else:
        num = logc(n - a, b // 2) + logc(a - 1, (b + 1) // 2 - 1)
        dom = (a >= (b + 1) // 2) & (a <= n - b // 2)
    K = np.where(dom & (a >= 1) & (b >= 1), num - logc(np.full_like(a + b, n), a), -np.inf)
    K[0, :] = -np.inf
    K[0, 0] = 0.0
    return K


@dataclass(frozen=True)
class TransitionKernel:
    """Stochastic weight-transition matrix for one operator at fixed n.

    log2[a, b] = log2 p(a, b); exact[a][b] (Fractions) is populated for
    n <= EXACT_KERNEL_MAX_N and is the oracle the float stack is tested against.
    """

    n: int
    op: Literal["A", "D"]
    log2: np.ndarray
    exact: Optional[list[dict[int, Fraction]]] = None

    @classmethod
    def build(cls, n: int, op: Literal["A", "D"], with_exact: Optional[bool] = None) -> "TransitionKernel":
        if with_exact is None:
            with_exact = n <= EXACT_KERNEL_MAX_N
        log2m = _kernel_log2(n, op)
        exact = None
        if with_exact:
            f = p_A_exact if op == "A" else p_D_exact
            exact = [
                {b: v for b in range(1, n + 1) if (v := f(n, a, b)) != 0}
                for a in range(n + 1)
            ]
        return cls(n=n, op=op, log2=log2m, exact=exact)

    def row_sums_exact(self) -> list[Fraction]:
        if self.exact is None:
            raise ValueError("exact storage not built for this kernel")
        return [sum(row.values(), Fraction(0)) for row in self.exact[1:]]

    def row_sums_log(self) -> np.ndarray:
        return np.exp2(_logsumexp2(self.log2[1:, :], axis=1))


def _logsumexp2(x: np.ndarray, axis: int = -1) -> np.ndarray:
    """log2-sum-exp2 with max shifting; tolerates all -inf slices."""
    m = np.max(x, axis=axis, keepdims=True)
    m = np.where(np.isfinite(m), m, 0.0)
    with np.errstate(invalid="ignore"):
        s = np.sum(np.exp2(x - m), axis=axis)
    with np.errstate(divide="ignore"):
        return np.squeeze(m, axis=axis) + np.log2(s)


@dataclass(frozen=True)
class IowefResult:
    """Expected codeword counts by weight plus the low-weight Markov bound.

    star / starstar split the bound by the weight held entering the final
    round: star covers [1, h] and [n-h, n] (boundary weights h and n-h
    inclusive), starstar the open middle (h, n-h).  Counts are reported in
    log2 (authoritative) and linear scale (inf once past float range).
    """

    n: int
    m: int
    family: str
    d: int
    log2_counts: np.ndarray
    total_below_d: float
    star: float
    starstar: float
    h: int

    @property
    def expected_counts(self) -> np.ndarray:
        with np.errstate(over="ignore"):
            return np.exp2(self.log2_counts)

    def to_json(self) -> dict:
        def clean(x: float) -> float | None:
            return None if not np.isfinite(x) else float(x)

        return {
            "n": self.n,
            "m": self.m,
            "family": self.family,
            "d": self.d,
            "counts": [clean(c) for c in self.expected_counts],
            "log2_counts": [clean(c) for c in self.log2_counts],
            "bound": self.total_below_d,
            "star": self.star,
            "starstar": self.starstar,
            "h": self.h,
        }


def default_boundary_h(n: int) -> int:
    """ceil(log2(n)^2): the boundary/middle threshold used by the tail split."""
    return int(np.ceil(np.log2(n) ** 2))


def _round_ops(family: str) -> list[str]:
    if family == "RA":
        return ["A"]
    return ["A", "D"] if family == "RAD" else ["D", "A"]


def _base_vector(n: int, r: int) -> np.ndarray:
    """log2 of the repeated-message counts: v[r*w] = log2 C(n/r, w), w >= 1."""
    lg = _log2_comb_table(n // r)
    v = np.full(n + 1, -np.inf)
    for w in range(1, n // r + 1):
        v[r * w] = (lg[n // r] - lg[w] - lg[n // r - w]) / LN2
    return v


def _dp_step(v: np.ndarray, K: np.ndarray, chunk: int = 512) -> np.ndarray:
    """out[b] = log2 sum_a 2^(v[a] + K[a, b]), chunked over b."""
    n1 = K.shape[1]
    out = np.empty(n1)
    for s in range(0, n1, chunk):
        e = min(s + chunk, n1)
        out[s:e] = _logsumexp2(v[:, None] + K[:, s:e], axis=0)
    return out


def _iowef_vectors(spec: CodeSpec) -> tuple[np.ndarray, np.ndarray, dict[str, np.ndarray]]:
    """(v_pre, v_final, kernels): v_pre is the weight distribution entering the
    final round, v_final after it (both log2 expected counts over weights 0..n)."""
    n = spec.n
    if n > IOWEF_MAX_N:
        raise ValueError(f"iowef capped at n <= {IOWEF_MAX_N}")
    ops = _round_ops(spec.family)
    Ks = {op: _kernel_log2(n, op) for op in set(ops)}
    v = _base_vector(n, spec.r)
    for _ in range(spec.m - 1):
        for op in ops:
            v = _dp_step(v, Ks[op])
    v_pre = v
    v_final = v_pre
    for op in ops:
        v_final = _dp_step(v_final, Ks[op])
    return v_pre, v_final, Ks


def iowef_expected_count(spec: CodeSpec, d: int, h: Optional[int] = None) -> IowefResult:
    """Expected number of codewords per weight, the Markov bound sum over
    weights 1..d, and its boundary/middle split at threshold h."""
    n = spec.n
    if not 0 <= d <= n:
        raise ValueError("need 0 <= d <= n")
    if h is None:
        h = default_boundary_h(n)
    v_pre, v_final, Ks = _iowef_vectors(spec)
    ops = _round_ops(spec.family)

    def final_round(v: np.ndarray) -> np.ndarray:
        for op in ops:
            v = _dp_step(v, Ks[op])
        return v

    w = np.arange(n + 1)
    star_mask = (w >= 1) & ((w <= h) | (w >= n - h))
    star_v = np.where(star_mask, v_pre, -np.inf)
    starstar_v = np.where((w > h) & (w < n - h), v_pre, -np.inf)

    def below_d(v: np.ndarray) -> float:
        if d < 1:
            return 0.0
        return float(2.0 ** _logsumexp2(v[1 : d + 1], axis=0))

    star = below_d(final_round(star_v))
    starstar = below_d(final_round(starstar_v))
    return IowefResult(
        n=n,
        m=spec.m,
        family=spec.family,
        d=d,
        log2_counts=v_final,
        total_below_d=below_d(v_final),
        star=star,
        starstar=starstar,
        h=h,
    )


def markov_failure_bound(spec: CodeSpec, d: int) -> float:
    """Expected count of nonzero codewords of weight <= d: by Markov's
    inequality an upper bound on Pr[some nonzero codeword has weight <= d]."""
    if d < 1:
        return 0.0
    _, v_final, _ = _iowef_vectors(spec)
    return float(2.0 ** _logsumexp2(v_final[1 : d + 1], axis=0))


def weight_tail_expectation(
    spec: CodeSpec, h: int, which: Literal["star", "starstar"], d: int
) -> float:
    """One side of the boundary/middle split of the Markov bound.

    star restricts the weight entering the final round to [1, h] u [n-h, n]
    (endpoints inclusive); starstar to the open middle (h, n-h), so the two
    sides partition the bound exactly.  With h >= n/2 the middle is empty.
    """
    res = iowef_expected_count(spec, d, h=h)
    return res.star if which == "star" else res.starstar


def argmax_middle_weight(n: int, a: int, c: int) -> int:
    """Integer b maximizing p_A'(a, b) * p_D'(b, c), ties toward smaller b.

    The product is symmetric about b = n/2, so mirrored maximizers tie; the
    tie tolerance (1e-9 in log2) absorbs log-Gamma noise on those mirrors.
    """
    lo = (max(a, c) + 1) // 2
    hi = n - lo
    if lo > hi:
        raise ValueError("empty domain for middle weight")
    best_b, best_v = None, -inf
    for b in range(lo, hi + 1):
        v = log2_p_A_prime(n, a, b) + log2_p_D_prime(n, b, c)
        if v > best_v + 1e-9:
            best_b, best_v = b, v
    if best_b is None:
        raise ValueError("product vanishes on the whole domain")
    return best_b
