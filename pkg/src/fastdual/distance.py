"""Exact and sampled minimum-distance measurement at desk scale.

The exhaustive search walks all 2^k - 1 nonzero messages in Gray-code order:
each step XORs a single generator column into the running codeword, so a
chunk of steps is one xor-accumulate plus one popcount over packed words.
Partitioning the Gray index range gives a deterministic parallel reduction
whose result is independent of the shard count.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import sqrt
from typing import Literal, Optional

import numpy as np

from . import rng
from .bitvec import BitVector
from .codes import CodeSpec, EncoderChain, build_chain, generator_column_words, sample_pair

DEFAULT_MAX_K = 28
SPECTRUM_MAX_K = 24
_CHUNK = 1 << 18


def max_exhaustive_k() -> int:
    """Exhaustive-enumeration cap; FASTDUAL_MAX_K overrides (documented risk)."""
    env = os.environ.get("FASTDUAL_MAX_K")
    return int(env) if env else DEFAULT_MAX_K


@dataclass(frozen=True)
class DistanceReport:
    abs_distance: int
    rel_distance: float
    argmin_message: BitVector
    method: Literal["exhaustive", "sampled"]
    messages_scanned: int

    def to_json(self) -> dict:
        return {
            "abs_distance": self.abs_distance,
            "rel_distance": self.rel_distance,
            "argmin_message": self.argmin_message.to_string(),
            "method": self.method,
            "messages_scanned": self.messages_scanned,
        }


@dataclass(frozen=True)
class FailureEstimate:
    n: int
    m: int
    d: int
    trials: int
    failures: int
    p_hat: float
    wilson_interval: tuple[float, float]

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "d": self.d,
            "trials": self.trials,
            "failures": self.failures,
            "p_hat": self.p_hat,
            "wilson_low": self.wilson_interval[0],
            "wilson_high": self.wilson_interval[1],
        }


def wilson_interval(failures: int, trials: int, z: float = 1.96) -> tuple[float, float]:
    """95% Wilson score interval for a binomial proportion."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    p = failures / trials
    denom = 1 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = z * sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    return (max(0.0, center - half), min(1.0, center + half))


def _tz(idx: np.ndarray) -> np.ndarray:
    """Count of trailing zeros; exact because idx & -idx is a power of two."""
    return np.log2(np.bitwise_and(idx, -idx).astype(np.float64)).astype(np.int64)


def _gray_message(i: int, k: int) -> BitVector:
    g = i ^ (i >> 1)
    return BitVector.from_bits([((g >> j) & 1) for j in range(k)])


def _codeword_of_index(cols: np.ndarray, i: int) -> np.ndarray:
    """Codeword of message gray(i) as packed words (XOR of the set columns)."""
    g = i ^ (i >> 1)
    acc = np.zeros(cols.shape[1], dtype=np.uint64)
    j = 0
    while g:
        if g & 1:
            acc ^= cols[j]
        g >>= 1
        j += 1
    return acc


def _scan_range(cols: np.ndarray, start: int, stop: int) -> tuple[int, int]:
    """(best_weight, best_gray_index) over steps start+1 .. stop (inclusive)."""
    carry = _codeword_of_index(cols, start)
    best_w, best_i = np.iinfo(np.int64).max, -1
    for s in range(start + 1, stop + 1, _CHUNK):
        e = min(s + _CHUNK - 1, stop)
        idx = np.arange(s, e + 1, dtype=np.int64)
        gathered = cols[_tz(idx)]
        acc = np.bitwise_xor.accumulate(gathered, axis=0)
        acc ^= carry[None, :]
        weights = np.bitwise_count(acc).sum(axis=1, dtype=np.int64)
        j = int(np.argmin(weights))
        if int(weights[j]) < best_w:
            best_w, best_i = int(weights[j]), int(idx[j])
        carry = acc[-1].copy()
    return best_w, best_i


def exact_min_distance(
    chain: EncoderChain, shards: int = 1, threads: int = 1, max_k: Optional[int] = None
) -> DistanceReport:
    """True minimum weight over all nonzero messages, with a witness message."""
    cap = max_k if max_k is not None else max_exhaustive_k()
    if chain.k > cap:
        raise ValueError(
            f"exhaustive distance refused: k={chain.k} exceeds cap {cap} "
            "(set FASTDUAL_MAX_K to override)"
        )
    cols = generator_column_words(chain)
    total = (1 << chain.k) - 1
    shards = max(1, min(shards, total))
    bounds = [total * s // shards for s in range(shards + 1)]
    ranges = [(bounds[s], bounds[s + 1]) for s in range(shards)]
    if threads > 1 and shards > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda r: _scan_range(cols, *r), ranges))
    else:
        results = [_scan_range(cols, *r) for r in ranges]
    best_w, best_i = min(results)
    return DistanceReport(
        abs_distance=best_w,
        rel_distance=best_w / chain.n,
        argmin_message=_gray_message(best_i, chain.k),
        method="exhaustive",
        messages_scanned=total,
    )


def sampled_min_distance(chain: EncoderChain, samples: int, seed: int) -> DistanceReport:
    """Minimum weight over random nonzero messages: an upper bound on the true
    distance, reported as Monte Carlo evidence only."""
    from .codes import encode_words
    from .bitvec import n_words

    best_w, best_msg = None, None
    batch = 4096
    done = 0
    while done < samples:
        count = min(batch, samples - done)
        words = np.empty((count, n_words(chain.k)), dtype=np.uint64)
        for i in range(count):
            words[i] = rng.random_bits(chain.k, rng.derive_seed(seed, done + i))
        nz = np.bitwise_count(words).sum(axis=1) > 0
        words = words[nz]
        if words.size:
            cws = encode_words(chain, words, chain.k)
            weights = np.bitwise_count(cws).sum(axis=1, dtype=np.int64)
            j = int(np.argmin(weights))
            if best_w is None or int(weights[j]) < best_w:
                best_w = int(weights[j])
                best_msg = BitVector(words[j], chain.k)
        done += count
    if best_w is None:
        raise ValueError("no nonzero message sampled; increase samples")
    return DistanceReport(
        abs_distance=best_w,
        rel_distance=best_w / chain.n,
        argmin_message=best_msg,
        method="sampled",
        messages_scanned=samples,
    )


def chain_for_trial(n: int, m: int, family: str, trial_seed: int) -> EncoderChain:
    """RDA -> primal of a sampled dual pair, RAD -> its dual, RA -> plain RA chain."""
    if family == "RA":
        return build_chain(CodeSpec(family="RA", n=n, m=m, r=2, seed=trial_seed))
    pair = sample_pair(n, m, trial_seed)
    return pair.primal if family == "RDA" else pair.dual


def empirical_failure_rate(
    n: int,
    m: int,
    family: str,
    d: int,
    trials: int,
    seed: int,
    max_k: Optional[int] = None,
) -> FailureEstimate:
    """Fraction of sampled codes whose exact distance is < d (independent seeds
    derived from `seed`), with a 95% Wilson interval.  Fixed seed, fixed output."""
    failures = 0
    for t in range(trials):
        chain = chain_for_trial(n, m, family, rng.derive_seed(seed, t))
        rep = exact_min_distance(chain, max_k=max_k)
        if rep.abs_distance < d:
            failures += 1
    return FailureEstimate(
        n=n,
        m=m,
        d=d,
        trials=trials,
        failures=failures,
        p_hat=failures / trials,
        wilson_interval=wilson_interval(failures, trials),
    )


def weight_spectrum(
    chain: EncoderChain,
    mode: Literal["exhaustive", "sampled"] = "exhaustive",
    samples: int = 100_000,
    seed: int = 0,
    max_k: int = SPECTRUM_MAX_K,
) -> np.ndarray:
    """Histogram over codeword weights 0..n.

    Exhaustive counts every message (2^k total, including the zero word);
    sampled returns Monte Carlo estimates scaled by 2^k.
    """
    n = chain.n
    if mode == "exhaustive":
        if chain.k > max_k:
            raise ValueError(f"exhaustive spectrum refused: k={chain.k} exceeds cap {max_k}")
        cols = generator_column_words(chain)
        hist = np.zeros(n + 1, dtype=np.int64)
        hist[0] = 1  # zero message
        total = (1 << chain.k) - 1
        carry = np.zeros(cols.shape[1], dtype=np.uint64)
        for s in range(1, total + 1, _CHUNK):
            e = min(s + _CHUNK - 1, total)
            idx = np.arange(s, e + 1, dtype=np.int64)
            acc = np.bitwise_xor.accumulate(cols[_tz(idx)], axis=0)
            acc ^= carry[None, :]
            weights = np.bitwise_count(acc).sum(axis=1, dtype=np.int64)
            hist += np.bincount(weights, minlength=n + 1)
            carry = acc[-1].copy()
        return hist
    from .codes import encode_words
    from .bitvec import n_words

    counts = np.zeros(n + 1, dtype=np.int64)
    done = 0
    while done < samples:
        count = min(4096, samples - done)
        words = np.empty((count, n_words(chain.k)), dtype=np.uint64)
        for i in range(count):
            words[i] = rng.random_bits(chain.k, rng.derive_seed(seed, done + i))
        cws = encode_words(chain, words, chain.k)
        weights = np.bitwise_count(cws).sum(axis=1, dtype=np.int64)
        counts += np.bincount(weights, minlength=n + 1)
        done += count
    return counts / samples * float(2**chain.k)
