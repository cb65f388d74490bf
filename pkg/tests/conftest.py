"""Shared test helpers: naive reference implementations used as independent
oracles against the packed word-level code, plus batch random data."""
from __future__ import annotations

import numpy as np

from fastdual import rng
from fastdual.bitvec import BitVector, n_words

_ACCEPTANCE_LINES: list[str] = []


def record_acceptance(line: str) -> None:
    _ACCEPTANCE_LINES.append(line)
    print(line, flush=True)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def naive_accumulate(bits: list[int]) -> list[int]:
    out, s = [], 0
    for b in bits:
        s ^= b
        out.append(s)
    return out


def naive_derivative(bits: list[int]) -> list[int]:
    return [b ^ (bits[i - 1] if i else 0) for i, b in enumerate(bits)]


def naive_accumulate_t(bits: list[int]) -> list[int]:
    out, s = [], 0
    for b in reversed(bits):
        s ^= b
        out.append(s)
    return out[::-1]


def naive_derivative_t(bits: list[int]) -> list[int]:
    n = len(bits)
    return [bits[i] ^ (bits[i + 1] if i + 1 < n else 0) for i in range(n)]


def naive_repeat(bits: list[int], r: int) -> list[int]:
    out = []
    for b in bits:
        out.extend([b] * r)
    return out


def naive_permute(bits: list[int], perm) -> list[int]:
    return [bits[perm[i]] for i in range(len(bits))]


def random_bitvector(n: int, seed: int) -> BitVector:
    return BitVector.random(n, seed)


def random_word_batch(count: int, n: int, seed: int) -> np.ndarray:
    """(count, n_words(n)) uint64 with tail bits zeroed, from one seeded stream."""
    w = n_words(n)
    words = rng.stream_u64(seed, count * w).reshape(count, w)
    tail = n % 64
    if tail:
        words[:, -1] &= np.uint64((1 << tail) - 1)
    return words
