"""JSON-level operations shared by the CLI and the HTTP service.

Every function takes plain parameters and returns a JSON-serializable dict
(or CSV text for spectral tables), so both front ends stay thin and produce
identical output for identical inputs.
"""
from __future__ import annotations

from typing import Optional

import numpy as np

from . import distance as dist
from . import emvp, spectral, transitions
from .bitvec import BitVector
from .codes import (
    CodeSpec,
    build_chain,
    dual_product_check,
    materialize,
    rank,
    sample_pair,
)


def _chain_from_params(family: str, n: int, m: int, seed: int, transposed: bool = False):
    if family in ("RDA", "RAD") and transposed == (family == "RAD"):
        pair = sample_pair(n, m, seed)
        return pair.primal if family == "RDA" else pair.dual
    return build_chain(CodeSpec(family=family, n=n, m=m, r=2, seed=seed, transposed=transposed))


def sample_spec(family: str, n: int, m: int, seed: int, r: int = 2,
                expand: bool = False) -> dict:
    spec = CodeSpec(family=family, n=n, m=m, r=r, seed=seed)
    out = spec.to_json()
    if expand:
        out["perms"] = [p.to_json() for p in spec.resolve_perms()]
    return out


def encode_message(family: str, n: int, m: int, seed: int, message: str,
                   transposed: bool = False) -> dict:
    chain = _chain_from_params(family, n, m, seed, transposed)
    msg = BitVector.from_string(message)
    from .codes import encode

    cw = encode(chain, msg)
    return {"family": family, "n": n, "m": m, "seed": seed, "k": chain.k,
            "message": msg.to_string(), "codeword": cw.to_string(),
            "weight": cw.weight()}


def dual_check(n: int, m: int, seed: int) -> dict:
    pair = sample_pair(n, m, seed)
    ok, violation = dual_product_check(pair)
    out = {"n": n, "m": m, "seed": seed, "ok": ok}
    if violation is not None:
        out["violation"] = {"row": violation[0], "col": violation[1]}
    return out


def distance_report(family: str, n: int, m: int, seed: int, sampled: bool = False,
                    samples: int = 100_000, threads: int = 1) -> dict:
    chain = _chain_from_params(family, n, m, seed)
    if sampled:
        rep = dist.sampled_min_distance(chain, samples=samples, seed=seed)
    else:
        rep = dist.exact_min_distance(chain, shards=max(1, threads), threads=threads)
    out = {"family": family, "n": n, "m": m, "seed": seed}
    out.update(rep.to_json())
    return out


def failure_rate(family: str, n: int, m: int, d: int, trials: int, seed: int) -> dict:
    est = dist.empirical_failure_rate(n, m, family, d, trials, seed)
    out = {"family": family}
    out.update(est.to_json())
    return out


def iowef(family: str, n: int, m: int, d: int, h: Optional[int] = None,
          seed: int = 0) -> dict:
    spec = CodeSpec(family=family, n=n, m=m, r=2, seed=seed)
    return transitions.iowef_expected_count(spec, d, h=h).to_json()


def tail_split(family: str, n: int, m: int, d: int, h: Optional[int] = None) -> dict:
    spec = CodeSpec(family=family, n=n, m=m, r=2, seed=0)
    res = transitions.iowef_expected_count(spec, d, h=h)
    return {"family": family, "n": n, "m": m, "d": d, "h": res.h,
            "star": res.star, "starstar": res.starstar, "total": res.total_below_d}


def spectral_table(family: str, m: int, tau: float = 0.0, grid_step: float = 1e-3,
                   r: int = 2) -> spectral.SpectralTable:
    return spectral.spectral_recursion(family, m, tau=tau, grid_step=grid_step, r=r)


def delta(m: int, tol: float = 1e-9, grid_check: bool = False,
          grid_step: float = 1e-3) -> dict:
    est = spectral.delta_m_solver(m, tol=tol)
    out = est.to_json()
    if grid_check:
        table = spectral.spectral_recursion("A", m + 1, tau=0.0, grid_step=grid_step)
        out["grid_delta"] = spectral.delta_from_grid(table).delta
    return out


def emvp_demo(n: int, m: int, rows: int, seed: int, queries: int = 20) -> dict:
    return emvp.run_demo(n=n, m=m, rows=rows, seed=seed, queries=queries)


def bench_encode(m: int = 4, log2_n_min: int = 14, log2_n_max: int = 20,
                 reps: int = 9, seed: int = 0) -> dict:
    """Median single-encode times across doubling block lengths, plus ratios."""
    import time

    from . import rng as _rng
    from .codes import encode

    sizes = [1 << e for e in range(log2_n_min, log2_n_max + 1)]
    medians = []
    for n in sizes:
        pair = sample_pair(n, m, seed)
        msg = BitVector.random(n // 2, _rng.derive_seed(seed, n))
        encode(pair.primal, msg)  # warm up
        times = []
        for _ in range(reps):
            t0 = time.perf_counter()
            encode(pair.primal, msg)
            times.append(time.perf_counter() - t0)
        times.sort()
        medians.append(times[len(times) // 2])
    ratios = [medians[i + 1] / medians[i] for i in range(len(medians) - 1)]
    rs = sorted(ratios)
    mid = len(rs) // 2
    median_ratio = rs[mid] if len(rs) % 2 else 0.5 * (rs[mid - 1] + rs[mid])
    return {
        "m": m,
        "sizes": sizes,
        "median_seconds": medians,
        "doubling_ratios": ratios,
        "median_doubling_ratio": median_ratio,
    }


def rank_info(family: str, n: int, m: int, seed: int) -> dict:
    if family in ("RDA", "RAD"):
        pair = sample_pair(n, m, seed)
        return {"n": n, "m": m, "seed": seed,
                "rank_primal": rank(materialize(pair.primal)),
                "rank_dual": rank(materialize(pair.dual))}
    chain = _chain_from_params(family, n, m, seed)
    return {"n": n, "m": m, "seed": seed, "rank": rank(materialize(chain))}


def verify_bounds(grid_step: float = 5e-3, n_ratio_max: int = 120) -> list[dict]:
    """The analytic inequality suites at a desk-quick resolution.

    Each entry is one named check with its measured worst case; `ok` reflects
    the stated tolerance.  The ratio scan covers the interior primed domain
    (margin >= 3 from the boundary), where the 2.17 constant genuinely holds.
    """
    checks: list[dict] = []
    g = np.arange(grid_step, 1.0, grid_step)

    def record(name: str, worst: float, tol: float) -> None:
        checks.append({"check": name, "worst": float(worst), "tol": tol,
                       "ok": bool(worst <= tol)})

    # f_DA, f_AD <= g on a 3-d grid
    worst_da, worst_ad = -np.inf, -np.inf
    FA = spectral.f_A_grid(g, g)
    FD = spectral.f_D_grid(g, g)
    H = spectral._h_arr(g)
    for ig, gamma in enumerate(g):
        genv = np.array([spectral.g_envelope(a, gamma) for a in g])
        da = FD + FA[:, ig][None, :]  # (alpha, beta)
        ad = FA + FD[:, ig][None, :]
        with np.errstate(invalid="ignore"):
            worst_da = max(worst_da, np.max(np.max(da, axis=1) - genv))
            worst_ad = max(worst_ad, np.max(np.max(ad, axis=1) - genv))
    record("f_DA <= g (grid)", worst_da, 1e-9)
    record("f_AD <= g (grid)", worst_ad, 1e-9)

    # Lemma-style pointwise inequalities
    diff = FA - (H[None, :] - H[:, None])
    record("f_A <= h(b) - h(a)", np.max(diff[np.isfinite(diff)]), 1e-10)
    diffd = FD - (H[None, :] - H[:, None])
    record("f_D <= h(b) - h(a)", np.max(diffd[np.isfinite(diffd)]), 1e-10)

    # primed-ratio constant on the interior domain
    worst = 0.0
    for n in range(8, n_ratio_max + 1):
        for a in range(1, n + 1):
            for b in range(1, n + 1):
                if min(b - a / 2, n - a / 2 - b) < 3:
                    continue
                la = transitions.log2_p_A_prime(n, a, b)
                if not np.isfinite(la):
                    continue
                p = float(transitions.p_A_exact(n, a, b))
                if p:
                    worst = max(worst, p / 2.0**la)
    record("p_A / p_A' <= 2.17 (interior)", worst, 2.17)
    return checks
